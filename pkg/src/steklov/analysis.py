"""Spectral comparisons: gaps to the boundary Laplacian, Weyl asymptotics,
mu-sweeps of the DtN family, commutator probes, Robin corner asymptotics and
Friedlander-type counting on the disk."""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bem import dtn_operator, steklov_spectrum
from .errors import PoleError
from .geometry import TWO_PI, make_curve
from .identities import spectral_derivative
from .linalg import operator_norm_2, sym_eig
from .oracles import (
    circle_laplace_spectrum,
    disk_dirichlet_neumann_eigs,
    disk_dtn_eigs,
    disk_dtn_n_max,
    disk_dtn_value,
    square_robin_eigs,
)
from .specfun import bessel_zeros_below
from .spectrum import Spectrum

POLE_OFFSET = 1e-3


def worker_count(n_jobs=None):
    """Thread count from STEKLOV_THREADS (0 or unset means one per CPU)."""
    raw = os.environ.get("STEKLOV_THREADS", "0").strip() or "0"
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"STEKLOV_THREADS must be an integer, got {raw!r}") from exc
    if cap < 0:
        raise ValueError("STEKLOV_THREADS must be nonnegative")
    n = cap or (os.cpu_count() or 1)
    return max(1, min(n, n_jobs)) if n_jobs else max(1, n)


def _parallel_map(fn, items):
    # results come back in input order regardless of scheduling
    items = list(items)
    n = worker_count(len(items))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# --- boundary Laplacian ---------------------------------------------------------

@dataclass(frozen=True)
class BoundaryLaplacianMatrix:
    """-d^2/ds^2 on N arclength-uniform nodes of a closed curve of length L."""

    matrix: np.ndarray
    length: float

    @property
    def N(self):
        return self.matrix.shape[0]


def fourier_symbol(N, length):
    """(2 pi j / L)^2 in numpy FFT ordering, the Nyquist mode included."""
    j = np.fft.fftfreq(N, 1.0 / N)
    return (TWO_PI * j / length) ** 2


def _fourier_operator(N, symbol):
    # real symmetric matrix of the Fourier multiplier with an even symbol
    return np.real(np.fft.ifft(symbol[:, None] * np.fft.fft(np.eye(N), axis=0), axis=0))


def boundary_laplacian_matrix(N, length):
    if N < 2:
        raise ValueError("need at least two nodes")
    if length <= 0:
        raise ValueError("length must be positive")
    A = _fourier_operator(N, fourier_symbol(N, length))
    return BoundaryLaplacianMatrix(0.5 * (A + A.T), float(length))


def band_projector(N, band=None):
    """Orthogonal projector onto Fourier modes |j| < band (default N/4)."""
    band = N / 4 if band is None else band
    j = np.fft.fftfreq(N, 1.0 / N)
    P = _fourier_operator(N, (np.abs(j) < band).astype(float))
    return 0.5 * (P + P.T)


def boundary_laplacian_spectrum(curve, k_max):
    return circle_laplace_spectrum(make_curve(curve).length, k_max)


# --- Weyl asymptotics ---------------------------------------------------------------

def weyl_counting(spectrum, sigma):
    """#(entries < sigma)."""
    vals = spectrum.values if isinstance(spectrum, Spectrum) else np.asarray(spectrum, dtype=float)
    return int(np.count_nonzero(vals < sigma))


def weyl_constant(d, boundary_volume):
    """vol(B^{d-1}) vol(M) / (2 pi)^{d-1}, the leading Weyl coefficient."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    m = d - 1
    ball = math.pi ** (m / 2) / math.gamma(m / 2 + 1)
    return ball * boundary_volume / TWO_PI ** m


@dataclass(frozen=True)
class WeylDeviation:
    k: np.ndarray
    deviation: np.ndarray   # sigma_k - pi k / L
    sup: float


def weyl_deviation_2d(spectrum, length, ks=None):
    """Deviation of sigma_k (k from 1) from the two-dimensional Weyl term pi k / L."""
    vals = spectrum.values if isinstance(spectrum, Spectrum) else np.asarray(spectrum, dtype=float)
    ks = np.arange(1, vals.size + 1) if ks is None else np.asarray(list(ks), dtype=int)
    if ks.size and (ks.min() < 1 or ks.max() > vals.size):
        raise ValueError("k range exceeds the spectrum")
    dev = vals[ks - 1] - np.pi * ks / length
    return WeylDeviation(ks, dev, float(np.abs(dev).max(initial=0.0)))


# --- gaps ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapReport:
    sigma: np.ndarray
    sqrt_shifted_lambda: np.ndarray
    gap: np.ndarray
    max_gap: float
    C_F: float
    mu: float
    passed: bool


def gap_report(sigma, lam, mu, C_F):
    """g_k = |sigma_{mu,k} - sqrt(lambda_k - mu)| against the constant C_F."""
    if mu > 0:
        raise ValueError("gap reports need mu <= 0")
    s = sigma.values if isinstance(sigma, Spectrum) else np.asarray(sigma, dtype=float)
    lv = lam.values if isinstance(lam, Spectrum) else np.asarray(lam, dtype=float)
    if s.shape != lv.shape:
        raise ValueError(f"length mismatch: {s.size} DtN vs {lv.size} Laplacian eigenvalues")
    root = np.sqrt(lv - mu)
    g = np.abs(s - root)
    mg = float(g.max(initial=0.0))
    return GapReport(s, root, g, mg, float(C_F), float(mu), mg <= C_F)


def steklov_gap(curve, N, mu, k_max, C_F):
    """BEM spectrum at mu against the circle spectrum of the same length."""
    curve = make_curve(curve)
    sig = steklov_spectrum(curve, N, mu, k_max)
    return gap_report(sig, circle_laplace_spectrum(curve.length, k_max), mu, C_F)


@dataclass(frozen=True)
class GppsDecay:
    k: np.ndarray
    d: np.ndarray
    floor: float


def gpps_decay(curve, N, ks=None):
    """d_k = |sigma_k - sqrt(lambda_k)| for a single smooth boundary component."""
    curve = make_curve(curve)
    k_max = N // 4
    ks = np.arange(1, k_max + 1) if ks is None else np.asarray(list(ks), dtype=int)
    sig = steklov_spectrum(curve, N, 0.0, int(ks.max()))
    lam = circle_laplace_spectrum(curve.length, int(ks.max()))
    d = np.abs(sig.values - np.sqrt(lam.values))[ks - 1]
    # the tail of the resolved range sits on the discretization floor
    floor = float(np.median(d[-max(1, d.size // 4):]))
    return GppsDecay(ks, d, floor)


@dataclass(frozen=True)
class BoundRealization:
    sigma: np.ndarray
    defect: np.ndarray      # |<Du,Du> - <u_s,u_s>| / <Du,u>
    C_F: float
    passed: bool


def bound_realization(op, C_F, k_max=None):
    """|<Du,Du> - <grad_M u, grad_M u>| <= C_F <Du,u> on eigenvectors of D_h."""
    k_max = op.N // 4 if k_max is None else k_max
    w, V = sym_eig(op.matrix)
    h = op.grid.h
    V = V[:, :k_max] / math.sqrt(h)
    Du = op.matrix @ V
    us = spectral_derivative(V, op.grid.length)
    lhs = np.abs(h * (Du * Du).sum(0) - h * (us * us).sum(0))
    energy = h * (Du * V).sum(0)
    # the constant mode has zero energy and zero defect
    with np.errstate(divide="ignore", invalid="ignore"):
        defect = np.where(energy > 1e-12, lhs / energy, 0.0)
    ok = bool(np.all(lhs <= C_F * np.maximum(energy, 0.0) + 1e-9))
    return BoundRealization(w[:k_max], defect, float(C_F), ok)


# --- mu sweeps -------------------------------------------------------------------------

def disk_dirichlet_poles(R, mu_min, mu_max):
    """Distinct Dirichlet eigenvalues (j_{n,k}/R)^2 in [mu_min, mu_max]."""
    if mu_max <= 0:
        return np.zeros(0)
    bound = math.sqrt(mu_max) * R
    out = []
    n = 0
    while True:
        zs = bessel_zeros_below("J", n, bound * (1 + 1e-15))
        if not zs:
            break
        out.extend((z / R) ** 2 for z in zs)
        n += 1
    out = np.unique(np.round(out, 12))
    return out[(out >= mu_min) & (out <= mu_max)]


def offset_poles(mu_grid, poles, offset=POLE_OFFSET, bracket=True):
    """Move samples within ``offset`` of a pole to pole -/+ offset, outward.

    With ``bracket`` every pole inside the grid range also gets the pair of
    samples pole - offset, pole + offset.
    """
    mu = np.asarray(mu_grid, dtype=float).copy()
    for p in poles:
        near = np.abs(mu - p) < offset
        mu[near] = np.where(mu[near] < p, p - offset, p + offset)
    if bracket and len(poles) and mu.size:
        lo, hi = mu.min(), mu.max()
        extra = [v for p in poles for v in (p - offset, p + offset) if lo <= v <= hi]
        mu = np.concatenate([mu, extra])
    return np.unique(mu)


@dataclass
class SweepTable:
    mu: np.ndarray
    sigma: np.ndarray                # (n_mu, k_max) sorted D_mu eigenvalues
    sqrt_shifted_lambda: np.ndarray  # (n_mu, k_max), NaN where lambda_k < mu
    poles: np.ndarray
    branches: np.ndarray = None      # (n_mu, n_orders) per-order disk values
    meta: dict = field(default_factory=dict)

    @property
    def k_max(self):
        return self.sigma.shape[1]

    def rows(self):
        """(mu, k, sigma, sqrt(lambda_k - mu)) ordered by mu, then k."""
        out = []
        for i, m in enumerate(self.mu):
            for k in range(self.k_max):
                out.append((float(m), k + 1, float(self.sigma[i, k]), float(self.sqrt_shifted_lambda[i, k])))
        return out


def mu_sweep(domain, mu_grid, k_max, N=None, n_branches=None, offset=POLE_OFFSET):
    """D_mu eigenvalues along a mu grid, with the companion sqrt(lambda_k - mu).

    Disks use the analytic oracle (any real mu, poles offset and bracketed);
    other curves use the BEM with N nodes and need mu <= 0.
    """
    curve = make_curve(domain)
    mu_grid = np.asarray(mu_grid, dtype=float)
    if curve.kind == "disk":
        R = curve.p["R"]
        poles = disk_dirichlet_poles(R, mu_grid.min(initial=0.0), mu_grid.max(initial=0.0))
        mu = offset_poles(mu_grid, poles, offset)
        n_branches = k_max if n_branches is None else n_branches

        def job(m):
            s = disk_dtn_eigs(R, m, disk_dtn_n_max(k_max, m, R)).values[:k_max]
            b = [disk_dtn_value(n, m, R) for n in range(n_branches)]
            return s, b

        res = _parallel_map(job, mu)
        sigma = np.array([r[0] for r in res]).reshape(len(mu), k_max)
        branches = np.array([r[1] for r in res]).reshape(len(mu), n_branches)
    else:
        if np.any(mu_grid > 0):
            raise ValueError("BEM sweeps need mu <= 0")
        N = 4 * k_max if N is None else N
        mu = np.unique(mu_grid)
        poles = np.zeros(0)
        res = _parallel_map(lambda m: steklov_spectrum(curve, N, m, k_max).values, mu)
        sigma = np.array(res).reshape(len(mu), k_max)
        branches = None
    lam = circle_laplace_spectrum(curve.length, k_max).values
    shifted = lam[None, :] - mu[:, None]
    with np.errstate(invalid="ignore"):
        root = np.where(shifted >= 0, np.sqrt(np.maximum(shifted, 0.0)), np.nan)
    meta = {"domain": curve.to_spec(), "N": N, "k_max": k_max}
    return SweepTable(mu, sigma, root, poles, branches, meta)


def pole_sign_flip(R, n, pole, offset=POLE_OFFSET):
    """Order-n disk values just below and above a Dirichlet eigenvalue."""
    return disk_dtn_value(n, pole - offset, R), disk_dtn_value(n, pole + offset, R)


# --- commutator probe --------------------------------------------------------------------

@dataclass(frozen=True)
class CommutatorProbe:
    N: int
    comm_normalized: float
    d2_normalized: float
    comm_norm: float
    lap_norm: float
    dtn_norm: float


def commutator_probe(curve, N, op=None):
    """Normalized ||[Lap, D]|| and ||D^2 - Lap|| on the resolved Fourier band.

    Both operators are projected onto |j| < N/4 before composing, so grid
    modes near Nyquist do not enter.
    """
    curve = make_curve(curve)
    if op is None:
        op = dtn_operator(curve, N, 0.0)
    elif op.mu != 0 or op.N != N:
        raise ValueError("commutator probe needs the mu = 0 operator on N nodes")
    P = band_projector(N)
    lap = boundary_laplacian_matrix(N, op.grid.length).matrix
    L = P @ lap @ P
    D = P @ op.matrix @ P
    C = L @ D - D @ L
    nl, nd = operator_norm_2(L), operator_norm_2(D)
    nc = operator_norm_2(C)
    n2 = operator_norm_2(D @ D - L)
    return CommutatorProbe(N, nc / (nl * nd), n2 / nl, nc, nl, nd)


# --- Robin corners ----------------------------------------------------------------------

@dataclass(frozen=True)
class CornerReport:
    gamma: np.ndarray
    mu1: np.ndarray
    ratio: np.ndarray       # mu^R_{gamma,1} / gamma^2
    gap_bound: np.ndarray   # sqrt(-mu^R_{gamma,1}) - |gamma|


def corner_nonuniformity(a, gammas):
    """Lowest Robin eigenvalue of the square of side a for each gamma < 0."""
    g = np.asarray(gammas, dtype=float)
    if np.any(g >= 0):
        raise ValueError("corner demonstration needs gamma < 0")
    mu1 = np.array([square_robin_eigs(a, x, 1).values[0] for x in g])
    return CornerReport(g, mu1, mu1 / g ** 2, np.sqrt(-mu1) - np.abs(g))


# --- Friedlander and counting -------------------------------------------------------------

@dataclass(frozen=True)
class FriedlanderReport:
    R: float
    mu: float
    inequality: np.ndarray   # mu^N_{k+1} <= mu^D_k, k = 1..k_max
    n_neumann: int
    n_dirichlet: int
    n_negative_dtn: int

    @property
    def counting_holds(self):
        return self.n_neumann - self.n_dirichlet == self.n_negative_dtn


def friedlander_and_counting(R, mu, k_max=50, tol=1e-4):
    """Friedlander inequalities and N^N(mu) - N^D(mu) = #(negative D_mu eigenvalues)."""
    poles = disk_dirichlet_poles(R, mu - 1.0, mu + 1.0)
    close = poles[np.abs(poles - mu) < tol]
    if close.size:
        raise PoleError(f"mu={mu} is within {tol} of the Dirichlet eigenvalue {close[0]:.12g}",
                        n=None, dirichlet_eigenvalue=float(close[0]))
    dirichlet = disk_dirichlet_neumann_eigs(R, k_max, "D").values
    neumann = disk_dirichlet_neumann_eigs(R, k_max + 1, "N").values
    ineq = neumann[1:] <= dirichlet
    count = max(k_max, 4)
    while True:
        nD = disk_dirichlet_neumann_eigs(R, count, "D").values
        nN = disk_dirichlet_neumann_eigs(R, count, "N").values
        if nD[-1] > mu and nN[-1] > mu:
            break
        count *= 2
    n_d, n_n = int(np.count_nonzero(nD < mu)), int(np.count_nonzero(nN < mu))
    # sigma_n(mu) < 0 needs sqrt(mu) R beyond the first zero of J_n', which exceeds n
    n_max = int(math.sqrt(max(mu, 0.0)) * R) + 2
    neg = disk_dtn_eigs(R, mu, n_max).values
    return FriedlanderReport(float(R), float(mu), ineq, n_n, n_d, int(np.count_nonzero(neg < 0)))
