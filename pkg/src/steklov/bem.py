"""Nystrom discretization of the Dirichlet-to-Neumann map D_mu (mu <= 0).

The interior extension is written as a single-layer potential U = S phi.
Its Dirichlet trace is S phi and its normal derivative (1/2 I + K') phi, so
D = (1/2 I + K') S^{-1} on the boundary grid.  Log singularities are handled
with Kress's product quadrature on an arclength-uniform grid.

For large sqrt(-mu) the log part is split off only inside a smooth window of
width ~10/k around the target (I_0 would overflow otherwise), and sources
are trigonometrically upsampled so the kernel decay scale 1/k is resolved.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg as sla
from scipy import special

from .errors import NumericalError
from .geometry import TWO_PI, BoundaryGrid, arclength_reparameterize, closest_point, make_curve
from .linalg import sym_eig
from .spectrum import Spectrum

# the log part is windowed once k * diameter exceeds this
WINDOW_KD = 10.0
# fine-grid spacing must resolve the kernel decay scale 1/k
FINE_SPACING_K = 0.1
DILATED_DIAMETER = 0.5


def kress_weights(N):
    """R(j * 2pi/N) for j = 0..N-1: exact weights for int ln(4 sin^2((t-s)/2)) f(s) ds."""
    if N % 2:
        raise ValueError("N must be even")
    n = N // 2
    m = np.arange(n + 1)
    coef = np.zeros(n + 1)
    coef[1:n] = -(2 * np.pi / n) / m[1:n]
    coef[n] = -np.pi / n ** 2
    # sum_m coef_m cos(m t_j) as an inverse real FFT
    spec = coef * (N / 2.0)
    spec[n] = coef[n] * N
    return np.fft.irfft(spec, N)


def trig_upsample(values, p):
    """Values of the trigonometric interpolant on a grid p times finer (axis 0).

    The Nyquist mode is split evenly between +N/2 and -N/2.
    """
    v = np.asarray(values, dtype=float)
    if p == 1:
        return v.copy()
    N = v.shape[0]
    Nf = N * p
    V = np.fft.rfft(v, axis=0)
    shape = (Nf // 2 + 1,) + v.shape[1:]
    Vf = np.zeros(shape, dtype=complex)
    Vf[: N // 2] = V[: N // 2]
    Vf[N // 2] = 0.5 * V[N // 2]
    return np.fft.irfft(Vf * p, Nf, axis=0)


def interpolation_matrix(N, p):
    """The (pN x N) matrix of :func:`trig_upsample`."""
    return trig_upsample(np.eye(N), p)


def _smooth_step(x):
    # C-infinity step: 0 for x <= 0, 1 for x >= 1
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        g = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return f / (f + g)


def window(dist, a, b):
    """1 for dist <= a, 0 for dist >= b, smooth in between."""
    return 1.0 - _smooth_step((np.asarray(dist) - a) / (b - a))


def _scaled_grid(grid, t):
    if t == 1.0:
        return grid
    return BoundaryGrid(
        curve=grid.curve.dilate(t),
        t=grid.t,
        points=grid.points * t,
        normals=grid.normals,
        tangents=grid.tangents,
        curvature=grid.curvature / t,
        length=grid.length * t,
    )


def _wave_number(mu):
    if mu > 0:
        raise ValueError("boundary-integral solves are limited to mu <= 0")
    return float(np.sqrt(-mu))


def _upsampling(grid_length, N, k):
    if k == 0.0:
        return 1
    # the log coefficient I_0(kr) varies, so M1 * phi must be resolved beyond
    # the coarse Nyquist frequency or the near-Nyquist modes of S alias
    p = 2
    while grid_length / (N * p) > FINE_SPACING_K / k:
        p *= 2
    return p


def _layer_rows(fine, p, k, windowed):
    """Rows of S and K' for the coarse targets (every p-th fine node) against fine sources."""
    Nf = fine.N
    N = Nf // p
    c = fine.length / TWO_PI
    rows = np.arange(N) * p
    x = fine.points[rows]
    nx = fine.normals[rows]
    kap = fine.curvature[rows]
    diff = x[:, None, :] - fine.points[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    idx = (np.arange(Nf)[None, :] - rows[:, None]) % Nf
    on_diag = idx == 0
    delta = TWO_PI * idx / Nf
    with np.errstate(divide="ignore"):
        logsin = np.where(on_diag, 0.0, np.log(4.0 * np.sin(0.5 * delta) ** 2))
    rsafe = np.where(on_diag, 1.0, r)
    dn = np.where(on_diag, 0.0, (diff * nx[:, None, :]).sum(-1) / rsafe)
    Rw = kress_weights(Nf)[idx]
    q = TWO_PI / Nf
    diag_K = -c * kap / (4 * np.pi)
    if k == 0.0:
        M1 = -c / (4 * np.pi)
        M2 = -(c / (4 * np.pi)) * (2 * np.log(rsafe) - logsin)
        M2[on_diag] = -(c / (2 * np.pi)) * np.log(c)
        L2 = -(c / (2 * np.pi)) * dn / rsafe
        L2[on_diag] = diag_K
        return Rw * M1 + q * M2, q * L2
    kr = k * rsafe
    if windowed:
        b = WINDOW_KD / k
        h = fine.length / Nf
        dist = np.minimum(idx, Nf - idx) * h
        w = window(dist, 0.3 * b, b)
        kr_log = np.where((w > 0) & ~on_diag, kr, 0.0)
    else:
        w = 1.0
        kr_log = np.where(on_diag, 0.0, kr)
    M1 = -(c / (4 * np.pi)) * special.i0(kr_log) * w
    M2 = (c / (2 * np.pi)) * special.k0(kr) - M1 * logsin
    M2[on_diag] = (c / (2 * np.pi)) * (-np.log(0.5 * k * c) - np.euler_gamma)
    L1 = -(c * k / (4 * np.pi)) * special.i1(kr_log) * dn * w
    L2 = -(c * k / (2 * np.pi)) * special.k1(kr) * dn - L1 * logsin
    L1 = np.where(on_diag, 0.0, L1)
    L2[on_diag] = diag_K
    return Rw * M1 + q * M2, Rw * L1 + q * L2


@dataclass
class LayerSystem:
    """Layer matrices on the (possibly dilated) assembly grid.

    ``scale`` is the dilation factor t applied before assembly (x -> t x);
    ``upsample`` the source refinement factor used for large k.
    """

    curve: object
    grid: BoundaryGrid
    assembly_grid: BoundaryGrid
    mu: float
    scale: float
    upsample: int
    S: np.ndarray
    Kp: np.ndarray
    _chol: tuple = field(default=None, repr=False)

    @property
    def k(self):
        return _wave_number(self.mu)

    @property
    def cho(self):
        if self._chol is None:
            try:
                self._chol = sla.cho_factor(self.S, lower=True)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(
                    "single-layer matrix is not positive definite; assembly is inconsistent"
                ) from exc
        return self._chol

    def solve(self, u):
        return sla.cho_solve(self.cho, u)


def layer_system(curve, N, mu):
    curve = make_curve(curve)
    if N < 32:
        raise ValueError("N must be at least 32")
    k = _wave_number(mu)
    grid = arclength_reparameterize(curve, N)
    scale = DILATED_DIAMETER / curve.diameter if k == 0.0 else 1.0
    windowed = k * curve.diameter > WINDOW_KD
    p = _upsampling(curve.length, N, k)
    fine = grid if p == 1 else arclength_reparameterize(curve, N * p)
    fine = _scaled_grid(fine, scale)
    S, Kp = _layer_rows(fine, p, k, windowed)
    if p > 1:
        P = interpolation_matrix(N, p)
        S, Kp = S @ P, Kp @ P
    S = 0.5 * (S + S.T)
    return LayerSystem(curve, grid, _scaled_grid(grid, scale), float(mu), scale, p, S, Kp)


def assemble_layer_matrices(curve, N, mu):
    """Single-layer S and adjoint double-layer K' matrices and their grid.

    For mu = 0 the curve is first dilated to diameter 1/2, so the returned
    grid belongs to the dilated curve.
    """
    sys = layer_system(curve, N, mu)
    return sys.S, sys.Kp, sys.assembly_grid


@dataclass
class DtnOperator:
    matrix: np.ndarray
    raw: np.ndarray
    mu: float
    grid: BoundaryGrid
    asymmetry: float
    system: LayerSystem = field(repr=False, default=None)

    @property
    def N(self):
        return self.grid.N

    def eigenvalues(self):
        return sym_eig(self.matrix, vectors=False)


def dtn_operator(curve, N, mu=0.0):
    """Symmetrized DtN matrix D_mu on an arclength-uniform grid of N nodes."""
    sys = layer_system(curve, N, mu)
    X = 0.5 * np.eye(N) + sys.Kp
    # D_raw = X S^{-1}, so D_raw^T = S^{-1} X^T
    raw = sys.solve(X.T).T * sys.scale
    asym = float(np.linalg.norm(raw - raw.T, 2))
    return DtnOperator(0.5 * (raw + raw.T), raw, float(mu), sys.grid, asym, sys)


def steklov_spectrum(curve, N, mu=0.0, k_max=None):
    """Lowest ``k_max`` eigenvalues sigma_{mu,1} <= sigma_{mu,2} <= ... of D_mu."""
    if k_max is None:
        k_max = N // 4
    if k_max > N // 4:
        raise ValueError(f"k_max={k_max} exceeds the trusted range N/4={N // 4}")
    op = dtn_operator(curve, N, mu)
    w = op.eigenvalues()
    meta = {"N": N, "mu": float(mu), "asymmetry": op.asymmetry, "domain": op.grid.curve.to_spec()}
    return Spectrum(w[:k_max], "steklov", meta)


# --- extension inside the domain ---------------------------------------------

NEAR_FACTOR = 5.0
REJECT_FACTOR = 1.25
NEAR_UPSAMPLE = 4


@dataclass
class DensitySolution:
    """Single-layer density phi whose potential has boundary trace u."""

    phi: np.ndarray
    u: np.ndarray
    mu: float
    system: LayerSystem

    @property
    def grid(self):
        return self.system.grid

    def trace_residual(self):
        return float(np.abs(self.system.S @ self.phi - self.u).max())

    @cached_property
    def _sources(self):
        sys = self.system
        g = sys.assembly_grid
        k = sys.k
        # base refinement resolves exp(-k r); the near band uses 4x more
        base = 1
        if k > 0:
            while g.length / (g.N * base) > FINE_SPACING_K / k:
                base *= 2
        out = {}
        for tag, p in (("far", base), ("near", base * NEAR_UPSAMPLE)):
            if p == 1:
                pts, w, dens = g.points, g.weights, self.phi
            else:
                fine = _scaled_grid(arclength_reparameterize(sys.curve, g.N * p), sys.scale)
                pts, w, dens = fine.points, fine.weights, trig_upsample(self.phi, p)
            out[tag] = (pts, (w * dens.T).T)
        return out


def solve_density(curve_or_op, N=None, mu=0.0, u=None):
    """Density for boundary data ``u``; accepts a DtnOperator or (curve, N, mu)."""
    if isinstance(curve_or_op, DtnOperator):
        sys = curve_or_op.system
    elif isinstance(curve_or_op, LayerSystem):
        sys = curve_or_op
    else:
        sys = layer_system(curve_or_op, N, mu)
    u = np.asarray(u, dtype=float)
    if u.ndim not in (1, 2) or u.shape[0] != sys.grid.N:
        raise ValueError("boundary data must have one value (or row) per grid node")
    return DensitySolution(sys.solve(u), u, sys.mu, sys)


def _classify(solution, points, distances):
    h = solution.grid.h
    if distances is None:
        _, distances = closest_point(solution.system.curve, points)
    distances = np.asarray(distances, dtype=float)
    if np.any(distances < REJECT_FACTOR * h):
        raise ValueError(
            f"evaluation point closer than {REJECT_FACTOR}h to the boundary (or outside)"
        )
    return distances >= NEAR_FACTOR * h


def evaluate_extension(solution, points, distances=None, gradient=True, value=False):
    """Gradient and/or value of the extension at interior points in one kernel pass.

    ``solution.phi`` may hold several densities as columns; the outputs then
    carry a trailing density axis: gradient (P, m, 2), value (P, m).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    far = _classify(solution, pts, distances)
    sys = solution.system
    t = sys.scale
    k = sys.k
    multi = solution.phi.ndim == 2
    m = solution.phi.shape[1] if multi else 1
    grad = np.zeros((len(pts), m, 2)) if gradient else None
    val = np.zeros((len(pts), m)) if value else None
    for tag, mask in (("far", far), ("near", ~far)):
        if not mask.any():
            continue
        src, wd = solution._sources[tag]
        wd = wd.reshape(len(src), m)
        x = pts[mask] * t
        rows = np.nonzero(mask)[0]
        chunk = max(1, 2 ** 21 // len(src))
        for lo in range(0, len(x), chunk):
            sel = rows[lo:lo + chunk]
            dx = x[lo:lo + chunk, 0:1] - src[None, :, 0]
            dy = x[lo:lo + chunk, 1:2] - src[None, :, 1]
            r2 = dx * dx + dy * dy
            if k == 0.0:
                if gradient:
                    c = -1.0 / (2 * np.pi * r2)
                if value:
                    val[sel] = (np.log(r2) * (-1.0 / (4 * np.pi))) @ wd
            else:
                kr = k * np.sqrt(r2)
                if gradient:
                    c = -(k / (2 * np.pi)) * special.k1(kr) / (kr / k)
                if value:
                    val[sel] = (special.k0(kr) / (2 * np.pi)) @ wd
            if gradient:
                grad[sel, :, 0] = ((c * dx) @ wd) * t
                grad[sel, :, 1] = ((c * dy) @ wd) * t
    if not multi:
        grad = grad[:, 0] if gradient else None
        val = val[:, 0] if value else None
    if gradient and value:
        return grad, val
    return grad if gradient else val


def extension_gradient(solution, points, distances=None):
    """Gradient of the mu-Helmholtz extension at interior points.

    ``distances`` (to the boundary) may be passed to skip the closest-point
    search.  Points closer than 5h/4 are rejected.
    """
    return evaluate_extension(solution, points, distances, gradient=True)


def extension_potential(solution, points, distances=None):
    """Value of the mu-Helmholtz extension at interior points."""
    return evaluate_extension(solution, points, distances, gradient=False, value=True)
