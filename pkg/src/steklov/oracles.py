"""Analytic and transcendental-root spectra used as reference values.

Covers the disk DtN map D_mu, Steklov spectra of ellipses (separation in
elliptic coordinates), boundary Laplacians of circles, Dirichlet, Neumann and
Robin spectra of the disk, and Robin spectra of an interval and of a square.
"""

import math

import numpy as np
from scipy import optimize, special

from .errors import NumericalError, PoleError
from .linalg import gen_sym_eig
from .specfun import bessel_zero, log_derivative_I, log_derivative_J
from .spectrum import Spectrum

POLE_TOL = 1e-8
_BRENT = {"xtol": 1e-14, "rtol": 8 * np.finfo(float).eps, "maxiter": 300}


def _check_count(count):
    if int(count) != count or count < 0:
        raise ValueError("count must be a nonnegative integer")
    return int(count)


# --- disk Dirichlet-to-Neumann map -------------------------------------------

def disk_dtn_value(n, mu, R=1.0):
    """Eigenvalue of D_mu on the disk of radius R for angular order n.

    Raises :class:`PoleError` when sqrt(mu) R sits on a zero of J_n.
    """
    if R <= 0:
        raise ValueError("radius must be positive")
    if mu == 0:
        return n / R
    if mu < 0:
        x = math.sqrt(-mu) * R
        return float(log_derivative_I(n, x)) / R
    x = math.sqrt(mu) * R
    ld = float(log_derivative_J(n, x))
    # |J_n| <= tol * |(J_n, J_n')| is |J_n'/J_n| >= 1/tol: relative to the
    # local amplitude, so large orders with tiny J_n are not flagged.  Zeros
    # of J_n lie above n, where J_n'/J_n ~ n/x is not a pole.
    if x > n and not abs(ld) < x / POLE_TOL:
        raise PoleError(
            f"mu={mu} is a Dirichlet eigenvalue of the disk (J_{n} vanishes); order n={n}",
            n=n,
            dirichlet_eigenvalue=mu,
        )
    return ld / R


def disk_dtn_eigs(R, mu, n_max):
    """Sorted multiset of D_mu eigenvalues for orders 0..n_max (n >= 1 doubled)."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    vals = []
    for n in range(n_max + 1):
        v = disk_dtn_value(n, mu, R)
        vals.extend([v] if n == 0 else [v, v])
    return Spectrum(np.sort(vals), "dtn_mu", {"R": R, "mu": float(mu), "n_max": n_max})


def disk_dtn_n_max(k_max, mu, R=1.0):
    """An order cutoff guaranteeing the k_max lowest D_mu eigenvalues are present."""
    x = math.sqrt(max(mu, 0.0)) * R
    return int(k_max + math.ceil(x) + 10)


# --- ellipse Steklov spectrum -----------------------------------------------------

def ellipse_steklov_eigs(a, b, count, n_modes=None, n_quad=None):
    """Steklov eigenvalues (mu = 0) of the ellipse x^2/a^2 + y^2/b^2 < 1.

    In elliptic coordinates x = c cosh(xi) cos(eta), y = c sinh(xi) sin(eta)
    the regular harmonic functions are cosh(n xi) cos(n eta) and
    sinh(n xi) sin(n eta).  With boundary metric factor
    h(eta) = c sqrt(sinh^2 xi0 + sin^2 eta) the problem becomes the pencil
    diag(n tanh(n xi0)) a = sigma M a, M_mn = (cos m eta, h cos n eta) / pi
    (and likewise with coth for the sine family).
    """
    count = _check_count(count)
    if a <= 0 or b <= 0:
        raise ValueError("semi-axes must be positive")
    a, b = max(a, b), min(a, b)
    if a == b:
        return Spectrum(disk_dtn_eigs(a, 0.0, count).values[:count], "steklov", {"domain": "disk", "R": a})
    n_modes = max(2 * count, count + 60) if n_modes is None else int(n_modes)
    n_quad = max(8 * n_modes, 1024) if n_quad is None else int(n_quad)
    c = math.sqrt(a * a - b * b)
    xi0 = math.atanh(b / a)
    eta = 2 * np.pi * np.arange(n_quad) / n_quad
    h = c * np.sqrt(np.sinh(xi0) ** 2 + np.sin(eta) ** 2)
    vals = []
    for family in ("cos", "sin"):
        n = np.arange(n_modes) if family == "cos" else np.arange(1, n_modes)
        basis = np.cos(np.outer(n, eta)) if family == "cos" else np.sin(np.outer(n, eta))
        gram = basis @ basis.T * (2 * np.pi / n_quad)
        mass = (basis * h) @ basis.T * (2 * np.pi / n_quad)
        rate = n * np.tanh(n * xi0) if family == "cos" else n / np.tanh(n * xi0)
        vals.extend(gen_sym_eig(0.5 * (rate[:, None] * gram + (rate[:, None] * gram).T), mass))
    vals = np.sort(vals)[:count]
    return Spectrum(vals, "steklov", {"domain": "ellipse", "a": a, "b": b, "n_modes": n_modes})


# --- circles ------------------------------------------------------------------

def circle_laplace_spectrum(lengths, k_max):
    """Boundary Laplacian on a disjoint union of circles of the given lengths."""
    lengths = np.atleast_1d(np.asarray(lengths, dtype=float))
    if np.any(lengths <= 0):
        raise ValueError("circle lengths must be positive")
    k_max = _check_count(k_max)
    vals = []
    for ell in lengths:
        vals.append(0.0)
        for j in range(1, k_max // 2 + 1):
            v = (2 * np.pi * j / ell) ** 2
            vals.extend([v, v])
    vals = np.sort(vals)[:k_max]
    return Spectrum(vals, "boundary_laplace", {"lengths": tuple(lengths.tolist())})


# --- disk Dirichlet / Neumann ---------------------------------------------------

def _merge_by_order(first_root, roots_below, count):
    """Collect per-order roots below a growing bound until ``count`` are certain.

    ``first_root(n)`` is the lowest root of order n (increasing in n);
    ``roots_below(n, B)`` lists all roots of order n below B.
    """
    B = max(first_root(0), 1.0) * 2.0
    while True:
        vals = []
        n = 0
        while first_root(n) < B:
            rs = roots_below(n, B)
            vals.extend(rs if n == 0 else [v for r in rs for v in (r, r)])
            n += 1
        if len(vals) >= count:
            return np.sort(vals)[:count]
        B *= 2.0


def disk_dirichlet_neumann_eigs(R, count, which="D"):
    """Dirichlet ((j_nk/R)^2) or Neumann ((j'_nk/R)^2) eigenvalues of the disk."""
    count = _check_count(count)
    if R <= 0:
        raise ValueError("radius must be positive")
    sel = {"D": "J", "N": "J'"}.get(which)
    if sel is None:
        raise ValueError("which must be 'D' or 'N'")

    def first(n):
        return (bessel_zero(sel, n, 1) / R) ** 2

    def below(n, B):
        out = []
        k = 1
        while True:
            v = (bessel_zero(sel, n, k) / R) ** 2
            if v >= B:
                return out
            out.append(v)
            k += 1

    vals = _merge_by_order(first, below, count) if count else np.zeros(0)
    kind = "dirichlet" if which == "D" else "neumann"
    return Spectrum(vals, kind, {"R": R, "domain": "disk"})


# --- Robin: interval and square --------------------------------------------------

def _expand_bracket(f, lo, hi):
    # f(lo) < 0 and f increasing; grow hi until f(hi) > 0
    for _ in range(200):
        if f(hi) > 0:
            return optimize.brentq(f, lo, hi, **_BRENT)
        hi *= 2.0
    raise NumericalError("Robin root search exhausted its bracket range")


def robin_interval_eigs(a, gamma, count):
    """Eigenvalues of -v'' = mu v on [0, a] with (d/dn + gamma) v = 0 at both ends."""
    count = _check_count(count)
    if a <= 0:
        raise ValueError("interval length must be positive")
    g = float(gamma)
    h = 0.5 * a
    vals = []
    # hyperbolic branch (mu < 0): at most one root per symmetry class
    if g < 0:
        # even: w tanh(w h) = -g
        vals.append(-_expand_bracket(lambda w: w * math.tanh(w * h) + g, 0.0, 1.0 - g) ** 2)
    if -g > 2.0 / a:
        # odd: w coth(w h) = -g, increasing from 2/a
        f = lambda w: w / math.tanh(w * h) + g if w > 0 else 1.0 / h + g
        vals.append(-_expand_bracket(f, 1e-300, 1.0 - g) ** 2)
    if g == 0.0 or g == -2.0 / a:
        vals.append(0.0)
    # trigonometric branch mu = w^2 > 0.  Even: w tan(wh) = gamma, one root per
    # branch of tan; odd: w cot(wh) = -gamma, one root per branch of cot.
    ge = lambda w: w * math.sin(w * h) - g * math.cos(w * h)
    go = lambda w: w * math.cos(w * h) + g * math.sin(w * h)
    if g > 0:
        vals.append(optimize.brentq(ge, 0.0, 0.5 * np.pi / h, **_BRENT) ** 2)
    if -g < 1.0 / h:
        q = lambda w: w / math.tan(w * h) + g
        lo, hi = 1e-8 / h, np.pi / h * (1 - 1e-15)
        vals.append(optimize.brentq(q, lo, hi, **_BRENT) ** 2 if q(lo) > 0 else 0.0)
    for j in range(1, count + 1):
        vals.append(optimize.brentq(ge, (j - 0.5) * np.pi / h, (j + 0.5) * np.pi / h, **_BRENT) ** 2)
        vals.append(optimize.brentq(go, j * np.pi / h, (j + 1) * np.pi / h, **_BRENT) ** 2)
    vals = np.sort(vals)[:count]
    return Spectrum(vals, "robin", {"a": a, "gamma": g, "domain": "interval"})


def square_robin_eigs(a, gamma, count):
    """Robin eigenvalues of the square [0, a]^2: pairwise sums of interval values."""
    count = _check_count(count)
    one = robin_interval_eigs(a, gamma, count).values
    sums = np.sort(np.add.outer(one, one).ravel())[:count]
    return Spectrum(sums, "robin", {"a": a, "gamma": float(gamma), "domain": "square"})


# --- Robin: disk -----------------------------------------------------------------

def _disk_robin_order(n, R, g, B):
    """Robin eigenvalues of angular order n below B (each listed once).

    mu is an eigenvalue iff the order-n DtN value sigma_n(mu) equals -gamma;
    sigma_n decreases on each interval between consecutive Dirichlet
    eigenvalues of order n, so every such interval holds exactly one root.
    """
    out = []
    if -g > n / R:
        # sigma_n(-w^2) increases from n/R as w grows
        f = lambda w: float(log_derivative_I(n, w * R)) / R + g
        out.append(-_expand_bracket(f, 0.0, max(1.0, -g)) ** 2)
    elif -g == n / R:
        out.append(0.0)
    if B <= 0:
        return [v for v in out if v < B]
    wmax = math.sqrt(B)
    # first branch (0, j_n1/R): sigma_n falls from n/R to -infinity
    hi = bessel_zero("J", n, 1) / R
    if -g < n / R:
        q = lambda w: float(log_derivative_J(n, w * R)) / R + g
        top = hi * (1 - 1e-14)
        lo = 1e-12 * hi
        if q(lo) > 0:
            out.append(optimize.brentq(q, lo, top, **_BRENT) ** 2)
        else:
            out.append(0.0)
    # later branches: w J_n'(wR) + gamma J_n(wR) changes sign once between zeros
    f = lambda w: w * special.jvp(n, w * R) + g * special.jv(n, w * R)
    k = 2
    while hi < wmax:
        nxt = bessel_zero("J", n, k) / R
        out.append(optimize.brentq(f, hi, nxt, **_BRENT) ** 2)
        hi = nxt
        k += 1
    return sorted(v for v in out if v < B)


def disk_robin_eigs(R, gamma, count):
    """Robin eigenvalues of the disk of radius R (orders n >= 1 doubled)."""
    count = _check_count(count)
    if R <= 0:
        raise ValueError("radius must be positive")
    g = float(gamma)

    def first(n):
        rs = _disk_robin_order(n, R, g, (bessel_zero("J", n, 1) / R) ** 2 * (1 + 1e-12))
        return rs[0]

    def below(n, B):
        return _disk_robin_order(n, R, g, B)

    vals = _merge_by_order(first, below, count) if count else np.zeros(0)
    return Spectrum(vals, "robin", {"R": R, "gamma": g, "domain": "disk"})
