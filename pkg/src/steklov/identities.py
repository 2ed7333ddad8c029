"""Boundary-normal vector fields and numerical checks of Rellich-type identities.

For the mu-Helmholtz extension U of boundary data u and a Lipschitz field F
with F = n on the boundary,

    <Du, Du> - <u', u'> + mu <u, u>
        = int_Omega 2 DF[grad U, grad U] - |grad U|^2 div F + mu U^2 div F,

which is twice the general Pohozhaev identity specialised to F|_M = n.
Volume integrals run over a tubular band x = gamma(s) - d n(s), 0 <= d <= delta,
which contains the support of F.
"""

from dataclasses import dataclass, field

import numpy as np

from .bem import (
    REJECT_FACTOR,
    DtnOperator,
    dtn_operator,
    evaluate_extension,
    solve_density,
    trig_upsample,
)
from .geometry import TWO_PI, arclength_reparameterize, closest_point, make_curve

FD_STEP = 1e-6
# direct-evaluation nodes per normal line used to fill the boundary shell
SHELL_INTERP_NODES = 12


# --- the tubular field -----------------------------------------------------------

def cutoff(d, delta):
    """C^{1,1} cubic cutoff: 1 at d = 0, 0 for d >= delta, zero slope at both ends."""
    x = np.clip(np.asarray(d, dtype=float) / delta, 0.0, 1.0)
    return 1.0 - 3.0 * x ** 2 + 2.0 * x ** 3


def profile(d, delta):
    """f(d) = chi(d) + d chi'(d), the magnitude of -grad(d chi); 1 outside Omega."""
    x = np.clip(np.asarray(d, dtype=float) / delta, 0.0, 1.0)
    return 1.0 - 9.0 * x ** 2 + 8.0 * x ** 3


def profile_slope(d, delta):
    x = np.asarray(d, dtype=float) / delta
    inside = (x > 0) & (x < 1)
    return np.where(inside, (-18.0 * x + 24.0 * x ** 2) / delta, 0.0)


@dataclass(frozen=True)
class TubularField:
    """F = -grad(d_M chi(d_M)) with d_M the signed distance (positive inside).

    On the boundary F is the outward unit normal; it vanishes at depth >= delta.
    """

    curve: object
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("cutoff width must be positive")
        bound = 1.0 / self.curve.max_abs_curvature
        if self.delta >= bound:
            raise ValueError(f"cutoff width {self.delta} exceeds the curvature bound 1/max|kappa| = {bound:.6g}")

    def locate(self, points):
        """Foot parameter and signed distance (positive inside) of each point."""
        return closest_point(self.curve, points)

    def __call__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        t, d = self.locate(pts)
        f = np.where(d < 0, 1.0, profile(d, self.delta))
        return f[:, None] * self.curve.normal(t)

    def at(self, t, d):
        """F at the point gamma(t) - d n(t) (tubular coordinates, 0 <= d < reach)."""
        f = np.where(np.asarray(d) < 0, 1.0, profile(d, self.delta))
        return f[..., None] * self.curve.normal(t)

    def jacobian(self, points, step=FD_STEP):
        """DF[i, j] = dF_i/dx_j by central differences."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        J = np.empty((len(pts), 2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = step
            J[:, :, j] = (self(pts + e) - self(pts - e)) / (2 * step)
        return J

    def jacobian_exact(self, t, d):
        """Closed-form DF in tubular coordinates (used to validate the FD path)."""
        n = self.curve.normal(t)
        T = self.curve.tangent(t)
        kap = self.curve.curvature(t)
        a = -profile_slope(d, self.delta)
        b = np.where(np.asarray(d) < self.delta, profile(d, self.delta), 0.0) * kap / (1.0 - kap * d)
        return a[:, None, None] * np.einsum("pi,pj->pij", n, n) + b[:, None, None] * np.einsum("pi,pj->pij", T, T)


def make_normal_field(curve, delta):
    return TubularField(make_curve(curve), float(delta))


# --- quadrature in tubular coordinates ----------------------------------------------

@dataclass(frozen=True)
class BandQuadrature:
    """Gauss-Legendre in depth d on [0, width], arclength trapezoid along the curve."""

    t: np.ndarray        # foot parameters, one per arclength node
    depth: np.ndarray    # GL depths
    nodes: np.ndarray    # (n_s, n_d, 2)
    weights: np.ndarray  # (n_s, n_d)
    width: float

    @property
    def shape(self):
        return self.weights.shape


def band_quadrature(curve, width, n_d, n_s):
    curve = make_curve(curve)
    if width >= 1.0 / curve.max_abs_curvature:
        raise ValueError("band wider than the curvature bound")
    grid = arclength_reparameterize(curve, n_s)
    x, w = np.polynomial.legendre.leggauss(n_d)
    d = 0.5 * width * (x + 1.0)
    wd = 0.5 * width * w
    nodes = grid.points[:, None, :] - d[None, :, None] * grid.normals[:, None, :]
    weights = grid.h * wd[None, :] * (1.0 - grid.curvature[:, None] * d[None, :])
    return BandQuadrature(grid.t, d, nodes, weights, float(width))


@dataclass(frozen=True)
class DomainQuadrature:
    """Band of given width plus a polar map of the inner parallel curve."""

    band: BandQuadrature
    core_nodes: np.ndarray
    core_weights: np.ndarray


def domain_quadrature(curve, width, n_d, n_s, n_r):
    curve = make_curve(curve)
    band = band_quadrature(curve, width, n_d, n_s)
    t = band.t
    g, g1, _ = curve.derivatives(t)
    n = curve.normal(t)
    kap = curve.curvature(t)
    p = g - width * n
    p1 = g1 * (1.0 - width * kap)[:, None]
    jac = p[:, 0] * p1[:, 1] - p[:, 1] * p1[:, 0]
    if np.any(jac <= 0):
        raise ValueError("inner parallel curve is not star-shaped about the origin")
    x, w = np.polynomial.legendre.leggauss(n_r)
    rho = 0.5 * (x + 1.0)
    wr = 0.5 * w
    # the nodes are uniform in arclength s, and dt/ds = 1/|gamma'|
    ds = curve.length / len(t)
    speed = curve.speed(t)
    nodes = rho[:, None, None] * p[None, :, :]
    weights = (wr * rho)[:, None] * (jac * ds / speed)[None, :]
    return DomainQuadrature(band, nodes.reshape(-1, 2), weights.ravel())


# --- extension values on a band, with the boundary shell filled in ---------------------

def _barycentric_matrix(xs, targets):
    """Rows interpolate values at ``xs`` to ``targets`` (barycentric Lagrange)."""
    xs = np.asarray(xs, dtype=float)
    diff = xs[:, None] - xs[None, :]
    np.fill_diagonal(diff, 1.0)
    lam = 1.0 / diff.prod(axis=1)
    out = np.zeros((len(targets), len(xs)))
    for i, y in enumerate(targets):
        hit = np.isclose(y, xs, rtol=0, atol=1e-300)
        if hit.any():
            out[i, np.argmax(hit)] = 1.0
            continue
        c = lam / (y - xs)
        out[i] = c / c.sum()
    return out


def _resample(values, n_out):
    """Trigonometric resampling of periodic samples (axis 0) to n_out points."""
    v = np.asarray(values, dtype=float)
    n_in = v.shape[0]
    if n_out == n_in:
        return v.copy()
    if n_out % n_in == 0:
        return trig_upsample(v, n_out // n_in)
    if n_in % n_out == 0:
        return v[:: n_in // n_out].copy()
    raise ValueError("band and boundary resolutions must divide one another")


def spectral_derivative(values, length):
    """d/ds of periodic samples on a uniform arclength grid (Nyquist mode dropped)."""
    v = np.asarray(values, dtype=float)
    N = v.shape[0]
    V = np.fft.rfft(v, axis=0)
    k = np.arange(V.shape[0]) * (TWO_PI / length)
    if N % 2 == 0:
        k[-1] = 0.0
    shape = (-1,) + (1,) * (v.ndim - 1)
    return np.fft.irfft(1j * k.reshape(shape) * V, N, axis=0)


@dataclass
class BandField:
    grad: np.ndarray      # (n_s, n_d, m, 2)
    value: np.ndarray     # (n_s, n_d, m)
    shell: np.ndarray     # (n_d,) bool, depths filled by interpolation
    safe_depth: float


def extension_on_band(op, u, band, need_value=True):
    """grad U and U at the band nodes for each column of ``u`` (shape (N, m)).

    Depths below 5h/4 (h the boundary spacing) are filled by polynomial
    interpolation along each normal line, anchored at the boundary values
    grad U = u_s T + (D u) n and U = u.
    """
    grid = op.grid
    u = np.asarray(u, dtype=float).reshape(grid.N, -1)
    m = u.shape[1]
    sol = solve_density(op.system, u=u)
    n_s, n_d = band.shape
    safe = REJECT_FACTOR * grid.h
    shell = band.depth < safe
    direct = ~shell
    pts = band.nodes[:, direct].reshape(-1, 2)
    dist = np.broadcast_to(band.depth[direct], (n_s, direct.sum())).ravel()
    grad = np.zeros((n_s, n_d, m, 2))
    value = np.zeros((n_s, n_d, m))
    if direct.any():
        out = evaluate_extension(sol, pts, dist, gradient=True, value=need_value)
        g, v = out if need_value else (out, None)
        grad[:, direct] = g.reshape(n_s, -1, m, 2)
        if need_value:
            value[:, direct] = v.reshape(n_s, -1, m)
    if shell.any():
        idx = np.nonzero(direct)[0][:SHELL_INTERP_NODES]
        if idx.size < SHELL_INTERP_NODES:
            raise ValueError("band too coarse to fill the boundary shell")
        dn = op.raw @ u
        us = spectral_derivative(u, grid.length)
        g_bdy = us[:, :, None] * grid.tangents[:, None, :] + dn[:, :, None] * grid.normals[:, None, :]
        g_bdy = _resample(g_bdy, n_s)
        xs = np.concatenate([[0.0], band.depth[idx]])
        W = _barycentric_matrix(xs, band.depth[shell])
        stacked = np.concatenate([g_bdy[:, None], grad[:, idx]], axis=1)
        grad[:, shell] = np.einsum("qk,skmc->sqmc", W, stacked)
        if need_value:
            stackv = np.concatenate([_resample(u, n_s)[:, None], value[:, idx]], axis=1)
            value[:, shell] = np.einsum("qk,skm->sqm", W, stackv)
    return BandField(grad, value, shell, safe)


def green_energy(op, u, width, n_d=48, n_r=48, n_s=None):
    """(<D u, u>_M, int |grad U|^2 - mu U^2) for boundary data u on the operator grid.

    The volume side uses :func:`domain_quadrature`: the band part goes
    through :func:`extension_on_band`, the core is evaluated directly.
    """
    grid = op.grid
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.N,):
        raise ValueError("boundary data must have one value per node")
    quad = domain_quadrature(grid.curve, width, n_d, grid.N if n_s is None else n_s, n_r)
    bf = extension_on_band(op, u[:, None], quad.band, need_value=op.mu != 0)
    g2 = (bf.grad[:, :, 0, :] ** 2).sum(-1)
    vol = float((quad.band.weights * (g2 - op.mu * bf.value[:, :, 0] ** 2)).sum())
    sol = solve_density(op.system, u=u)
    gc, vc = evaluate_extension(sol, quad.core_nodes, gradient=True, value=True)
    vol += float(quad.core_weights @ ((gc ** 2).sum(-1) - op.mu * vc ** 2))
    return float(grid.h * u @ (op.raw @ u)), vol


# --- the constant C_F ---------------------------------------------------------------

@dataclass(frozen=True)
class HormanderConstant:
    C: float
    sup_form: float
    sup_div: float
    n_samples: int


def _form_and_div(J):
    S = 0.5 * (J + np.swapaxes(J, 1, 2))
    div = J[:, 0, 0] + J[:, 1, 1]
    Q = 2.0 * S - div[:, None, None] * np.eye(2)
    # spectral norm of a symmetric 2x2
    tr = Q[:, 0, 0] + Q[:, 1, 1]
    det = Q[:, 0, 0] * Q[:, 1, 1] - Q[:, 0, 1] * Q[:, 1, 0]
    disc = np.sqrt(np.maximum(0.25 * tr ** 2 - det, 0.0))
    norm = np.abs(0.5 * tr) + disc
    return norm, div


def hormander_constant(field, points=None, n_d=64, n_s=512):
    """C_F = max(sup ||2 sym DF - div F I||_2, sup |div F|) over sample points.

    Without explicit points the support band (and the boundary) is sampled.
    """
    if points is None:
        band = band_quadrature(field.curve, field.delta, n_d, n_s)
        grid = arclength_reparameterize(field.curve, n_s)
        points = np.concatenate([band.nodes.reshape(-1, 2), grid.points])
    points = np.atleast_2d(np.asarray(points, dtype=float))
    norm, div = _form_and_div(field.jacobian(points))
    sf, sd = float(norm.max(initial=0.0)), float(np.abs(div).max(initial=0.0))
    return HormanderConstant(max(sf, sd), sf, sd, len(points))


# --- identity verification ----------------------------------------------------------

@dataclass
class IdentityReport:
    mode: str
    lhs: float
    rhs: float
    residual: float
    relative_residual: float
    energy: float
    N: int
    n_d: int
    n_s: int
    mu: float
    shell_bound: float
    extras: dict = field(default_factory=dict)


def _boundary_samples(u, grid):
    if callable(u):
        return np.asarray(u(grid.s), dtype=float)
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.N,):
        raise ValueError("boundary data must be a callable of arclength or one value per node")
    return u


def verify_identities(curve, field, data, mu=0.0, mode="hormander", N=512, n_d=64, n_s=None, op=None,
                      jacobian="exact"):
    """Both sides of the Hormander (or general Pohozhaev) identity, per data set.

    Each entry of ``data`` is a callable of arclength s or an array on the
    N-node grid; all share one operator and one kernel pass.  The relative
    residual is normalised by <D u, u>.
    """
    if mode not in ("hormander", "pohozhaev"):
        raise ValueError("mode must be 'hormander' or 'pohozhaev'")
    if mu > 0:
        raise ValueError("identity checks are limited to mu <= 0")
    curve = make_curve(curve)
    n_s = N if n_s is None else n_s
    if op is None:
        op = dtn_operator(curve, N, mu)
    elif not isinstance(op, DtnOperator) or op.N != N or op.mu != mu:
        raise ValueError("operator does not match N and mu")
    grid = op.grid
    u = np.stack([_boundary_samples(d, grid) for d in data], axis=1)
    h = grid.h
    dn = op.raw @ u
    us = spectral_derivative(u, grid.length)
    energy = h * (dn * u).sum(0)

    band = band_quadrature(curve, field.delta, n_d, n_s)
    bf = extension_on_band(op, u, band, need_value=(mu != 0))
    if jacobian == "exact":
        # tubular coordinates of the band nodes are known by construction
        J = field.jacobian_exact(np.repeat(band.t, n_d), np.tile(band.depth, n_s))
    elif jacobian == "fd":
        J = field.jacobian(band.nodes.reshape(-1, 2))
    else:
        raise ValueError("jacobian must be 'exact' or 'fd'")
    _, div = _form_and_div(J)
    g = bf.grad.reshape(len(J), -1, 2)
    U = bf.value.reshape(len(J), -1)
    w = band.weights.ravel()
    quad = np.einsum("pmi,pij,pmj->pm", g, J, g)
    g2 = (g * g).sum(-1)
    divc = div[:, None]

    if mode == "hormander":
        lhs = h * (dn ** 2 - us ** 2 + mu * u ** 2).sum(0)
        rhs = w @ (2.0 * quad - g2 * divc + mu * U ** 2 * divc)
    else:
        Fb = field(grid.points)
        gb = us[:, :, None] * grid.tangents[:, None, :] + dn[:, :, None] * grid.normals[:, None, :]
        Fn = (Fb * grid.normals).sum(-1)[:, None]
        Fg = np.einsum("pc,pmc->pm", Fb, gb)
        lhs = h * (Fg * dn - 0.5 * (gb * gb).sum(-1) * Fn + 0.5 * mu * u ** 2 * Fn).sum(0)
        rhs = w @ (quad - 0.5 * g2 * divc + 0.5 * mu * U ** 2 * divc)

    # what the interpolated shell could contribute at most
    shell_w = float(band.weights[:, bf.shell].sum())
    jn = np.abs(J).reshape(len(J), -1).max(axis=1)
    coef = float((2 * jn + np.abs(div)).max(initial=0.0))
    divmax = float(np.abs(div).max(initial=0.0))
    reports = []
    for i in range(u.shape[1]):
        gmax = float(g2[:, i].max(initial=0.0))
        umax = float((U[:, i] ** 2).max(initial=0.0))
        shell_bound = shell_w * (gmax * coef + abs(mu) * umax * divmax)
        residual = abs(float(lhs[i]) - float(rhs[i]))
        e = float(energy[i])
        rel = residual / abs(e) if e != 0 else np.inf
        reports.append(IdentityReport(mode, float(lhs[i]), float(rhs[i]), residual, rel, e, N, n_d, n_s,
                                      float(mu), shell_bound,
                                      {"shell_depth": bf.safe_depth, "asymmetry": op.asymmetry}))
    return reports


def verify_identity(curve, field, u, mu=0.0, mode="hormander", N=512, n_d=64, n_s=None, op=None,
                    jacobian="exact"):
    """Single-data version of :func:`verify_identities`."""
    return verify_identities(curve, field, [u], mu, mode, N, n_d, n_s, op, jacobian)[0]


def identity_refinement(curve, field, data, mu=0.0, N=512, n_d=64, n_s=None, mode="hormander"):
    """Report lists at a base resolution and with every resolution doubled."""
    n_s = N if n_s is None else n_s
    coarse = verify_identities(curve, field, data, mu, mode, N, n_d, n_s)
    fine = verify_identities(curve, field, data, mu, mode, 2 * N, 2 * n_d, 2 * n_s)
    return coarse, fine


# --- abstract eigenvalue estimate ---------------------------------------------------

@dataclass(frozen=True)
class AbstractEstimate:
    squared_ok: np.ndarray
    root_ok: np.ndarray
    zero_implication_ok: np.ndarray

    @property
    def all_pass(self):
        return bool(self.squared_ok.all() and self.root_ok.all() and self.zero_implication_ok.all())


def check_abstract_estimate(alpha, beta, C, tol=1e-12):
    """Per-k checks of |a_k^2 - b_k| <= C a_k and |a_k - sqrt(b_k)| <= C.

    ``tol`` is a relative slack for rounding in the inputs.
    """
    a = np.asarray(getattr(alpha, "values", alpha), dtype=float)
    b = np.asarray(getattr(beta, "values", beta), dtype=float)
    if a.shape != b.shape:
        raise ValueError("alpha and beta must have the same length")
    if np.any(a < -tol) or np.any(b < -tol):
        raise ValueError("alpha and beta must be nonnegative")
    a = np.maximum(a, 0.0)
    b = np.maximum(b, 0.0)
    slack = tol * np.maximum(1.0, b)
    sq = np.abs(a ** 2 - b) <= C * a + slack
    rt = np.abs(a - np.sqrt(b)) <= C + tol * np.maximum(1.0, np.sqrt(b))
    zi = ~(a <= tol) | (b <= slack)
    return AbstractEstimate(sq, rt, zi)
