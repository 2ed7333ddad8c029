"""Smooth closed planar curves: disk, ellipse and cosine-perturbed star domains.

All curves are parameterized over t in [0, 2*pi), positively oriented and
centered at the origin (star-shaped with respect to it).  Boundary grids used
by the rest of the package are uniform in arclength, obtained by Newton
inversion of a spectrally accurate arclength function.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NumericalError

TWO_PI = 2.0 * np.pi

_KIND_PARAMS = {
    "disk": ("R",),
    "ellipse": ("a", "b"),
    "star": ("r0", "eps", "m"),
}


@dataclass(frozen=True)
class Curve:
    """A smooth simple closed curve gamma(t), t in [0, 2pi).

    ``star`` curves are r(t) = r0 * (1 + eps * cos(m t)) in polar form.
    """

    kind: str
    params: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in _KIND_PARAMS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        names = _KIND_PARAMS[self.kind]
        if len(self.params) != len(names):
            raise ValueError(f"{self.kind} needs parameters {names}")
        p = dict(zip(names, self.params))
        if self.kind == "disk" and not p["R"] > 0:
            raise ValueError("disk radius must be positive")
        if self.kind == "ellipse" and not (p["a"] > 0 and p["b"] > 0):
            raise ValueError("ellipse axes must be positive")
        if self.kind == "star":
            if not p["r0"] > 0:
                raise ValueError("star base radius must be positive")
            if int(p["m"]) != p["m"] or p["m"] < 1:
                raise ValueError("star wave number must be a positive integer")
            # r(t) > 0 keeps the curve simple and star-shaped about the origin
            if not abs(p["eps"]) < 1.0:
                raise ValueError("star amplitude must satisfy |eps| < 1")

    @property
    def p(self):
        return dict(zip(_KIND_PARAMS[self.kind], self.params))

    # --- parameterization and derivatives -------------------------------

    def derivatives(self, t):
        """Return gamma, gamma', gamma'' at ``t`` as arrays of shape (..., 2)."""
        t = np.asarray(t, dtype=float)
        c, s = np.cos(t), np.sin(t)
        if self.kind == "disk":
            R = self.params[0]
            g = R * np.stack([c, s], -1)
            g1 = R * np.stack([-s, c], -1)
            g2 = -g
        elif self.kind == "ellipse":
            a, b = self.params
            g = np.stack([a * c, b * s], -1)
            g1 = np.stack([-a * s, b * c], -1)
            g2 = -g
        else:
            r0, eps, m = self.params
            r = r0 * (1.0 + eps * np.cos(m * t))
            r1 = -r0 * eps * m * np.sin(m * t)
            r2 = -r0 * eps * m * m * np.cos(m * t)
            g = np.stack([r * c, r * s], -1)
            g1 = np.stack([r1 * c - r * s, r1 * s + r * c], -1)
            g2 = np.stack([r2 * c - 2 * r1 * s - r * c, r2 * s + 2 * r1 * c - r * s], -1)
        return g, g1, g2

    def point(self, t):
        return self.derivatives(t)[0]

    def speed(self, t):
        return np.linalg.norm(self.derivatives(t)[1], axis=-1)

    def normal(self, t):
        """Outward unit normal (the curve is counter-clockwise)."""
        _, g1, _ = self.derivatives(t)
        sp = np.linalg.norm(g1, axis=-1)[..., None]
        return np.stack([g1[..., 1], -g1[..., 0]], -1) / sp

    def tangent(self, t):
        _, g1, _ = self.derivatives(t)
        return g1 / np.linalg.norm(g1, axis=-1)[..., None]

    def curvature(self, t):
        """Signed curvature, positive where the domain is locally convex."""
        _, g1, g2 = self.derivatives(t)
        cross = g1[..., 0] * g2[..., 1] - g1[..., 1] * g2[..., 0]
        return cross / np.linalg.norm(g1, axis=-1) ** 3

    # --- global quantities ----------------------------------------------

    @cached_property
    def _speed_modes(self):
        # Fourier coefficients of |gamma'(t)|, resolved to rounding level.
        M = 256
        while True:
            t = TWO_PI * np.arange(M) / M
            c = np.fft.rfft(self.speed(t)) / M
            tail = np.abs(c[M // 4:]).max()
            if tail < 1e-16 * abs(c[0]) or M >= 2 ** 17:
                break
            M *= 2
        keep = np.nonzero(np.abs(c) > 1e-18 * abs(c[0]))[0]
        kmax = keep.max() + 1 if keep.size else 1
        return c[:kmax]

    @cached_property
    def length(self):
        return TWO_PI * self._speed_modes[0].real

    def arclength(self, t):
        """s(t) = int_0^t |gamma'|, evaluated spectrally."""
        t = np.asarray(t, dtype=float)
        c = self._speed_modes
        s = c[0].real * t
        k = np.arange(1, c.size)
        if k.size:
            # 2 Re sum_k c_k (e^{ikt} - 1) / (ik)
            ph = np.exp(1j * np.multiply.outer(t, k)) - 1.0
            s = s + 2.0 * np.real(ph @ (c[1:] / (1j * k)))
        return s

    @cached_property
    def diameter(self):
        t = TWO_PI * np.arange(1024) / 1024
        x = self.point(t)
        d = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1)
        return float(d.max())

    @cached_property
    def max_abs_curvature(self):
        t = TWO_PI * np.arange(4096) / 4096
        return float(np.abs(self.curvature(t)).max())

    @cached_property
    def area(self):
        t = TWO_PI * np.arange(1024) / 1024
        g, g1, _ = self.derivatives(t)
        return float(0.5 * np.mean(g[:, 0] * g1[:, 1] - g[:, 1] * g1[:, 0]) * TWO_PI)

    def dilate(self, factor):
        """The curve scaled by ``factor`` about the origin."""
        if self.kind == "disk":
            return Curve("disk", (self.params[0] * factor,))
        if self.kind == "ellipse":
            a, b = self.params
            return Curve("ellipse", (a * factor, b * factor))
        r0, eps, m = self.params
        return Curve("star", (r0 * factor, eps, m))

    # --- key=value micro-format -----------------------------------------

    def to_spec(self):
        items = [f"kind={self.kind}"]
        for name, val in self.p.items():
            items.append(f"{name}={val:g}" if name != "m" else f"{name}={int(val)}")
        return ",".join(items)


def make_curve(spec):
    """Build a :class:`Curve` from a dict or a ``kind=...,key=value`` string."""
    if isinstance(spec, Curve):
        return spec
    if isinstance(spec, str):
        spec = parse_spec(spec)
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind not in _KIND_PARAMS:
        raise ValueError(f"unknown curve kind {kind!r}")
    names = _KIND_PARAMS[kind]
    aliases = {"star": {"R": "r0", "epsilon": "eps"}}.get(kind, {})
    for old, new in aliases.items():
        if old in spec and new not in spec:
            spec[new] = spec.pop(old)
    unknown = set(spec) - set(names)
    if unknown:
        raise ValueError(f"unexpected keys for {kind}: {sorted(unknown)}")
    missing = [n for n in names if n not in spec]
    if missing:
        raise ValueError(f"missing keys for {kind}: {missing}")
    try:
        vals = tuple(float(spec[n]) for n in names)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"non-numeric curve parameter in {spec}") from exc
    return Curve(kind, vals)


def parse_spec(text):
    out = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ValueError(f"malformed domain item {item!r} (expected key=value)")
        key, val = item.split("=", 1)
        out[key.strip()] = val.strip()
    return out


@dataclass(frozen=True)
class BoundaryGrid:
    """N nodes uniform in arclength, with the native parameters they came from."""

    curve: Curve
    t: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    tangents: np.ndarray
    curvature: np.ndarray
    length: float

    @property
    def N(self):
        return self.t.size

    @property
    def h(self):
        return self.length / self.N

    @property
    def weights(self):
        return np.full(self.N, self.h)

    @property
    def s(self):
        return self.h * np.arange(self.N)


def arclength_reparameterize(curve, N, maxiter=60):
    """Nodes at arclength s_j = j L / N via Newton inversion of s(t)."""
    if N < 16 or N % 2:
        raise ValueError("N must be even and at least 16")
    L = curve.length
    target = L * np.arange(N) / N
    t = TWO_PI * np.arange(N) / N
    for _ in range(maxiter):
        step = (curve.arclength(t) - target) / curve.speed(t)
        t = t - step
        if np.max(np.abs(step)) < 1e-15 * TWO_PI:
            break
    else:
        if np.max(np.abs(step)) > 1e-11:
            raise NumericalError("arclength inversion did not converge; degenerate curve?")
    return BoundaryGrid(
        curve=curve,
        t=t,
        points=curve.point(t),
        normals=curve.normal(t),
        tangents=curve.tangent(t),
        curvature=curve.curvature(t),
        length=L,
    )


@dataclass(frozen=True)
class InteriorQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    margin: float

    def integrate(self, values):
        return float(np.dot(self.weights, values))


def interior_grid(curve, n_radial, n_angular, margin=0.0):
    """Tensor rule for the map (rho, t) -> rho * gamma(t), rho in [0, 1 - margin].

    Gauss-Legendre in rho, periodic trapezoid in t.  ``margin`` is measured
    in the radial scaling coordinate.
    """
    if not 0.0 <= margin < 1.0:
        raise ValueError("margin must lie in [0, 1)")
    x, w = np.polynomial.legendre.leggauss(n_radial)
    top = 1.0 - margin
    rho = 0.5 * top * (x + 1.0)
    wr = 0.5 * top * w
    t = TWO_PI * np.arange(n_angular) / n_angular
    g, g1, _ = curve.derivatives(t)
    jac = g[:, 0] * g1[:, 1] - g[:, 1] * g1[:, 0]
    if np.any(jac <= 0):
        raise ValueError("curve is not star-shaped with respect to the origin")
    nodes = rho[:, None, None] * g[None, :, :]
    weights = (wr * rho)[:, None] * (jac * TWO_PI / n_angular)[None, :]
    return InteriorQuadrature(nodes.reshape(-1, 2), weights.ravel(), margin)


def closest_point(curve, points, n_scan=512, maxiter=40):
    """Closest boundary parameter and signed distance (positive inside).

    Newton on <x - gamma(t), gamma'(t)> = 0 seeded by a coarse scan.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    ts = TWO_PI * np.arange(n_scan) / n_scan
    gs = curve.point(ts)
    t = np.empty(len(pts))
    chunk = max(1, 2 ** 22 // n_scan)
    for lo in range(0, len(pts), chunk):
        p = pts[lo:lo + chunk]
        d2 = ((p[:, None, :] - gs[None, :, :]) ** 2).sum(-1)
        t[lo:lo + chunk] = ts[np.argmin(d2, axis=1)]
    cap = TWO_PI / n_scan
    for _ in range(maxiter):
        g, g1, g2 = curve.derivatives(t)
        r = pts - g
        f = (r * g1).sum(-1)
        fp = -(g1 * g1).sum(-1) + (r * g2).sum(-1)
        step = np.clip(f / np.where(fp < 0, fp, -np.abs(fp) - 1e-300), -cap, cap)
        t = t - step
        if np.max(np.abs(step), initial=0.0) < 1e-15:
            break
    else:
        if np.max(np.abs(step)) > 1e-10:
            raise NumericalError("closest-point Newton iteration did not converge")
    t = np.mod(t, TWO_PI)
    g = curve.point(t)
    n = curve.normal(t)
    dist = ((g - pts) * n).sum(-1)
    return t, dist
