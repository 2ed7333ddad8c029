"""Bessel J, modified Bessel I and K: values, derivatives, ratios and zeros.

Values come from ``scipy.special`` (Cephes/AMOS).  Zeros of J_n and J_n' are
found here by sign-change scanning followed by Brent refinement, which is
robust for every order the package uses (n <= a few hundred).
"""

from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import NumericalError

SELECTORS = ("J", "I", "K")


def bessel(selector, n, x):
    """Return ``(f(x), f'(x))`` for f = J_n, I_n or K_n.

    Works elementwise on arrays.  Raises ``OverflowError`` when I_n leaves the
    double range and ``ValueError`` for K at x <= 0.
    """
    if selector not in SELECTORS:
        raise ValueError(f"selector must be one of {SELECTORS}")
    if n < 0 or int(n) != n:
        raise ValueError("order must be a nonnegative integer")
    x = np.asarray(x, dtype=float)
    if selector == "K":
        if np.any(x <= 0):
            raise ValueError("K_n needs x > 0")
        return special.kv(n, x), special.kvp(n, x)
    if np.any(x < 0):
        raise ValueError("J_n and I_n are evaluated for x >= 0 only")
    if selector == "J":
        return special.jv(n, x), special.jvp(n, x)
    with np.errstate(over="ignore"):
        val, der = special.iv(n, x), special.ivp(n, x)
    if np.any(~np.isfinite(val)) or np.any(~np.isfinite(der)):
        raise OverflowError(f"I_{n}(x) exceeds the double range; use log_derivative")
    return val, der


@dataclass(frozen=True)
class BesselFamily:
    selector: str
    n: int
    scheme: str = "scipy.special (Cephes/AMOS)"

    def __call__(self, x):
        return bessel(self.selector, self.n, x)


def bessel_ratio(selector, n, x):
    """f_{n+1}(x) / f_n(x) for f = J or I by backward recurrence (no underflow).

    The recurrence runs downward from order ~n + x + 60, the stable direction
    for the minimal solution.  For J it is infinite at zeros of J_n.
    """
    if selector not in ("J", "I"):
        raise ValueError("ratio defined for 'J' and 'I'")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    sgn = -1.0 if selector == "J" else 1.0
    top = n + int(np.ceil(x.max(initial=0.0))) + 60
    r = np.zeros_like(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        # f_{m-1} = (2m/x) f_m + sgn f_{m+1}  =>  r_m = x / (2m + sgn x r_{m+1})
        for m in range(top, n, -1):
            r = x / (2 * m + sgn * x * r)
    return r


def log_derivative_J(n, x):
    """x J_n'(x) / J_n(x) = n - x J_{n+1}/J_n; infinite at zeros of J_n."""
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        return n - x * bessel_ratio("J", n, x)


def log_derivative_I(n, x):
    """x I_n'(x) / I_n(x) = n + x I_{n+1}/I_n (no overflow for large x)."""
    x = np.asarray(x, dtype=float)
    return n + x * bessel_ratio("I", n, x)


def _j(n):
    return lambda x: special.jv(n, x)


def _jp(n):
    return lambda x: special.jvp(n, x)


_ZERO_CACHE = {}


def _zeros(selector, n, count):
    """First ``count`` positive zeros of J_n (selector 'J') or J_n' ("J'")."""
    f = _j(n) if selector == "J" else _jp(n)
    roots, x = _ZERO_CACHE.get((selector, n), ([], None))
    if x is None:
        # no zeros of J_n or J_n' (n >= 1) lie below n; zeros are > 2.9 apart
        x = max(float(n), 1e-3)
    step = np.pi / 16.0
    fa = f(x)
    limit = x + (count - len(roots) + 2) * 2 * np.pi + 50.0
    while len(roots) < count:
        xb = x + step
        fb = f(xb)
        if fa == 0.0:
            roots.append(x)
        elif fa * fb < 0:
            roots.append(optimize.brentq(f, x, xb, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
        x, fa = xb, fb
        if x > limit:
            raise NumericalError(f"zero search for {selector}_{n} exhausted its bracket range")
    _ZERO_CACHE[(selector, n)] = (roots, x)
    return roots


def bessel_zero(selector, n, k):
    """k-th zero (k >= 1) of J_n (``'J'``) or J_n' (``"J'"``).

    For J_0' the value 0 is counted as the first zero, matching the constant
    Neumann mode of the disk.
    """
    if k < 1:
        raise ValueError("zero index k starts at 1")
    if selector == "J":
        return _zeros("J", n, k)[k - 1]
    if selector in ("J'", "Jp", "dJ"):
        if n == 0:
            return 0.0 if k == 1 else _zeros("J'", 0, k - 1)[k - 2]
        return _zeros("J'", n, k)[k - 1]
    raise ValueError("selector must be 'J' or \"J'\"")


def bessel_zeros_below(selector, n, bound):
    """All zeros (same convention as :func:`bessel_zero`) strictly below ``bound``."""
    out = []
    k = 1
    while True:
        z = bessel_zero(selector, n, k)
        if z >= bound:
            return out
        out.append(z)
        k += 1
