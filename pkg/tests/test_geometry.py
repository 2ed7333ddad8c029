import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov.geometry import (
    TWO_PI,
    Curve,
    arclength_reparameterize,
    closest_point,
    interior_grid,
    make_curve,
    parse_spec,
)

KINDS = ["kind=disk,R=1", "kind=ellipse,a=2,b=1", "kind=ellipse,a=1.5,b=1", "kind=star,r0=1,eps=0.3,m=5"]

# perimeter of the ellipse (2, 1): 8 E(3/4) with mpmath.ellipe at 30 digits
ELLIPSE_21_LENGTH = 9.68844822054767619842850319639


def test_disk_curvature_and_length():
    c = make_curve("kind=disk,R=1")
    t = np.linspace(0, TWO_PI, 50)
    np.testing.assert_allclose(c.curvature(t), 1.0, atol=1e-14)
    assert c.length == pytest.approx(TWO_PI, abs=1e-13)


def test_ellipse_length():
    assert make_curve("kind=ellipse,a=2,b=1").length == pytest.approx(ELLIPSE_21_LENGTH, abs=1e-10)


def test_star_radius_bounds():
    c = make_curve("kind=star,r0=1,eps=0.3,m=5")
    r = np.linalg.norm(c.point(np.linspace(0, TWO_PI, 10001)), axis=1)
    assert r.min() == pytest.approx(0.7, abs=1e-12)
    assert r.max() == pytest.approx(1.3, abs=1e-12)


@pytest.mark.parametrize(
    "spec",
    [
        "kind=ellipse,a=-1,b=1",
        "kind=disk,R=0",
        "kind=star,r0=1,eps=1.2,m=5",
        "kind=star,r0=1,eps=0.2,m=2.5",
        "kind=blob,R=1",
        "kind=disk",
        "kind=disk,R=1,extra=2",
        "kind=disk,R",
        "kind=disk,R=abc",
    ],
)
def test_make_curve_rejects(spec):
    with pytest.raises(ValueError):
        make_curve(spec)


@pytest.mark.parametrize("spec", KINDS)
def test_spec_round_trip(spec):
    c = make_curve(spec)
    assert make_curve(c.to_spec()) == c
    assert parse_spec(c.to_spec())["kind"] == c.kind


def test_make_curve_accepts_dict_and_alias():
    assert make_curve({"kind": "star", "R": 1, "epsilon": 0.1, "m": 3}) == Curve("star", (1.0, 0.1, 3.0))


@pytest.mark.parametrize("spec", KINDS)
@given(t=st.floats(0, TWO_PI))
def test_unit_normals_outward(spec, t):
    c = make_curve(spec)
    n = c.normal(t)
    assert abs(np.linalg.norm(n) - 1.0) < 1e-14
    # star-shaped about the origin, so the outward normal has positive radial part
    assert np.dot(n, c.point(t)) > 0


@pytest.mark.parametrize("spec", KINDS)
def test_gauss_bonnet(spec):
    g = arclength_reparameterize(make_curve(spec), 512)
    assert g.h * g.curvature.sum() == pytest.approx(TWO_PI, abs=1e-10)


def test_disk_grid_angles():
    g = arclength_reparameterize(make_curve("kind=disk,R=1"), 64)
    np.testing.assert_allclose(g.t, TWO_PI * np.arange(64) / 64, atol=1e-14)


def test_ellipse_grid_gaps_uniform():
    c = make_curve("kind=ellipse,a=2,b=1")
    g = arclength_reparameterize(c, 128)
    s = c.arclength(np.append(g.t, g.t[0] + TWO_PI))
    assert np.abs(np.diff(s) - c.length / 128).max() < 1e-10
    # resummation: the polygon through the nodes approaches L
    chord = np.linalg.norm(np.diff(np.vstack([g.points, g.points[:1]]), axis=0), axis=1)
    assert chord.sum() == pytest.approx(c.length, rel=1e-3)


def test_star_grid_monotone():
    g = arclength_reparameterize(make_curve("kind=star,r0=1,eps=0.3,m=5"), 256)
    assert np.all(np.diff(g.t) > 0) and g.t[-1] < TWO_PI


@pytest.mark.parametrize("N", [15, 8, 0, 33])
def test_grid_rejects_bad_N(N):
    with pytest.raises(ValueError):
        arclength_reparameterize(make_curve("kind=disk,R=1"), N)


@pytest.mark.parametrize("spec,coarse", [("kind=ellipse,a=2,b=1", 16), ("kind=star,r0=1,eps=0.3,m=5", 32)])
def test_length_spectral_convergence(spec, coarse):
    c = make_curve(spec)

    def trap(M):
        t = TWO_PI * np.arange(M) / M
        return TWO_PI * c.speed(t).mean()

    e1, e2 = abs(trap(coarse) - c.length), abs(trap(2 * coarse) - c.length)
    assert e2 < 1e-13 or e1 / e2 > 1e3


def test_interior_grid_disk_area():
    q = interior_grid(make_curve("kind=disk,R=1"), 32, 64, margin=0.01)
    assert q.weights.sum() == pytest.approx(np.pi * 0.99 ** 2, abs=1e-8)
    assert np.all(q.weights > 0)
    assert np.linalg.norm(q.nodes, axis=1).max() <= 0.99 + 1e-14


def test_interior_grid_ellipse_area_bound():
    q = interior_grid(make_curve("kind=ellipse,a=2,b=1"), 48, 128, margin=0.02)
    assert q.weights.sum() < 2 * np.pi
    assert q.integrate(np.ones(len(q.weights))) == pytest.approx(q.weights.sum())


def test_interior_grid_cubic_polynomial():
    q = interior_grid(make_curve("kind=disk,R=1"), 16, 32)
    x, y = q.nodes.T
    # int over the unit disk of 1 + x + y^2 + x^3 + x y^2 = pi + pi/4
    assert q.integrate(1 + x + y ** 2 + x ** 3 + x * y ** 2) == pytest.approx(1.25 * np.pi, abs=1e-8)


def test_interior_grid_area_limit():
    c = make_curve("kind=ellipse,a=2,b=1")
    assert interior_grid(c, 32, 256).weights.sum() == pytest.approx(2 * np.pi, abs=1e-10)


@pytest.mark.parametrize("margin", [1.0, 1.5, -0.1])
def test_interior_grid_rejects_margin(margin):
    with pytest.raises(ValueError):
        interior_grid(make_curve("kind=disk,R=1"), 8, 16, margin)


@given(r=st.floats(0.3, 1.2), th=st.floats(0, TWO_PI))
def test_closest_point_disk(r, th):
    t, d = closest_point(make_curve("kind=disk,R=1"), [[r * np.cos(th), r * np.sin(th)]])
    assert d[0] == pytest.approx(1 - r, abs=1e-12)
    assert np.cos(t[0] - th) == pytest.approx(1.0, abs=1e-12)


def test_closest_point_ellipse_tubular(rng):
    c = make_curve("kind=ellipse,a=2,b=1")
    t0 = rng.uniform(0, TWO_PI, 200)
    d0 = rng.uniform(-0.3, 0.4, 200)
    pts = c.point(t0) - d0[:, None] * c.normal(t0)
    t, d = closest_point(c, pts)
    np.testing.assert_allclose(d, d0, atol=1e-12)
    np.testing.assert_allclose(np.cos(t - t0), 1.0, atol=1e-12)


def test_dilate_scales_length():
    for spec in KINDS:
        c = make_curve(spec)
        assert c.dilate(0.5).length == pytest.approx(0.5 * c.length, rel=1e-13)
