import random
from fractions import Fraction as F

import pytest

from convexflats.flats import (
    Flat,
    GeometryError,
    Hyperplane,
    Meet,
    flat_contains,
    hyperplanes_general_position,
    intersect_flat_hyperplane,
    points_no_three_collinear,
)
from convexflats.randgen import random_flat
from convexflats.rational import vadd, vscale


def x_axis(d):
    e1 = tuple(F(1 if i == 0 else 0) for i in range(d))
    return Flat(d, 1, tuple(F(0) for _ in range(d)), (e1,))


def test_flat_contains_basic():
    f = x_axis(2)
    assert flat_contains(f, (F(5), F(0)))
    assert not flat_contains(f, (F(0), F(1)))


def test_flat_contains_substitution():
    # line through (0,0,1) with direction (1,1,0) passes through (2,2,1)
    f = Flat(3, 1, (F(0), F(0), F(1)), ((F(1), F(1), F(0)),))
    assert f.contains((2, 2, 1))
    assert not f.contains((2, 3, 1))


def test_flat_contains_respan_invariance():
    # re-spanning the same flat must not change membership answers
    rng = random.Random(4)
    for _ in range(20):
        f = random_flat(rng, 3, 2)
        u, v = f.dirs
        respanned = Flat(3, 2, vadd(f.base, u), (vadd(u, v), vscale(F(-3, 7), v)))
        probes = [f.base, vadd(f.base, v), (F(1), F(2), F(3)), vadd(f.base, (F(0), F(0), F(1)))]
        for p in probes:
            assert f.contains(p) == respanned.contains(p)


def test_degenerate_dirs_rejected():
    with pytest.raises(GeometryError):
        Flat(3, 2, (F(0),) * 3, ((F(1), F(0), F(0)), (F(2), F(0), F(0))))


def test_intersect_flat_hyperplane():
    zdir = Flat(3, 1, (F(0),) * 3, ((F(0), F(0), F(1)),))
    h = Hyperplane((F(0), F(0), F(1)), F(1))  # z = 1
    got = intersect_flat_hyperplane(zdir, h)
    assert isinstance(got, Flat)
    assert got.k == 0 and got.base == (F(0), F(0), F(1))

    assert intersect_flat_hyperplane(x_axis(3), h) is Meet.EMPTY
    h_y0 = Hyperplane((F(0), F(1), F(0)), F(0))
    assert intersect_flat_hyperplane(x_axis(3), h_y0) is Meet.CONTAINED


def test_intersect_plane_with_hyperplane():
    # a 2-flat transversal to a hyperplane meets it in a line
    plane = Flat(3, 2, (F(0),) * 3, ((F(1), F(0), F(0)), (F(0), F(1), F(1))))
    h = Hyperplane((F(0), F(0), F(1)), F(2))
    got = intersect_flat_hyperplane(plane, h)
    assert isinstance(got, Flat) and got.k == 1
    assert h.contains_flat(got)
    assert plane.contains(got.base)


def test_hyperplane_to_flat_roundtrip():
    h = Hyperplane((F(1), F(2), F(-1)), F(3))
    f = h.to_flat()
    assert f.k == 2
    assert h.contains_flat(f)


def test_dimension_mismatch():
    with pytest.raises(GeometryError):
        x_axis(2).contains((1, 2, 3))
    with pytest.raises(GeometryError):
        intersect_flat_hyperplane(x_axis(2), Hyperplane((F(1), F(0), F(0)), F(0)))


def test_hyperplanes_general_position():
    tet = [
        Hyperplane((F(1), F(0), F(0)), F(0)),
        Hyperplane((F(0), F(1), F(0)), F(0)),
        Hyperplane((F(0), F(0), F(1)), F(0)),
        Hyperplane((F(1), F(1), F(1)), F(1)),
    ]
    ok, _ = hyperplanes_general_position(tet)
    assert ok
    # parallel pair: no single intersection point
    bad = tet[:3] + [Hyperplane((F(1), F(0), F(0)), F(1)), Hyperplane((F(2), F(0), F(0)), F(5))]
    ok, why = hyperplanes_general_position(bad)
    assert not ok


def test_no_three_collinear():
    ok, bad = points_no_three_collinear([(F(0), F(0)), (F(1), F(1)), (F(2), F(2)), (F(0), F(1))])
    assert not ok and bad == (0, 1, 2)
    ok, _ = points_no_three_collinear([(F(0), F(0)), (F(1), F(0)), (F(0), F(1))])
    assert ok


def test_json_roundtrip():
    f = Flat(3, 1, (F(1, 2), F(0), F(-3)), ((F(1), F(2, 7), F(0)),))
    assert Flat.from_json(f.to_json()) == f
    h = Hyperplane((F(1), F(-2, 3)), F(5, 9))
    assert Hyperplane.from_json(h.to_json()) == h
