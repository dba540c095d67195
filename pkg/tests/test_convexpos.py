import random
from fractions import Fraction as F
from itertools import combinations, product

import pytest

from convexflats.convexpos import (
    CertificateError,
    ConvexityCertificate,
    certificate_from_cell,
    general_position_flats,
    hyperplanes_convex_position,
    lines_convex_position_2d,
    points_convex_position,
    transversal_points,
    verify_certificate,
)
from convexflats.flats import Flat, GeometryError, Hyperplane
from convexflats.lp import lp_feasible
from convexflats.randgen import random_flat, random_gp_lines, random_gp_points
from convexflats.rational import affine_rank, as_vec, vdot


SQUARE = [(F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1))]


def square_certificate():
    h_bot, h_right = Hyperplane((F(0), F(1)), F(0)), Hyperplane((F(1), F(0)), F(1))
    h_top, h_left = Hyperplane((F(0), F(1)), F(1)), Hyperplane((F(1), F(0)), F(0))
    supports = [h_bot, h_right, h_top, h_left]
    touch = [
        [SQUARE[0], SQUARE[1]],
        [SQUARE[1], SQUARE[2]],
        [SQUARE[2], SQUARE[3]],
        [SQUARE[3], SQUARE[0]],
    ]
    c = F(1, 2)
    shrink = lambda p: ((p[0] - c) * F(3, 4) + c, (p[1] - c) * F(3, 4) + c)
    interior = [shrink(p) for p in SQUARE]
    return ConvexityCertificate([h.to_flat() for h in supports], touch, supports, interior)


def test_verify_square_certificate():
    ok, why = verify_certificate(square_certificate())
    assert ok, why


def test_verify_rejects_diagonal():
    cert = square_certificate()
    diag = Hyperplane((F(1), F(-1)), F(0))
    cert.flats[0] = diag.to_flat()
    cert.supports[0] = diag
    cert.touch_sets[0] = [SQUARE[0], SQUARE[2]]
    ok, why = verify_certificate(cert)
    assert not ok and "(c)" in why


def test_verify_rejects_thin_touch_set():
    cert = square_certificate()
    cert.touch_sets[0] = [SQUARE[0], SQUARE[0]]  # does not span dimension 1
    ok, why = verify_certificate(cert)
    assert not ok


def independent_clause_check(cert: ConvexityCertificate) -> bool:
    """Re-implementation of the acceptance clauses from raw arithmetic over
    every (flat, point) pair; used to cross-examine verify_certificate."""
    pts = [as_vec(p) for p in cert.interior_block]
    for ts in cert.touch_sets:
        pts += [as_vec(p) for p in ts]
    for f, ts, h in zip(cert.flats, cert.touch_sets, cert.supports):
        if affine_rank(ts) != f.k:
            return False
        if any(not f.contains(p) for p in ts):
            return False
        if any(vdot(h.normal, v) != 0 for v in f.dirs) or h.eval(f.base) != 0:
            return False
        touch = {as_vec(p) for p in ts}
        signs = {1 if h.eval(p) > 0 else (-1 if h.eval(p) < 0 else 0) for p in pts if p not in touch}
        if len(signs) != 1 or 0 in signs:
            return False
    return affine_rank(cert.interior_block) == len(cert.interior_block[0])


def test_independent_clause_check_agrees():
    good = square_certificate()
    assert verify_certificate(good)[0] and independent_clause_check(good)
    bad = square_certificate()
    bad.touch_sets[0] = [SQUARE[0], SQUARE[2]]  # not inside the bottom line
    assert not verify_certificate(bad)[0] and not independent_clause_check(bad)


def test_points_convex_position_examples():
    assert points_convex_position(SQUARE)
    assert not points_convex_position(SQUARE + [(F(1, 2), F(1, 2))])
    with pytest.raises(GeometryError):
        points_convex_position(SQUARE + [SQUARE[0]])
    with pytest.raises(GeometryError):
        points_convex_position(SQUARE[:2])


def hull_vertex_count(pts):
    """Planar convex-hull oracle (exact orientations): number of hull
    vertices, valid under no-three-collinear."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return len(pts)

    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    def half(seq):
        out = []
        for p in seq:
            while len(out) > 1 and orient(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    upper = half(pts)
    lower = half(pts[::-1])
    return len(upper) + len(lower) - 2


def test_points_agree_with_hull_oracle():
    rng = random.Random(77)
    for trial in range(120):
        n = rng.randint(3, 8)
        pts = random_gp_points(rng, 2, n, grid=60)
        want = hull_vertex_count(pts) == n
        assert points_convex_position(pts) == want, (trial, pts)


def test_points_vs_subset_bruteforce():
    # 5 random points: decision equals the "every point off the hull of the
    # others" brute force via the planar oracle
    rng = random.Random(5)
    for _ in range(40):
        pts = random_gp_points(rng, 2, 5, grid=40)
        brute = all(hull_vertex_count([q for j, q in enumerate(pts) if j != i] + [pts[i]]) == 5 for i in range(5))
        assert points_convex_position(pts) == brute


# --- lines ------------------------------------------------------------------


def test_triangle_lines():
    tri = [Hyperplane((F(1), F(0)), F(0)), Hyperplane((F(0), F(1)), F(0)), Hyperplane((F(1), F(1)), F(1))]
    res = lines_convex_position_2d(tri)
    assert res.convex
    # the witness cell really is bounded by all three lines: check the edges
    assert len(res.edge_points) == 3
    for i, (p1, p2) in enumerate(res.edge_points):
        assert tri[i].eval(p1) == 0 and tri[i].eval(p2) == 0 and p1 != p2


def test_four_lines_always_convex_sampled():
    for trial in range(60):
        lines = random_gp_lines(random.Random(3000 + trial), 4)
        assert lines_convex_position_2d(lines).convex, trial


def test_single_and_two_lines():
    one = [Hyperplane((F(2), F(1)), F(3))]
    assert lines_convex_position_2d(one).convex
    two = [Hyperplane((F(1), F(0)), F(0)), Hyperplane((F(0), F(1)), F(0))]
    assert lines_convex_position_2d(two).convex


def test_lines_general_position_required():
    with pytest.raises(GeometryError, match="parallel"):
        lines_convex_position_2d([Hyperplane((F(1), F(0)), F(0)), Hyperplane((F(2), F(0)), F(1))])
    with pytest.raises(GeometryError, match="concurrent"):
        lines_convex_position_2d(
            [
                Hyperplane((F(1), F(0)), F(0)),
                Hyperplane((F(0), F(1)), F(0)),
                Hyperplane((F(1), F(1)), F(0)),
            ]
        )


def bruteforce_lines_convex(lines):
    """Oracle: enumerate all 2^n sign vectors; a cell works if it is open
    nonempty and its closure meets every line in a positive-length segment,
    all by strict rational LP."""
    n = len(lines)
    for sig in product((1, -1), repeat=n):
        open_cell = [(tuple(s * c for c in h.normal), s * h.offset, ">") for s, h in zip(sig, lines)]
        if not lp_feasible(open_cell).feasible:
            continue
        good = True
        for i in range(n):
            cons = [(lines[i].normal, lines[i].offset, "=")]
            for j in range(n):
                if j != i:
                    cons.append(
                        (tuple(sig[j] * c for c in lines[j].normal), sig[j] * lines[j].offset, ">")
                    )
            st = lp_feasible(cons)
            if not st.feasible:
                good = False
                break
            # a second, distinct point on the same edge
            u = (-lines[i].normal[1], lines[i].normal[0])
            w = st.witness
            c1 = cons + [(u, vdot(u, w), ">")]
            c2 = cons + [(tuple(-x for x in u), -vdot(u, w), ">")]
            if not (lp_feasible(c1).feasible or lp_feasible(c2).feasible):
                good = False
                break
        if good:
            return True
    return False


def test_lines_match_bruteforce_cells():
    rng = random.Random(13)
    for trial in range(12):
        n = rng.randint(3, 6)
        lines = random_gp_lines(random.Random(4000 + trial), n)
        assert lines_convex_position_2d(lines).convex == bruteforce_lines_convex(lines), trial


# --- hyperplanes -------------------------------------------------------------


def test_tetrahedron_and_cube_like():
    tet = [
        Hyperplane((F(1), F(0), F(0)), F(0)),
        Hyperplane((F(0), F(1), F(0)), F(0)),
        Hyperplane((F(0), F(0), F(1)), F(0)),
        Hyperplane((F(1), F(1), F(1)), F(1)),
    ]
    dec = hyperplanes_convex_position(tet, seed=3)
    assert dec.convex and dec.certified
    assert verify_certificate(dec.certificate)[0]
    # perturbed cube: six planes, pairwise non-parallel
    cube = [
        Hyperplane((F(1), F(0), F(1, 97)), F(0)),
        Hyperplane((F(1), F(1, 89), F(0)), F(1)),
        Hyperplane((F(1, 83), F(1), F(0)), F(0)),
        Hyperplane((F(0), F(1), F(1, 79)), F(1)),
        Hyperplane((F(0), F(1, 73), F(1)), F(0)),
        Hyperplane((F(1, 71), F(0), F(1)), F(1)),
    ]
    dec = hyperplanes_convex_position(cube, seed=5)
    assert dec.convex and verify_certificate(dec.certificate)[0]


def test_hyperplanes_gp_enforced():
    bad = [
        Hyperplane((F(1), F(0), F(0)), F(0)),
        Hyperplane((F(1), F(0), F(0)), F(1)),
        Hyperplane((F(0), F(1), F(0)), F(0)),
        Hyperplane((F(0), F(0), F(1)), F(0)),
    ]
    with pytest.raises(GeometryError):
        hyperplanes_convex_position(bad)


def test_positive_answers_always_certified():
    rng = random.Random(21)
    from convexflats.randgen import random_gp_hyperplanes

    found = 0
    for trial in range(10):
        hps = random_gp_hyperplanes(random.Random(600 + trial), 3, 4)
        dec = hyperplanes_convex_position(hps, seed=trial)
        if dec.convex:
            found += 1
            ok, why = verify_certificate(dec.certificate)
            assert ok, why
    assert found >= 1


# --- general position of flats ----------------------------------------------


def test_general_position_flats_lines_in_r3():
    flats = [random_flat(random.Random(100 + i), 3, 1) for i in range(4)]
    ok, A = general_position_flats(flats, seed=1)
    assert ok and A.k == 2
    pts = transversal_points(flats, A)
    assert len(set(pts)) == 4
    assert affine_rank(pts) == 2


def test_general_position_flats_duplicates_fail():
    f = random_flat(random.Random(1), 3, 1)
    flats = [f, f, random_flat(random.Random(2), 3, 1), random_flat(random.Random(3), 3, 1)]
    ok, _ = general_position_flats(flats, seed=1)
    assert not ok


def test_general_position_planes_in_r4():
    flats = [random_flat(random.Random(300 + i), 4, 2) for i in range(3)]
    ok, A = general_position_flats(flats, seed=2)
    assert ok and A.k == 2


def test_general_position_routes_hyperplanes():
    hps = [
        Hyperplane((F(1), F(0)), F(0)),
        Hyperplane((F(0), F(1)), F(0)),
        Hyperplane((F(1), F(1)), F(1)),
    ]
    flats = [h.to_flat() for h in hps]
    ok, A = general_position_flats(flats)
    assert ok and A is None


def test_certificate_json_roundtrip():
    cert = square_certificate()
    back = ConvexityCertificate.from_json(cert.to_json())
    assert verify_certificate(back)[0]
    assert back.supports == cert.supports
