"""Erdos-Szekeres extraction: from many flats in general position to a
certified convex subfamily.

The pipeline mirrors the constructive argument end to end: intersect the
flats with a transversal flat A, flatten to the plane by a generic rational
projection, pick a maximum planar subset in convex position by dynamic
programming, then rebuild exact witness data in R^d (margin-maximizing
tangent hyperplanes, lifted supports, and touch simplices inside balls whose
radius is half the smallest point-to-support distance).  The resulting
certificate is re-verified exactly before it is returned; a verification
failure can only mean an internal bug and raises.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations

from .convexpos import (
    CertificateError,
    ConvexityCertificate,
    certificate_from_cell,
    general_position_flats,
    lines_convex_position_2d,
    transversal_points,
    verify_certificate,
)
from .flats import Flat, GeometryError, Hyperplane, hyperplanes_general_position, points_no_three_collinear
from .lp import lp_maximize
from .randgen import random_directions, random_point
from .rational import (
    Vec,
    as_vec,
    frac_from_str,
    frac_to_str,
    orthogonalize,
    rat_sqrt_floor,
    solve_linear,
    vadd,
    vdot,
    vnorm2,
    vscale,
    vsub,
    vzero,
)


class ExtractionError(RuntimeError):
    """The extraction could not complete on this input (reported honestly;
    not a disproof of convexity)."""


@dataclass
class ExtractionResult:
    chosen_indices: list[int]
    transversal: Flat
    points: list[Vec]
    certificate: ConvexityCertificate

    def to_json(self) -> dict:
        return {
            "format": 1,
            "chosen_indices": list(self.chosen_indices),
            "transversal": self.transversal.to_json(),
            "points": [[frac_to_str(c) for c in p] for p in self.points],
            "certificate": self.certificate.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExtractionResult":
        return cls(
            chosen_indices=list(obj["chosen_indices"]),
            transversal=Flat.from_json(obj["transversal"]),
            points=[tuple(frac_from_str(c) for c in p) for p in obj["points"]],
            certificate=ConvexityCertificate.from_json(obj["certificate"]),
        )


def _orient(p: Vec, q: Vec, r: Vec) -> int:
    v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (v > 0) - (v < 0)


def largest_convex_subset_2d(pts) -> list[int]:
    """Indices of a maximum-cardinality subset in convex position (exact).

    Dynamic programming over convex chains: each candidate polygon is rooted
    at its lexicographically lowest vertex, the remaining vertices appear in
    increasing angular order around the root, and a chain extends only by
    left turns.  Closing turns at the root are automatic for angularly sorted
    chains, so the longest chain value equals the maximum polygon size.
    """
    pts = [as_vec(p) for p in pts]
    if any(len(p) != 2 for p in pts):
        raise GeometryError("points must be planar")
    n = len(pts)
    if n <= 2:
        return list(range(n))
    ok, bad = points_no_three_collinear(pts)
    if not ok:
        raise GeometryError(f"collinear triple at indices {bad}")

    def lexkey(i):
        return (pts[i][1], pts[i][0], i)

    best_size = 2
    best = sorted(range(n), key=lexkey)[:2]

    for a in range(n):
        cands = [i for i in range(n) if i != a and (pts[i][1], pts[i][0]) > (pts[a][1], pts[a][0])]
        if len(cands) + 1 <= best_size:
            continue

        def by_angle(i, j):
            return -_orient(pts[a], pts[i], pts[j])

        cands.sort(key=cmp_to_key(by_angle))
        m = len(cands)
        if m < 2:
            continue
        # chain[i][j]: longest convex chain a -> ... -> cands[i] -> cands[j]
        chain = [[0] * m for _ in range(m)]
        parent = [[-1] * m for _ in range(m)]
        for i in range(m):
            for j in range(i + 1, m):
                chain[i][j] = 3
        for j in range(m):
            for mm in range(j + 1, m):
                pj, pm = pts[cands[j]], pts[cands[mm]]
                for i in range(j):
                    if chain[i][j] + 1 > chain[j][mm] and _orient(pts[cands[i]], pj, pm) > 0:
                        chain[j][mm] = chain[i][j] + 1
                        parent[j][mm] = i
        for i in range(m):
            for j in range(i + 1, m):
                if chain[i][j] > best_size:
                    sel = [cands[j], cands[i]]
                    ii, jj = i, j
                    while parent[ii][jj] != -1:
                        ii, jj = parent[ii][jj], ii
                        sel.append(cands[ii])
                    sel.append(a)
                    best_size = chain[i][j]
                    best = sorted(sel)
    return best


def generic_projection(pts, seed: int = 0, retries: int = 32):
    """Project points of R^d to the plane by a seeded random rational linear
    map, re-checking exactly that no three images are collinear."""
    pts = [as_vec(p) for p in pts]
    d = len(pts[0])
    ok, bad = points_no_three_collinear(pts)
    if not ok:
        raise GeometryError(f"collinear triple at indices {bad}")
    if d == 2:
        return list(pts)
    rng = random.Random(seed)
    for _ in range(retries):
        r1 = random_point(rng, d)
        r2 = random_point(rng, d)
        out = [(vdot(r1, p), vdot(r2, p)) for p in pts]
        ok, _ = points_no_three_collinear(out)
        if ok:
            return out
    raise GeometryError("projection kept producing collinear triples")


def _affine_coords(points, origin: Vec, basis: list[Vec]):
    """Coordinates of each point in the affine frame (origin; basis)."""
    d = len(origin)
    m = len(basis)
    rows = [[basis[j][i] for j in range(m)] for i in range(d)]
    out = []
    for p in points:
        sol = solve_linear(rows, vsub(p, origin))
        assert sol is not None and not sol[1]
        out.append(sol[0])
    return out


def _span_basis(points):
    """Independent difference vectors spanning the direction space of
    aff(points)."""
    from .rational import _eliminate

    diffs = [list(vsub(p, points[0])) for p in points[1:]]
    if not diffs:
        return []
    _eliminate(diffs, len(points[0]))
    return [tuple(row) for row in diffs if any(x != 0 for x in row)]


def _tangent_functional(coords, i):
    """Max-margin rational separator of coords[i] from the other points,
    inside their common affine span: maximize t with w.(x_i - x_j) >= t,
    |w|_inf <= 1.  The margin is positive iff x_i is a vertex."""
    m = len(coords[0])
    cons = []
    for j, xj in enumerate(coords):
        if j == i:
            continue
        diff = vsub(coords[i], xj)
        cons.append((tuple(-c for c in diff) + (Fraction(1),), Fraction(0), "<="))
    for l in range(m):
        e = [Fraction(0)] * (m + 1)
        e[l] = Fraction(1)
        cons.append((tuple(e), Fraction(1), "<="))
        cons.append((tuple(-x for x in e), Fraction(1), "<="))
    obj = (Fraction(0),) * m + (Fraction(1),)
    status, witness, value = lp_maximize(obj, cons)
    assert status == "optimal"
    return witness[:m], value


def extract_convex_flats(
    flats: list[Flat], n: int, seed: int = 0, retries: int = 32
) -> ExtractionResult:
    """Extract n flats in certified convex position from a general-position
    family (0 <= k <= d-2; hyperplanes go through hyperplane_pipeline).

    Steps: transversal points on A; flatten to the plane; maximum convex
    subset by DP; per chosen point a max-margin tangent functional inside
    the affine hull of the chosen points; supports in R^d that contain each
    flat and restrict to the tangent functional on that hull; touch
    simplices and an interior block inside balls of half the minimal
    point-to-support distance; exact certificate verification.
    """
    if n < 3:
        raise ExtractionError("need n >= 3")
    d, k = flats[0].d, flats[0].k
    if k == d - 1:
        raise GeometryError("hyperplane families go through hyperplane_pipeline")
    ok, a_flat = general_position_flats(flats, seed=seed, retries=retries)
    if not ok:
        raise ExtractionError("no transversal flat found; family not in general position?")
    pts = transversal_points(flats, a_flat)
    assert pts is not None

    beta = _affine_coords(pts, a_flat.base, list(a_flat.dirs))
    planar = beta if d - k == 2 else generic_projection(beta, seed=seed, retries=retries)
    sel = largest_convex_subset_2d(planar)
    if len(sel) < n:
        raise ExtractionError(f"largest convex subset has {len(sel)} < n = {n} flats")
    chosen = sel[:n]

    b = [pts[i] for i in chosen]
    span = _span_basis(b)
    m = len(span)
    chi = _affine_coords(b, b[0], span)

    supports = []
    for i in range(n):
        w, margin = _tangent_functional(chi, i)
        assert margin > 0, "chosen point is not a vertex of its hull (bug)"
        rows = [list(v) for v in flats[chosen[i]].dirs]
        rhs = [Fraction(0)] * k
        for t in range(m):
            rows.append(list(span[t]))
            rhs.append(w[t])
        sol = solve_linear([[rows[r][c] for c in range(d)] for r in range(len(rows))], rhs)
        assert sol is not None
        normal = sol[0]
        supports.append(Hyperplane(normal, vdot(normal, b[i])))

    b0 = _centroid(b)
    delta2 = None
    for i, h in enumerate(supports):
        n2 = vnorm2(h.normal)
        for j, p in enumerate(b + [b0]):
            if j == i:
                continue
            dist2 = h.eval(p) ** 2 / n2
            if delta2 is None or dist2 < delta2:
                delta2 = dist2
    delta2 = delta2 / 4  # delta = half the minimal distance
    assert delta2 > 0, "a chosen point lies on a tangent support (bug)"

    touch_sets = []
    for i in range(n):
        f = flats[chosen[i]]
        ws = orthogonalize(f.dirs)
        assert len(ws) == k
        if k == 0:
            touch_sets.append([b[i]])
            continue
        total = sum((vnorm2(w) for w in ws), Fraction(0))
        r = rat_sqrt_floor(delta2 / (4 * total))
        assert r > 0
        s = vzero(d)
        for w in ws:
            s = vadd(s, w)
        pts_i = [vsub(b[i], vscale(r, s))]
        pts_i += [vadd(b[i], vscale(r, w)) for w in ws]
        touch_sets.append(pts_i)

    r0 = rat_sqrt_floor(delta2 / (4 * d))
    ones = (Fraction(1),) * d
    interior = [vsub(b0, vscale(r0, ones))]
    for t in range(d):
        e = [Fraction(0)] * d
        e[t] = r0
        interior.append(vadd(b0, tuple(e)))

    cert = ConvexityCertificate(
        flats=[flats[i] for i in chosen],
        touch_sets=touch_sets,
        supports=supports,
        interior_block=interior,
    )
    accepted, why = verify_certificate(cert)
    if not accepted:
        raise CertificateError(f"pipeline certificate rejected: {why}")
    return ExtractionResult(list(chosen), a_flat, b, cert)


def _centroid(points):
    acc = vzero(len(points[0]))
    for p in points:
        acc = vadd(acc, p)
    return vscale(Fraction(1, len(points)), acc)


def hyperplane_pipeline(
    hps: list[Hyperplane],
    n: int,
    seed: int = 0,
    retries: int = 32,
    max_subsets: int = 5000,
) -> ExtractionResult:
    """Extract n hyperplanes in certified convex position.

    A random planar section turns the family into lines; n-subsets are
    searched in ascending index order (capped) for one whose lines bound a
    common cell, and the witness cell is realized as a certificate in R^d.
    Failure to find a subset within the cap is reported, not a disproof.
    """
    ok, why = hyperplanes_general_position(hps)
    if not ok:
        raise GeometryError(f"hyperplanes not in general position: {why}")
    d = hps[0].d
    N = len(hps)
    if n > N:
        raise ExtractionError(f"asked for {n} of {N} hyperplanes")

    rng = random.Random(seed)
    from .convexpos import _anchored_base, arrangement_anchor

    center, spread = arrangement_anchor(hps)
    for _ in range(retries):
        if d == 2:
            base = vzero(2)
            u, v = (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))
            lines = list(hps)
        else:
            base = _anchored_base(rng, center, spread, d)
            u, v = random_directions(rng, d, 2)
            lines = []
            bad = False
            for h in hps:
                a = (vdot(h.normal, u), vdot(h.normal, v))
                if a[0] == 0 and a[1] == 0:
                    bad = True
                    break
                lines.append(Hyperplane(a, h.offset - vdot(h.normal, base)))
            if bad:
                continue
        try:
            tried = 0
            for subset in combinations(range(N), n):
                if tried >= max_subsets:
                    break
                tried += 1
                res = lines_convex_position_2d([lines[i] for i in subset])
                if not res.convex:
                    continue
                s, t = res.sample_point
                x0 = vadd(base, vadd(vscale(s, u), vscale(t, v)))
                sub_hps = [hps[i] for i in subset]
                sig = tuple(1 if h.eval(x0) > 0 else -1 for h in sub_hps)
                cert = certificate_from_cell(sub_hps, sig, x0)
                points = [_centroid(ts) for ts in cert.touch_sets]
                transversal = Flat(d, 2, base, (u, v)) if d > 2 else Flat(2, 2, base, (u, v))
                return ExtractionResult(list(subset), transversal, points, cert)
            raise ExtractionError(
                f"no convex {n}-subset found among {tried} subsets (cap {max_subsets}); not a disproof"
            )
        except GeometryError:
            if d == 2:
                raise
            continue  # degenerate section; redraw
    raise ExtractionError("no usable section plane found")
