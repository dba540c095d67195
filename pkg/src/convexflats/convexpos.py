"""Deciding and certifying convex position.

A family of k-flats is in convex position when some d-dimensional polytope
meets every flat in exactly a k-dimensional face.  Positive answers here are
always backed by a machine-checkable certificate: per flat, a touch set of
points spanning the face, a supporting hyperplane containing the flat, and a
block of interior points witnessing full dimension.  Certificate checking is
purely rational sign and rank arithmetic, so an accepted certificate is an
exact proof.

Negative answers from the randomized deciders are reported but not certified;
only explicit constructions (see the non-convex family builders) upgrade a
negative to a proof.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .flats import (
    Flat,
    GeometryError,
    Hyperplane,
    hyperplanes_general_position,
    points_no_three_collinear,
)
from .lp import lp_feasible, vertex_enumeration
from .randgen import random_directions, random_point
from .rational import (
    Vec,
    affine_rank,
    as_vec,
    frac_from_str,
    frac_to_str,
    is_zero,
    solve_unique,
    vadd,
    vdot,
    vscale,
    vsub,
    vzero,
)


class CertificateError(RuntimeError):
    """An internally built certificate failed exact verification (a bug)."""


@dataclass
class ConvexityCertificate:
    """Exact witness that a family of flats is in convex position."""

    flats: list[Flat]
    touch_sets: list[list[Vec]]
    supports: list[Hyperplane]
    interior_block: list[Vec]

    def to_json(self) -> dict:
        pt = lambda p: [frac_to_str(c) for c in p]
        return {
            "format": 1,
            "flats": [f.to_json() for f in self.flats],
            "touch_sets": [[pt(p) for p in ts] for ts in self.touch_sets],
            "supports": [h.to_json() for h in self.supports],
            "interior_block": [pt(p) for p in self.interior_block],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ConvexityCertificate":
        pt = lambda p: tuple(frac_from_str(c) for c in p)
        return cls(
            flats=[Flat.from_json(f) for f in obj["flats"]],
            touch_sets=[[pt(p) for p in ts] for ts in obj["touch_sets"]],
            supports=[Hyperplane.from_json(h) for h in obj["supports"]],
            interior_block=[pt(p) for p in obj["interior_block"]],
        )


def verify_certificate(cert: ConvexityCertificate) -> tuple[bool, str]:
    """Exact verification; returns (accepted, diagnostic).

    With V = interior block plus all touch points and P = conv(V), acceptance
    means: for every flat i, (a) its touch set lies inside the flat, (b) its
    support hyperplane contains the flat, (c) every point of V outside the
    touch set lies strictly on one fixed side of the support, and (d) the
    touch set affinely spans dimension exactly k (and the interior block
    spans R^d).  Together these force flat_i meet P = conv(touch set), a
    k-face of the d-dimensional polytope P.
    """
    n = len(cert.flats)
    if not (len(cert.touch_sets) == len(cert.supports) == n):
        return False, "certificate lists have mismatched lengths"
    if n == 0:
        return False, "certificate has no flats"
    d = cert.flats[0].d
    if any(f.d != d for f in cert.flats) or any(h.d != d for h in cert.supports):
        return False, "mixed ambient dimensions"
    for i, f in enumerate(cert.flats):
        if f.k > d - 1:
            return False, f"flat {i} is not a proper flat (k={f.k})"
        if len(cert.touch_sets[i]) < f.k + 1:
            return False, f"flat {i}: touch set needs at least k+1 points"
    if len(cert.interior_block) < d + 1:
        return False, "interior block needs at least d+1 points"

    for i, (f, ts) in enumerate(zip(cert.flats, cert.touch_sets)):
        for j, p in enumerate(ts):
            if not f.contains(p):
                return False, f"clause (a): touch point {j} of flat {i} is off the flat"
    for i, (f, h) in enumerate(zip(cert.flats, cert.supports)):
        if not h.contains_flat(f):
            return False, f"clause (b): support {i} does not contain flat {i}"

    all_points: list[Vec] = [as_vec(p) for p in cert.interior_block]
    for ts in cert.touch_sets:
        all_points.extend(as_vec(p) for p in ts)

    for i, h in enumerate(cert.supports):
        touch = {as_vec(p) for p in cert.touch_sets[i]}
        side = 0
        for p in all_points:
            if p in touch:
                continue
            s = h.eval(p)
            if s == 0:
                return False, f"clause (c): a point of V lies on support {i}"
            s = 1 if s > 0 else -1
            if side == 0:
                side = s
            elif side != s:
                return False, f"clause (c): points of V on both sides of support {i}"

    for i, (f, ts) in enumerate(zip(cert.flats, cert.touch_sets)):
        if affine_rank(ts) != f.k:
            return False, f"clause (d): touch set {i} does not span dimension {f.k}"
    if affine_rank(cert.interior_block) != d:
        return False, "clause (d): interior block does not affinely span R^d"
    return True, "ok"


def points_convex_position(pts) -> bool:
    """True iff every point is a vertex of the convex hull (exact).

    Point i fails exactly when it is a convex combination of the others,
    which is a rational LP feasibility question.
    """
    pts = [as_vec(p) for p in pts]
    if len(pts) < 3:
        raise GeometryError("need at least 3 points")
    if len(set(pts)) != len(pts):
        raise GeometryError("duplicate points")
    d = len(pts[0])
    for i, p in enumerate(pts):
        others = [q for j, q in enumerate(pts) if j != i]
        m = len(others)
        cons = []
        for j in range(m):
            e = [Fraction(0)] * m
            e[j] = Fraction(-1)
            cons.append((tuple(e), Fraction(0), "<="))  # lambda_j >= 0
        for coord in range(d):
            cons.append((tuple(q[coord] for q in others), p[coord], "="))
        cons.append(((Fraction(1),) * m, Fraction(1), "="))
        if lp_feasible(cons).feasible:
            return False
    return True


@dataclass
class CellWitness:
    """A cell of a line arrangement bounded by every line of the family."""

    convex: bool
    sign_vector: tuple[int, ...] | None = None
    sample_point: Vec | None = None
    edge_points: list[tuple[Vec, Vec]] | None = None


def _rot90(v: Vec) -> Vec:
    return (-v[1], v[0])


def _point_on_line(h: Hyperplane) -> Vec:
    n2 = vdot(h.normal, h.normal)
    return vscale(h.offset / n2, h.normal)


def _lines_general_position(lines: list[Hyperplane]):
    n = len(lines)
    verts: dict[tuple[int, int], Vec] = {}
    for i, j in combinations(range(n), 2):
        cross = lines[i].normal[0] * lines[j].normal[1] - lines[i].normal[1] * lines[j].normal[0]
        if cross == 0:
            raise GeometryError(f"lines {i} and {j} are parallel")
        v = solve_unique([lines[i].normal, lines[j].normal], [lines[i].offset, lines[j].offset])
        verts[(i, j)] = v
        for l in range(n):
            if l != i and l != j and lines[l].eval(v) == 0:
                raise GeometryError(f"lines {i}, {j}, {l} are concurrent")
    return verts


def lines_convex_position_2d(lines: list[Hyperplane]) -> CellWitness:
    """Decide whether n lines in the plane are in convex position.

    The family is convex exactly when some arrangement cell has an edge of
    positive length on every line.  Candidate cells are collected as exact
    sign vectors of rational sample points placed in the four quadrants
    around each arrangement vertex; since no two lines are parallel, every
    cell's closure is a pointed polyhedron and therefore touches a vertex,
    so this candidate set covers all cells.  Per candidate, the edge on each
    line is the line's open interval cut out by the other halfplanes,
    computed in closed form (the one-dimensional restriction of the strict
    LP); two interior points of the interval are returned as witnesses.
    """
    if any(h.d != 2 for h in lines):
        raise GeometryError("lines must live in R^2")
    n = len(lines)
    if n == 0:
        raise GeometryError("empty family")
    if n == 1:
        h = lines[0]
        p = _point_on_line(h)
        sample = vadd(p, h.normal)
        u = _rot90(h.normal)
        return CellWitness(True, (1,), sample, [(p, vadd(p, u))])

    verts = _lines_general_position(lines)

    candidates: dict[tuple[int, ...], Vec] = {}
    for (i, j), v in verts.items():
        ui, uj = _rot90(lines[i].normal), _rot90(lines[j].normal)
        bound = None
        for l in range(n):
            if l in (i, j):
                continue
            denom = abs(vdot(lines[l].normal, ui)) + abs(vdot(lines[l].normal, uj)) + 1
            r = abs(lines[l].eval(v)) / denom
            if bound is None or r < bound:
                bound = r
        s = bound if bound is not None else Fraction(1)
        for ei in (1, -1):
            for ej in (1, -1):
                p = vadd(v, vscale(s, vadd(vscale(ei, ui), vscale(ej, uj))))
                sig = tuple(1 if lines[l].eval(p) > 0 else -1 for l in range(n))
                assert all(lines[l].eval(p) != 0 for l in range(n))
                candidates.setdefault(sig, p)

    for sig in sorted(candidates):
        sample = candidates[sig]
        edges = []
        for i in range(n):
            seg = _edge_interval(lines, sig, i)
            if seg is None:
                break
            edges.append(seg)
        else:
            return CellWitness(True, sig, sample, edges)
    return CellWitness(False)


def _edge_interval(lines, sig, i):
    """Two distinct points of {x on line i : strictly inside cell sig}, or None.

    On the line x(t) = q + t u each remaining constraint is linear in t with a
    nonzero slope (no parallels), so the cell cuts an open interval out of the
    line; the edge exists iff the interval is nonempty.
    """
    q = _point_on_line(lines[i])
    u = _rot90(lines[i].normal)
    lo, hi = None, None  # None encodes -inf / +inf
    for l, h in enumerate(lines):
        if l == i:
            continue
        g = sig[l] * vdot(h.normal, u)
        h0 = sig[l] * h.eval(q)
        t = -h0 / g
        if g > 0:
            if lo is None or t > lo:
                lo = t
        else:
            if hi is None or t < hi:
                hi = t
    if lo is not None and hi is not None:
        if not lo < hi:
            return None
        t1 = lo + (hi - lo) / 3
        t2 = lo + 2 * (hi - lo) / 3
    elif lo is not None:
        t1, t2 = lo + 1, lo + 2
    elif hi is not None:
        t1, t2 = hi - 2, hi - 1
    else:
        t1, t2 = Fraction(0), Fraction(1)
    return (vadd(q, vscale(t1, u)), vadd(q, vscale(t2, u)))


def _add_spanning(points, candidates, want_rank, limit):
    """Greedy: extend ``points`` with candidates until affine rank hits
    want_rank (at most ``limit`` points); returns None on failure."""
    out = list(points)
    rank = affine_rank(out) if out else -1
    for c in candidates:
        if len(out) >= limit and rank == want_rank:
            break
        trial = out + [c]
        r = affine_rank(trial)
        if r > rank:
            out = trial
            rank = r
        if rank == want_rank and len(out) >= limit:
            break
    if rank != want_rank or len(out) < limit:
        return None
    return out


def certificate_from_cell(
    hps: list[Hyperplane], sign_vector, sample_point, box_scale: Fraction | None = None
) -> ConvexityCertificate:
    """Build an exact certificate from a cell bounded by every hyperplane.

    The cell's closure is intersected with a large box sized from the
    family's intersection vertices, vertex-enumerated exactly, and each
    facet contributes d touch points from its relative interior (facet
    centroid pushed halfway toward facet vertices).  The interior block is
    built the same way around the centroid of all vertices.  The box is
    enlarged and the construction retried if a facet comes out too thin.
    """
    d = hps[0].d
    n = len(hps)
    coords = [abs(c) for c in sample_point] + [Fraction(1)]
    for idx in combinations(range(n), d):
        pt = solve_unique([hps[i].normal for i in idx], [hps[i].offset for i in idx])
        if pt is not None:
            coords.extend(abs(c) for c in pt)
    m = 2 * max(coords) if box_scale is None else box_scale

    last_reason = "unknown"
    for _attempt in range(6):
        halfspaces = []
        for s, h in zip(sign_vector, hps):
            halfspaces.append((vscale(-s, h.normal), -s * h.offset))
        for axis in range(d):
            e = [Fraction(0)] * d
            e[axis] = Fraction(1)
            halfspaces.append((tuple(e), m))
            halfspaces.append((tuple(-x for x in e), m))
        verts = vertex_enumeration(halfspaces, d)
        if len(verts) < d + 1 or affine_rank(verts) != d:
            last_reason = "cell-box intersection is not full dimensional"
            m *= 2
            continue

        ok = True
        touch_sets = []
        for i, h in enumerate(hps):
            fverts = [v for v in verts if h.eval(v) == 0]
            if affine_rank(fverts) != d - 1:
                ok = False
                last_reason = f"facet {i} is not (d-1)-dimensional inside the box"
                break
            g = _centroid(fverts)
            cands = [vscale(Fraction(1, 2), vadd(g, w)) for w in fverts]
            ts = _add_spanning([g], cands, d - 1, d)
            if ts is None:
                ok = False
                last_reason = f"facet {i}: could not span a touch set"
                break
            touch_sets.append(ts)
        if not ok:
            m *= 2
            continue

        center = _centroid(verts)
        cands = [vscale(Fraction(1, 2), vadd(center, w)) for w in verts]
        interior = _add_spanning([center], cands, d, d + 1)
        if interior is None:
            m *= 2
            last_reason = "interior block failed to span"
            continue

        cert = ConvexityCertificate(
            flats=[h.to_flat() for h in hps],
            touch_sets=touch_sets,
            supports=list(hps),
            interior_block=interior,
        )
        accepted, why = verify_certificate(cert)
        if not accepted:
            raise CertificateError(f"internally built certificate rejected: {why}")
        return cert
    raise CertificateError(f"could not realize the witness cell: {last_reason}")


def _centroid(points) -> Vec:
    n = len(points)
    acc = vzero(len(points[0]))
    for p in points:
        acc = vadd(acc, p)
    return vscale(Fraction(1, n), acc)


@dataclass
class HyperplaneDecision:
    convex: bool
    certificate: ConvexityCertificate | None = None
    certified: bool = False
    detail: str = ""


def _cell_candidates(hps: list[Hyperplane]):
    """Exact sample points for every arrangement cell, keyed by sign vector.

    Around each intersection vertex, step into all 2^d adjacent orthants
    along the dual basis of the incident normals, with the step chosen small
    enough (exactly) that no other hyperplane is crossed.  Every cell of a
    general-position arrangement is pointed and therefore touches a vertex,
    so this enumeration is complete.
    """
    d = hps[0].d
    n = len(hps)
    cands: dict[tuple[int, ...], Vec] = {}
    for idx in combinations(range(n), d):
        rows = [hps[i].normal for i in idx]
        v = solve_unique(rows, [hps[i].offset for i in idx])
        if v is None:
            continue
        ws = []
        for j in range(d):
            e = [Fraction(0)] * d
            e[j] = Fraction(1)
            ws.append(solve_unique(rows, e))  # n_i . w_j = delta_ij
        t = None
        for l, h in enumerate(hps):
            if l in idx:
                continue
            denom = sum(abs(vdot(h.normal, w)) for w in ws) + 1
            r = abs(h.eval(v)) / denom
            if t is None or r < t:
                t = r
        if t is None:
            t = Fraction(1)
        for combo in product((1, -1), repeat=d):
            p = v
            for ej, w in zip(combo, ws):
                p = vadd(p, vscale(t * ej, w))
            sig = tuple(1 if h.eval(p) > 0 else -1 for h in hps)
            cands.setdefault(sig, p)
    return cands


def _cell_has_all_facets(hps, sig) -> bool:
    """Exact: the closed cell meets every hyperplane in a (d-1)-dimensional
    face (the restriction to the hyperplane is relatively open, so nonempty
    already implies full facet dimension)."""
    for i, h in enumerate(hps):
        cons = [(h.normal, h.offset, "=")]
        for j, g in enumerate(hps):
            if j != i:
                cons.append((tuple(sig[j] * c for c in g.normal), sig[j] * g.offset, ">"))
        if not lp_feasible(cons).feasible:
            return False
    return True


def complete_cell_search(hps: list[Hyperplane]):
    """Deterministic exhaustive search for a cell bounded by every
    hyperplane; returns (sign_vector, sample_point) or None.  Complete, and
    affordable while C(n,d) * 2^d stays at desk scale."""
    cands = _cell_candidates(hps)
    for sig in sorted(cands):
        if _cell_has_all_facets(hps, sig):
            return sig, cands[sig]
    return None


def arrangement_anchor(hps: list[Hyperplane]):
    """Centroid and spread of the arrangement's intersection vertices.

    Any cell bounded by every hyperplane lives among these vertices, so
    section planes are sampled around them rather than blindly.
    """
    d = hps[0].d
    verts = []
    for idx in combinations(range(len(hps)), d):
        pt = solve_unique([hps[i].normal for i in idx], [hps[i].offset for i in idx])
        if pt is not None:
            verts.append(pt)
    if not verts:
        return vzero(d), Fraction(1)
    center = _centroid(verts)
    spread = max(
        (max(abs(c) for c in vsub(v, center)) for v in verts), default=Fraction(1)
    )
    return center, max(spread, Fraction(1))


def _anchored_base(rng: random.Random, center, spread, d: int):
    jitter = tuple(
        Fraction(rng.randint(-10_000, 10_000), 20_000) * spread for _ in range(d)
    )
    return vadd(center, jitter)


COMPLETE_SEARCH_CAP = 20_000  # C(n,d) * 2^d budget for the exhaustive search


def hyperplanes_convex_position(
    hps: list[Hyperplane], seed: int = 0, retries: int = 32, sections: int = 3
) -> HyperplaneDecision:
    """Decide convex position of hyperplanes.

    First pass: random rational 2-plane sections (anchored near the
    arrangement's intersection vertices) turn the family into lines; a cell
    bounded by every line lifts to a witness cell in R^d.  A slice through a
    witness cell can still miss some of its facets, so when no section
    succeeds and the arrangement is desk-sized, a complete exact cell search
    settles the question; only then is a negative certified-complete.
    Degenerate sections are redrawn (at most ``retries`` times).
    """
    ok, why = hyperplanes_general_position(hps)
    if not ok:
        raise GeometryError(f"hyperplanes not in general position: {why}")
    d = hps[0].d
    n = len(hps)

    if d == 2:
        res = lines_convex_position_2d(hps)
        if not res.convex:
            return HyperplaneDecision(False, detail="no witness cell (certified-complete in d=2)")
        cert = certificate_from_cell(hps, res.sign_vector, res.sample_point)
        return HyperplaneDecision(True, cert, True, "witness cell realized")

    rng = random.Random(seed)
    center, spread = arrangement_anchor(hps)

    def settle_negative(nsections: int) -> HyperplaneDecision:
        from math import comb

        if comb(n, d) * 2**d <= COMPLETE_SEARCH_CAP:
            hit = complete_cell_search(hps)
            if hit is not None:
                sig, sample = hit
                cert = certificate_from_cell(hps, sig, sample)
                return HyperplaneDecision(
                    True, cert, True, "witness cell found by exhaustive search"
                )
            return HyperplaneDecision(
                False,
                detail=f"no witness cell exists (exhaustive search, after {nsections} sections)",
            )
        return HyperplaneDecision(
            False, detail=f"no witness found on {nsections} clean section(s); not certified"
        )

    clean_sections = 0
    for _ in range(retries):
        base = _anchored_base(rng, center, spread, d)
        dirs = random_directions(rng, d, 2)
        u, v = dirs
        lines = []
        degenerate = False
        for h in hps:
            a = (vdot(h.normal, u), vdot(h.normal, v))
            rhs = h.offset - vdot(h.normal, base)
            if a[0] == 0 and a[1] == 0:
                degenerate = True
                break
            lines.append(Hyperplane(a, rhs))
        if degenerate:
            continue
        try:
            res = lines_convex_position_2d(lines)
        except GeometryError:
            continue  # section lines degenerate; redraw the plane
        clean_sections += 1
        if res.convex:
            s, t = res.sample_point
            x0 = vadd(base, vadd(vscale(s, u), vscale(t, v)))
            sig = tuple(1 if h.eval(x0) > 0 else -1 for h in hps)
            assert sig == res.sign_vector
            cert = certificate_from_cell(hps, sig, x0)
            return HyperplaneDecision(True, cert, True, "witness cell realized from section")
        if clean_sections >= sections:
            return settle_negative(clean_sections)
    return settle_negative(clean_sections)


def transversal_points(flats: list[Flat], a_flat: Flat):
    """Exact intersection points flat_i cap A, or None if some intersection
    is not a single point."""
    d = a_flat.d
    pts = []
    for f in flats:
        if f.k == 0:
            if not a_flat.contains(f.base):
                return None
            pts.append(f.base)
            continue
        cols = []
        for row in range(d):
            cols.append(
                [f.dirs[j][row] for j in range(f.k)]
                + [-a_flat.dirs[j][row] for j in range(a_flat.k)]
            )
        rhs = vsub(a_flat.base, f.base)
        sol = solve_unique(cols, rhs)
        if sol is None:
            return None
        beta = sol[f.k :]
        p = a_flat.base
        for bcoef, bdir in zip(beta, a_flat.dirs):
            p = vadd(p, vscale(bcoef, bdir))
        pts.append(p)
    return pts


def general_position_flats(flats: list[Flat], seed: int = 0, retries: int = 32):
    """Search for a transversal (d-k)-flat A meeting every flat in one point,
    with the meeting points pairwise distinct, no three collinear, and
    affinely spanning A.  Returns (ok, A); the negative is probabilistic.

    Hyperplane families (k = d-1) are routed to the exact hyperplane
    general-position check instead (no transversal flat is involved).
    """
    if not flats:
        raise GeometryError("empty family")
    d = flats[0].d
    k = flats[0].k
    if any((f.d, f.k) != (d, k) for f in flats):
        raise GeometryError("flats of mixed dimensions")
    if k == d - 1:
        hps = []
        for f in flats:
            normal = _flat_normal(f)
            hps.append(Hyperplane(normal, vdot(normal, f.base)))
        ok, _ = hyperplanes_general_position(hps)
        return ok, None
    if k > d - 1:
        raise GeometryError("flats must be proper (k <= d-1)")
    n = len(flats)
    if n < d - k + 1:
        return False, None

    rng = random.Random(seed)
    for _ in range(retries):
        if k == 0:
            e = [
                tuple(Fraction(1 if i == j else 0) for j in range(d)) for i in range(d)
            ]
            a_flat = Flat(d, d, vzero(d), tuple(e))
        else:
            a_flat = Flat(d, d - k, random_point(rng, d), random_directions(rng, d, d - k))
        pts = transversal_points(flats, a_flat)
        if pts is None or len(set(pts)) != n:
            if k == 0:
                return False, None  # the full space is the only candidate
            continue
        ok, _ = points_no_three_collinear(pts)
        if not ok:
            if k == 0:
                return False, None
            continue
        if affine_rank(pts) != d - k:
            if k == 0:
                return False, None
            continue
        return True, a_flat
    return False, None


def _flat_normal(f: Flat) -> Vec:
    from .rational import nullspace

    ns = nullspace(list(f.dirs))
    assert len(ns) == 1
    return ns[0]
