"""Executable negative results: certified non-convex hyperplane families and
cone refutation against Grassmannian nets.

The hyperplane side is exact: a perturbed octahedron-plus-axes family is
verified non-convex by a bank of rational LP infeasibilities, one per sign
orthant.  The cone side is floating point with explicit tolerances: given a
net over Gr(k,d) and a polyhedral cone, the refuter walks the almost-
orthogonal boundary-frame construction; whenever the net element it needs
either misses the cone entirely or dives into the interior, that element is
itself a counterexample and is returned as an early refutation, otherwise
the walk completes and emits an interior witness z lying (numerically) on a
net element, with every intermediate bound checked and recorded.
"""

import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import factorial

import numpy as np
from scipy.optimize import linprog

from .flats import Flat, GeometryError, Hyperplane, hyperplanes_general_position
from .grassmann import EpsNet, Subspace, nearest_in_net, near_orthogonal_pick
from .lp import lp_feasible
from .rational import frac_from_str, frac_to_str

TAU = 1e-6  # certificate margin / residual tolerance


class GuardError(RuntimeError):
    """An intermediate bound of the refutation construction failed; under the
    documented eps threshold this indicates a bug or a defective net."""


def eps_threshold(d: int) -> float:
    """Largest net resolution for which the refutation bounds are guaranteed:
    min(1/(12d), 1/(4 d!))."""
    if d < 2:
        raise ValueError("d >= 2 required")
    return min(1.0 / (12 * d), 1.0 / (4 * factorial(d)))


def det_bound_check(M, delta: float) -> bool:
    """Check det(M) >= 1 - t! * delta for a t x t matrix with unit diagonal
    and off-diagonal entries at most delta in absolute value."""
    M = np.asarray(M, dtype=np.float64)
    t = M.shape[0]
    if M.shape != (t, t):
        raise ValueError("matrix must be square")
    if np.max(np.abs(np.diag(M) - 1.0)) > 1e-12:
        raise ValueError("diagonal entries must equal 1")
    off = M - np.diag(np.diag(M))
    if np.max(np.abs(off)) > delta + 1e-12:
        raise ValueError("off-diagonal entries exceed delta")
    return float(np.linalg.det(M)) >= 1.0 - factorial(t) * delta - 1e-9


# ---------------------------------------------------------------------------
# octahedron-plus-axes family (exact)


@dataclass
class OctaFamily:
    """d perturbed coordinate hyperplanes plus 2^d perturbed hyperplanes
    through the facets of the standard cross-polytope, in verified exact
    general position."""

    d: int
    hyperplanes: list[Hyperplane]
    deltas: list[tuple[int, ...]]
    seed: int
    magnitude: Fraction

    def axis(self, i: int) -> Hyperplane:
        return self.hyperplanes[i]

    def facet(self, delta: tuple[int, ...]) -> Hyperplane:
        return self.hyperplanes[self.d + self.deltas.index(delta)]

    def to_json(self) -> dict:
        return {
            "format": 1,
            "d": self.d,
            "seed": self.seed,
            "magnitude": frac_to_str(self.magnitude),
            "deltas": [list(t) for t in self.deltas],
            "hyperplanes": [h.to_json() for h in self.hyperplanes],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OctaFamily":
        return cls(
            d=obj["d"],
            hyperplanes=[Hyperplane.from_json(h) for h in obj["hyperplanes"]],
            deltas=[tuple(t) for t in obj["deltas"]],
            seed=obj["seed"],
            magnitude=frac_from_str(obj["magnitude"]),
        )


def octa_family(d: int, seed: int = 0, magnitude: Fraction = Fraction(1, 1000)) -> OctaFamily:
    """Build the 2^d + d family with rational perturbations of the given
    magnitude applied to all normals and offsets, retrying fresh seeds until
    exact hyperplane general position holds (2 <= d <= 4)."""
    if not (2 <= d <= 4):
        raise GeometryError("octa families are supported for 2 <= d <= 4")
    mag = Fraction(magnitude)
    deltas = [tuple(s) for s in product((1, -1), repeat=d)]
    for attempt in range(32):
        rng = random.Random(seed * 1009 + attempt)
        jig = lambda: Fraction(rng.randint(-1000, 1000), 1000) * mag
        hps = []
        for i in range(d):
            normal = tuple(
                (Fraction(1) if j == i else Fraction(0)) + jig() for j in range(d)
            )
            hps.append(Hyperplane(normal, jig()))
        for delta in deltas:
            normal = tuple(Fraction(s) + jig() for s in delta)
            hps.append(Hyperplane(normal, Fraction(1) + jig()))
        ok, _ = hyperplanes_general_position(hps)
        if ok:
            return OctaFamily(d, hps, deltas, seed, mag)
    raise GeometryError("could not reach general position; try another seed")


def verify_octa_nonconvex(fam: OctaFamily) -> tuple[bool, list[str]]:
    """Certify non-convexity of the family by 2^d exact LP checks.

    Any polytope touching every hyperplane in a facet would live inside one
    sign region of the d axis-like hyperplanes; the check confirms that each
    such open region is disjoint from the opposite cross-polytope hyperplane,
    so that hyperplane cannot support a facet of the polytope.  All 2^d
    checks passing constitutes the proof.
    """
    d = fam.d
    log = []
    all_ok = True
    for sigma in product((1, -1), repeat=d):
        cons = []
        for i in range(d):
            h = fam.axis(i)
            cons.append((tuple(sigma[i] * c for c in h.normal), sigma[i] * h.offset, ">"))
        opp = fam.facet(tuple(-s for s in sigma))
        cons.append((opp.normal, opp.offset, "="))
        status = lp_feasible(cons)
        if status.feasible:
            all_ok = False
            log.append(f"sigma={sigma}: region MEETS opposite facet hyperplane at {status.witness}")
        else:
            log.append(f"sigma={sigma}: region disjoint from opposite facet hyperplane (infeasible)")
    log.append("non-convexity " + ("certified" if all_ok else "NOT certified"))
    return all_ok, log


# ---------------------------------------------------------------------------
# polyhedral cones (floating point)


@dataclass
class Cone:
    """A polyhedral cone, as generators (positive hull) and/or inward facet
    normals {x : n.x >= 0}."""

    d: int
    generators: np.ndarray | None = None
    halfspaces: np.ndarray | None = None

    @classmethod
    def from_generators(cls, gens) -> "Cone":
        gens = np.asarray(gens, dtype=np.float64)
        d = gens.shape[1]
        return cls(d, gens, _facet_normals(gens))

    def facets(self) -> np.ndarray:
        if self.halfspaces is None:
            if self.generators is None:
                raise GeometryError("cone needs generators or halfspaces")
            self.halfspaces = _facet_normals(self.generators)
        return self.halfspaces

    def margin(self, x: np.ndarray) -> float:
        """Smallest facet slack at x; +inf when the cone is all of R^d."""
        F = self.facets()
        if F.shape[0] == 0:
            return float("inf")
        return float(np.min(F @ x))

    def interior_direction(self, tau: float = TAU):
        """A unit direction with positive facet margin, found by LP."""
        F = self.facets()
        d = self.d
        if F.shape[0] == 0:
            e = np.zeros(d)
            e[0] = 1.0
            return e, float("inf")
        nF = F.shape[0]
        # maximize t  s.t.  F x >= t, -1 <= x <= 1
        c = np.zeros(d + 1)
        c[-1] = -1.0
        A_ub = np.hstack([-F, np.ones((nF, 1))])
        b_ub = np.zeros(nF)
        bounds = [(-1, 1)] * d + [(None, 10)]
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if not res.success:
            raise GeometryError(f"interior LP failed: {res.message}")
        t = -res.fun
        if t <= tau:
            raise GeometryError("cone has (numerically) empty interior")
        x = res.x[:d]
        x = x / np.linalg.norm(x)
        return x, self.margin(x)

    def to_json(self) -> dict:
        return {
            "format": 1,
            "d": self.d,
            "generators": None if self.generators is None else self.generators.tolist(),
            "halfspaces": None if self.halfspaces is None else self.halfspaces.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Cone":
        gens = obj.get("generators")
        hs = obj.get("halfspaces")
        return cls(
            obj["d"],
            None if gens is None else np.asarray(gens, dtype=np.float64),
            None if hs is None else np.asarray(hs, dtype=np.float64),
        )


def _facet_normals(gens: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Inward facet normals of pos(gens) by (d-1)-subset enumeration.

    Desk-scale: every (d-1)-subset of generators spanning a (d-1)-space
    proposes its orthogonal direction; it is a facet normal iff all
    generators lie (weakly) on one side.  An empty result means the cone is
    all of R^d (when the generators span) or degenerate otherwise.
    """
    g, d = gens.shape
    normals = []
    for subset in combinations(range(g), d - 1):
        M = gens[list(subset)]
        u, s, vt = np.linalg.svd(M)
        if s.size < d - 1 or s[d - 2] <= tol * max(1.0, s[0]):
            continue  # subset does not span a (d-1)-space
        n = vt[-1]
        dots = gens @ n
        if np.all(dots >= -tol):
            cand = n
        elif np.all(dots <= tol):
            cand = -n
        else:
            continue
        cand = cand / np.linalg.norm(cand)
        if all(abs(cand @ m) < 1.0 - 1e-9 or cand @ m < 0 for m in normals):
            # keep one copy per direction (dot ~ 1 means duplicate)
            if not any(cand @ m > 1.0 - 1e-9 for m in normals):
                normals.append(cand)
    return np.asarray(normals).reshape(-1, d)


@dataclass
class EarlyRefutation:
    """A net element that directly violates a face condition: it either
    misses the cone (condition 1) or meets its interior (condition 2)."""

    condition: int
    net_index: int
    witness_z: np.ndarray | None
    margin: float
    note: str

    def to_json(self) -> dict:
        return {
            "format": 1,
            "kind": "early",
            "condition": self.condition,
            "net_index": self.net_index,
            "witness_z": None if self.witness_z is None else self.witness_z.tolist(),
            "margin": self.margin,
            "note": self.note,
        }


@dataclass
class RefutationCertificate:
    """Full construction trace ending in a point z interior to the cone and
    lying on a net element (within the recorded residual)."""

    net_index: int
    witness_z: np.ndarray
    margin_interior: float
    membership_residual: float
    trace: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def conv(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, list):
                return [conv(x) for x in v]
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            return v

        return {
            "format": 1,
            "kind": "full",
            "net_index": self.net_index,
            "witness_z": self.witness_z.tolist(),
            "margin_interior": self.margin_interior,
            "membership_residual": self.membership_residual,
            "trace": conv(self.trace),
        }


def _subspace_interior_margin(cone: Cone, basis: np.ndarray, tau: float):
    """max over the subspace slice {By : |y|_inf <= 1} of the facet margin."""
    F = cone.facets()
    k = basis.shape[1]
    if F.shape[0] == 0:
        y = np.zeros(k)
        y[0] = 1.0
        return float("inf"), y
    FB = F @ basis
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-FB, np.ones((FB.shape[0], 1))])
    b_ub = np.zeros(FB.shape[0])
    bounds = [(-1, 1)] * k + [(None, 10)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise GeometryError(f"margin LP failed: {res.message}")
    return float(-res.fun), res.x[:k]


def _nonzero_in_cone(cone: Cone, basis: np.ndarray):
    """y with By in C and |y|_inf = 1, or None when the slice is only {0}."""
    F = cone.facets()
    k = basis.shape[1]
    FB = F @ basis if F.shape[0] else np.zeros((0, k))
    bounds = [(-1, 1)] * k
    for j in range(k):
        for sgn in (1.0, -1.0):
            c = np.zeros(k)
            c[j] = -sgn
            res = linprog(c, A_ub=-FB, b_ub=np.zeros(FB.shape[0]), bounds=bounds, method="highs")
            if res.success and -res.fun > 0.5:
                return res.x
    return None


def refute_cone(cone: Cone, net: EpsNet, tau: float = TAU):
    """Refute the claim that every net element meets the cone in a k-face.

    Runs the almost-orthogonal boundary frame construction: unit vectors
    a_0..a_{d-k} on the cone boundary, pairwise |a_i.a_h| < eps, each taken
    from the net element nearly orthogonal to the previous ones.  When that
    element has no nonzero point in the cone, or reaches the interior with
    margin above tau, the element itself refutes a face condition and an
    EarlyRefutation is returned.  If the frame completes, the vectors are
    nudged inside, the membership system against the nearest net element is
    solved, and the combination z (all coefficients > 1/2) is an interior
    point lying on that element: a full RefutationCertificate.

    Intermediate bounds (determinant guards > 1/4, |y_i| < 1/4,
    |x_i - y| <= 1/4) are asserted on every completed run.
    """
    d, k = net.d, net.k
    if cone.d != d:
        raise GeometryError("cone and net dimensions differ")
    if net.eps >= eps_threshold(d):
        warnings.warn(
            f"net eps {net.eps} is above the guaranteed threshold {eps_threshold(d)}; "
            "proceeding best-effort"
        )
    eps = net.eps
    F = cone.facets()
    if cone.generators is not None and np.linalg.matrix_rank(cone.generators, tol=1e-9) < d:
        raise GeometryError("cone has empty interior (generators do not span)")
    g0, _ = cone.interior_direction(tau)

    if F.shape[0] == 0:
        # the cone is the whole space; any net element meets the interior
        z = net.elements[0].basis[:, 0]
        return EarlyRefutation(2, 0, z, float("inf"), "cone has no facets; interior is everything")

    # a_0: a generator lying on a facet (faces of a generated cone are
    # spanned by the generators they contain)
    gens = cone.generators
    if gens is None:
        raise GeometryError("refutation needs cone generators")
    unit = gens / np.linalg.norm(gens, axis=1, keepdims=True)
    margins = np.min(F @ unit.T, axis=0)
    i0 = int(np.argmin(margins))
    if margins[i0] > 1e-9:
        raise GeometryError("no generator lies on the cone boundary (degenerate input)")
    a = [unit[i0]]
    picks = []

    for j in range(1, d - k + 1):
        q = np.linalg.qr(np.stack(a, axis=1))[0][:, : len(a)]
        idx, element, bound = near_orthogonal_pick(net, q.T)
        picks.append({"index": idx, "fact_bound": bound})
        B = element.basis
        t_star, y_at = _subspace_interior_margin(cone, B, tau)
        if t_star > tau:
            z = B @ y_at
            z = z / np.linalg.norm(z)
            return EarlyRefutation(
                2, idx, z, cone.margin(z),
                f"net element {idx} meets the cone interior (margin {cone.margin(z):.3e})",
            )
        y = _nonzero_in_cone(cone, B)
        if y is None:
            return EarlyRefutation(
                1, idx, None, 0.0, f"net element {idx} meets the cone only at the origin"
            )
        aj = B @ y
        aj = aj / np.linalg.norm(aj)
        for h, prev in enumerate(a):
            if abs(float(aj @ prev)) > eps + 1e-9:
                raise GuardError(
                    f"|a_{j}.a_{h}| = {abs(float(aj @ prev)):.3e} exceeds eps; defective net?"
                )
        a.append(aj)

    # nudge the frame strictly inside, keeping pairwise products below eps
    eta = eps / (8 * (d + 1))
    for _ in range(60):
        b_list = [v + eta * g0 for v in a]
        b_list = [v / np.linalg.norm(v) for v in b_list]
        pair_ok = all(
            abs(float(b_list[i] @ b_list[h])) < eps
            for i in range(len(b_list))
            for h in range(i)
        )
        if pair_ok and all(cone.margin(v) > 0 for v in b_list):
            break
        eta /= 2
    else:
        raise GuardError("could not nudge the boundary frame inside the cone")

    Bmat = np.stack(b_list, axis=1)  # d x (d-k+1)
    b_sum = Bmat.sum(axis=1)

    # orthonormal complement of span(b_list): k-1 vectors
    _, sv, vt = np.linalg.svd(Bmat.T, full_matrices=True)
    comp = vt[d - k + 1 :]  # (k-1, d)
    c_list = [row for row in comp]
    M = np.hstack([Bmat, np.stack(c_list, axis=1)]) if c_list else Bmat
    if k >= 2 and np.linalg.det(M) < 0:
        c_list[0] = -c_list[0]
        M = np.hstack([Bmat, np.stack(c_list, axis=1)])

    w_basis = np.stack(c_list + [b_sum / np.linalg.norm(b_sum)], axis=1)
    W = Subspace(d, k, w_basis)
    u_idx, angle_w = nearest_in_net(net, W)
    U = net.elements[u_idx]
    P = U.basis @ U.basis.T

    c_star = []
    for cvec in c_list:
        proj = P @ cvec
        nrm = np.linalg.norm(proj)
        if nrm < 1e-12:
            raise GuardError("projection of a complement vector vanished")
        c_star.append(proj / nrm)
    b_proj = P @ b_sum
    if np.linalg.norm(b_proj) < 1e-12:
        raise GuardError("projection of the frame sum vanished")
    b_star = b_proj * (np.linalg.norm(b_sum) / np.linalg.norm(b_proj))

    cols = [Bmat] + ([np.stack(c_star, axis=1)] if c_star else []) + [-b_star[:, None]]
    S = np.hstack(cols)  # d x (d+1)
    _, _, vtS = np.linalg.svd(S, full_matrices=True)
    sol = vtS[-1]
    sol = sol / np.max(np.abs(sol))
    nb = d - k + 1
    x = sol[:nb]
    y_js = sol[nb : nb + k - 1]
    yy = float(sol[-1])
    main = np.concatenate([x, [yy]])
    if main[int(np.argmax(np.abs(main)))] < 0:
        sol = -sol
        x, y_js, yy = -x, -y_js, -yy

    M_star = np.hstack([Bmat, np.stack(c_star, axis=1)]) if c_star else Bmat
    det_MtM = float(np.linalg.det(M.T @ M))
    det_MstM = float(np.linalg.det(M_star.T @ M_star))
    if det_MtM <= 0.25 or det_MstM <= 0.25:
        raise GuardError(
            f"determinant guard failed: det(M'M)={det_MtM:.4f}, det(M*'M*)={det_MstM:.4f}"
        )
    if not np.all(x > 0.5):
        raise GuardError(f"membership system solution has min x = {x.min():.4f} <= 1/2")
    if y_js.size and not np.all(np.abs(y_js) < 0.25):
        raise GuardError(f"|y_j| guard failed: {np.abs(y_js).max():.4f}")
    if not np.all(np.abs(x - yy) <= 0.25):
        raise GuardError(f"|x_i - y| guard failed: {np.abs(x - yy).max():.4f}")

    z = Bmat @ x
    margin_interior = cone.margin(z)
    residual = float(np.linalg.norm(z - P @ z))
    if margin_interior <= 0:
        raise GuardError(f"final witness not interior (margin {margin_interior:.3e})")
    if residual > tau:
        raise GuardError(f"membership residual {residual:.3e} exceeds {tau}")

    trace = {
        "a_vectors": [v for v in a],
        "b_vectors": [v for v in b_list],
        "eta": eta,
        "picks": picks,
        "angle_to_net": angle_w,
        "solution": {"x": x, "y": y_js, "scale": yy},
        "dets": {"MtM": det_MtM, "MstarTMstar": det_MstM},
        "pair_bound_eps": eps,
    }
    return RefutationCertificate(u_idx, z, float(margin_interior), residual, trace)


# ---------------------------------------------------------------------------
# cone -> affine section


def section_to_affine(net: EpsNet, tol: float = 1e-9, max_parallel_frac: float = 0.01):
    """Cut every net subspace of Gr(k+1, d+1) with {x_{d+1} = 1} and drop the
    last coordinate, giving a family of affine k-flats in R^d.

    Elements (numerically) parallel to the cutting hyperplane are skipped and
    reported; more than ``max_parallel_frac`` of them aborts with advice to
    re-seed the net.  Coordinates are rationalized at 1e-12 resolution so the
    output family is exact downstream.
    """
    D = net.d
    d = D - 1
    k = net.k - 1
    flats = []
    skipped = []
    for i, el in enumerate(net.elements):
        B = el.basis  # (d+1, k+1)
        w = B[-1, :]
        nw = np.linalg.norm(w)
        if nw <= tol:
            skipped.append(i)
            continue
        y0 = w / (nw * nw)
        base_full = B @ y0
        if k > 0:
            _, _, vtw = np.linalg.svd(w[None, :], full_matrices=True)
            null = vtw[1:]  # (k, k+1)
            dirs_full = (B @ null.T).T  # (k, d+1)
        else:
            dirs_full = np.zeros((0, D))
        base = tuple(Fraction(float(c)).limit_denominator(10**12) for c in base_full[:d])
        dirs = tuple(
            tuple(Fraction(float(c)).limit_denominator(10**12) for c in row[:d])
            for row in dirs_full
        )
        try:
            flats.append(Flat(d, k, base, dirs))
        except GeometryError:
            skipped.append(i)
            continue
    if len(skipped) > max_parallel_frac * max(len(net.elements), 1):
        raise RuntimeError(
            f"{len(skipped)} of {len(net.elements)} net elements are parallel to the "
            "section hyperplane; re-seed the net"
        )
    return flats, {"skipped": skipped, "total": len(net.elements)}
