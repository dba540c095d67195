"""Affine flats and hyperplanes with exact rational coordinates.

A flat is a base point plus a list of linearly independent direction vectors;
a hyperplane is ``{x : normal . x = offset}``.  All predicates decide sign and
incidence questions exactly, with no tolerances.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .rational import (
    Vec,
    affine_rank,
    as_vec,
    frac,
    frac_from_str,
    frac_to_str,
    is_zero,
    mat_rank,
    nullspace,
    solve_linear,
    solve_unique,
    vdot,
    vscale,
    vsub,
    vadd,
)


class GeometryError(ValueError):
    """Raised for degenerate or dimensionally inconsistent geometric input."""


class Meet(Enum):
    """Non-flat outcomes of intersecting a flat with a hyperplane."""

    EMPTY = "empty"
    CONTAINED = "contained"


@dataclass(frozen=True)
class Flat:
    """An affine k-flat in R^d: base + span(dirs).

    k = d (the whole space) is permitted so that transversal flats for point
    families can be represented; convex-position inputs require k <= d-1.
    """

    d: int
    k: int
    base: Vec
    dirs: tuple[Vec, ...]

    def __post_init__(self):
        if self.d < 1 or not (0 <= self.k <= self.d):
            raise GeometryError(f"bad flat dimensions k={self.k}, d={self.d}")
        object.__setattr__(self, "base", as_vec(self.base))
        object.__setattr__(self, "dirs", tuple(as_vec(v) for v in self.dirs))
        if len(self.base) != self.d or any(len(v) != self.d for v in self.dirs):
            raise GeometryError("flat coordinate length mismatch")
        if len(self.dirs) != self.k:
            raise GeometryError(f"flat needs {self.k} directions, got {len(self.dirs)}")
        if self.k and mat_rank(self.dirs) != self.k:
            raise GeometryError("flat directions are linearly dependent")

    def contains(self, p) -> bool:
        p = as_vec(p)
        if len(p) != self.d:
            raise GeometryError("point dimension mismatch")
        rel = vsub(p, self.base)
        if self.k == 0:
            return is_zero(rel)
        cols = [[self.dirs[j][i] for j in range(self.k)] for i in range(self.d)]
        return solve_linear(cols, rel) is not None

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "k": self.k,
            "base": [frac_to_str(c) for c in self.base],
            "dirs": [[frac_to_str(c) for c in v] for v in self.dirs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Flat":
        return cls(
            d=obj["d"],
            k=obj["k"],
            base=tuple(frac_from_str(c) for c in obj["base"]),
            dirs=tuple(tuple(frac_from_str(c) for c in v) for v in obj["dirs"]),
        )


@dataclass(frozen=True)
class Hyperplane:
    """The set {x : normal . x = offset} in R^d, with normal != 0."""

    normal: Vec
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "normal", as_vec(self.normal))
        object.__setattr__(self, "offset", frac(self.offset))
        if is_zero(self.normal):
            raise GeometryError("hyperplane normal must be nonzero")

    @property
    def d(self) -> int:
        return len(self.normal)

    def eval(self, p) -> Fraction:
        """Signed residual normal.x - offset (exact)."""
        return vdot(self.normal, as_vec(p)) - self.offset

    def contains_point(self, p) -> bool:
        return self.eval(p) == 0

    def contains_flat(self, f: Flat) -> bool:
        if f.d != self.d:
            raise GeometryError("dimension mismatch")
        return self.eval(f.base) == 0 and all(
            vdot(self.normal, v) == 0 for v in f.dirs
        )

    def to_flat(self) -> Flat:
        """The hyperplane as a (d-1)-flat (rational base, nullspace dirs)."""
        n2 = vdot(self.normal, self.normal)
        base = vscale(self.offset / n2, self.normal)
        dirs = nullspace([self.normal])
        return Flat(self.d, self.d - 1, base, tuple(dirs))

    def to_json(self) -> dict:
        return {
            "normal": [frac_to_str(c) for c in self.normal],
            "offset": frac_to_str(self.offset),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Hyperplane":
        return cls(
            normal=tuple(frac_from_str(c) for c in obj["normal"]),
            offset=frac_from_str(obj["offset"]),
        )


def flat_contains(f: Flat, p) -> bool:
    return f.contains(p)


def intersect_flat_hyperplane(f: Flat, h: Hyperplane):
    """Exact intersection: a (k-1)-flat, Meet.EMPTY, or Meet.CONTAINED.

    A transversal cut of a k-flat yields a (k-1)-flat (a point when k=1).
    """
    if f.d != h.d:
        raise GeometryError("dimension mismatch")
    coeffs = [vdot(h.normal, v) for v in f.dirs]
    rhs = h.offset - vdot(h.normal, f.base)
    if all(c == 0 for c in coeffs):
        return Meet.CONTAINED if rhs == 0 else Meet.EMPTY
    sol = solve_linear([coeffs], [rhs])
    assert sol is not None
    alpha0, null_basis = sol
    base = f.base
    for a, v in zip(alpha0, f.dirs):
        base = vadd(base, vscale(a, v))
    dirs = []
    for nb in null_basis:
        w = (Fraction(0),) * f.d
        for a, v in zip(nb, f.dirs):
            w = vadd(w, vscale(a, v))
        dirs.append(w)
    return Flat(f.d, f.k - 1, base, tuple(dirs))


def affine_span_flat(points, d: int) -> Flat:
    """The affine hull of the given points as a Flat."""
    pts = [as_vec(p) for p in points]
    if not pts:
        raise GeometryError("need at least one point")
    diffs = [vsub(p, pts[0]) for p in pts[1:]]
    # reduce to an independent spanning subset
    from .rational import _eliminate  # row space via elimination

    work = [list(v) for v in diffs]
    if work:
        _eliminate(work, d)
    dirs = [tuple(row) for row in work if not all(x == 0 for x in row)]
    return Flat(d, len(dirs), pts[0], tuple(dirs))


def hyperplanes_general_position(hps: list[Hyperplane]):
    """Exact check: every d of the hyperplanes meet in a single point and all
    those points are distinct.  Returns (ok, message)."""
    from itertools import combinations

    if not hps:
        return False, "empty family"
    d = hps[0].d
    if any(h.d != d for h in hps):
        return False, "mixed ambient dimensions"
    if len(hps) < d:
        return False, f"need at least {d} hyperplanes"
    seen: dict[Vec, tuple] = {}
    for idx in combinations(range(len(hps)), d):
        rows = [hps[i].normal for i in idx]
        rhs = [hps[i].offset for i in idx]
        pt = solve_unique(rows, rhs)
        if pt is None:
            return False, f"hyperplanes {idx} do not meet in a single point"
        if pt in seen:
            return False, f"intersection point of {idx} coincides with {seen[pt]}"
        seen[pt] = idx
    return True, "ok"


def points_no_three_collinear(points) -> tuple[bool, tuple | None]:
    """Exact collinearity scan; returns (ok, offending index triple)."""
    from itertools import combinations

    pts = [as_vec(p) for p in points]
    for i, j, k in combinations(range(len(pts)), 3):
        if affine_rank([pts[i], pts[j], pts[k]]) <= 1:
            return False, (i, j, k)
    return True, None
