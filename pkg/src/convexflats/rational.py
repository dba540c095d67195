"""Exact rational linear algebra on tuples of fractions.

Every routine here is deterministic and tolerance-free.  Vectors are tuples of
``fractions.Fraction`` (canonical form is maintained by Fraction itself) and
matrices are lists of such row tuples.
"""

from fractions import Fraction
from math import isqrt

Vec = tuple[Fraction, ...]


def frac(x) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # Floats convert exactly (binary64 values are dyadic rationals).
        return Fraction(x)
    return Fraction(x)


def vec(*coords) -> Vec:
    return tuple(frac(c) for c in coords)


def as_vec(coords) -> Vec:
    return tuple(frac(c) for c in coords)


def vzero(dim: int) -> Vec:
    return (Fraction(0),) * dim


def vadd(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vsub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vscale(c, u: Vec) -> Vec:
    c = frac(c)
    return tuple(c * a for a in u)


def vdot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), Fraction(0))


def vnorm2(u: Vec) -> Fraction:
    return vdot(u, u)


def is_zero(u: Vec) -> bool:
    return all(a == 0 for a in u)


def _eliminate(rows: list[list[Fraction]], ncols: int):
    """In-place forward elimination; returns list of pivot column indices."""
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def mat_rank(rows) -> int:
    if not rows:
        return 0
    work = [[frac(x) for x in row] for row in rows]
    return len(_eliminate(work, len(work[0])))


def mat_det(rows) -> Fraction:
    n = len(rows)
    work = [[frac(x) for x in row] for row in rows]
    det = Fraction(1)
    for c in range(n):
        pivot_row = None
        for i in range(c, n):
            if work[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != c:
            work[c], work[pivot_row] = work[pivot_row], work[c]
            det = -det
        det *= work[c][c]
        inv = 1 / work[c][c]
        for i in range(c + 1, n):
            if work[i][c] != 0:
                f = work[i][c] * inv
                work[i] = [x - f * y for x, y in zip(work[i], work[c])]
    return det


def solve_linear(rows, rhs):
    """Solve A x = b exactly.

    Returns (particular_solution, nullspace_basis) with vectors as tuples,
    or None when the system is inconsistent.  The solution is unique iff the
    nullspace basis is empty.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [[frac(x) for x in row] + [frac(b)] for row, b in zip(rows, rhs, strict=True)]
    pivots = _eliminate(aug, n)
    for i in range(len(pivots), m):
        if aug[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = aug[r][n]
    free_cols = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free_cols:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -aug[r][fc]
        basis.append(tuple(v))
    return tuple(x), basis


def nullspace(rows) -> list[Vec]:
    """Basis of {x : A x = 0}."""
    if not rows:
        return []
    sol = solve_linear(rows, [0] * len(rows))
    assert sol is not None
    return sol[1]


def solve_unique(rows, rhs):
    """Unique solution of A x = b, or None if singular/inconsistent."""
    sol = solve_linear(rows, rhs)
    if sol is None or sol[1]:
        return None
    return sol[0]


def orthogonalize(vectors) -> list[Vec]:
    """Gram-Schmidt without normalization (stays rational, no square roots).

    Zero vectors produced by dependent inputs are dropped.
    """
    out: list[Vec] = []
    for v in vectors:
        w = as_vec(v)
        for u in out:
            w = vsub(w, vscale(vdot(w, u) / vnorm2(u), u))
        if not is_zero(w):
            out.append(w)
    return out


def rat_sqrt_floor(q: Fraction) -> Fraction:
    """A rational r with 0 <= r and r*r <= q, tight to ~1/denominator.

    Used to fit simplex vertices inside balls given only squared radii.
    """
    q = frac(q)
    if q < 0:
        raise ValueError("negative argument")
    if q == 0:
        return Fraction(0)
    # sqrt(n/d) = sqrt(n*d)/d >= isqrt(n*d)/d, scaled for extra precision
    scale = 10**6
    n, d = q.numerator, q.denominator
    return Fraction(isqrt(n * d * scale * scale), d * scale)


def affine_rank(points) -> int:
    """Dimension of the affine hull of the given points (-1 for no points)."""
    pts = [as_vec(p) for p in points]
    if not pts:
        return -1
    diffs = [vsub(p, pts[0]) for p in pts[1:]]
    return mat_rank(diffs) if diffs else 0


def frac_to_str(q: Fraction) -> str:
    q = frac(q)
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def frac_from_str(s: str) -> Fraction:
    return Fraction(s)
