"""Exact rational linear programming and vertex enumeration.

The solver is a two-phase tableau simplex over fractions using Bland's rule,
so it terminates on every input and never sees rounding.  Strict inequalities
are decided through a bounded gap variable: the system {a.x < b, ...} is
feasible iff the maximal common slack is positive.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .rational import Vec, as_vec, frac, solve_unique

Relation = str  # one of "<", "<=", "=", ">", ">="

DEFAULT_MAX_PIVOTS = 200_000


def _max_pivots() -> int:
    return int(os.environ.get("CONVEXFLATS_MAX_LP_PIVOTS", DEFAULT_MAX_PIVOTS))


class PivotLimitError(RuntimeError):
    """Raised when the simplex exceeds the configured pivot budget."""


@dataclass(frozen=True)
class LPStatus:
    feasible: bool
    witness: Vec | None = None

    def __bool__(self) -> bool:
        return self.feasible


INFEASIBLE = LPStatus(False, None)


def _pivot(tableau, basis, row, col):
    piv = tableau[row][col]
    inv = 1 / piv
    tableau[row] = [x * inv for x in tableau[row]]
    for i in range(len(tableau)):
        if i != row and tableau[i][col] != 0:
            f = tableau[i][col]
            tableau[i] = [x - f * y for x, y in zip(tableau[i], tableau[row])]
    basis[row] = col


def _reduced_costs(tableau, basis, obj):
    ncols = len(tableau[0]) - 1
    red = list(obj)
    for i, bv in enumerate(basis):
        cb = obj[bv]
        if cb != 0:
            row = tableau[i]
            for j in range(ncols):
                if row[j] != 0:
                    red[j] -= cb * row[j]
    return red


def _run_simplex(tableau, basis, obj, budget):
    """Maximize obj over the current feasible tableau (Bland's rule).

    Returns "optimal" or "unbounded"; the tableau/basis are updated in place.
    """
    pivots = 0
    ncols = len(tableau[0]) - 1
    while True:
        red = _reduced_costs(tableau, basis, obj)
        col = next((j for j in range(ncols) if red[j] > 0), None)
        if col is None:
            return "optimal"
        best = None
        for i in range(len(tableau)):
            a = tableau[i][col]
            if a > 0:
                ratio = tableau[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < best[1]):
                    best = (ratio, basis[i], i)
        if best is None:
            return "unbounded"
        _pivot(tableau, basis, best[2], col)
        pivots += 1
        if pivots > budget:
            raise PivotLimitError(f"exceeded {budget} simplex pivots")


def simplex_maximize(A, b, c):
    """max c.x  s.t.  A x <= b, x >= 0, all data rational.

    Returns (status, x, value) with status in {"optimal", "unbounded",
    "infeasible"}; x is a tuple of fractions at an optimal basic solution.
    """
    m = len(A)
    n = len(c)
    budget = _max_pivots()
    A = [[frac(x) for x in row] for row in A]
    b = [frac(x) for x in b]
    c = [frac(x) for x in c]

    # slack columns; rows with negative rhs get flipped and an artificial
    rows = []
    basis = []
    art_cols = []
    ncols = n + m
    for i in range(m):
        row = A[i] + [Fraction(0)] * m + [b[i]]
        row[n + i] = Fraction(1)
        if b[i] < 0:
            row = [-x for x in row]
        rows.append(row)
    for i in range(m):
        if rows[i][n + i] == 1:
            basis.append(n + i)
        else:
            art_cols.append(ncols)
            for j, r in enumerate(rows):
                r.insert(ncols, Fraction(1) if j == i else Fraction(0))
            basis.append(ncols)
            ncols += 1

    if art_cols:
        phase1 = [Fraction(0)] * ncols
        for j in art_cols:
            phase1[j] = Fraction(-1)
        _run_simplex(rows, basis, phase1, budget)
        if any(rows[i][-1] != 0 for i in range(m) if basis[i] in art_cols):
            return "infeasible", None, None
        # drive zero-valued artificials out of the basis
        for i in range(m):
            if basis[i] in art_cols:
                col = next((j for j in range(n + m) if rows[i][j] != 0), None)
                if col is not None:
                    _pivot(rows, basis, i, col)
        keep = [i for i in range(m) if basis[i] not in art_cols]
        rows = [rows[i] for i in keep]
        basis = [basis[i] for i in keep]
        rows = [r[: n + m] + [r[-1]] for r in rows]
        ncols = n + m

    obj = c + [Fraction(0)] * (ncols - n)
    status = _run_simplex(rows, basis, obj, budget)
    if status == "unbounded":
        return "unbounded", None, None
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = rows[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return "optimal", tuple(x), value


def _normalize_constraints(constraints):
    out = []
    for coeffs, rhs, rel in constraints:
        a = as_vec(coeffs)
        r = frac(rhs)
        if rel in ("<", "<=", "="):
            out.append((a, r, rel))
        elif rel == ">":
            out.append((tuple(-x for x in a), -r, "<"))
        elif rel == ">=":
            out.append((tuple(-x for x in a), -r, "<="))
        else:
            raise ValueError(f"unknown relation {rel!r}")
    return out


def check_constraints(x, constraints) -> bool:
    """Exact re-substitution of a witness into the original system."""
    x = as_vec(x)
    for a, r, rel in _normalize_constraints(constraints):
        v = sum((ai * xi for ai, xi in zip(a, x, strict=True)), Fraction(0))
        if rel == "<" and not v < r:
            return False
        if rel == "<=" and not v <= r:
            return False
        if rel == "=" and v != r:
            return False
    return True


def lp_feasible(constraints, dim: int | None = None) -> LPStatus:
    """Exact feasibility of a system of <, <=, = constraints over free x.

    Strict inequalities hold strictly at the returned witness: feasibility is
    decided by maximizing a common gap variable capped at 1, so any system
    with positive slack is recognized no matter how small the slack is.
    """
    constraints = list(constraints)
    if not constraints:
        return LPStatus(True, (Fraction(0),) * (dim or 0))
    norm = _normalize_constraints(constraints)
    d = len(norm[0][0])
    if dim is not None and dim != d:
        raise ValueError("dimension mismatch")
    if any(len(a) != d for a, _, _ in norm):
        raise ValueError("constraints of mixed dimension")
    has_strict = any(rel == "<" for _, _, rel in norm)

    # free x = u - v with u, v >= 0; optional trailing gap column t
    nvars = 2 * d + (1 if has_strict else 0)
    A, b = [], []
    for a, r, rel in norm:
        row = list(a) + [-x for x in a] + ([Fraction(0)] if has_strict else [])
        if rel == "<":
            row[-1] = Fraction(1)
            A.append(row)
            b.append(r)
        elif rel == "<=":
            A.append(row)
            b.append(r)
        else:  # equality: two opposite inequalities
            A.append(row)
            b.append(r)
            A.append([-x for x in row])
            b.append(-r)
    if has_strict:
        cap = [Fraction(0)] * nvars
        cap[-1] = Fraction(1)
        A.append(cap)
        b.append(Fraction(1))
    c = [Fraction(0)] * nvars
    if has_strict:
        c[-1] = Fraction(1)

    status, x, value = simplex_maximize(A, b, c)
    if status == "infeasible":
        return INFEASIBLE
    assert status == "optimal"  # gap capped at 1, so never unbounded
    if has_strict and value <= 0:
        return INFEASIBLE
    witness = tuple(x[i] - x[d + i] for i in range(d))
    assert check_constraints(witness, constraints), "witness failed re-substitution"
    return LPStatus(True, witness)


def lp_maximize(objective, constraints, dim: int | None = None):
    """max objective.x over weak/equality constraints (free x, exact).

    Returns (status, witness, value); strict constraints are not supported
    here because an open feasible set need not attain its optimum.
    """
    objective = as_vec(objective)
    d = len(objective)
    norm = _normalize_constraints(constraints)
    if any(rel == "<" for _, _, rel in norm):
        raise ValueError("strict constraints unsupported in optimization")
    if any(len(a) != d for a, _, _ in norm):
        raise ValueError("dimension mismatch")
    A, b = [], []
    for a, r, rel in norm:
        row = list(a) + [-x for x in a]
        A.append(row)
        b.append(r)
        if rel == "=":
            A.append([-x for x in row])
            b.append(-r)
    c = list(objective) + [-x for x in objective]
    status, x, value = simplex_maximize(A, b, c)
    if status != "optimal":
        return status, None, None
    witness = tuple(x[i] - x[d + i] for i in range(d))
    return "optimal", witness, value


def vertex_enumeration(halfspaces, d: int) -> list[Vec]:
    """All vertices of the polyhedron {x : a.x <= b for (a, b) given}, exactly.

    Every d-subset of bounding hyperplanes with a unique common point is
    tested against all halfspaces; surviving points are deduplicated.  Sized
    for desk-scale inputs (the subset count is checked against a hard cap).
    """
    hs = [(as_vec(a), frac(b)) for a, b in halfspaces]
    if any(len(a) != d for a, _ in hs):
        raise ValueError("halfspace dimension mismatch")
    m = len(hs)
    from math import comb

    if comb(m, d) > 3_000_000:
        raise ValueError(f"vertex enumeration too large: C({m},{d}) subsets")
    seen: set[Vec] = set()
    out: list[Vec] = []
    for idx in combinations(range(m), d):
        rows = [hs[i][0] for i in idx]
        rhs = [hs[i][1] for i in idx]
        pt = solve_unique(rows, rhs)
        if pt is None or pt in seen:
            continue
        if all(
            sum((ai * xi for ai, xi in zip(a, pt)), Fraction(0)) <= b for a, b in hs
        ):
            seen.add(pt)
            out.append(pt)
    out.sort()
    return out
