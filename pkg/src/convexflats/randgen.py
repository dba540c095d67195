"""Seeded generators for random rational geometry.

All sampling goes through ``random.Random`` so runs are bit-reproducible from
a seed.  Denominators stay <= 10^4; degenerate draws are rejected and redrawn.
"""

import random
from fractions import Fraction

from .flats import Flat, Hyperplane, hyperplanes_general_position, points_no_three_collinear
from .rational import Vec, mat_rank

MAX_DEN = 10_000


def rand_frac(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-MAX_DEN, MAX_DEN), rng.randint(1, MAX_DEN))


def random_point(rng: random.Random, d: int) -> Vec:
    return tuple(rand_frac(rng) for _ in range(d))


def random_directions(rng: random.Random, d: int, k: int) -> tuple[Vec, ...]:
    """k linearly independent rational directions in R^d."""
    while True:
        dirs = tuple(random_point(rng, d) for _ in range(k))
        if mat_rank(dirs) == k:
            return dirs


def random_flat(rng: random.Random, d: int, k: int) -> Flat:
    return Flat(d, k, random_point(rng, d), random_directions(rng, d, k))


def random_gp_points(rng: random.Random, d: int, n: int, max_tries: int = 200, grid: int | None = None):
    """n distinct rational points with no three collinear.

    With ``grid`` set, coordinates are integers in [-grid, grid] (fast exact
    arithmetic downstream); otherwise general rationals.
    """
    for _ in range(max_tries):
        if grid is None:
            pts = [random_point(rng, d) for _ in range(n)]
        else:
            pts = [
                tuple(Fraction(rng.randint(-grid, grid)) for _ in range(d))
                for _ in range(n)
            ]
        if len(set(pts)) != n:
            continue
        ok, _ = points_no_three_collinear(pts)
        if ok:
            return pts
    raise RuntimeError("could not sample points in general position")


def random_hyperplane(rng: random.Random, d: int) -> Hyperplane:
    while True:
        normal = random_point(rng, d)
        if any(c != 0 for c in normal):
            return Hyperplane(normal, rand_frac(rng))


def random_gp_hyperplanes(rng: random.Random, d: int, n: int, max_tries: int = 200):
    """n hyperplanes in exact general position (every d meet in one point,
    all intersection points distinct)."""
    for _ in range(max_tries):
        hps = [random_hyperplane(rng, d) for _ in range(n)]
        ok, _ = hyperplanes_general_position(hps)
        if ok:
            return hps
    raise RuntimeError("could not sample hyperplanes in general position")


def random_gp_lines(rng: random.Random, n: int, max_tries: int = 200):
    return random_gp_hyperplanes(rng, 2, n, max_tries)
