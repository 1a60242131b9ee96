"""Shared generators for randomised tests."""

import random
from fractions import Fraction

from charmod.geometry import Cell, HalfSpace, box
from charmod.weyl import WeylElement


def random_polytope(rng: random.Random, m: int = 3, cuts: int = 4) -> Cell:
    """A random box cut by a few random halfspaces that keep the origin inside."""
    lo = [Fraction(-rng.randint(1, 4), rng.randint(1, 3)) for _ in range(m)]
    hi = [Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(m)]
    P = box("P", lo, hi)
    extra = []
    for _ in range(cuts):
        normal = [rng.randint(-3, 3) for _ in range(m)]
        if not any(normal):
            normal[0] = 1
        extra.append(HalfSpace.from_row(normal, Fraction(rng.randint(1, 6), rng.randint(1, 4))))
    return Cell("P", m, P.inequalities + tuple(extra))


def random_weyl(rng: random.Random, m: int = 2, terms: int = 3, deg: int = 2) -> WeylElement:
    out = {}
    for _ in range(terms):
        e = tuple(rng.randint(0, deg) for _ in range(2 * m))
        out[e] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return WeylElement(m, {e: c for e, c in out.items() if c})
