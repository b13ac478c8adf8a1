"""Random exact inputs shared by several test modules."""
from fractions import Fraction as F
from itertools import product

from jetmorse.jet_algebra import JetPoint, TruncatedMap
from jetmorse.polynomials import Poly


def random_map(rng, n, degree, center=None):
    """Random polynomial self-map of Q^n with invertible-ish linear part.

    Returns the map written at ``center`` and its components as
    ``{exponent: coefficient}`` dicts in absolute coordinates.
    """
    center = tuple(F(0) for _ in range(n)) if center is None else tuple(center)
    exps = [e for e in product(range(degree + 1), repeat=n) if sum(e) <= degree]
    terms = []
    for i in range(n):
        comp = {}
        for e in exps:
            if rng.random() < 0.5:
                comp[e] = F(rng.randint(-4, 4), rng.randint(1, 3))
        unit = tuple(int(j == i) for j in range(n))
        comp[unit] = comp.get(unit, 0) + rng.randint(2, 5)
        terms.append({e: c for e, c in comp.items() if c != 0})
    comps = tuple(Poly(n, t).shift(center) for t in terms)
    return TruncatedMap(comps, center), terms


def random_jet(rng, n, k):
    base = tuple(F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n))
    xis = tuple(tuple(F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)) for _ in range(k))
    return JetPoint(base, xis)
