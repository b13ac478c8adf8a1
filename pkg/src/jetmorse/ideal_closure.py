"""Integral closures of monomial ideals through Newton polyhedra.

For a monomial ideal ``I`` the closure of ``I^p`` (``p`` a positive rational)
consists of the monomials ``x^beta`` with ``beta`` in ``p * Newt(I)``, where
``Newt(I) = conv(exponents) + R^n_{>=0}``.  Two independent routes are
provided: :func:`closure_power` enumerates lattice points against the facet
inequalities of the polyhedron, and :func:`membership` solves the defining
linear feasibility problem exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import ceil
from typing import Iterable, List, Sequence, Tuple, Union

from . import exact
from .errors import DomainError

Exponent = Tuple[int, ...]


def _minimalize(gens: Iterable[Exponent]) -> Tuple[Exponent, ...]:
    uniq = sorted(set(gens))
    keep = []
    for g in uniq:
        if not any(h != g and all(a <= b for a, b in zip(h, g)) for h in uniq):
            keep.append(g)
    return tuple(sorted(keep, key=lambda e: (sum(e), tuple(-x for x in e))))


@dataclass(frozen=True)
class MonomialIdeal:
    """Monomial ideal in ``n`` variables given by its minimal generators.

    ``twist`` is a bookkeeping degree for an invertible factor multiplying the
    ideal; it does not take part in equality.
    """

    n: int
    generators: Tuple[Exponent, ...]
    twist: Fraction = field(default=Fraction(0), compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("need at least one variable")
        gens = []
        for g in self.generators:
            g = tuple(int(a) for a in g)
            if len(g) != self.n:
                raise DomainError(f"exponent {g} has the wrong length")
            if any(a < 0 for a in g):
                raise DomainError("exponents must be nonnegative")
            gens.append(g)
        object.__setattr__(self, "generators", _minimalize(gens))
        object.__setattr__(self, "twist", Fraction(self.twist))

    @classmethod
    def maximal(cls, n: int) -> "MonomialIdeal":
        return cls(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def unit(cls, n: int) -> "MonomialIdeal":
        return cls(n, ((0,) * n,))

    def is_zero(self) -> bool:
        return not self.generators

    def contains(self, beta: Sequence[int]) -> bool:
        return any(all(g <= b for g, b in zip(gen, beta)) for gen in self.generators)

    def issubset(self, other: "MonomialIdeal") -> bool:
        return all(other.contains(g) for g in self.generators)

    def __mul__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        if other.n != self.n:
            raise DomainError("ideals live in different rings")
        gens = [tuple(a + b for a, b in zip(g, h)) for g in self.generators for h in other.generators]
        return MonomialIdeal(self.n, tuple(gens), self.twist + other.twist)

    def __pow__(self, e: int) -> "MonomialIdeal":
        if e < 0:
            raise DomainError("negative powers are not ideals")
        out = MonomialIdeal.unit(self.n)
        for _ in range(e):
            out = out * self
        return MonomialIdeal(self.n, out.generators, self.twist * e)


@dataclass(frozen=True)
class RationalPower:
    p: Fraction

    def __post_init__(self):
        p = exact.to_fraction(self.p)
        if p <= 0:
            raise DomainError("p must be positive")
        object.__setattr__(self, "p", p)


def _power(p) -> Fraction:
    return p.p if isinstance(p, RationalPower) else RationalPower(p).p


def newton_facets(I: MonomialIdeal) -> List[Tuple[Tuple[int, ...], Fraction]]:
    """Facet inequalities ``<w, x> >= c`` of ``Newt(I)`` with primitive ``w >= 0``.

    A facet is spanned by some generators and some coordinate rays, so every
    choice of ``n - t`` generators and ``t`` rays whose directions span a
    hyperplane gives a candidate normal; valid candidates are kept.
    """
    if I.is_zero():
        raise DomainError("the zero ideal has no Newton polyhedron")
    n = I.n
    gens = [tuple(Fraction(a) for a in g) for g in I.generators]
    facets = set()
    for t in range(n):
        for rays in combinations(range(n), t):
            for pts in combinations(gens, n - t):
                p0 = pts[0]
                rows = [[a - b for a, b in zip(p, p0)] for p in pts[1:]]
                rows += [[Fraction(int(i == j)) for i in range(n)] for j in rays]
                basis = exact.nullspace(rows, ncols=n) if rows else exact.nullspace([], ncols=n)
                if len(basis) != 1:
                    continue
                w = exact.primitive(basis[0])
                if all(x <= 0 for x in w):
                    w = [-x for x in w]
                if any(x < 0 for x in w):
                    continue
                c = sum(a * b for a, b in zip(w, p0))
                if all(sum(a * b for a, b in zip(w, g)) >= c for g in gens):
                    facets.add((tuple(w), Fraction(c)))
    return sorted(facets)


def closure_power(I: MonomialIdeal, p) -> MonomialIdeal:
    """Integral closure of ``I^p``: monomials with exponent in ``p * Newt(I)``.

    Minimal generators lie in the box ``[0, ceil(p * max_g g_i)]``; lattice
    points there are tested against the facet inequalities.
    """
    if I.is_zero():
        raise DomainError("closure of the zero ideal is undefined")
    p = _power(p)
    facets = [(w, p * c) for w, c in newton_facets(I)]
    bounds = [ceil(p * max(g[i] for g in I.generators)) for i in range(I.n)]

    def inside(beta) -> bool:
        return all(sum(a * b for a, b in zip(w, beta)) >= c for w, c in facets)

    members = {beta for beta in product(*(range(b + 1) for b in bounds)) if inside(beta)}
    minimal = []
    for beta in members:
        lower = False
        for i in range(I.n):
            if beta[i] > 0:
                down = beta[:i] + (beta[i] - 1,) + beta[i + 1:]
                if down in members:
                    lower = True
                    break
        if not lower:
            minimal.append(beta)
    return MonomialIdeal(I.n, tuple(minimal), I.twist * p)


def membership(I: MonomialIdeal, p, beta: Sequence[int]) -> bool:
    """Whether ``beta`` lies in ``p * Newt(I)``, by an exact LP feasibility test.

    Solves ``sum_g lam_g p g + s = beta``, ``sum_g lam_g = 1``, ``lam, s >= 0``.
    """
    if I.is_zero():
        return False
    p = _power(p)
    beta = [int(b) for b in beta]
    if len(beta) != I.n:
        raise DomainError("exponent has the wrong length")
    gens = I.generators
    # fast path: dominated by a scaled generator
    if any(all(p * a <= b for a, b in zip(g, beta)) for g in gens):
        return True
    n, m = I.n, len(gens)
    rows = []
    for i in range(n):
        rows.append([p * g[i] for g in gens] + [Fraction(int(i == j)) for j in range(n)])
    rows.append([Fraction(1)] * m + [Fraction(0)] * n)
    return exact.feasible_nonnegative(rows, beta + [1])


def euler_canonical_check(m: int, n: int = 2) -> MonomialIdeal:
    """Closure of ``m_0^m`` for the maximal ideal ``m_0`` in ``n`` variables, twisted by ``m``.

    The expected answer is ``m_0^m`` itself.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    out = closure_power(MonomialIdeal.maximal(n), m)
    return MonomialIdeal(n, out.generators, Fraction(m))


def product_and_power(I: MonomialIdeal, other: Union[MonomialIdeal, int]) -> MonomialIdeal:
    """``I * J`` for an ideal ``J``, or ``I^e`` for an integer ``e``."""
    if isinstance(other, MonomialIdeal):
        return I * other
    if isinstance(other, bool) or not isinstance(other, int):
        raise DomainError("expected an ideal or a nonnegative integer exponent")
    return I**other
