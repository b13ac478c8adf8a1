"""Sparse multivariate polynomials and truncated univariate series.

Coefficients are usually :class:`fractions.Fraction` so that composition and
differentiation stay exact, but any numeric type supporting ``+`` and ``*``
works (floats are used in a few numerical tests).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

Exponent = Tuple[int, ...]
Series = List  # coefficient list [c_0, c_1, ..., c_N] of a series truncated at t^N


def _coerce(c):
    if isinstance(c, int) and not isinstance(c, bool):
        return Fraction(c)
    return c


class Poly:
    """Polynomial in ``nvars`` variables stored as ``{exponent: coefficient}``."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        self.nvars = int(nvars)
        clean: Dict[Exponent, object] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != self.nvars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent {e} for {self.nvars} variables")
            c = _coerce(c)
            if e in clean:
                c = clean[e] + c
            clean[e] = c
        self.terms = {e: c for e, c in clean.items() if c != 0}

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence, const=0) -> "Poly":
        n = len(coeffs)
        terms = {(0,) * n: const}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(n, terms)

    # basic protocol ---------------------------------------------------------
    def copy(self) -> "Poly":
        p = Poly(self.nvars)
        p.terms = dict(self.terms)
        return p

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coefficient(self, e: Sequence[int]):
        return self.terms.get(tuple(e), Fraction(0))

    def constant_term(self):
        return self.coefficient((0,) * self.nvars)

    def __repr__(self) -> str:
        if not self.terms:
            return f"Poly({self.nvars}, 0)"
        parts = []
        for e in sorted(self.terms, key=lambda x: (sum(x), x)):
            mon = "*".join(f"z{i}^{k}" if k > 1 else f"z{i}" for i, k in enumerate(e) if k)
            parts.append(f"{self.terms[e]}" + (f"*{mon}" if mon else ""))
        return f"Poly({self.nvars}, " + " + ".join(parts) + ")"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            if self.degree() <= 0:
                return self.constant_term() == other
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # arithmetic -------------------------------------------------------------
    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        p = Poly(self.nvars)
        p.terms = {e: c for e, c in out.items() if c != 0}
        return p

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        p = Poly(self.nvars)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = _coerce(other)
            p = Poly(self.nvars)
            p.terms = {e: c * other for e, c in self.terms.items() if c * other != 0}
            return p
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        out: Dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        p = Poly(self.nvars)
        p.terms = {e: c for e, c in out.items() if c != 0}
        return p

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def truncate(self, order: int) -> "Poly":
        """Drop all terms of total degree greater than ``order``."""
        p = Poly(self.nvars)
        p.terms = {e: c for e, c in self.terms.items() if sum(e) <= order}
        return p

    def homogeneous_part(self, d: int) -> "Poly":
        p = Poly(self.nvars)
        p.terms = {e: c for e, c in self.terms.items() if sum(e) == d}
        return p

    # calculus ---------------------------------------------------------------
    def partial(self, i: int) -> "Poly":
        p = Poly(self.nvars)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        p.terms = out
        return p

    def directional(self, v: Sequence) -> "Poly":
        """Derivative along the constant vector ``v``."""
        out = Poly(self.nvars)
        for i, vi in enumerate(v):
            if vi != 0:
                out = out + self.partial(i) * vi
        return out

    def evaluate(self, point: Sequence):
        """Value at ``point`` (any ring elements supporting ``*`` and ``**``)."""
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    __call__ = evaluate

    def compose(self, polys: Sequence["Poly"], order: int | None = None) -> "Poly":
        """Substitute ``z_i -> polys[i]``; optionally truncate at ``order``."""
        if len(polys) != self.nvars:
            raise ValueError("need one polynomial per variable")
        m = polys[0].nvars if polys else 0
        powers: Dict[Tuple[int, int], Poly] = {}

        def pw(i: int, k: int) -> Poly:
            key = (i, k)
            if key not in powers:
                if k == 0:
                    powers[key] = Poly.const(m, 1)
                else:
                    nxt = pw(i, k - 1) * polys[i]
                    powers[key] = nxt.truncate(order) if order is not None else nxt
            return powers[key]

        out = Poly(m)
        for e, c in self.terms.items():
            term = Poly.const(m, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
                    if order is not None:
                        term = term.truncate(order)
            out = out + term
        return out

    def shift(self, offset: Sequence) -> "Poly":
        """Return ``q`` with ``q(w) = self(w + offset)``, expanded exactly."""
        out: Dict[Exponent, object] = {}
        for e, c in self.terms.items():
            ranges = [range(k + 1) for k in e]
            for sub in product(*ranges):
                coef = c
                for k, j, a in zip(e, sub, offset):
                    if j < k:
                        coef = coef * comb(k, j) * _coerce(a) ** (k - j)
                    # j == k contributes binomial 1 and no power of a
                if coef != 0:
                    out[sub] = out[sub] + coef if sub in out else coef
        p = Poly(self.nvars)
        p.terms = {e: c for e, c in out.items() if c != 0}
        return p

    def map_coefficients(self, fn) -> "Poly":
        p = Poly(self.nvars)
        p.terms = {e: fn(c) for e, c in self.terms.items()}
        p.terms = {e: c for e, c in p.terms.items() if c != 0}
        return p


# truncated univariate series ------------------------------------------------

def series_const(c, order: int) -> Series:
    return [c] + [Fraction(0)] * order


def series_add(a: Series, b: Series) -> Series:
    n = min(len(a), len(b))
    return [a[i] + b[i] for i in range(n)]


def series_scale(a: Series, c) -> Series:
    return [x * c for x in a]


def series_mul(a: Series, b: Series, order: int | None = None) -> Series:
    n = min(len(a), len(b)) if order is None else min(len(a), len(b), order + 1)
    out = []
    for i in range(n):
        acc = 0
        for j in range(i + 1):
            acc = acc + a[j] * b[i - j]
        out.append(acc)
    return out


def series_derivative(a: Series) -> Series:
    """Derivative; the result is known to one order less."""
    return [a[i] * i for i in range(1, len(a))]


def poly_on_series(p: Poly, series: Sequence[Series], order: int) -> Series:
    """Evaluate ``p`` on a vector of truncated series, keeping ``t^0..t^order``."""
    cache: Dict[Tuple[int, int], Series] = {}

    def pw(i: int, k: int) -> Series:
        if (i, k) not in cache:
            if k == 0:
                cache[(i, k)] = series_const(Fraction(1), order)
            else:
                cache[(i, k)] = series_mul(pw(i, k - 1), series[i], order)
        return cache[(i, k)]

    out = [Fraction(0)] * (order + 1)
    for e, c in p.terms.items():
        term = series_const(c, order)
        for i, k in enumerate(e):
            if k:
                term = series_mul(term, pw(i, k), order)
        out = [x + y for x, y in zip(out, term)]
    return out


def taylor_series(coeffs: Iterable) -> Series:
    """From derivative values ``f(0), f'(0), f''(0), ...`` to series coefficients."""
    out = []
    fact = 1
    for s, c in enumerate(coeffs):
        if s:
            fact *= s
        out.append(_coerce(c) / fact if isinstance(_coerce(c), Fraction) else c / fact)
    return out
