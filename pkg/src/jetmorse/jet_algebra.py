"""Exact combinatorics and calculus of k-jets.

A k-jet at a point ``x`` is the tuple ``(xi_1, ..., xi_k)`` of derivatives of a
germ of curve ``f`` with ``f(0) = x``.  Everything here runs in exact rational
arithmetic whenever the inputs are rational; complex inputs are allowed where a
formula is purely polynomial.

Notes
-----
Green-Griffiths monomials ``xi_1^a_1 ... xi_k^a_k`` are graded by the weighted
degree ``sum_s s |a_s|``.  Their number in degree ``m`` is the ``t^m``
coefficient of ``prod_s (1 - t^s)^(-r)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from . import exact
from .errors import DomainError
from .polynomials import (
    Poly,
    poly_on_series,
    series_add,
    series_derivative,
    series_mul,
)


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class ExponentProfile:
    """Multi-exponent ``(alpha_1, ..., alpha_k)`` with ``alpha_s`` in N^r."""

    alphas: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        alphas = tuple(tuple(int(a) for a in alpha) for alpha in self.alphas)
        if not alphas:
            raise DomainError("a profile needs k >= 1 blocks")
        r = len(alphas[0])
        if r == 0 or any(len(a) != r for a in alphas):
            raise DomainError("all blocks must have the same positive length r")
        if any(a < 0 for alpha in alphas for a in alpha):
            raise DomainError("exponents must be nonnegative")
        object.__setattr__(self, "alphas", alphas)

    @property
    def k(self) -> int:
        return len(self.alphas)

    @property
    def r(self) -> int:
        return len(self.alphas[0])

    @property
    def degree(self) -> int:
        return sum(s * sum(a) for s, a in enumerate(self.alphas, start=1))

    def flat(self) -> Tuple[int, ...]:
        return tuple(a for alpha in self.alphas for a in alpha)

    @classmethod
    def from_flat(cls, flat: Sequence[int], k: int, r: int) -> "ExponentProfile":
        if len(flat) != k * r:
            raise DomainError("flat vector length must be k*r")
        return cls(tuple(tuple(flat[s * r:(s + 1) * r]) for s in range(k)))

    def monomial(self, xis: Sequence[Sequence]):
        """Value of ``xi_1^alpha_1 ... xi_k^alpha_k``."""
        val = 1
        for alpha, xi in zip(self.alphas, xis):
            for a, x in zip(alpha, xi):
                if a:
                    val = val * x**a
        return val

    def __add__(self, other: "ExponentProfile") -> "ExponentProfile":
        if (self.k, self.r) != (other.k, other.r):
            raise DomainError("profiles must share k and r")
        return ExponentProfile(
            tuple(tuple(a + b for a, b in zip(x, y)) for x, y in zip(self.alphas, other.alphas))
        )


@dataclass(frozen=True)
class JetPoint:
    """A k-jet: base point plus the derivative vectors ``xi_1 .. xi_k``."""

    base: Tuple
    xis: Tuple[Tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "xis", tuple(tuple(x) for x in self.xis))
        if self.xis:
            r = len(self.xis[0])
            if any(len(x) != r for x in self.xis):
                raise DomainError("all xi_s must have the same length r")

    @property
    def k(self) -> int:
        return len(self.xis)

    @property
    def r(self) -> int:
        return len(self.xis[0]) if self.xis else 0

    @property
    def n(self) -> int:
        return len(self.base)


@dataclass(frozen=True)
class TruncatedMap:
    """Polynomial map written in displacements ``w = z - center``.

    ``components[i]`` is a :class:`Poly` in ``n`` variables.  ``order`` records
    the truncation order (``None`` for an exact polynomial map); terms above it
    are ignored by :func:`push_jet`.
    """

    components: Tuple[Poly, ...]
    center: Optional[Tuple] = None
    order: Optional[int] = None

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DomainError("a map needs at least one component")
        n = comps[0].nvars
        if any(c.nvars != n for c in comps):
            raise DomainError("components must share the variable count")
        center = tuple(Fraction(0) for _ in range(n)) if self.center is None else tuple(self.center)
        if len(center) != n:
            raise DomainError("center has the wrong dimension")
        if self.order is not None:
            comps = tuple(c.truncate(self.order) for c in comps)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "center", center)

    @property
    def n_in(self) -> int:
        return self.components[0].nvars

    @property
    def n_out(self) -> int:
        return len(self.components)

    @property
    def linear_part(self) -> List[List]:
        """Jacobian matrix at the center."""
        n = self.n_in
        rows = []
        for c in self.components:
            row = []
            for j in range(n):
                e = [0] * n
                e[j] = 1
                row.append(c.coefficient(e))
            rows.append(row)
        return rows

    def __call__(self, point: Sequence):
        w = [p - c for p, c in zip(point, self.center)]
        return tuple(c.evaluate(w) for c in self.components)

    @classmethod
    def identity(cls, n: int, center: Optional[Sequence] = None) -> "TruncatedMap":
        center = tuple(Fraction(0) for _ in range(n)) if center is None else tuple(center)
        return cls(tuple(Poly.var(n, i) + center[i] for i in range(n)), center)

    @classmethod
    def linear(cls, matrix: Sequence[Sequence], center: Optional[Sequence] = None) -> "TruncatedMap":
        """``z -> A z``, expanded at ``center``."""
        n = len(matrix[0])
        center = tuple(Fraction(0) for _ in range(n)) if center is None else tuple(center)
        comps = []
        for row in matrix:
            const = sum((a * c for a, c in zip(row, center)), Fraction(0))
            comps.append(Poly.linear(row, const))
        return cls(tuple(comps), center)

    def compose(self, inner: "TruncatedMap") -> "TruncatedMap":
        """``self o inner``, expanded at ``inner.center`` without truncation."""
        if inner.n_out != self.n_in:
            raise DomainError("dimension mismatch in composition")
        shifted = [c - a for c, a in zip(inner.components, self.center)]
        comps = tuple(p.compose(shifted) for p in self.components)
        orders = [o for o in (self.order, inner.order) if o is not None]
        return TruncatedMap(comps, inner.center, min(orders) if orders else None)

    def inverse(self, order: int) -> "TruncatedMap":
        """Formal inverse to ``order``, expanded at the image of the center.

        Raises ``DomainError`` when the linear part is singular.
        """
        if self.n_in != self.n_out:
            raise DomainError("only square maps can be inverted")
        n = self.n_in
        L = self.linear_part
        Linv = exact.inverse(L)  # DomainError if singular
        y0 = tuple(c.constant_term() for c in self.components)
        # nonlinear remainder N(w) = F(w) - y0 - L w
        rem = []
        for c, row in zip(self.components, L):
            lin = Poly.linear(row, c.constant_term())
            rem.append((c - lin).truncate(order))
        v = [Poly.var(n, i) for i in range(n)]
        # fixed point: w = Linv (v - N(w)); each pass fixes one more order
        w = [sum((Poly.var(n, j) * Linv[i][j] for j in range(n)), Poly.zero(n)) for i in range(n)]
        for _ in range(order):
            Nw = [p.compose(w, order) for p in rem]
            diff = [vi - ni for vi, ni in zip(v, Nw)]
            w = [sum((diff[j] * Linv[i][j] for j in range(n)), Poly.zero(n)).truncate(order)
                 for i in range(n)]
        comps = tuple(wi + ci for wi, ci in zip(w, self.center))
        return TruncatedMap(comps, y0, order)


@dataclass(frozen=True)
class ChristoffelField:
    """Connection coefficients ``gammas[mu][j][l]`` as polynomials in absolute coordinates.

    The frame is ``e_l = d/dz_l + sum_j a_jl d/dz_j`` (l = 1..r), so the frame
    components of a tangent vector are its first r coordinates.
    """

    gammas: Tuple[Tuple[Tuple[Poly, ...], ...], ...]
    n: int
    r: int

    def __post_init__(self):
        g = tuple(tuple(tuple(row) for row in block) for block in self.gammas)
        if len(g) != self.r or any(len(b) != self.n for b in g) or any(
            len(row) != self.r for b in g for row in b
        ):
            raise DomainError("gammas must have shape (r, n, r)")
        if any(p.nvars != self.n for b in g for row in b for p in row):
            raise DomainError("gamma polynomials must be in n variables")
        object.__setattr__(self, "gammas", g)

    @classmethod
    def zero(cls, n: int, r: int) -> "ChristoffelField":
        z = Poly.zero(n)
        return cls(tuple(tuple(tuple(z for _ in range(r)) for _ in range(n)) for _ in range(r)), n, r)

    @classmethod
    def constant(cls, values, n: int, r: int) -> "ChristoffelField":
        return cls(
            tuple(tuple(tuple(Poly.const(n, values[mu][j][l]) for l in range(r)) for j in range(n))
                  for mu in range(r)),
            n,
            r,
        )


@dataclass(frozen=True)
class TangentMatrix:
    """The ``(n-r) x r`` matrix ``a_jk(z)`` defining ``V_z`` by ``dz_j = sum_k a_jk dz_k``."""

    a: Tuple[Tuple[Poly, ...], ...]
    n: int
    r: int

    def __post_init__(self):
        a = tuple(tuple(row) for row in self.a)
        if len(a) != self.n - self.r or any(len(row) != self.r for row in a):
            raise DomainError("a must have shape (n-r, r)")
        if any(p.nvars != self.n for row in a for p in row):
            raise DomainError("entries must be polynomials in n variables")
        object.__setattr__(self, "a", a)


# ---------------------------------------------------------------------------
# counting


def _check_dims(k: int, m: int, r: int) -> None:
    if k < 1 or r < 1:
        raise DomainError("jet order k and rank r must be positive")
    if m < 0:
        raise DomainError("weighted degree m must be nonnegative")


def dim_gg(k: int, m: int, r: int) -> int:
    """Number of monomials of weighted degree ``m`` in k-jets of rank ``r``.

    Coefficient of ``t^m`` in ``prod_{s<=k} (1 - t^s)^(-r)``, computed by
    repeated exact multiplication with ``1/(1 - t^s)``.
    """
    _check_dims(k, m, r)
    coeffs = [0] * (m + 1)
    coeffs[0] = 1
    for s in range(1, k + 1):
        for _ in range(r):
            for i in range(s, m + 1):
                coeffs[i] += coeffs[i - s]
    return coeffs[m]


def enumerate_profiles(k: int, m: int, r: int) -> Iterator[ExponentProfile]:
    """Yield every profile of weighted degree ``m`` once.

    Order: total degree ``sum |alpha_s|`` descending, then the concatenated
    exponent vector in descending lexicographic order.  For ``(2, 2, 1)`` this
    gives ``xi_1^2`` before ``xi_2``.
    """
    _check_dims(k, m, r)
    length = k * r
    weights = [s // r + 1 for s in range(length)]
    vec = [0] * length

    def rec(pos: int, total: int, wdeg: int):
        if pos == length:
            if total == 0 and wdeg == 0:
                yield ExponentProfile.from_flat(vec, k, r)
            return
        w = weights[pos]
        rest_min = weights[pos + 1] if pos + 1 < length else None
        hi = min(total, wdeg // w)
        for v in range(hi, -1, -1):
            t_left, w_left = total - v, wdeg - v * w
            if rest_min is None:
                if t_left or w_left:
                    continue
            elif not (t_left * rest_min <= w_left <= t_left * k):
                continue
            vec[pos] = v
            yield from rec(pos + 1, t_left, w_left)
        vec[pos] = 0

    for total in range(m, -1, -1):
        if total * 1 <= m <= total * k and (total > 0 or m == 0):
            yield from rec(0, total, m)


def _partitions(j: int, max_part: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Partitions of ``j`` as non-increasing tuples."""
    if max_part is None:
        max_part = j
    if j == 0:
        yield ()
        return
    for first in range(min(j, max_part), 0, -1):
        for rest in _partitions(j - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _fdb_table(j: int) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    out = []
    for part in _partitions(j):
        key = tuple(sorted(part))
        coef = factorial(j)
        mult: Dict[int, int] = {}
        for p in key:
            coef //= factorial(p)
            mult[p] = mult.get(p, 0) + 1
        for c in mult.values():
            coef //= factorial(c)
        out.append((key, coef))
    return tuple(out)


def faa_di_bruno(j: int) -> Dict[Tuple[int, ...], int]:
    """Coefficients of ``(Psi o f)^(j) = sum c_{j_1..j_s} Psi^(s)(f)(f^(j_1), ..., f^(j_s))``.

    Keys are sorted tuples ``j_1 <= ... <= j_s``; the value counts the set
    partitions of ``{1..j}`` with those block sizes.  The leading term
    ``(j,) -> 1`` is included.
    """
    if j < 1:
        raise DomainError("derivative order must be >= 1")
    return dict(_fdb_table(j))


# ---------------------------------------------------------------------------
# transitions and connections


def push_jet(psi: TruncatedMap, jet: JetPoint) -> JetPoint:
    """Jet of ``psi o f`` where ``f`` has the derivative data of ``jet``."""
    k = jet.k
    if psi.n_in != jet.n or (k and jet.r != psi.n_in):
        raise DomainError("jet dimensions do not match the map")
    if psi.order is not None and psi.order < k:
        raise DomainError("map truncated below the jet order")
    offset = [b - c for b, c in zip(jet.base, psi.center)]
    shifted = [p.shift(offset).truncate(k) for p in psi.components]
    base_out = tuple(p.constant_term() for p in shifted)

    cache: Dict[Tuple[int, ...], List[Poly]] = {(): shifted}

    def derivs(idx: Tuple[int, ...]) -> List[Poly]:
        if idx not in cache:
            prev = derivs(idx[:-1])
            v = jet.xis[idx[-1] - 1]
            cache[idx] = [p.directional(v) for p in prev]
        return cache[idx]

    out = []
    for j in range(1, k + 1):
        acc = [0] * psi.n_out
        for key, coef in faa_di_bruno(j).items():
            vals = derivs(key)
            acc = [a + coef * p.constant_term() for a, p in zip(acc, vals)]
        out.append(tuple(acc))
    return JetPoint(base_out, tuple(out))


def covariant_jet(
    base: Sequence,
    derivatives: Sequence[Sequence],
    gamma: ChristoffelField,
    k: Optional[int] = None,
) -> JetPoint:
    """Covariant derivatives ``(nabla f(0), ..., nabla^k f(0))`` of a curve.

    Parameters
    ----------
    base : f(0), length n.
    derivatives : ``[f'(0), f''(0), ..., f^(K)(0)]``, each of length n.
    gamma : connection coefficients in the frame ``e_l``.
    k : jet order, at most ``K``; defaults to ``K``.

    The recursion is ``nabla^s f = d/dt (nabla^{s-1} f)_l e_l
    + Gamma^mu_{jl}(f) f'_j (nabla^{s-1} f)_l e_mu`` run on truncated series.
    """
    K = len(derivatives)
    k = K if k is None else k
    if k < 1:
        raise DomainError("jet order must be >= 1")
    if k > K:
        raise DomainError(f"jet order {k} needs {k} derivatives, got {K}")
    n, r = gamma.n, gamma.r
    if len(base) != n or any(len(d) != n for d in derivatives):
        raise DomainError("curve components must have length n")
    # series of f_i(t) known to t^k
    f = []
    for i in range(n):
        ser = [base[i]]
        fact = 1
        for s in range(1, k + 1):
            fact *= s
            c = derivatives[s - 1][i]
            ser.append(Fraction(c) / fact if isinstance(c, (int, Fraction)) else c / fact)
        f.append(ser)
    fprime = [series_derivative(s) for s in f]  # known to t^(k-1)
    # Gamma(f(t)) to the order eventually needed (k-2)
    need = max(k - 2, 0)
    gam = [[[poly_on_series(gamma.gammas[mu][j][l], f, need) for l in range(r)]
            for j in range(n)] for mu in range(r)]
    g = [fprime[l] for l in range(r)]  # nabla f, known to t^(k-1)
    out = [tuple(x[0] for x in g)]
    for s in range(2, k + 1):
        order = k - s
        new = []
        for mu in range(r):
            acc = series_derivative(g[mu])[: order + 1]
            for j in range(n):
                for l in range(r):
                    if not gamma.gammas[mu][j][l].is_zero():
                        term = series_mul(series_mul(gam[mu][j][l], fprime[j], order), g[l], order)
                        acc = series_add(acc, term)
            new.append(acc)
        g = new
        out.append(tuple(x[0] for x in g))
    return JetPoint(tuple(base), tuple(out))


def scale_jet(lam, jet: JetPoint) -> JetPoint:
    """C*-action ``(xi_1, ..., xi_k) -> (lam xi_1, ..., lam^k xi_k)``."""
    if lam == 0:
        raise DomainError("scaling factor must be nonzero")
    return JetPoint(jet.base, tuple(tuple(lam**s * x for x in xi) for s, xi in enumerate(jet.xis, start=1)))


def _coef_value(a, base):
    return a(base) if callable(a) else a


def eval_operator(coeffs: Mapping[ExponentProfile, object], jet: JetPoint):
    """Evaluate ``P = sum a_alpha(x) xi^alpha`` on a jet.

    Coefficients are numbers or callables of the base point.  All profiles must
    have the same weighted degree and match the jet's ``k`` and ``r``.
    """
    degrees = {p.degree for p in coeffs}
    if len(degrees) > 1:
        raise DomainError(f"mixed weighted degrees {sorted(degrees)}")
    total = 0
    for prof, a in coeffs.items():
        if prof.k != jet.k or prof.r != jet.r:
            raise DomainError("profile shape does not match the jet")
        total = total + _coef_value(a, jet.base) * prof.monomial(jet.xis)
    return total


def multiply_operators(
    p: Mapping[ExponentProfile, object], q: Mapping[ExponentProfile, object]
) -> Dict[ExponentProfile, object]:
    """Product of two operators; degrees add."""
    out: Dict[ExponentProfile, object] = {}
    for a, ca in p.items():
        for b, cb in q.items():
            key = a + b
            if callable(ca) or callable(cb):
                prev = out.get(key, 0)
                out[key] = (lambda x, ca=ca, cb=cb, prev=prev:
                            _coef_value(prev, x) + _coef_value(ca, x) * _coef_value(cb, x))
            else:
                out[key] = out.get(key, 0) + ca * cb
    return out


def integrate_tangent_system(
    a: TangentMatrix,
    leading: Sequence[Sequence],
    initial: Sequence,
    order: int,
) -> List[List]:
    """Formal solution of ``f_j' = sum_k a_jk(f) f_k'`` for ``j = r+1..n``.

    ``leading`` holds the series ``f_1..f_r`` (coefficients of ``t^0..``),
    ``initial`` the values ``f_{r+1}(0)..f_n(0)``.  Returns the series of the
    remaining components to ``t^order``.
    """
    if order < 1:
        raise DomainError("truncation order must be >= 1")
    n, r = a.n, a.r
    if len(leading) != r or len(initial) != n - r:
        raise DomainError("need r leading series and n-r initial values")
    lead = []
    for s in leading:
        s = list(s)[: order + 1]
        if len(s) < order + 1:
            s = s + [Fraction(0)] * (order + 1 - len(s))
        lead.append(s)
    rest = [[initial[j]] + [Fraction(0)] * order for j in range(n - r)]
    lead_prime = [series_derivative(s) for s in lead]
    for m in range(order):
        f = lead + rest
        for j in range(n - r):
            acc = 0
            for kk in range(r):
                if a.a[j][kk].is_zero():
                    continue
                coeff = poly_on_series(a.a[j][kk], f, m)
                acc = acc + sum(coeff[i] * lead_prime[kk][m - i] for i in range(m + 1))
            rest[j][m + 1] = acc / (m + 1) if not isinstance(acc, int) else Fraction(acc, m + 1)
    return rest
