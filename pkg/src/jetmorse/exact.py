"""Exact linear algebra over the rationals.

Small dense routines on lists of :class:`fractions.Fraction`: Gauss-Jordan
elimination, nullspaces and a phase-one simplex feasibility test with
Bland's rule.  Sizes here are tiny, so clarity beats speed.
"""
from __future__ import annotations

from decimal import Decimal, InvalidOperation
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence

from .errors import DomainError

Matrix = List[List[Fraction]]


def to_fraction(value) -> Fraction:
    """Parse an int, Fraction, float or string such as ``"3/7"`` or ``"0.25"``.

    Raises ``ValueError`` on malformed input or a zero denominator.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"not a finite number: {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                n, d = int(num.strip()), int(den.strip())
            except ValueError:
                raise ValueError(f"malformed rational: {value!r}") from None
            if d == 0:
                raise ValueError(f"zero denominator in rational: {value!r}")
            return Fraction(n, d)
        try:
            dec = Decimal(text)
        except InvalidOperation:
            raise ValueError(f"malformed rational: {value!r}") from None
        if not dec.is_finite():
            raise ValueError(f"not a finite number: {value!r}")
        return Fraction(dec)
    raise ValueError(f"not a rational number: {value!r}")


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[to_fraction(x) if not isinstance(x, Fraction) else x for x in row] for row in rows]


def _rref(a: Matrix, ncols: Optional[int] = None):
    """Reduced row echelon form in place; returns the pivot columns."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    ncols = cols if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        a[r] = [x / piv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def rank(m: Sequence[Sequence]) -> int:
    a = as_matrix(m)
    if not a or not a[0]:
        return 0
    return len(_rref(a))


def inverse(m: Sequence[Sequence]) -> Matrix:
    """Inverse of a square rational matrix; ``DomainError`` if singular."""
    a = as_matrix(m)
    n = len(a)
    if any(len(row) != n for row in a):
        raise DomainError("inverse needs a square matrix")
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    pivots = _rref(aug, ncols=n)
    if len(pivots) < n:
        raise DomainError("matrix is singular")
    return [row[n:] for row in aug]


def solve(m: Sequence[Sequence], b: Sequence) -> List[Fraction]:
    inv = inverse(m)
    bb = [to_fraction(x) for x in b]
    return [sum((x * y for x, y in zip(row, bb)), Fraction(0)) for row in inv]


def nullspace(m: Sequence[Sequence], ncols: Optional[int] = None) -> Matrix:
    """Basis of the right nullspace (list of column vectors)."""
    a = as_matrix(m)
    if not a:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    ncols = len(a[0])
    pivots = _rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -a[row_idx][f]
        basis.append(v)
    return basis


def primitive(v: Sequence[Fraction]) -> List[int]:
    """Scale a rational vector to a primitive integer vector (sign kept)."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return ints
    return [x // g for x in ints]


def feasible_nonnegative(a: Sequence[Sequence], b: Sequence) -> bool:
    """Decide whether ``A x = b`` has a solution with ``x >= 0``.

    Phase-one simplex with artificial variables and Bland's rule, in exact
    arithmetic, so the answer carries no rounding tolerance.
    """
    A = as_matrix(a)
    bb = [to_fraction(x) for x in b]
    m = len(A)
    if m == 0:
        return True
    n = len(A[0])
    for i in range(m):
        if bb[i] < 0:
            A[i] = [-x for x in A[i]]
            bb[i] = -bb[i]
    # tableau columns: x (n), artificials (m), rhs
    T = [A[i] + [Fraction(int(i == j)) for j in range(m)] + [bb[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    width = n + m
    # objective: minimise sum of artificials; reduced costs row
    cost = [Fraction(0)] * (width + 1)
    for i in range(m):
        for j in range(width + 1):
            cost[j] -= T[i][j]
    for i in range(m):
        cost[n + i] += 1  # artificials have unit cost
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        leave = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][width] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            # unbounded direction cannot occur for a bounded phase-one objective
            break
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [x - f * y for x, y in zip(T[i], T[leave])]
        f = cost[enter]
        cost = [x - f * y for x, y in zip(cost, T[leave])]
        basis[leave] = enter
    return cost[width] == 0
