"""Morse index integrals and cohomology bounds on model manifolds.

The models are P^1, P^1 x P^1 and P^2 with Fubini-Study forms normalized so
that every line class integrates to 1.  A curvature field assigns to each
quadrature point a Hermitian matrix written in a unitary frame of the
reference form ``omega`` (``omega = omega_1 + omega_2`` on the product), so
that ``u^n = det(u) omega^n`` pointwise.

Cells are classified by the number of negative eigenvalues and accumulate
``I_q = int_{X(u,q)} (-1)^q u^n``.  Cells with an eigenvalue inside the
tolerance band are counted as degenerate and left out of every ``I_q``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, comb, factorial
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ._parallel import ordered_map, tree_sum
from .errors import DomainError
from .exact import to_fraction

MODEL_DIMS = {"P1": 1, "P1xP1": 2, "P2": 2}
# integral of omega^n with each line class normalized to 1
MODEL_VOLUMES = {"P1": 1.0, "P1xP1": 2.0, "P2": 1.0}
MAX_GRID_CELLS = 10**6
DEFAULT_MC_SAMPLES = 1 << 20


@dataclass(frozen=True)
class HermitianForm:
    """Hermitian matrix ``u_jk`` of ``u = i sum u_jk dz_j ^ dzbar_k``."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("a Hermitian form needs a square matrix")
        dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
        if dev > 1e-12 * max(1.0, float(np.max(np.abs(a))) if a.size else 1.0):
            raise DomainError(f"matrix is not Hermitian (deviation {dev:.3g})")
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def signature(u: HermitianForm, tol: float = 1e-9) -> Tuple[int, int, int]:
    """``(n_plus, n_minus, n_zero)`` with an absolute tolerance band ``[-tol, tol]``."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    if not isinstance(u, HermitianForm):
        u = HermitianForm(u)
    lam = u.eigenvalues()
    n_plus = int(np.sum(lam > tol))
    n_minus = int(np.sum(lam < -tol))
    return n_plus, n_minus, u.n - n_plus - n_minus


# ---------------------------------------------------------------------------
# quadrature grids


@dataclass(frozen=True)
class QuadratureGrid:
    points: np.ndarray  # (M, factors, coords) homogeneous unit vectors
    weights: np.ndarray  # integral of omega^n over each cell
    method: str


@dataclass(frozen=True)
class ModelManifold:
    """One of the built-in models with its quadrature settings.

    ``resolution`` is the number of subdivisions per angular coordinate.
    Two-dimensional models whose tensor grid would exceed ``max_cells``
    cells switch to Monte-Carlo points (``mc_samples``, seeded by ``mc_seed``).
    """

    kind: str
    resolution: int = 64
    mc_samples: int = DEFAULT_MC_SAMPLES
    mc_seed: int = 0
    max_cells: int = MAX_GRID_CELLS

    def __post_init__(self):
        if self.kind not in MODEL_DIMS:
            raise DomainError(f"unsupported model {self.kind!r}; expected one of {sorted(MODEL_DIMS)}")
        if self.resolution < 1:
            raise DomainError("resolution must be positive")

    @property
    def n(self) -> int:
        return MODEL_DIMS[self.kind]

    @property
    def reference_volume(self) -> float:
        return MODEL_VOLUMES[self.kind]

    @property
    def tensor_cells(self) -> int:
        N = self.resolution
        return N * N if self.kind == "P1" else N**4

    @property
    def uses_monte_carlo(self) -> bool:
        return self.n == 2 and self.tensor_cells > self.max_cells

    def grid(self) -> QuadratureGrid:
        return _build_grid(self)

    def meta(self) -> Dict[str, object]:
        return {
            "model": self.kind,
            "resolution": self.resolution,
            "cells": self.mc_samples if self.uses_monte_carlo else self.tensor_cells,
            "method": "monte-carlo" if self.uses_monte_carlo else "midpoint",
        }


def _p1_factor(N: int):
    """Midpoint cells of P^1 in (theta, phi); weights are exact cell areas (total 1)."""
    edges = np.linspace(0.0, np.pi, N + 1)
    theta = 0.5 * (edges[:-1] + edges[1:])
    band = 0.5 * (np.cos(edges[:-1]) - np.cos(edges[1:]))
    phi = 2.0 * np.pi * (np.arange(N) + 0.5) / N
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.repeat(band[:, None] / N, N, axis=1)
    pts = np.stack([np.cos(T / 2).astype(complex), np.sin(T / 2) * np.exp(1j * P)], axis=-1)
    return pts.reshape(-1, 2), W.reshape(-1)


def _p2_grid(N: int):
    """Moment-simplex triangles times angle cells; weights exact (total 1)."""
    cents = []
    for i in range(N):
        for j in range(N - i):
            cents.append(((3 * i + 1) / (3 * N), (3 * j + 1) / (3 * N)))
            if i + j <= N - 2:
                cents.append(((3 * i + 2) / (3 * N), (3 * j + 2) / (3 * N)))
    mu = np.array(cents)  # (N^2, 2)
    ang = 2.0 * np.pi * (np.arange(N) + 0.5) / N
    A1, A2 = np.meshgrid(ang, ang, indexing="ij")
    a1, a2 = A1.reshape(-1), A2.reshape(-1)
    m1 = np.repeat(mu[:, 0], N * N)
    m2 = np.repeat(mu[:, 1], N * N)
    a1 = np.tile(a1, len(mu))
    a2 = np.tile(a2, len(mu))
    m0 = np.clip(1.0 - m1 - m2, 0.0, None)
    pts = np.stack([np.sqrt(m0).astype(complex), np.sqrt(m1) * np.exp(1j * a1), np.sqrt(m2) * np.exp(1j * a2)], axis=-1)
    w = np.full(len(m1), 1.0 / (N**4))
    return pts[:, None, :], w


def _unit_complex(rng: np.random.Generator, size: int, dim: int) -> np.ndarray:
    z = rng.standard_normal((size, dim)) + 1j * rng.standard_normal((size, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


@lru_cache(maxsize=8)
def _build_grid(model: ModelManifold) -> QuadratureGrid:
    N = model.resolution
    if model.kind == "P1":
        pts, w = _p1_factor(N)
        return QuadratureGrid(pts[:, None, :], w, "midpoint")
    vol = model.reference_volume
    if model.uses_monte_carlo:
        rng = np.random.Generator(np.random.Philox(model.mc_seed))
        M = model.mc_samples
        if model.kind == "P1xP1":
            pts = np.stack([_unit_complex(rng, M, 2), _unit_complex(rng, M, 2)], axis=1)
        else:
            pts = _unit_complex(rng, M, 3)[:, None, :]
        return QuadratureGrid(pts, np.full(M, vol / M), "monte-carlo")
    if model.kind == "P1xP1":
        pts, w = _p1_factor(N)
        M = len(w)
        left = np.repeat(pts, M, axis=0)
        right = np.tile(pts, (M, 1))
        weights = vol * np.outer(w, w).reshape(-1)
        return QuadratureGrid(np.stack([left, right], axis=1), weights, "midpoint")
    pts, w = _p2_grid(N)
    return QuadratureGrid(pts, w, "midpoint")


def zonal_cosine(points: np.ndarray, factor: int = 0) -> np.ndarray:
    """``cos(theta)`` of the given P^1 factor, i.e. ``|Z0|^2 - |Z1|^2``."""
    z = points[:, factor, :]
    return np.abs(z[:, 0]) ** 2 - np.abs(z[:, 1]) ** 2


# ---------------------------------------------------------------------------
# curvature fields

# token -> (position in the diagonal, uses zonal factor or None)
FIELD_TOKENS = {
    "P1": {"w": ((0,), None), "y": ((0,), 0)},
    "P1xP1": {"w": ((0, 1), None), "w1": ((0,), None), "w2": ((1,), None), "y1": ((0,), 0), "y2": ((1,), 1)},
    "P2": {"w": ((0, 1), None)},
}

_TERM = re.compile(r"\s*([+-]?)\s*(?:([0-9./]+)\s*\*?\s*)?([a-z][a-z0-9]*)?\s*")


@dataclass(frozen=True)
class CurvatureField:
    """Hermitian (1,1)-form sampled on a model's quadrature points.

    ``sampler(points)`` maps an ``(M, factors, coords)`` array of points to an
    ``(M, n, n)`` array of Hermitian matrices.  ``line_class`` is the
    cohomology class in line-class units when known (used for exact oracles).
    """

    model: ModelManifold
    sampler: Callable[[np.ndarray], np.ndarray]
    description: str = ""
    line_class: Optional[Tuple[Fraction, ...]] = None
    constant: bool = False

    def sample(self, points: np.ndarray) -> np.ndarray:
        mats = np.asarray(self.sampler(points), dtype=complex)
        n = self.model.n
        if mats.shape != (len(points), n, n):
            raise DomainError(f"sampler returned shape {mats.shape}, expected {(len(points), n, n)}")
        return mats


def parse_terms(model_kind: str, description: str) -> Dict[str, Fraction]:
    """Parse ``"2*w1 - 3/2*w2"`` into ``{"w1": 2, "w2": -3/2}``."""
    if model_kind not in FIELD_TOKENS:
        raise DomainError(f"unsupported model {model_kind!r}")
    allowed = FIELD_TOKENS[model_kind]
    text = description.strip()
    if not text:
        raise ValueError("empty field description")
    out: Dict[str, Fraction] = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse field description at {text[pos:]!r}")
        sign, coef, token = m.groups()
        if not first and not sign:
            raise ValueError(f"missing operator before {text[pos:]!r}")
        if coef is None and token is None:
            raise ValueError(f"dangling sign in {description!r}")
        c = to_fraction(coef) if coef is not None else Fraction(1)
        if sign == "-":
            c = -c
        if token is None:
            if c != 0:
                raise ValueError(f"bare constant {coef!r} is not a (1,1)-form")
        else:
            if token not in allowed:
                raise ValueError(f"unknown token {token!r} for model {model_kind}; allowed {sorted(allowed)}")
            out[token] = out.get(token, Fraction(0)) + c
        pos = m.end()
        first = False
    return out


def form_matrix(model_kind: str, token: str, points: np.ndarray) -> np.ndarray:
    """``(M, n, n)`` real diagonal matrices of a basis form at the given points."""
    table = FIELD_TOKENS[model_kind]
    if token not in table:
        raise ValueError(f"unknown token {token!r} for model {model_kind}; allowed {sorted(table)}")
    n = MODEL_DIMS[model_kind]
    slots, factor = table[token]
    out = np.zeros((len(points), n, n))
    vals = 1.0 if factor is None else zonal_cosine(points, factor)
    for s in slots:
        out[:, s, s] = vals
    return out


def field_from_terms(model: ModelManifold, terms: Dict[str, Fraction], description: str = "") -> CurvatureField:
    n = model.n
    items = [(tok, float(c)) for tok, c in terms.items() if c != 0]

    def sampler(points: np.ndarray) -> np.ndarray:
        out = np.zeros((len(points), n, n), dtype=complex)
        for tok, c in items:
            out += c * form_matrix(model.kind, tok, points)
        return out

    zonal = any(FIELD_TOKENS[model.kind][tok][1] is not None for tok, _ in items)
    if model.kind == "P1xP1":
        a = terms.get("w", Fraction(0)) + terms.get("w1", Fraction(0))
        b = terms.get("w", Fraction(0)) + terms.get("w2", Fraction(0))
        line_class: Tuple[Fraction, ...] = (a, b)
    else:
        line_class = (terms.get("w", Fraction(0)),)
    return CurvatureField(model, sampler, description, line_class, constant=not zonal)


def parse_field(model: Union[str, ModelManifold], description: str, resolution: int = 64) -> CurvatureField:
    """Build a field from a description such as ``"2*w1 + 3*w2"``.

    Tokens: ``w`` (the reference form) on every model; ``w1``, ``w2`` (factor
    forms) and ``y1``, ``y2`` (``cos(theta_i) omega_i``) on P1xP1; ``y``
    (``cos(theta) omega``) on P1.  Coefficients are rationals (``"3/2"``).
    """
    if isinstance(model, str):
        model = ModelManifold(model, resolution)
    return field_from_terms(model, parse_terms(model.kind, description), description)


# ---------------------------------------------------------------------------
# Morse integrals


@dataclass(frozen=True)
class MorseSpectrum:
    """Signed index integrals and diagnostics.

    ``integrals[q]`` is ``int_{X(u,q)} (-1)^q u^n``; ``index_mass[q]`` the
    fraction of volume in ``X(u,q)``; ``plain_integral`` the unpartitioned
    ``int u^n``.
    """

    integrals: Tuple[float, ...]
    degenerate_mass: float = 0.0
    index_mass: Tuple[float, ...] = ()
    plain_integral: float = 0.0
    flagged: bool = False
    grid_meta: Dict[str, object] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.integrals) - 1

    @classmethod
    def from_integrals(cls, integrals: Sequence[float]) -> "MorseSpectrum":
        ints = tuple(float(x) for x in integrals)
        plain = sum((-1) ** q * x for q, x in enumerate(ints))
        return cls(ints, 0.0, (), plain, False, {})


def _classify_block(mats: np.ndarray, weights: np.ndarray, tol: float) -> np.ndarray:
    n = mats.shape[-1]
    lam = np.linalg.eigvalsh(mats)
    scale = np.max(np.abs(lam), axis=1)
    band = tol * scale
    n_minus = np.sum(lam < -band[:, None], axis=1)
    n_plus = np.sum(lam > band[:, None], axis=1)
    nondeg = (n_minus + n_plus) == n
    det = np.prod(lam, axis=1)
    out = np.zeros(2 * (n + 1) + 2)
    for q in range(n + 1):
        mask = nondeg & (n_minus == q)
        out[q] = np.sum(weights[mask] * ((-1) ** q) * det[mask])
        out[n + 1 + q] = np.sum(weights[mask])
    out[2 * (n + 1)] = np.sum(weights[~nondeg])
    out[2 * (n + 1) + 1] = np.sum(weights * det)
    return out


def morse_integrals(
    field: CurvatureField,
    tol: float = 1e-9,
    degenerate_threshold: float = 1e-3,
    workers: Optional[int] = None,
    block_size: int = 1 << 16,
) -> MorseSpectrum:
    """Partition the grid by index and integrate ``(-1)^q u^n`` on each part.

    ``tol`` is relative to the largest absolute eigenvalue of each cell.  The
    result is flagged when the degenerate volume fraction exceeds
    ``degenerate_threshold``.  Blocks are fixed, and partial sums are merged
    by a pairwise tree in block order, so the thread count never changes the
    result.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    grid = field.model.grid()
    n = field.model.n
    M = len(grid.weights)
    starts = list(range(0, M, block_size))

    def work(s: int) -> np.ndarray:
        pts = grid.points[s:s + block_size]
        return _classify_block(field.sample(pts), grid.weights[s:s + block_size], tol)

    total = tree_sum(ordered_map(work, starts, workers))
    vol = float(np.sum(grid.weights))
    integrals = tuple(float(x) for x in total[: n + 1])
    index_mass = tuple(float(x) / vol for x in total[n + 1: 2 * (n + 1)])
    degenerate = float(total[2 * (n + 1)]) / vol
    meta = field.model.meta()
    meta.update({"tol": tol, "degenerate_threshold": degenerate_threshold, "volume": vol})
    return MorseSpectrum(
        integrals,
        degenerate,
        index_mass,
        float(total[2 * (n + 1) + 1]),
        degenerate > degenerate_threshold,
        meta,
    )


# ---------------------------------------------------------------------------
# bounds


def _unpack(spectrum, n: Optional[int]) -> Tuple[Tuple[float, ...], int]:
    if isinstance(spectrum, MorseSpectrum):
        ints = spectrum.integrals
    else:
        ints = tuple(float(x) for x in spectrum)
    if n is None:
        n = len(ints) - 1
    if len(ints) < n + 1:
        ints = ints + (0.0,) * (n + 1 - len(ints))
    return ints, n


def _prefactor(m, r, n) -> float:
    return r * float(m) ** n / factorial(n)


def wm_bound(q: int, m, r: int, spectrum, n: Optional[int] = None) -> float:
    """Dominant term ``r m^n / n! * I_q`` of the upper bound for ``h^q``."""
    ints, n = _unpack(spectrum, n)
    if not 0 <= q <= n:
        raise DomainError(f"q must lie in [0, {n}]")
    return _prefactor(m, r, n) * ints[q]


def sm_alternating(q: int, m, r: int, spectrum, n: Optional[int] = None) -> float:
    """Right side of the strong Morse inequality for ``sum_{j<=q} (-1)^(q-j) h^j``.

    ``int_{X(j)} (-1)^q u^n = (-1)^(q-j) I_j`` because ``u^n`` has sign
    ``(-1)^j`` on ``X(j)``, so the summand is ``(-1)^(q-j) I_j``.  At
    ``q = n`` the result is ``(-1)^n`` times :func:`rr_estimate`, the
    alternating sum ``sum_j (-1)^(n-j) h^j`` being ``(-1)^n chi``.
    """
    ints, n = _unpack(spectrum, n)
    if not 0 <= q <= n:
        raise DomainError(f"q must lie in [0, {n}]")
    total = sum((-1) ** (q - j) * ints[j] for j in range(q + 1))
    return _prefactor(m, r, n) * total


def rr_estimate(m, r: int, field, n: Optional[int] = None) -> float:
    """``r m^n / n! * int u^n`` from the plain (unpartitioned) integral.

    ``field`` may be a :class:`CurvatureField` (integrated here), a
    :class:`MorseSpectrum` or a number (the integral itself).
    """
    if isinstance(field, CurvatureField):
        spec = morse_integrals(field)
        plain, n = spec.plain_integral, field.model.n
    elif isinstance(field, MorseSpectrum):
        plain, n = field.plain_integral, field.n
    else:
        if n is None:
            raise DomainError("n is required when passing a bare integral")
        plain = float(field)
    return _prefactor(m, r, n) * plain


def lower_bound_q(q: int, m, r: int, spectrum, n: Optional[int] = None) -> float:
    """``r m^n / n! * sum_{j=q-1}^{q+1} (-1)^(q-j) I_j``; at q=0 this is ``I_0 - I_1``."""
    ints, n = _unpack(spectrum, n)
    if not 0 <= q <= n:
        raise DomainError(f"q must lie in [0, {n}]")
    total = sum((-1) ** (q - j) * ints[j] for j in (q - 1, q, q + 1) if 0 <= j <= n)
    return _prefactor(m, r, n) * total


# ---------------------------------------------------------------------------
# exact oracles


def _integral_degree(m, d) -> int:
    v = Fraction(m) * to_fraction(d)
    if v.denominator != 1:
        raise DomainError(f"m*d = {v} is not an integer")
    return int(v)


def _h_p1(p: int) -> Tuple[int, int]:
    return max(0, p + 1), max(0, -p - 1)


def exact_cohomology(model, degrees: Sequence, m: int) -> Tuple[int, ...]:
    """``h^0 .. h^n`` of ``O(m d)`` (or ``O(m a, m b)``) on a model."""
    kind = model.kind if isinstance(model, ModelManifold) else model
    if kind not in MODEL_DIMS:
        raise DomainError(f"unsupported model {kind!r}")
    degrees = tuple(degrees)
    if kind == "P1":
        if len(degrees) != 1:
            raise DomainError("P1 takes one degree")
        return _h_p1(_integral_degree(m, degrees[0]))
    if kind == "P1xP1":
        if len(degrees) != 2:
            raise DomainError("P1xP1 takes a bidegree (a, b)")
        h1 = _h_p1(_integral_degree(m, degrees[0]))
        h2 = _h_p1(_integral_degree(m, degrees[1]))
        return tuple(sum(h1[i] * h2[q - i] for i in range(2) if 0 <= q - i <= 1) for q in range(3))
    if len(degrees) != 1:
        raise DomainError("P2 takes one degree")
    p = _integral_degree(m, degrees[0])
    h0 = comb(p + 2, 2) if p >= 0 else 0
    h2 = comb(-p - 1, 2) if p <= -3 else 0
    return (h0, 0, h2)


def exact_euler(model, degrees: Sequence, m: int) -> int:
    h = exact_cohomology(model, degrees, m)
    return sum((-1) ** q * x for q, x in enumerate(h))


@dataclass(frozen=True)
class QDivisorMetricP1:
    """Metric on ``O(d)`` over P^1 with weights ``lambda_j log|z - p_j|`` at marked points.

    Points are rationals or the string ``"inf"``.
    """

    degree: int
    weights: Tuple[Tuple[object, Fraction], ...] = ()

    def __post_init__(self):
        ws = []
        seen = set()
        for point, lam in self.weights:
            pt = "inf" if isinstance(point, str) and point.strip().lower() in ("inf", "infinity") else to_fraction(point)
            lam = to_fraction(lam)
            if lam == 0:
                raise DomainError("weights must be nonzero")
            if pt in seen:
                raise DomainError(f"marked point {pt} repeated")
            seen.add(pt)
            ws.append((pt, lam))
        object.__setattr__(self, "weights", tuple(ws))
        object.__setattr__(self, "degree", int(self.degree))


def bounded_sections_p1(metric: QDivisorMetricP1, m: int) -> int:
    """``max(0, m d - sum_j ceil(m lambda_j) + 1)``: bounded sections of ``O(m d)``."""
    if m < 1:
        raise DomainError("m must be >= 1")
    total = m * metric.degree - sum(ceil(m * lam) for _, lam in metric.weights)
    return max(0, total + 1)
