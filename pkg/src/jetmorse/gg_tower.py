"""Tautological curvature on the Green-Griffiths tower and its Monte-Carlo integrals.

Conventions
-----------
A point of the projectivized jet bundle is written in simplex coordinates
``x_s = eps_s |xi_s|^(2p/s) / N(xi)`` with ``N(xi) = sum_t eps_t |xi_t|^(2p/t)``
and unit directions ``u_s = xi_s / |xi_s|``.  On the unit sphere ``N = 1`` the
``x_s`` sum to one, and the horizontal curvature of ``O(1)`` is

    theta_ij = -(1/2 pi) sum_s (x_s / s) sum_ab c_ijab(z) u_sa conj(u_sb).

The weighted Fubini-Study form on a fiber ``P(1^r, 2^r, ..., k^r)`` has total
mass ``1/(k!)^r``; its push-forward to ``(x, u)`` is ``Dirichlet(r, ..., r)``
in ``x`` times independent uniform measures on the unit spheres in ``u``.
(The torus action has a moment map whose block sums are ``x_s / s``;
Duistermaat-Heckman gives a Lebesgue image on the weighted simplex.)  The
``O(eps)`` remainder of the curvature is dropped.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, lcm, lgamma, log, sqrt
from typing import Callable, Dict, Iterator, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ._parallel import ordered_map
from .errors import DomainError
from .jet_algebra import JetPoint
from .morse_engine import (
    FIELD_TOKENS,
    CurvatureField,
    HermitianForm,
    ModelManifold,
    MorseSpectrum,
    form_matrix,
)

TWO_PI = 2.0 * np.pi
DROPPED_REMAINDER = "O(eps) curvature remainder dropped"
LOG_K_ERROR = "O(1/log k) error term not quantified"


# ---------------------------------------------------------------------------
# schedules and the tautological metric


@dataclass(frozen=True)
class EpsilonSchedule:
    """Weights ``1 = eps_1 > eps_2 > ... > eps_k > 0``."""

    eps: Tuple

    def __post_init__(self):
        eps = tuple(self.eps)
        if not eps:
            raise DomainError("schedule needs k >= 1 weights")
        if eps[0] != 1:
            raise DomainError("eps_1 must equal 1")
        if any(e <= 0 for e in eps):
            raise DomainError("weights must be positive")
        if any(a <= b for a, b in zip(eps, eps[1:])):
            raise DomainError("weights must be strictly decreasing")
        object.__setattr__(self, "eps", eps)

    @classmethod
    def default(cls, k: int) -> "EpsilonSchedule":
        """``eps_s = k^(-2(s-1))``."""
        if k < 1:
            raise DomainError("k must be >= 1")
        return cls(tuple(Fraction(1, k ** (2 * (s - 1))) for s in range(1, k + 1)))

    @property
    def k(self) -> int:
        return len(self.eps)

    @property
    def p(self) -> int:
        return lcm(*range(1, self.k + 1))

    def log_eps(self) -> np.ndarray:
        return np.array([log(float(e)) for e in self.eps])


def _abs2(x):
    if isinstance(x, complex):
        return x.real * x.real + x.imag * x.imag
    if isinstance(x, (np.complexfloating,)):
        return float(abs(x) ** 2)
    return x * x


def _check_order(jet: JetPoint, sched: EpsilonSchedule) -> None:
    if jet.k != sched.k:
        raise DomainError(f"jet order {jet.k} does not match schedule length {sched.k}")


def taut_norm_power(jet: JetPoint, sched: EpsilonSchedule):
    """``sum_s eps_s |xi_s|^(2p/s)``, the p-th power of the tautological norm.

    Exact for rational (real) jet entries and rational weights.
    """
    _check_order(jet, sched)
    p = sched.p
    total = 0
    for s, (e, xi) in enumerate(zip(sched.eps, jet.xis), start=1):
        sq = sum((_abs2(x) for x in xi), 0)
        total = total + e * sq ** (p // s)
    return total


def taut_norm(jet: JetPoint, sched: EpsilonSchedule, phi: float = 0.0) -> float:
    """``e^phi (sum_s eps_s |xi_s|^(2p/s))^(1/p)``; zero jet gives 0."""
    _check_order(jet, sched)
    p = sched.p
    logs = []
    for s, (e, xi) in enumerate(zip(sched.eps, jet.xis), start=1):
        sq = float(sum(_abs2(complex(x)) for x in xi))
        if sq > 0:
            logs.append(log(float(e)) + (p / s) * log(sq))
    if not logs:
        return 0.0
    top = max(logs)
    log_n = top + log(sum(np.exp(np.array(logs) - top)))
    return float(np.exp(phi + log_n / p))


# ---------------------------------------------------------------------------
# polar coordinates


@dataclass(frozen=True)
class FiberSample:
    """Polar coordinates ``x_s >= 0`` and unit vectors ``u_s``.

    ``flags[s]`` is True when ``xi_s = 0`` and ``u_s`` is an arbitrary
    fixed unit vector.
    """

    xs: Tuple[float, ...]
    us: Tuple[Tuple[complex, ...], ...]
    flags: Tuple[bool, ...] = ()

    def __post_init__(self):
        us = tuple(tuple(complex(c) for c in u) for u in self.us)
        for u in us:
            if abs(sqrt(sum(abs(c) ** 2 for c in u)) - 1.0) > 1e-12:
                raise DomainError("u_s must be unit vectors")
        if any(x < 0 for x in self.xs):
            raise DomainError("x_s must be nonnegative")
        object.__setattr__(self, "us", us)
        object.__setattr__(self, "xs", tuple(float(x) for x in self.xs))
        flags = tuple(self.flags) if self.flags else tuple(False for _ in us)
        object.__setattr__(self, "flags", flags)

    @property
    def k(self) -> int:
        return len(self.xs)


def _polar_arrays(xis: np.ndarray, log_eps: np.ndarray, p: int):
    """Vectorized polar coordinates for jets of shape ``(N, k, r)``."""
    k = xis.shape[1]
    s = np.arange(1, k + 1, dtype=float)
    sq = np.sum(np.abs(xis) ** 2, axis=2)
    norms = np.sqrt(sq)
    flags = sq == 0
    xs = np.exp(log_eps)[None, :] * sq ** (p / s)[None, :]
    us = np.empty_like(xis, dtype=complex)
    safe = np.where(flags, 1.0, norms)
    us[...] = xis / safe[..., None]
    if flags.any():
        e1 = np.zeros(xis.shape[2], dtype=complex)
        e1[0] = 1.0
        us[flags] = e1
    return xs, us, flags


def polar_decompose(jet: JetPoint, sched: EpsilonSchedule) -> FiberSample:
    """``x_s = eps_s |xi_s|^(2p/s)`` and ``u_s = xi_s / |xi_s|``.

    With this radial coordinate ``sum_s x_s`` is the p-th power of the
    tautological norm, so on the unit sphere the ``x_s`` lie on the simplex
    used by the curvature formula.  Inverse: :func:`reconstruct_jet`.
    """
    _check_order(jet, sched)
    arr = np.array([[complex(c) for c in xi] for xi in jet.xis], dtype=complex)[None]
    xs, us, flags = _polar_arrays(arr, sched.log_eps(), sched.p)
    return FiberSample(tuple(xs[0]), tuple(tuple(u) for u in us[0]), tuple(bool(f) for f in flags[0]))


def reconstruct_jet(sample: FiberSample, sched: EpsilonSchedule, base=()) -> JetPoint:
    """``xi_s = (x_s / eps_s)^(s/2p) u_s``."""
    p = sched.p
    xis = []
    for s, (x, u, e) in enumerate(zip(sample.xs, sample.us, sched.eps), start=1):
        rad = (x / float(e)) ** (s / (2.0 * p)) if x > 0 else 0.0
        xis.append(tuple(rad * c for c in u))
    return JetPoint(tuple(base), tuple(xis))


# ---------------------------------------------------------------------------
# curvature data


@dataclass(frozen=True)
class VBundleCurvature:
    """Curvature coefficients ``c_ijab(z)`` of a rank-r bundle over an n-dimensional base.

    ``coefficients(points)`` returns an array of shape ``(M, n, n, r, r)``.
    The Chern form of the bundle is ``(1/2 pi) c`` in the matrix units of
    :class:`~jetmorse.morse_engine.HermitianForm`.
    """

    n: int
    r: int
    coefficients: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    def at(self, points: np.ndarray) -> np.ndarray:
        c = np.asarray(self.coefficients(points), dtype=complex)
        shape = (len(points), self.n, self.n, self.r, self.r)
        if c.shape != shape:
            raise DomainError(f"curvature tensor has shape {c.shape}, expected {shape}")
        dev = np.max(np.abs(c - np.conj(np.transpose(c, (0, 2, 1, 4, 3))))) if c.size else 0.0
        scale = max(1.0, float(np.max(np.abs(c)))) if c.size else 1.0
        if dev > 1e-12 * scale:
            raise DomainError("curvature tensor violates c_ijab = conj(c_jiba)")
        return c

    def trace_form(self, points: np.ndarray) -> np.ndarray:
        """Matrix of the Chern form of ``det V^*``: ``-(1/2 pi) sum_a c_ijaa``."""
        c = self.at(points)
        return -np.einsum("mijaa->mij", c) / TWO_PI

    @classmethod
    def zero(cls, n: int, r: int) -> "VBundleCurvature":
        return cls(n, r, lambda pts: np.zeros((len(pts), n, n, r, r), dtype=complex), "0")

    @classmethod
    def constant(cls, tensor) -> "VBundleCurvature":
        t = np.asarray(tensor, dtype=complex)
        n, r = t.shape[0], t.shape[2]
        return cls(n, r, lambda pts: np.broadcast_to(t, (len(pts),) + t.shape).copy(), "constant")

    @classmethod
    def from_forms(cls, model: ModelManifold, forms: Mapping[str, object]) -> "VBundleCurvature":
        """Bundle whose Chern form is ``sum_token A_token (x) form_token``.

        ``forms`` maps model tokens (``w``, ``w1``, ``y`` ...) to Hermitian
        ``r x r`` matrices (or scalars when r = 1).
        """
        mats = {}
        r = None
        for tok, A in forms.items():
            A = np.atleast_2d(np.asarray(A, dtype=complex))
            if A.shape[0] != A.shape[1]:
                raise DomainError(f"matrix for {tok!r} is not square")
            if np.max(np.abs(A - A.conj().T)) > 1e-12 * max(1.0, float(np.max(np.abs(A)))):
                raise DomainError(f"matrix for {tok!r} is not Hermitian")
            if r is None:
                r = A.shape[0]
            elif A.shape[0] != r:
                raise DomainError("all matrices must have the same rank")
            mats[tok] = A
        if r is None:
            raise DomainError("at least one form is required")
        n = model.n
        unknown = sorted(set(mats) - set(FIELD_TOKENS[model.kind]))
        if unknown:
            raise DomainError(f"unknown tokens {unknown} for model {model.kind}")

        def coefficients(points: np.ndarray) -> np.ndarray:
            out = np.zeros((len(points), n, n, r, r), dtype=complex)
            for tok, A in mats.items():
                out += TWO_PI * np.einsum("mij,ab->mijab", form_matrix(model.kind, tok, points), A)
            return out

        desc = " + ".join(f"{tok}:{mats[tok].tolist()}" for tok in mats)
        return cls(n, r, coefficients, desc)


class TautCurvature(NamedTuple):
    horizontal: HermitianForm
    vertical: str  # the fiber part is positive and not materialized
    remainder: str


def _horizontal(c: np.ndarray, xs: np.ndarray, us: np.ndarray, trace_model: bool = False) -> np.ndarray:
    """Batched horizontal block; c (M,n,n,r,r), xs (M,k), us (M,k,r)."""
    k = xs.shape[1]
    r = us.shape[2]
    w = xs / np.arange(1, k + 1)[None, :]
    if trace_model:
        T = np.einsum("ms,ab->mab", w, np.eye(r) / r)
    else:
        T = np.einsum("ms,msa,msb->mab", w, us, np.conj(us))
    return -np.einsum("mijab,mab->mij", c, T) / TWO_PI


def taut_curvature(z, sample: FiberSample, vb: VBundleCurvature, sched: Optional[EpsilonSchedule] = None) -> TautCurvature:
    """Horizontal part of the curvature of ``O(1)`` at ``(z, xi)``.

    ``z`` is a single grid point (array of shape ``(factors, coords)``).  The
    vertical block is the weighted Fubini-Study form, tagged positive.
    """
    if sched is not None and sched.k != sample.k:
        raise DomainError("sample and schedule disagree on k")
    pts = np.asarray(z)[None]
    c = vb.at(pts)
    us = np.array(sample.us, dtype=complex)
    if us.shape[1] != vb.r:
        raise DomainError("sample rank does not match the bundle")
    H = _horizontal(c, np.array([sample.xs]), us[None])[0]
    return TautCurvature(HermitianForm(H), "positive", DROPPED_REMAINDER)


@dataclass(frozen=True)
class EtaForms:
    """``eta = Theta(det V^*) + Theta_F`` and ``eta_star = Theta(det V) + Theta_F``."""

    eta: CurvatureField
    eta_star: CurvatureField


def eta_forms(vb: VBundleCurvature, theta_f: CurvatureField) -> EtaForms:
    model = theta_f.model
    if vb.n != model.n:
        raise DomainError("bundle and base dimensions differ")

    def eta(points):
        return vb.trace_form(points) + theta_f.sample(points)

    def eta_star(points):
        return -vb.trace_form(points) + theta_f.sample(points)

    return EtaForms(
        CurvatureField(model, eta, f"-Tr({vb.description}) + {theta_f.description}"),
        CurvatureField(model, eta_star, f"Tr({vb.description}) + {theta_f.description}"),
    )


# ---------------------------------------------------------------------------
# Monte-Carlo on spheres and fibers


def _generator(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def _sphere(rng: np.random.Generator, shape: Tuple[int, ...], r: int) -> np.ndarray:
    z = rng.standard_normal(shape + (r,)) + 1j * rng.standard_normal(shape + (r,))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def sphere_average(A, N: int, seed: int = 0) -> Tuple[float, float]:
    """Average of ``<A u, u>`` over ``N`` uniform unit vectors of C^r.

    Returns ``(estimate, standard_error)``; the exact mean is ``Tr(A)/r``.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    r = A.shape[0]
    rng = _generator(seed)
    z = rng.standard_normal((N, r)) + 1j * rng.standard_normal((N, r))
    a2 = np.abs(z) ** 2
    # diagonal and off-diagonal parts kept apart so that A = c I is exact
    off = A - np.diag(np.diag(A))
    num = np.sum(a2 * np.diag(A).real[None, :], axis=1)
    if np.any(off != 0):
        num = num + np.einsum("ni,ij,nj->n", np.conj(z), off, z).real
    vals = num / np.sum(a2, axis=1)
    est = float(np.mean(vals))
    err = float(np.std(vals, ddof=1) / sqrt(N)) if N > 1 else float("inf")
    return est, err


@dataclass(frozen=True)
class FiberBatch:
    """Weighted fiber samples; ``weights`` sum to the fiber volume in expectation."""

    xs: np.ndarray  # (N, k)
    us: np.ndarray  # (N, k, r)
    weights: np.ndarray  # (N,)
    xis: np.ndarray  # (N, k, r) unit-norm jets the samples came from
    flags: np.ndarray  # (N, k)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self) -> Iterator[Tuple[FiberSample, float]]:
        for i in range(len(self)):
            yield FiberSample(tuple(self.xs[i]), tuple(tuple(u) for u in self.us[i]), tuple(self.flags[i])), float(self.weights[i])

    def effective_sample_size(self) -> float:
        w = self.weights
        return float(np.sum(w) ** 2 / np.sum(w * w))


def fiber_volume(k: int, r: int) -> Fraction:
    """Total mass ``1/(k!)^r`` of the weighted Fubini-Study form on a fiber."""
    return Fraction(1, factorial(k) ** r)


def _log_dirichlet_ratio(xs: np.ndarray, r: int, shape: np.ndarray) -> np.ndarray:
    """``log Dir(r,...,r)(x) - log Dir(shape)(x)``."""
    k = xs.shape[1]
    const = lgamma(k * r) - k * lgamma(r) - lgamma(float(np.sum(shape))) + float(sum(lgamma(a) for a in shape))
    diff = r - shape
    out = np.full(len(xs), const)
    for s in range(k):
        if diff[s] != 0:
            out = out + diff[s] * np.log(xs[:, s])
    return out


def fiber_sampler(
    k: int,
    r: int,
    sched: Optional[EpsilonSchedule] = None,
    seed: int = 0,
    size: int = 10_000,
    shape: Optional[Sequence[float]] = None,
    stream: int = 0,
) -> FiberBatch:
    """Importance-weighted samples of the fiber measure.

    Each ``xi_s`` is drawn rotation-invariantly with a radial law making
    ``y_s = eps_s |xi_s|^(2p/s)`` a ``Gamma(shape_s)`` variable.  The jet is
    rescaled onto the unit sphere with the C*-action and passed through the
    polar decomposition, so ``x`` follows ``Dirichlet(shape)`` and the
    ``u_s`` are uniform.  The weight is ``(k!)^(-r) / size`` times the
    Dirichlet density ratio ``Dir(r..r) / Dir(shape)``; with the default
    ``shape = (r, ..., r)`` all weights are equal.
    """
    if k < 1 or r < 1:
        raise DomainError("k and r must be positive")
    sched = EpsilonSchedule.default(k) if sched is None else sched
    if sched.k != k:
        raise DomainError("schedule length differs from k")
    shape_arr = np.full(k, float(r)) if shape is None else np.asarray(shape, dtype=float)
    if shape_arr.shape != (k,) or np.any(shape_arr <= 0):
        raise DomainError("shape must be k positive numbers")
    p = sched.p
    rng = _generator(seed, stream)
    y = rng.standard_gamma(shape_arr[None, :], size=(size, k))
    u = _sphere(rng, (size, k), r)
    s_arr = np.arange(1, k + 1, dtype=float)
    log_eps = sched.log_eps()
    # |xi_s| = (y_s / eps_s)^(s/2p), then the C*-action onto the unit sphere
    log_r = (s_arr / (2.0 * p))[None, :] * (np.log(y) - log_eps[None, :])
    log_norm = np.log(np.sum(y, axis=1))  # log of sum eps_s |xi_s|^(2p/s)
    log_lam = -log_norm / (2.0 * p)
    log_r = log_r + s_arr[None, :] * log_lam[:, None]
    xis = np.exp(log_r)[..., None] * u
    xs, us, flags = _polar_arrays(xis, log_eps, p)
    vol = float(fiber_volume(k, r))
    if k == 1:
        ratio = np.ones(size)
    else:
        ratio = np.exp(_log_dirichlet_ratio(xs, r, shape_arr))
    return FiberBatch(xs, us, vol * ratio / size, xis, flags)


# ---------------------------------------------------------------------------
# tower Morse integrals


class GGEstimate(NamedTuple):
    value: float
    stderr: float
    N: int
    seed: int
    shards: int
    k: int
    q: int
    n: int
    r: int
    meta: Dict[str, object]


def harmonic(k: int) -> Fraction:
    return sum((Fraction(1, s) for s in range(1, k + 1)), Fraction(0))


def _shard_sizes(N: int, shards: int):
    base, extra = divmod(N, shards)
    sizes = [base + (1 if i < extra else 0) for i in range(shards)]
    offsets = [sum(sizes[:i]) for i in range(shards)]
    return sizes, offsets


def gg_morse_mc(
    k: int,
    q: int,
    vb: VBundleCurvature,
    theta_f: CurvatureField,
    sched: Optional[EpsilonSchedule] = None,
    N: int = 100_000,
    seed: int = 0,
    shards: int = 8,
    tol: float = 1e-9,
    trace_model: bool = False,
    workers: Optional[int] = None,
    chunk: int = 1 << 15,
) -> GGEstimate:
    """Monte-Carlo estimate of the q-index Morse integral of ``L_k`` on the tower.

    ``L_k = O(1) (x) pi^* F^(H_k / (k r))`` with ``H_k = 1 + 1/2 + ... + 1/k``.
    The top power of ``Theta = omega_FS + theta`` is
    ``C(n+kr-1, n) omega_FS^(kr-1) theta^n``, so the integral is that binomial
    times the base integral of the fiber mean of ``det(theta) 1[index = q]``.
    The value carries the sign ``(-1)^q`` (it is nonnegative), matching the
    convention of :class:`~jetmorse.morse_engine.MorseSpectrum`.

    Sample ``i`` sits over base cell ``i mod M``.  Samples are split into
    ``shards`` fixed streams keyed by ``(seed, shard)`` and merged in shard
    order, so results do not depend on the thread count.
    """
    model = theta_f.model
    n, r = model.n, vb.r
    if vb.n != n:
        raise DomainError("bundle and base dimensions differ")
    top = n + k * r - 1
    if q < 0 or q > top:
        raise DomainError(f"q must lie in [0, {top}]")
    if N < 2 or shards < 1:
        raise DomainError("need N >= 2 samples and at least one shard")
    sched = EpsilonSchedule.default(k) if sched is None else sched
    grid = model.grid()
    M = len(grid.weights)
    c_cells = vb.at(grid.points)
    f_cells = theta_f.sample(grid.points) * float(harmonic(k) / (k * r))
    cell_factor = comb(top, n) * M * grid.weights
    sizes, offsets = _shard_sizes(N, shards)

    def run_shard(idx: int):
        size = sizes[idx]
        if size == 0:
            return 0, 0.0, 0.0
        batch = fiber_sampler(k, r, sched, seed, size, stream=idx)
        # weights * size recover (k!)^(-r) times the density ratio
        fw = batch.weights * size
        count, mean, m2 = 0, 0.0, 0.0
        for start in range(0, size, chunk):
            stop = min(size, start + chunk)
            cells = (offsets[idx] + np.arange(start, stop)) % M
            H = _horizontal(c_cells[cells], batch.xs[start:stop], batch.us[start:stop], trace_model)
            H = H + f_cells[cells]
            lam = np.linalg.eigvalsh(H)
            band = tol * np.max(np.abs(lam), axis=1)
            n_minus = np.sum(lam < -band[:, None], axis=1)
            n_plus = np.sum(lam > band[:, None], axis=1)
            hit = (n_minus == q) & (n_minus + n_plus == n)
            y = np.where(hit, ((-1) ** q) * np.prod(lam, axis=1), 0.0) * fw[start:stop] * cell_factor[cells]
            # Chan et al. merge of (count, mean, M2)
            cb = len(y)
            mb = float(np.mean(y))
            m2b = float(np.sum((y - mb) ** 2))
            delta = mb - mean
            tot = count + cb
            mean = mean + delta * cb / tot
            m2 = m2 + m2b + delta * delta * count * cb / tot
            count = tot
        return count, mean, m2

    parts = ordered_map(run_shard, list(range(shards)), workers)
    count, mean, m2 = 0, 0.0, 0.0
    for cb, mb, m2b in parts:
        if cb == 0:
            continue
        delta = mb - mean
        tot = count + cb
        mean = mean + delta * cb / tot
        m2 = m2 + m2b + delta * delta * count * cb / tot
        count = tot
    if count == 0:
        value, err = 0.0, 0.0
    else:
        value = mean
        err = sqrt(max(m2, 0.0) / (count - 1) / count)
    meta = {
        "remainder": DROPPED_REMAINDER,
        "vertical": "positive (declared)",
        "trace_model": trace_model,
        "base": model.meta(),
        "eps": [str(e) for e in sched.eps],
        "twist": str(harmonic(k) / (k * r)),
    }
    return GGEstimate(float(value), float(err), N, seed, shards, k, q, n, r, meta)


def k1_calibration(r: int, N: int = 100_000, seed: int = 0) -> float:
    """Known fiber volume at k = 1 (ordinary P^(r-1)) divided by the sampled one."""
    batch = fiber_sampler(1, r, EpsilonSchedule.default(1), seed, N)
    return float(fiber_volume(1, r)) / float(np.sum(batch.weights))


def _ints(spectrum) -> Tuple[float, ...]:
    if isinstance(spectrum, MorseSpectrum):
        return spectrum.integrals
    return tuple(float(x) for x in spectrum)


def rhs_coefficient(k: int, n: int, r: int, base_integrals, q: int) -> float:
    """``(log k)^n / (n! (k!)^r) * I_q(eta)``; zero for ``q > n``."""
    ints = _ints(base_integrals)
    if q < 0:
        raise DomainError("q must be nonnegative")
    if q >= len(ints) or q > n:
        return 0.0
    return log(k) ** n / (factorial(n) * factorial(k) ** r) * ints[q]


class BoundPair(NamedTuple):
    lower: float
    upper: float
    error_term: str


def bound_5_11(
    variant: str,
    q: int,
    m,
    k: int,
    rho: float,
    spectrum,
    r: int = 1,
    n: Optional[int] = None,
) -> BoundPair:
    """Dominant terms of the tower Morse bounds for jet differentials or their duals.

    Both share the prefactor ``rho m^N / N! (log k)^n / (n! (k!)^r)`` with
    ``N = n + k r - 1``; the upper bound multiplies ``I_q`` and the lower bound
    ``sum_{j=q-1}^{q+1} (-1)^(q-j) I_j``.  Pass the spectrum of ``eta`` for
    ``"jet_differentials"`` and of ``eta_star`` for ``"duals"``.
    """
    if variant not in ("jet_differentials", "duals"):
        raise DomainError(f"unknown variant {variant!r}")
    ints = _ints(spectrum)
    n = len(ints) - 1 if n is None else n
    if not 0 <= q <= n:
        raise DomainError(f"q must lie in [0, {n}]")
    ints = ints + (0.0,) * max(0, n + 1 - len(ints))
    top = n + k * r - 1
    pref = rho * float(m) ** top / factorial(top) * log(k) ** n / (factorial(n) * factorial(k) ** r)
    lower = sum((-1) ** (q - j) * ints[j] for j in (q - 1, q, q + 1) if 0 <= j <= n)
    return BoundPair(pref * lower, pref * ints[q], LOG_K_ERROR)


class BignessCertificate(NamedTuple):
    positive: bool
    margin: float
    kahler_current_mode: bool
    h0_lower: float


def certify_bigness(spectrum, m_ref=1, r: int = 1, n: Optional[int] = None) -> BignessCertificate:
    """Sections certificate from ``I_0 - I_1 > 0``.

    ``kahler_current_mode`` is set when every cell has index 0 (no degenerate
    cells), i.e. all higher index sets are empty.
    """
    ints = _ints(spectrum)
    n = len(ints) - 1 if n is None else n
    i0 = ints[0] if ints else 0.0
    i1 = ints[1] if len(ints) > 1 else 0.0
    margin = i0 - i1
    scale = abs(i0) + abs(i1)
    positive = margin > 1e-12 * scale and margin > 0
    mode = False
    if isinstance(spectrum, MorseSpectrum) and spectrum.index_mass:
        mode = spectrum.degenerate_mass == 0 and spectrum.index_mass[0] >= 1 - 1e-12
    h0 = r * float(m_ref) ** n / factorial(n) * margin
    return BignessCertificate(bool(positive), float(margin), bool(mode), float(h0))
