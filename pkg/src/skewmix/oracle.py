"""Ground-truth correlations: exhaustive word sums and a Monte Carlo check.

The exact route unfolds the invariant-measure pairing into a finite sum
over admissible words, with closed-form Gaussian fiber cross-correlations
per word; no quadrature enters, so it is independent of the spectral
machinery it certifies.  The stochastic route estimates the same pairing
by sampling trajectories from the measure and fiber points from a
dominating Gaussian mixture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gibbs import GibbsMeasure
from .observables import SkewObservable, WindowFunction, cross_correlation
from .sft import CylinderFunction, SubshiftSpec

__all__ = [
    "OracleBudget",
    "OracleBudgetError",
    "mc_correlation",
    "oracle_correlation",
]

_CHUNK = 1 << 16


class OracleBudgetError(RuntimeError):
    """Raised before enumeration when the word count exceeds the cap."""


@dataclass(frozen=True)
class OracleBudget:
    max_words: int = 20_000_000
    rng_seed: int = 0
    mc_samples: int = 100_000

    def __post_init__(self):
        if self.max_words < 1:
            raise ValueError("max_words must be positive")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be positive")


def _as_window(f) -> WindowFunction:
    if isinstance(f, CylinderFunction):
        return WindowFunction.from_cylinder(f)
    if not isinstance(f, WindowFunction):
        raise TypeError("expected a window or cylinder function")
    return f


def _word_count(spec: SubshiftSpec, length: int) -> int:
    """Admissible-word count as an exact integer, no enumeration."""
    if length == 0:
        return 1
    T = np.asarray(spec.transition, dtype=object)
    v = np.ones(spec.alphabet_size, dtype=object)
    for _ in range(length - 1):
        v = T @ v
    return int(v.sum())


def _admissible_iter(spec: SubshiftSpec, length: int, reverse: bool = False):
    """Depth-first admissible words in (reversed) lexicographic order."""
    if length == 0:
        yield ()
        return
    symbols = tuple(range(spec.alphabet_size))
    if reverse:
        symbols = symbols[::-1]

    def rec(prefix):
        if len(prefix) == length:
            yield prefix
            return
        last = prefix[-1] if prefix else None
        for b in symbols:
            if last is None or spec.allows(last, b):
                yield from rec(prefix + (b,))

    yield from rec(())


def _window_shape(gibbs, f: WindowFunction, r, s, n: int) -> tuple[int, int]:
    """Past depth and total width covering every factor of the pairing."""
    past = max(s.past_depth, r.past_depth - n, f.past if n > 0 else 0, 0)
    future = max(s.future_depth, n + r.future_depth, 1)
    if n > 0:
        future = max(future, n - 1 + f.future)
    width = max(past + future, gibbs.depth)
    return past, width


def _compensated_total(parts) -> complex:
    """Order-robust complex total: chunked exact partial sums."""
    re_chunks: list[float] = []
    im_chunks: list[float] = []
    re_buf: list[float] = []
    im_buf: list[float] = []
    for z in parts:
        re_buf.append(z.real)
        im_buf.append(z.imag)
        if len(re_buf) == _CHUNK:
            re_chunks.append(math.fsum(re_buf))
            im_chunks.append(math.fsum(im_buf))
            re_buf.clear()
            im_buf.clear()
    re_chunks.append(math.fsum(re_buf))
    im_chunks.append(math.fsum(im_buf))
    return complex(math.fsum(re_chunks), math.fsum(im_chunks))


def oracle_correlation(
    gibbs: GibbsMeasure,
    f,
    r: SkewObservable,
    s: SkewObservable,
    n: int,
    budget: OracleBudget | None = None,
    reverse_order: bool = False,
) -> complex:
    """⟨r∘Fⁿ, s⟩ by exhaustive enumeration: Σ_w μ([w])·∫ r_w(t+S_n f) s̄_w(t) dt.

    Exact up to the closed-form fiber integrals.  Words are produced
    depth-first and never materialized as a list; the budget cap is
    checked against an exact count before the first word is generated.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if budget is None:
        budget = OracleBudget()
    f = _as_window(f)
    if not f.is_real:
        raise ValueError("skew cocycle must be real")
    spec = gibbs.spec
    past, width = _window_shape(gibbs, f, r, s, n)
    count = _word_count(spec, width)
    if count > budget.max_words:
        raise OracleBudgetError(
            f"{count} words at width {width} exceed the cap "
            f"{budget.max_words}; use the spectral route"
        )

    def contributions():
        for w in _admissible_iter(spec, width, reverse=reverse_order):
            shift = math.fsum(
                f.evaluate(w, word_past=past + j).real for j in range(n)
            )
            rterms = r.fiber_terms_at(w, word_past=past + n)
            if not rterms:
                continue
            sterms = s.fiber_terms_at(w, word_past=past)
            if not sterms:
                continue
            val = 0j
            for u in rterms:
                for v in sterms:
                    val += cross_correlation(u, v, shift)
            yield gibbs.cylinder_mass(w) * val

    return _compensated_total(contributions())


def _lex_ranks(spec: SubshiftSpec, mat: np.ndarray) -> np.ndarray:
    """Rows of symbols -> indices into spec.words(row length), vectorized."""
    mat = np.asarray(mat)
    n_rows, length = mat.shape
    if length == 0:
        return np.zeros(n_rows, dtype=np.int64)
    A = spec.alphabet_size
    T = np.asarray(spec.transition, dtype=np.int64)
    counts = np.zeros((length + 1, A), dtype=np.int64)
    counts[1] = 1
    for k in range(2, length + 1):
        counts[k] = T @ counts[k - 1]
    rank = np.zeros(n_rows, dtype=np.int64)
    for j in range(length):
        for b in range(A):
            hit = mat[:, j] > b
            if j > 0:
                hit &= T[mat[:, j - 1], b] > 0
            rank += np.where(hit, counts[length - j, b], 0)
    return rank


def mc_correlation(
    gibbs: GibbsMeasure,
    f,
    r: SkewObservable,
    s: SkewObservable,
    n: int,
    budget: OracleBudget,
) -> tuple[complex, float]:
    """Importance-sampled estimate of ⟨r∘Fⁿ, s⟩ with its standard error.

    Trajectories are drawn from the measure by its forward Markov kernel;
    fiber points come from a Gaussian mixture built on the fibers of s,
    with variances doubled so the importance weights stay bounded.  A
    fixed seed gives a bitwise-reproducible estimate.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if budget.mc_samples < 1000:
        raise ValueError("mc_samples must be at least 1000")
    f = _as_window(f)
    if not f.is_real:
        raise ValueError("skew cocycle must be real")
    if not r.terms or not s.terms:
        return 0j, 0.0
    spec = gibbs.spec
    past, width = _window_shape(gibbs, f, r, s, n)
    nsamp = budget.mc_samples
    rng = np.random.Generator(np.random.Philox(budget.rng_seed))

    # trajectory sampling through the depth-m forward kernel
    m = gibbs.depth
    states = spec.words(m)
    kernel = np.array([gibbs.forward_probabilities(st) for st in states])
    idxm = spec.word_index(m)
    A = spec.alphabet_size
    adv = np.zeros((len(states), A), dtype=np.int64)
    for i, st in enumerate(states):
        for b in range(A):
            if spec.allows(st[-1], b):
                adv[i, b] = idxm[st[1:] + (b,)]
    state = rng.choice(len(states), size=nsamp, p=gibbs.measure_vector(m))
    sym = np.empty((nsamp, width), dtype=np.int64)
    sym[:, :m] = np.asarray(states, dtype=np.int64)[state]
    for pos in range(m, width):
        cum = np.cumsum(kernel[state], axis=1)
        b = np.minimum((rng.random(nsamp)[:, None] > cum).sum(axis=1), A - 1)
        sym[:, pos] = b
        state = adv[state, b]

    shift = np.zeros(nsamp)
    if n > 0 and f.width > 0:
        ftab = f.values.real
        for j in range(n):
            lo = past + j - f.past
            shift += ftab[_lex_ranks(spec, sym[:, lo : lo + f.width])]
    elif n > 0:
        shift += n * float(f.values[0].real)

    # dominating proposal: per-fiber Gaussian envelopes, doubled variance
    rates = np.array([-g.a.real for _, g in s.terms])
    if not (rates > 0).all():
        raise RuntimeError("degenerate proposal: fiber envelope does not decay")
    centers = np.array([g.b.real for _, g in s.terms]) / (2 * rates)
    sigmas = np.sqrt(1.0 / rates)
    comp = rng.integers(len(rates), size=nsamp)
    t = centers[comp] + sigmas[comp] * rng.standard_normal(nsamp)
    dens = np.zeros(nsamp)
    for ck, sk in zip(centers, sigmas):
        dens += np.exp(-0.5 * ((t - ck) / sk) ** 2) / (sk * math.sqrt(2 * math.pi))
    dens /= len(centers)

    def coeff_values(c: WindowFunction, lo: int) -> np.ndarray:
        if c.width == 0:
            return np.full(nsamp, complex(c.values[0]))
        return c.values[_lex_ranks(spec, sym[:, lo : lo + c.width])]

    rv = np.zeros(nsamp, dtype=np.complex128)
    for c, g in r.terms:
        rv += coeff_values(c, past + n - c.past) * g.value(t + shift)
    sv = np.zeros(nsamp, dtype=np.complex128)
    for c, g in s.terms:
        sv += coeff_values(c, past - c.past) * g.value(t)
    z = rv * np.conj(sv) / dens
    if not np.isfinite(z).all():
        raise RuntimeError("degenerate proposal: unbounded importance weights")
    estimate = complex(z.mean())
    stderr = float(np.std(z, ddof=1) / math.sqrt(nsamp))
    return estimate, stderr
