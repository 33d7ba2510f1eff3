"""Gibbs measures from leading transfer-operator eigendata.

For a primitive subshift and a real potential u of finite depth, the transfer
operator (L w)(x) = sum_{sigma y = x} e^{u(y)} w(y) preserves the space of
functions of any depth at least max(1, depth(u) - 1), where it is a finite
nonnegative primitive matrix.  Its Perron data (lam, h, l) gives the Gibbs
measure mu([w]) = l_w h_w with l.h = 1, and the normalized potential

    u'(v) = u(v) + log h(v) - log h(sigma v) - log lam

makes the operator row-stochastic.  Masses of cylinders deeper than the
operator depth follow from the prepend rule

    mu([v0 v1 .. vL]) = e^{u'(v0 .. vr)} mu([v1 .. vL]),

which is how the measure of an individual long word is computed in O(length)
time without enumerating its depth class.
"""

from __future__ import annotations

import math

import numpy as np

from .sft import CylinderFunction, SubshiftSpec, Word, preimage_symbols, promote

__all__ = ["ruelle_matrix", "perron_leading", "birkhoff_sum", "GibbsMeasure"]


def birkhoff_sum(f: CylinderFunction, word: Word, n: int) -> complex:
    """Sum of f along the first n shifts of `word`.

    The word must be long enough that every shifted prefix still determines
    f, i.e. len(word) >= n + f.depth - 1.  Compensated summation keeps the
    result exact on data whose values are exactly representable.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if len(word) < n + f.depth - 1:
        raise ValueError(
            f"word of length {len(word)} too short for {n} shifts of depth-{f.depth} data"
        )
    vals = [f.evaluate(word[j:]) for j in range(n)]
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def ruelle_matrix(spec: SubshiftSpec, u: CylinderFunction, depth: int) -> np.ndarray:
    """Matrix of the transfer operator with potential u on depth-`depth` functions.

    Row index is the argument word x, column index the preimage word
    (a, x0, .., x_{depth-2}); the entry is e^{u} evaluated on the preimage.
    Requires depth >= max(1, u.depth - 1) so the operator closes on the space.
    """
    if u.spec != spec:
        raise ValueError("potential lives on a different subshift")
    if not u.is_real:
        raise ValueError("potential must be real-valued")
    min_depth = max(1, u.depth - 1)
    if depth < min_depth:
        raise ValueError(f"operator depth {depth} below minimum {min_depth}")
    words = spec.words(depth)
    idx = spec.word_index(depth)
    uvals = u.real_values()
    uidx = spec.word_index(u.depth)
    n = len(words)
    M = np.zeros((n, n))
    for i, x in enumerate(words):
        for a in preimage_symbols(spec, x):
            y = (a,) + x
            M[i, idx[y[:depth]]] += math.exp(uvals[uidx[y[: u.depth]]])
    return M


def perron_leading(
    M: np.ndarray, tol: float = 1e-15, max_iter: int = 100_000
) -> tuple[float, np.ndarray]:
    """Leading eigenvalue and positive eigenvector of a nonnegative matrix.

    Plain power iteration from the uniform vector; the matrix must come from
    a primitive operator so the iteration contracts at the spectral-gap rate.
    The returned vector is normalized to unit sum, the eigenvalue by a final
    Rayleigh quotient.
    """
    n = M.shape[0]
    v = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        w = M @ v
        s = w.sum()
        if not s > 0:
            raise ValueError("matrix is not primitive nonnegative")
        w /= s
        delta = np.max(np.abs(w - v))
        v = w
        if delta < tol:
            break
    else:
        raise RuntimeError("power iteration did not converge")
    lam = float((v @ (M @ v)) / (v @ v))
    return lam, v


class GibbsMeasure:
    """Shift-invariant Gibbs measure of a real finite-depth potential.

    Parameters
    ----------
    potential : CylinderFunction
        Real potential u; need not be normalized.
    depth : int, optional
        Depth at which to represent the transfer operator.  Defaults to the
        minimum max(1, u.depth - 1).  Deeper representations describe the
        same measure; the extra room is useful when the operator is later
        applied to deeper functions.
    """

    def __init__(self, potential: CylinderFunction, depth: int | None = None):
        spec = potential.spec
        r = max(1, potential.depth - 1)
        if depth is None:
            depth = r
        if depth < r:
            raise ValueError(f"depth {depth} below potential minimum {r}")
        M = ruelle_matrix(spec, potential, depth)
        lam, h = perron_leading(M)
        _, lraw = perron_leading(M.T)
        # scale: mean(h) = 1, then l.h = 1 so that mu = l*h sums to 1
        h = h * (h.size / h.sum())
        l = lraw / (lraw @ h)
        mu = l * h
        if not (mu > 0).all():
            raise ValueError("degenerate Gibbs weights")

        self.spec = spec
        self.potential = potential
        self.depth = depth
        self.lam = lam
        self.h = h
        self.left = l
        self.mu = mu
        self._raw_matrix = M
        self._matrix_cache: dict[int, np.ndarray] = {}
        self._measure_cache: dict[int, np.ndarray] = {depth: mu}

        words1 = spec.words(depth + 1)
        idx = spec.word_index(depth)
        logh = np.log(h)
        vals = np.empty(len(words1))
        for i, v in enumerate(words1):
            vals[i] = (
                potential.evaluate(v).real
                + logh[idx[v[:depth]]]
                - logh[idx[v[1 : depth + 1]]]
                - math.log(lam)
            )
        self.normalized_potential = CylinderFunction(spec, depth + 1, vals)
        self._unorm_vals = vals
        self._unorm_idx = spec.word_index(depth + 1)

    @property
    def pressure(self) -> float:
        return math.log(self.lam)

    def transition_matrix(self, depth: int | None = None) -> np.ndarray:
        """Row-stochastic matrix of the normalized operator at a given depth."""
        if depth is None:
            depth = self.depth
        if depth < self.depth:
            raise ValueError(f"depth {depth} below operator depth {self.depth}")
        cached = self._matrix_cache.get(depth)
        if cached is None:
            cached = ruelle_matrix(self.spec, self.normalized_potential, depth)
            self._matrix_cache[depth] = cached
        return cached

    def measure_vector(self, depth: int) -> np.ndarray:
        """Masses of all admissible cylinders of one depth, lexicographic order."""
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        cached = self._measure_cache.get(depth)
        if cached is not None:
            return cached
        r = self.depth
        spec = self.spec
        if depth < r:
            base = self.measure_vector(depth + 1)
            idx = spec.word_index(depth)
            out = np.zeros(len(spec.words(depth)))
            for w, m in zip(spec.words(depth + 1), base):
                out[idx[w[:depth]]] += m
        else:
            out = np.array([self.cylinder_mass(w) for w in spec.words(depth)])
        self._measure_cache[depth] = out
        return out

    def cylinder_mass(self, word: Word) -> float:
        """Measure of a single cylinder, any length, in O(length) time."""
        if not self.spec.is_admissible(tuple(word)):
            raise ValueError(f"word {word} is not admissible")
        word = tuple(word)
        r = self.depth
        if len(word) < r:
            return float(self.measure_vector(len(word))[self.spec.word_index(len(word))[word]])
        acc = math.fsum(
            self._unorm_vals[self._unorm_idx[word[j : j + r + 1]]]
            for j in range(len(word) - r)
        )
        return math.exp(acc) * float(self.mu[self.spec.word_index(r)[word[-r:]]])

    def log_mass_increment(self, window: Word) -> float:
        """log mu([a w]) - log mu([w]) for a depth+1 window (a, w...)."""
        return float(self._unorm_vals[self._unorm_idx[tuple(window)]])

    def integrate(self, f: CylinderFunction) -> complex:
        """Integral of a cylinder function against the measure."""
        if f.spec != self.spec:
            raise ValueError("function lives on a different subshift")
        d = max(self.depth, f.depth)
        return complex(np.dot(self.measure_vector(d), promote(f, d).values))

    def forward_probabilities(self, word: Word) -> np.ndarray:
        """P(next symbol | trailing context), for words of length >= depth.

        Conditional law of appending one symbol given the last `depth`
        symbols; rows of the forward Markov kernel used for sampling.
        """
        word = tuple(word)
        if len(word) < self.depth:
            raise ValueError("context shorter than operator depth")
        ctx = word[-self.depth :]
        base = self.cylinder_mass(ctx)
        p = np.zeros(self.spec.alphabet_size)
        for b in range(self.spec.alphabet_size):
            if self.spec.allows(ctx[-1], b):
                p[b] = self.cylinder_mass(ctx + (b,)) / base
        return p
