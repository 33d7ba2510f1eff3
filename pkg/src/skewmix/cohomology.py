"""Past-coordinate rewriting and cocycle reduction.

Two-sided data is traded for future-only data by splicing a fixed
admissible continuation onto the remote past.  The rewriting maps leave
coordinates >= -n untouched, so for window functions every correction
series terminates after finitely many exact terms and the reduction
f = ftilde + h - h∘σ holds as an identity on windows, not as a limit.

The sign convention: h is the negated zeroth telescoping sum, which is
what makes the stated identity (and the companion fiber conjugation
s(x, t - h(x))) come out right.
"""

from __future__ import annotations

import math

import numpy as np

from .observables import SkewObservable, WindowFunction
from .sft import CylinderFunction, SubshiftSpec, Word

__all__ = [
    "AnchorChoice",
    "apply_omega",
    "approximating_sequence",
    "build_vm",
    "conjugate_observable",
    "omega_n",
    "reduce_cocycle",
    "window_separation",
]


class AnchorChoice:
    """A fixed admissible past continuation for every symbol.

    Greedy lexicographic choice: each symbol is preceded by its smallest
    in-neighbor, repeatedly.  Primitivity guarantees no column of the
    transition matrix is empty, so the walk never gets stuck.
    """

    def __init__(self, spec: SubshiftSpec):
        prev = []
        for a in range(spec.alphabet_size):
            col = np.flatnonzero(spec.transition[:, a])
            if col.size == 0:
                raise ValueError(f"symbol {a} has no admissible predecessor")
            prev.append(int(col[0]))
        self.spec = spec
        self._prev = tuple(prev)

    def past(self, symbol: int, depth: int) -> Word:
        """The continuation a_{-depth} .. a_{-1} a_0 with a_0 = symbol."""
        if not 0 <= symbol < self.spec.alphabet_size:
            raise ValueError(f"symbol {symbol} out of range")
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        out = [symbol]
        cur = symbol
        for _ in range(depth):
            cur = self._prev[cur]
            out.append(cur)
        out.reverse()
        return tuple(out)


def omega_n(anchor: AnchorChoice, n: int, word: Word, word_past: int) -> Word:
    """Rewrite coordinates below -n with the anchor continuation.

    The word covers coordinates -word_past .. len(word)-word_past-1.
    Coordinates >= -n are preserved; the rest are replaced by the anchor
    continuation of the symbol sitting at coordinate -n.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    word = tuple(word)
    if word_past < 0 or word_past > len(word):
        raise ValueError("word_past must lie within the word")
    if word_past <= n:
        return word
    # splice position: coordinate -n
    pos = word_past - n
    if pos >= len(word):
        raise ValueError("window too narrow to reach the splice symbol")
    prefix = anchor.past(word[pos], pos)
    return prefix[:-1] + word[pos:]


def window_separation(x: Word, y: Word, word_past: int) -> float:
    """Smallest |coordinate| where two aligned words differ (inf if none)."""
    x, y = tuple(x), tuple(y)
    if len(x) != len(y):
        raise ValueError("words must have equal length")
    best = math.inf
    for pos, (a, b) in enumerate(zip(x, y)):
        if a != b:
            best = min(best, abs(pos - word_past))
    return best


def apply_omega(anchor: AnchorChoice, s, n: int):
    """Precompose with the rewriting map: x ↦ s(omega_n(x)).

    Window functions with past depth <= n are returned unchanged; fiber
    observables are rewritten coefficient by coefficient.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if isinstance(s, CylinderFunction):
        s = WindowFunction.from_cylinder(s)
    if isinstance(s, SkewObservable):
        return SkewObservable(
            s.spec, [(apply_omega(anchor, c, n), g) for c, g in s.terms]
        )
    if s.past <= n:
        return s
    spec = s.spec
    # the rewritten past is determined by the symbol at coordinate -n, so
    # that coordinate must sit inside the new window even when n = 0
    new_past = n
    new_future = max(s.future, 1) if n == 0 else s.future
    vals = []
    for w in spec.words(new_past + new_future):
        prefix = anchor.past(w[0], s.past - n)
        vals.append(s.evaluate(prefix[:-1] + w, word_past=s.past))
    return WindowFunction(spec, new_past, new_future, np.array(vals))


def _as_window(f) -> WindowFunction:
    if isinstance(f, CylinderFunction):
        return WindowFunction.from_cylinder(f)
    if not isinstance(f, WindowFunction):
        raise TypeError("expected a window or cylinder function")
    return f


def build_vm(f_or_s, m: int, anchor: AnchorChoice, skew=None):
    """The correction sum v_m = Σ_{n>=m} (Ω_n s - s)∘Fⁿ, exactly.

    Terms vanish identically once n reaches the past depth, so the sum is
    finite with no truncation control.  Scalar windows compose with the
    shift alone; fiber-valued observables translate their fiber arguments
    by the Birkhoff sums of the skew cocycle, which must then be supplied.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if isinstance(f_or_s, SkewObservable):
        if skew is None:
            raise ValueError("fiber-valued input needs the skew cocycle")
        skew = _as_window(skew)
        acc = SkewObservable(f_or_s.spec, [])
        for n in range(m, f_or_s.past_depth):
            diff = apply_omega(anchor, f_or_s, n) - f_or_s
            acc = acc + diff.compose_skew(skew, n)
        return acc
    s = _as_window(f_or_s)
    acc = WindowFunction.constant(s.spec, 0.0)
    for n in range(m, s.past):
        acc = acc + (apply_omega(anchor, s, n) - s).shift_observe(n)
    return acc


def approximating_sequence(s, m: int, anchor: AnchorChoice, skew=None):
    """The future-only stand-in s_m = s∘F^m + v_m - v_m∘F.

    Assembled in telescoped form Σ_{n=m}^{P-1} [(Ω_n s)∘Fⁿ - (Ω_n s)∘Fⁿ⁺¹]
    + s∘F^{max(P,m)}, whose every term depends only on future coordinates
    by construction.  The two forms agree term by term after cancellation,
    and the invariant measure integral of s is preserved exactly.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if isinstance(s, SkewObservable):
        if skew is None:
            raise ValueError("fiber-valued input needs the skew cocycle")
        skew = _as_window(skew)
        if not skew.is_future_only:
            raise ValueError(
                "skew cocycle must be future-only for a future-only result"
            )
        P = s.past_depth
        acc = s.compose_skew(skew, max(P, m))
        for n in range(m, P):
            g = apply_omega(anchor, s, n)
            acc = acc + g.compose_skew(skew, n) - g.compose_skew(skew, n + 1)
        assert acc.past_depth == 0
        return acc
    sw = _as_window(s)
    acc = sw.shift_observe(max(sw.past, m))
    for n in range(m, sw.past):
        g = apply_omega(anchor, sw, n)
        acc = acc + g.shift_observe(n) - g.shift_observe(n + 1)
    assert acc.past == 0
    return acc


def reduce_cocycle(f, anchor: AnchorChoice):
    """Split a two-sided cocycle as f = ftilde + h - h∘σ, ftilde future-only.

    h is the negated zeroth correction sum -v_0; with that sign the identity
    holds on the nose and the Birkhoff sums satisfy
    S_n ftilde - S_n f = h∘σⁿ - h.  ftilde is assembled in the telescoped
    future-only form and returned as an ordinary cylinder function.
    """
    f = _as_window(f)
    if not f.is_real:
        raise ValueError("cocycle must be real-valued")
    h = (-build_vm(f, 0, anchor)).trim()
    ftilde = approximating_sequence(f, 0, anchor).trim()
    return ftilde.to_cylinder(), h


def conjugate_observable(s: SkewObservable, h) -> SkewObservable:
    """The conjugated observable (x, t) ↦ s(x, t - h(x)).

    Shifting a Gaussian-polynomial fiber is exact, so the result stays in
    the same finite algebra and its invariant integral is unchanged.
    """
    h = _as_window(h)
    if not h.is_real:
        raise ValueError("transfer function must be real-valued")
    return s.shift_fiber_by(h, sign=-1)
