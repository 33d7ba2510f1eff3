"""Observables on the skew product: cylinder coefficients times Gaussian fibers.

An observable is a finite sum of terms c_k(x)·G_k(t), where each coefficient
c_k depends on a finite window of base coordinates (possibly reaching into the
past) and each fiber factor G_k is a polynomial times a Gaussian.  That fiber
class is closed under products, derivatives, shifts, and conjugation, and all
its integrals and Fourier transforms are available in closed form through the
Gaussian moment recursion

    I_0 = sqrt(pi/(-a)) e^{-b^2/(4a)},   I_{k+1} = -(b I_k + k I_{k-1})/(2a),

so nothing in this module ever touches a fiber quadrature.  Fourier convention
is w_hat(xi) = integral of w(t) e^{-i t xi} dt; the inverse carries 1/(2pi).

Norms follow the weighted sup family

    ||w||_{p,q} = sup over l <= q, t of max(1,|t|^p)·|w^(l)(t)|,

with the supremum over the base taken word-by-word (coefficients are locally
constant, so the sup over points is attained on cylinders) and the supremum
over t by adaptive grid refinement under a certified Gaussian tail envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite as nph
from numpy.polynomial import polynomial as npp

from .sft import CylinderFunction, SubshiftSpec, Word, promote

__all__ = [
    "GaussPoly",
    "WindowFunction",
    "SkewObservable",
    "HERMITE_INDEX_CAP",
    "gauss_moments",
    "fourier_transform",
    "nu_integral",
    "pq_norm",
    "theta_lipschitz_seminorm",
    "cross_correlation",
]

HERMITE_INDEX_CAP = 16


def gauss_moments(a: complex, b, kmax: int) -> np.ndarray:
    """Moments I_k = integral of t^k e^{a t^2 + b t} dt for k = 0..kmax.

    b may be an array (vectorized over frequency); Re(a) must be negative.
    """
    if not a.real < 0:
        raise ValueError("Gaussian moment needs Re(a) < 0")
    b = np.asarray(b, dtype=np.complex128)
    out = np.empty((kmax + 1,) + b.shape, dtype=np.complex128)
    out[0] = np.sqrt(np.pi / (-a)) * np.exp(b * b / (-4 * a))
    if kmax >= 1:
        out[1] = -(b * out[0]) / (2 * a)
    for k in range(1, kmax):
        out[k + 1] = -(b * out[k] + k * out[k - 1]) / (2 * a)
    return out


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.complex128).ravel()
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=np.complex128)
    return c[: nz[-1] + 1].copy()


@dataclass(frozen=True)
class GaussPoly:
    """p(t)·e^{a t² + b t + c} with complex coefficients and Re(a) < 0."""

    poly: np.ndarray = field(repr=False)
    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        p = _trim(self.poly)
        p.setflags(write=False)
        object.__setattr__(self, "poly", p)
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "c", complex(self.c))
        if not self.a.real < 0:
            raise ValueError("need Re(a) < 0 for an integrable fiber")

    @classmethod
    def gaussian(cls, mean: float = 0.0, sigma: float = 1.0, scale: complex = 1.0):
        """scale·e^{-(t-mean)²/(2 sigma²)}."""
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        a = -1.0 / (2 * sigma**2)
        return cls(np.array([scale]), a, mean / sigma**2, -(mean**2) / (2 * sigma**2))

    @classmethod
    def hermite(cls, index: int, scale: complex = 1.0):
        """scale·H_index(t)·e^{-t²/2} with the physicists' Hermite polynomial."""
        if not 0 <= index <= HERMITE_INDEX_CAP:
            raise ValueError(f"hermite index must lie in 0..{HERMITE_INDEX_CAP}")
        e = np.zeros(index + 1)
        e[index] = 1.0
        return cls(scale * nph.herm2poly(e).astype(np.complex128), -0.5, 0.0, 0.0)

    @property
    def is_zero(self) -> bool:
        return self.poly.size == 1 and self.poly[0] == 0

    def value(self, t):
        t = np.asarray(t, dtype=np.float64)
        return npp.polyval(t, self.poly) * np.exp(self.a * t * t + self.b * t + self.c)

    def __mul__(self, other):
        if isinstance(other, GaussPoly):
            return GaussPoly(
                npp.polymul(self.poly, other.poly),
                self.a + other.a,
                self.b + other.b,
                self.c + other.c,
            )
        return GaussPoly(self.poly * complex(other), self.a, self.b, self.c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def derivative(self, order: int = 1) -> "GaussPoly":
        p = self.poly
        for _ in range(order):
            p = npp.polyadd(npp.polyder(p), npp.polymul(p, [self.b, 2 * self.a]))
        return GaussPoly(p, self.a, self.b, self.c)

    def shift(self, delta: float) -> "GaussPoly":
        """The function t ↦ self(t + delta)."""
        if delta == 0:
            return self
        shifted = np.zeros(1, dtype=np.complex128)
        basis = np.array([1.0 + 0j])
        step = np.array([delta, 1.0], dtype=np.complex128)
        for coeff in self.poly:
            shifted = npp.polyadd(shifted, coeff * basis)
            basis = npp.polymul(basis, step)
        return GaussPoly(
            shifted,
            self.a,
            self.b + 2 * self.a * delta,
            self.c + self.a * delta**2 + self.b * delta,
        )

    def conjugate(self) -> "GaussPoly":
        return GaussPoly(
            np.conj(self.poly),
            self.a.conjugate(),
            self.b.conjugate(),
            self.c.conjugate(),
        )

    def integral(self) -> complex:
        moments = gauss_moments(self.a, self.b, self.poly.size - 1)
        return complex(np.exp(self.c) * np.dot(self.poly, moments))

    def ft_values(self, xi) -> np.ndarray:
        """Fourier transform at frequencies xi, convention ∫ w(t) e^{-i t xi} dt."""
        xi = np.asarray(xi, dtype=np.float64)
        moments = gauss_moments(self.a, self.b - 1j * xi, self.poly.size - 1)
        return np.exp(self.c) * np.tensordot(self.poly, moments, axes=(0, 0))

    def ft_derivative_values(self, xi, order: int) -> np.ndarray:
        """order-th xi-derivative of the Fourier transform: insert (-i t)^order."""
        if order == 0:
            return self.ft_values(xi)
        bumped = npp.polymul(self.poly, ((-1j) ** order) * np.eye(1, order + 1, order)[0])
        return GaussPoly(bumped, self.a, self.b, self.c).ft_values(xi)


def cross_correlation(u: GaussPoly, v: GaussPoly, shift: float) -> complex:
    """∫ u(t + shift)·conj(v(t)) dt, closed form."""
    return (u.shift(shift) * v.conjugate()).integral()


def _tail_envelope(terms, p: int, t: float) -> float:
    """Upper bound for max(1,|t|^p)·|Σ terms| valid at ±t, monotone for large t."""
    total = 0.0
    for g in terms:
        absval = npp.polyval(t, np.abs(g.poly))
        total += absval * math.exp(
            g.a.real * t * t + abs(g.b.real) * t + g.c.real
        )
    return max(1.0, t**p) * total


def sup_weighted_abs(terms, p: int = 0) -> tuple[float, float]:
    """sup over t of max(1,|t|^p)·|Σ terms(t)|, with the final grid resolution.

    Iterative grid zoom inside a window certified by the Gaussian tail
    envelope; returns (value, resolution).
    """
    terms = [g for g in terms if not g.is_zero]
    if not terms:
        return 0.0, 0.0

    def objective(t):
        acc = np.zeros_like(t, dtype=np.complex128)
        for g in terms:
            acc += g.value(t)
        return np.maximum(1.0, np.abs(t) ** p) * np.abs(acc)

    T = 1.0
    for g in terms:
        center = abs(g.b.real / (2 * g.a.real))
        width = math.sqrt(-1.0 / (2 * g.a.real))
        T = max(T, center + 8 * width)
    best = float(np.max(objective(np.linspace(-T, T, 4097))))
    while _tail_envelope(terms, p, T) > max(best, 1e-300) * 1e-12:
        T *= 2.0
        best = max(best, float(np.max(objective(np.linspace(-T, T, 4097)))))

    lo, hi = -T, T
    npts = 4097
    for _ in range(80):
        grid = np.linspace(lo, hi, npts)
        vals = objective(grid)
        i = int(np.argmax(vals))
        best = max(best, float(vals[i]))
        step = (hi - lo) / (npts - 1)
        if step < 1e-13 * max(1.0, abs(grid[i])):
            break
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, npts - 1)]
        npts = 129
    return best, (hi - lo) / (npts - 1)


class WindowFunction:
    """A scalar function of a finite two-sided coordinate window.

    Depends on coordinates -past .. future-1; values indexed by the admissible
    words of length past+future in lexicographic order.  past = 0 recovers an
    ordinary one-sided cylinder function.
    """

    def __init__(self, spec: SubshiftSpec, past: int, future: int, values):
        if past < 0 or future < 0:
            raise ValueError("window bounds must be nonnegative")
        vals = np.asarray(values, dtype=np.complex128).ravel().copy()
        if vals.size != len(spec.words(past + future)):
            raise ValueError(
                f"window {past}+{future} needs {len(spec.words(past + future))} "
                f"values, got {vals.size}"
            )
        vals.setflags(write=False)
        self.spec = spec
        self.past = past
        self.future = future
        self.values = vals

    @classmethod
    def from_cylinder(cls, f: CylinderFunction) -> "WindowFunction":
        return cls(f.spec, 0, f.depth, f.values)

    @classmethod
    def constant(cls, spec: SubshiftSpec, value: complex) -> "WindowFunction":
        return cls(spec, 0, 0, np.array([value]))

    @property
    def width(self) -> int:
        return self.past + self.future

    @property
    def is_future_only(self) -> bool:
        return self.past == 0

    def to_cylinder(self) -> CylinderFunction:
        if self.past != 0:
            raise ValueError("window reaches into the past")
        return CylinderFunction(self.spec, self.future, self.values)

    @property
    def is_real(self) -> bool:
        return bool(np.allclose(self.values.imag, 0.0, atol=1e-14))

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def evaluate(self, word: Word, word_past: int | None = None) -> complex:
        """Value on a word covering coordinates -word_past .. len-word_past-1."""
        word = tuple(word)
        if word_past is None:
            word_past = self.past
        if word_past < self.past or len(word) - word_past < self.future:
            raise ValueError("word does not cover the window")
        key = word[word_past - self.past : word_past + self.future]
        idx = self.spec.word_index(self.width)
        try:
            return complex(self.values[idx[key]])
        except KeyError:
            raise ValueError(f"window word {key} is not admissible") from None

    def promote_window(self, past: int, future: int) -> "WindowFunction":
        if past < self.past or future < self.future:
            raise ValueError("window promotion cannot shrink the window")
        if past == self.past and future == self.future:
            return self
        idx = self.spec.word_index(self.width)
        lo = past - self.past
        vals = np.array(
            [
                self.values[idx[w[lo : lo + self.width]]]
                for w in self.spec.words(past + future)
            ]
        )
        return WindowFunction(self.spec, past, future, vals)

    def shift_observe(self, n: int) -> "WindowFunction":
        """The function x ↦ self(σⁿ x)."""
        if n < 0:
            raise ValueError("only forward shifts")
        if n == 0:
            return self
        past = max(self.past - n, 0)
        future = self.future + n
        lo = max(n - self.past, 0)
        idx = self.spec.word_index(self.width)
        vals = np.array(
            [
                self.values[idx[w[lo : lo + self.width]]]
                for w in self.spec.words(past + future)
            ]
        )
        return WindowFunction(self.spec, past, future, vals)

    def trim(self) -> "WindowFunction":
        """Drop window coordinates the values provably do not depend on."""
        cur = self
        changed = True
        while changed and cur.width > 0:
            changed = False
            words = cur.spec.words(cur.width)
            if cur.past > 0:
                groups: dict[Word, complex] = {}
                ok = True
                for w, v in zip(words, cur.values):
                    key = w[1:]
                    if key in groups:
                        if groups[key] != v:
                            ok = False
                            break
                    else:
                        groups[key] = v
                if ok:
                    sub = cur.spec.words(cur.width - 1)
                    cur = WindowFunction(
                        cur.spec,
                        cur.past - 1,
                        cur.future,
                        np.array([groups[w] for w in sub]),
                    )
                    changed = True
                    continue
            if cur.future > 0:
                groups = {}
                ok = True
                for w, v in zip(words, cur.values):
                    key = w[:-1]
                    if key in groups:
                        if groups[key] != v:
                            ok = False
                            break
                    else:
                        groups[key] = v
                if ok:
                    sub = cur.spec.words(cur.width - 1)
                    cur = WindowFunction(
                        cur.spec,
                        cur.past,
                        cur.future - 1,
                        np.array([groups[w] for w in sub]),
                    )
                    changed = True
        return cur

    def _aligned(self, other: "WindowFunction"):
        if self.spec != other.spec:
            raise ValueError("windows live on different subshifts")
        p = max(self.past, other.past)
        q = max(self.future, other.future)
        return self.promote_window(p, q), other.promote_window(p, q)

    def __add__(self, other):
        if isinstance(other, WindowFunction):
            a, b = self._aligned(other)
            return WindowFunction(a.spec, a.past, a.future, a.values + b.values)
        return WindowFunction(
            self.spec, self.past, self.future, self.values + complex(other)
        )

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, WindowFunction):
            a, b = self._aligned(other)
            return WindowFunction(a.spec, a.past, a.future, a.values - b.values)
        return WindowFunction(
            self.spec, self.past, self.future, self.values - complex(other)
        )

    def __mul__(self, other):
        if isinstance(other, WindowFunction):
            a, b = self._aligned(other)
            return WindowFunction(a.spec, a.past, a.future, a.values * b.values)
        return WindowFunction(
            self.spec, self.past, self.future, self.values * complex(other)
        )

    __rmul__ = __mul__

    def __neg__(self):
        return WindowFunction(self.spec, self.past, self.future, -self.values)

    def conjugate(self) -> "WindowFunction":
        return WindowFunction(self.spec, self.past, self.future, np.conj(self.values))

    def integrate(self, gibbs) -> complex:
        """Integral against the (shift-invariant) Gibbs measure."""
        if self.width == 0:
            return complex(self.values[0])
        masses = gibbs.measure_vector(self.width)
        return complex(np.dot(masses, self.values))

    def birkhoff(self, n: int) -> "WindowFunction":
        """S_n self = self + self∘σ + … + self∘σ^{n-1}."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        if n == 0:
            return WindowFunction.constant(self.spec, 0.0)
        acc = self
        for j in range(1, n):
            acc = acc + self.shift_observe(j)
        return acc


class SkewObservable:
    """Finite sum of (coefficient window) × (Gaussian-polynomial fiber) terms."""

    def __init__(self, spec: SubshiftSpec, terms):
        norm_terms = []
        for coeff, fiber in terms:
            if isinstance(coeff, CylinderFunction):
                coeff = WindowFunction.from_cylinder(coeff)
            if coeff.spec != spec:
                raise ValueError("coefficient lives on a different subshift")
            if not isinstance(fiber, GaussPoly):
                raise TypeError("fiber must be a GaussPoly")
            norm_terms.append((coeff, fiber))
        self.spec = spec
        self.terms = tuple(norm_terms)

    @property
    def past_depth(self) -> int:
        return max((c.past for c, _ in self.terms), default=0)

    @property
    def future_depth(self) -> int:
        return max((c.future for c, _ in self.terms), default=0)

    @property
    def is_future_only(self) -> bool:
        return self.past_depth == 0

    def conjugate(self) -> "SkewObservable":
        return SkewObservable(
            self.spec, [(c.conjugate(), g.conjugate()) for c, g in self.terms]
        )

    def __add__(self, other: "SkewObservable") -> "SkewObservable":
        if other.spec != self.spec:
            raise ValueError("observables live on different subshifts")
        return SkewObservable(self.spec, self.terms + other.terms)

    def __sub__(self, other: "SkewObservable") -> "SkewObservable":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "SkewObservable":
        return SkewObservable(
            self.spec, [(c, g * complex(scalar)) for c, g in self.terms]
        )

    __rmul__ = __mul__

    def evaluate(self, word: Word, t, word_past: int = 0):
        acc = 0.0
        for c, g in self.terms:
            acc = acc + c.evaluate(word, word_past) * g.value(t)
        return acc

    def nu_integral(self, gibbs) -> complex:
        """∫∫ s d(μ × Leb) as a sum of factored closed forms."""
        return complex(
            sum(c.integrate(gibbs) * g.integral() for c, g in self.terms)
        )

    def coefficient_matrix(self, depth: int) -> np.ndarray:
        """Stacked future-only coefficient values at a common depth."""
        return np.array([promote(c.to_cylinder(), depth).values for c, _ in self.terms])

    def ft_matrix(self, xis, depth: int | None = None, derivative: int = 0) -> np.ndarray:
        """FT (or its xi-derivative) of the fiber parts times coefficients.

        Returns shape (len(xis), n_words) at the given future depth; rows are
        the cylinder vectors of φ_ξ = s_x-hat(ξ).  Requires a future-only
        observable.
        """
        if not self.is_future_only:
            raise ValueError("Fourier data needs a future-only observable")
        if depth is None:
            depth = self.future_depth
        xis = np.asarray(xis, dtype=np.float64).ravel()
        C = self.coefficient_matrix(depth)
        out = np.zeros((xis.size, C.shape[1]), dtype=np.complex128)
        for (_, g), row in zip(self.terms, C):
            out += np.outer(g.ft_derivative_values(xis, derivative), row)
        return out

    def fiber_terms_at(self, word: Word, word_past: int = 0):
        """The per-cylinder fiber function as a list of GaussPoly terms."""
        out = []
        for c, g in self.terms:
            v = c.evaluate(word, word_past)
            if v != 0:
                out.append(g * v)
        return out

    def compose_skew(self, f: WindowFunction, n: int) -> "SkewObservable":
        """The observable s∘Fⁿ for the skew product F(x,t) = (σx, t + f(x))."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        if n == 0:
            return self
        if not f.is_real:
            raise ValueError("skew function must be real")
        spec = self.spec
        past = max([f.past] + [c.past - n for c, _ in self.terms] + [0])
        future = max(
            [n + f.future - 1 if f.width > 0 else 0]
            + [n + c.future for c, _ in self.terms]
            + [1]
        )
        words = spec.words(past + future)
        sums = np.empty(len(words))
        for i, w in enumerate(words):
            sums[i] = math.fsum(
                f.evaluate(w, word_past=past + j).real for j in range(n)
            )
        new_terms = []
        for c, g in self.terms:
            cshift = c.shift_observe(n).promote_window(past, future)
            for s_val in sorted(set(sums.tolist())):
                mask = sums == s_val
                vals = np.where(mask, cshift.values, 0.0)
                if not np.any(vals):
                    continue
                new_terms.append(
                    (WindowFunction(spec, past, future, vals), g.shift(s_val))
                )
        return SkewObservable(spec, new_terms)

    def shift_fiber_by(self, h: WindowFunction, sign: int = 1) -> "SkewObservable":
        """The observable (x,t) ↦ s(x, t + sign·h(x)) for locally constant h."""
        if not h.is_real:
            raise ValueError("fiber shift must be real")
        spec = self.spec
        past = max(h.past, self.past_depth)
        future = max(h.future, self.future_depth)
        words = spec.words(past + future)
        hvals = np.array(
            [h.evaluate(w, word_past=past).real for w in words]
        )
        new_terms = []
        for c, g in self.terms:
            cp = c.promote_window(past, future)
            for v in sorted(set(hvals.tolist())):
                vals = np.where(hvals == v, cp.values, 0.0)
                if not np.any(vals):
                    continue
                new_terms.append(
                    (WindowFunction(spec, past, future, vals), g.shift(sign * v))
                )
        return SkewObservable(spec, new_terms)


def fourier_transform(s: SkewObservable, xi: float) -> CylinderFunction:
    """The cylinder function x ↦ ŝ_x(xi)."""
    row = s.ft_matrix([xi])[0]
    return CylinderFunction(s.spec, s.future_depth, row)


def nu_integral(gibbs, s: SkewObservable) -> complex:
    return s.nu_integral(gibbs)


def _word_fiber_derivatives(s: SkewObservable, q: int):
    """Per-term fiber derivative ladder up to order q."""
    ladders = []
    for _, g in s.terms:
        ladder = [g]
        for _ in range(q):
            ladder.append(ladder[-1].derivative())
        ladders.append(ladder)
    return ladders


def pq_norm(s: SkewObservable, p: int, q: int) -> float:
    """sup over cylinders, derivatives ℓ ≤ q, and t of max(1,|t|^p)·|∂_t^ℓ s_x(t)|."""
    if p < 0 or q < 0:
        raise ValueError("p, q must be nonnegative")
    if not s.terms:
        return 0.0
    past, future = s.past_depth, s.future_depth
    ladders = _word_fiber_derivatives(s, q)
    coeffs = [c.promote_window(past, future) for c, _ in s.terms]
    best = 0.0
    for i, _w in enumerate(s.spec.words(past + future)):
        cvals = [c.values[i] for c in coeffs]
        for ell in range(q + 1):
            terms = [
                ladders[k][ell] * cvals[k]
                for k in range(len(cvals))
                if cvals[k] != 0
            ]
            val, _res = sup_weighted_abs(terms, p)
            best = max(best, val)
    return best


def theta_lipschitz_seminorm(s: SkewObservable, p: int, q: int, depth: int) -> float:
    """sup over distinct depth-words of ||s(x)-s(y)||_{p,q} / d_theta(x,y).

    Exact for the locally constant coefficient class when depth covers every
    coefficient; future-only observables only.
    """
    if not s.is_future_only:
        raise ValueError("seminorm implemented for future-only observables")
    if depth < s.future_depth:
        raise ValueError("depth must cover all coefficient depths")
    spec = s.spec
    words = spec.words(depth)
    ladders = _word_fiber_derivatives(s, q)
    C = s.coefficient_matrix(depth)
    theta = spec.theta
    cache: dict[bytes, float] = {}
    best = 0.0
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            delta = C[:, i] - C[:, j]
            if not np.any(delta):
                continue
            key = delta.tobytes()
            norm = cache.get(key)
            if norm is None:
                norm = 0.0
                for ell in range(q + 1):
                    terms = [
                        ladders[k][ell] * delta[k]
                        for k in range(delta.size)
                        if delta[k] != 0
                    ]
                    val, _res = sup_weighted_abs(terms, p)
                    norm = max(norm, val)
                cache[key] = norm
            x, y = words[i], words[j]
            common = 0
            for a, b in zip(x, y):
                if a != b:
                    break
                common += 1
            best = max(best, norm / theta**common)
    return best
