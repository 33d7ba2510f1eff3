"""Half-integer power expansions of sharply peaked integrals.

For g with g(0) = 1 and g''(0) = -2*omega < 0, the integral
∫ g(t)^n v(t) dt over a fixed interval around 0 admits an expansion
c1 n^{-1/2} + c3 n^{-3/2} + ... in half-integer powers of n.  The
coefficients are produced symbolically from Taylor jets of g and v:
rescale so the curvature is exactly -2, split off the Gaussian factor
g = e^{-t^2} e^h, expand the exponential of n*h into a bivariate
polynomial in (n, t), and integrate each monomial against the Gaussian
via the Gamma function.  Odd powers of t integrate to zero, and every
surviving monomial n^i t^j with 3i <= j lands on a half-integer power.

A coefficient c_j reported at level k is complete only when the jets
carry enough orders; the entry point enforces the order >= 2k+6 bound
under which c_1 .. c_{2k-1} are exact.  The exponential series must be
carried to z^{2k-2}: terms beyond that produce only n-powers below the
reported orders, and shorter truncations corrupt c_3 onward whenever
h is not identically zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from scipy.integrate import quad

__all__ = [
    "TaylorJet",
    "BivariatePoly",
    "ExpansionResult",
    "expand",
    "build_bivariate",
    "direct_integral",
    "jet_from_curve",
]


@dataclass(frozen=True)
class TaylorJet:
    """Coefficients a_j = f^{(j)}(0)/j! of a function at 0, j = 0..order."""

    coefficients: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coefficients, dtype=np.complex128).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("jet needs a one-dimensional, nonempty coefficient array")
        arr.flags.writeable = False
        object.__setattr__(self, "coefficients", arr)

    @property
    def order(self) -> int:
        return self.coefficients.size - 1

    def rescaled(self, scale: float) -> "TaylorJet":
        """Jet of t -> f(scale * t)."""
        powers = np.power(complex(scale), np.arange(self.coefficients.size))
        return TaylorJet(self.coefficients * powers)

    def __call__(self, t: complex) -> complex:
        return complex(np.polynomial.polynomial.polyval(t, self.coefficients))


def _log_jet(coeffs: np.ndarray) -> np.ndarray:
    """Series of log(f) for f with f(0) = 1, by the derivative recurrence."""
    n = coeffs.size
    out = np.zeros(n, dtype=np.complex128)
    for m in range(1, n):
        acc = coeffs[m]
        for i in range(1, m):
            acc -= (i / m) * out[i] * coeffs[m - i]
        out[m] = acc
    return out


class BivariatePoly:
    """Finite sum of monomials n^i t^j, keyed by (i, j)."""

    def __init__(self):
        self._coeffs: dict[tuple[int, int], complex] = {}

    def add(self, i: int, j: int, value: complex) -> None:
        if value == 0:
            return
        assert 3 * i <= j, f"monomial n^{i} t^{j} violates the 3i <= j structure"
        key = (i, j)
        acc = self._coeffs.get(key, 0j) + value
        if acc == 0:
            self._coeffs.pop(key, None)
        else:
            self._coeffs[key] = acc

    def items(self):
        return self._coeffs.items()

    def coefficient(self, i: int, j: int) -> complex:
        return self._coeffs.get((i, j), 0j)

    def __len__(self) -> int:
        return len(self._coeffs)


@dataclass(frozen=True)
class ExpansionResult:
    k: int
    coefficients: dict[int, complex]
    omega: float

    def value(self, n: float) -> complex:
        return sum(c * n ** (-j / 2) for j, c in sorted(self.coefficients.items()))


def _validated_omega(g_jet: TaylorJet, k: int, v_jet: TaylorJet) -> float:
    min_order = 2 * k + 6
    if g_jet.order < min_order or v_jet.order < min_order:
        raise ValueError(
            f"jets must carry order >= {min_order} for k = {k}; "
            f"got {g_jet.order} and {v_jet.order}"
        )
    a0 = g_jet.coefficients[0]
    if abs(a0 - 1.0) > 1e-10:
        raise ValueError(f"g(0) must equal 1, got {a0}")
    a2 = g_jet.coefficients[2]
    if abs(a2.imag) > 1e-10 * max(1.0, abs(a2)):
        raise ValueError(f"second-order coefficient must be real, got {a2}")
    if a2.real >= 0:
        raise ValueError(f"g''(0) must be negative, got {2 * a2.real}")
    return -a2.real


def build_bivariate(
    g_jet: TaylorJet, v_jet: TaylorJet, k: int
) -> tuple[BivariatePoly, float]:
    """The pre-integration polynomial p_e(n p_h(t)) p_v(t), plus omega.

    Works in the rescaled variable where g''(0) = -2.  Monomial degrees in
    t are capped at 6k-6: with 3i <= j and j = l-1+2i, no higher degree
    can reach a reported half-integer order l <= 2k-1.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    omega = _validated_omega(g_jet, k, v_jet)
    scale = omega ** -0.5
    g_resc = g_jet.rescaled(scale).coefficients
    v_resc = v_jet.rescaled(scale).coefficients

    h = _log_jet(g_resc / g_resc[0])
    h[2] += 1.0
    # the first three coefficients vanish identically; zeroing them drops
    # interpolation noise that would otherwise leak into every power
    h[:3] = 0.0

    jcap = max(6 * k - 6, 0)
    poly = BivariatePoly()
    power = np.array([1.0 + 0j])
    factorial = 1.0
    for m in range(0, 2 * k - 1):
        if m > 0:
            factorial *= m
            power = np.convolve(power, h)[: jcap + 1]
            if not power.any():
                break
        term = np.convolve(power, v_resc)[: jcap + 1]
        for j, c in enumerate(term):
            poly.add(m, j, c / factorial)
    return poly, omega


def expand(g_jet: TaylorJet, v_jet: TaylorJet, k: int) -> ExpansionResult:
    """Coefficients c_j, odd j <= 2k-1, of ∫ g^n v dt ~ Σ c_j n^{-j/2}."""
    poly, omega = build_bivariate(g_jet, v_jet, k)
    coeffs = {j: 0j for j in range(1, 2 * k, 2)}
    for (i, j), a in poly.items():
        if j % 2 == 1:
            continue
        level = j + 1 - 2 * i
        if level in coeffs:
            coeffs[level] += a * math.gamma((j + 1) / 2)
    scale = omega ** -0.5
    return ExpansionResult(k, {j: c * scale for j, c in coeffs.items()}, omega)


def direct_integral(
    g,
    v,
    interval_halfwidth: float,
    n: int,
    tol: float = 1e-12,
) -> complex:
    """Adaptive quadrature of ∫ g(t)^n v(t) dt over [-a, a].

    Spot-checks |g| <= 1 with equality only at 0 on a thousand-point grid
    before integrating; the returned value carries absolute error below
    tol or the call fails.
    """
    a = float(interval_halfwidth)
    if not a > 0:
        raise ValueError("interval halfwidth must be positive")
    grid = np.linspace(-a, a, 1001)
    gv = np.array([g(t) for t in grid])
    mods = np.abs(gv)
    if mods.max() > 1 + 1e-12:
        raise ValueError("|g| exceeds 1 on the interval")
    interior = np.abs(grid) > 1e-12
    if n > 0 and (mods[interior] >= 1 - 1e-15).any():
        raise ValueError("|g| attains 1 away from 0")

    def integrand(t, part):
        val = complex(g(t)) ** n * complex(v(t))
        return val.real if part == 0 else val.imag

    total = 0j
    for part in (0, 1):
        val, err = quad(
            integrand,
            -a,
            a,
            args=(part,),
            epsabs=tol / 10,
            epsrel=0.0,
            limit=500,
            points=[0.0],
        )
        if err > tol:
            raise RuntimeError(
                f"quadrature error estimate {err:.2e} above tolerance {tol:.2e}"
            )
        total += val if part == 0 else 1j * val
    return total


def jet_from_curve(
    fn,
    halfwidth: float,
    order: int,
    nodes: int = 33,
    residual_tol: float = 1e-11,
) -> TaylorJet:
    """Taylor jet at 0 of a smooth curve sampled on [-halfwidth, halfwidth].

    Interpolates at Chebyshev points, verifies the interpolant against the
    curve at off-node points, and differentiates the interpolant.  The
    residual check is the guard: a curve too rough for the node count is
    rejected rather than silently mis-differentiated.
    """
    if order >= nodes:
        raise ValueError("jet order must be below the node count")
    hw = float(halfwidth)
    theta = (2 * np.arange(nodes) + 1) * math.pi / (2 * nodes)
    xs = np.cos(theta)
    vals = np.array([fn(hw * x) for x in xs], dtype=np.complex128)
    coeffs = _cheb.chebfit(xs, vals, deg=nodes - 1)

    # drop the all-noise tail: converting negligible high modes to power
    # form amplifies their rounding error by roughly 4^degree and wrecks
    # the upper jet coefficients, while keeping them buys nothing
    thresh = 3e-13 * float(np.max(np.abs(coeffs)))
    alive = np.nonzero(np.abs(coeffs) > thresh)[0]
    coeffs = coeffs[: int(alive.max()) + 1] if alive.size else coeffs[:1]

    mid = np.cos(np.arange(1, nodes) * math.pi / nodes)
    interp = _cheb.chebval(mid, coeffs)
    exact = np.array([fn(hw * x) for x in mid], dtype=np.complex128)
    residual = float(np.max(np.abs(interp - exact)))
    if residual > residual_tol:
        raise RuntimeError(
            f"interpolation residual {residual:.2e} above {residual_tol:.2e}"
        )

    power = _cheb.cheb2poly(coeffs)[: order + 1]
    if power.size < order + 1:
        power = np.pad(power, (0, order + 1 - power.size))
    scaled = power / np.power(hw, np.arange(power.size))
    return TaylorJet(scaled)
