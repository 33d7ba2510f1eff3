"""Twisted transfer operators and the drift variance of the skew function.

The twisted operator at frequency xi acts on depth-r cylinder functions by
(L_xi w)(x) = sum over preimages y of e^{u'(y) - i xi f(y)} w(y), with u' the
normalized potential.  Its leading eigenvalue curve xi -> lambda_xi starts at
1, is locally a downward parabola 1 - omega xi^2, and stays strictly inside
the unit disk away from 0 exactly when e^{-i xi f} carries no hidden
character; the scan below probes that condition on a grid, which is the
numerical stand-in for the aperiodicity hypothesis.

The drift variance omega is computed two independent ways: the Green-Kubo
autocovariance sum (no spectral machinery at all) and the second derivative
of the eigenvalue curve by Richardson-refined central differences.  Their
agreement is a standing cross-check, not an implementation convenience, so
neither route may be expressed through the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gibbs import GibbsMeasure
from .sft import CylinderFunction, preimage_symbols, promote

__all__ = [
    "GapCollapseError",
    "TwistedEigendata",
    "TwistedFamily",
    "DriftVariance",
    "ScanReport",
    "drift_green_kubo",
    "drift_eigen",
    "drift_variance",
    "select_kappa",
    "aperiodicity_scan",
]


class GapCollapseError(RuntimeError):
    """Two leading eigenvalue moduli coincide: past the perturbative regime."""


@dataclass(frozen=True)
class TwistedEigendata:
    xi: float
    lam: complex
    right: np.ndarray
    left: np.ndarray
    subleading_radius: float

    def project(self, v: np.ndarray) -> np.ndarray:
        """Rank-one spectral projection v ↦ (left·v)·right."""
        return (self.left @ v) * self.right


class TwistedFamily:
    """The xi-indexed family of twisted matrices at one fixed depth."""

    def __init__(self, gibbs: GibbsMeasure, f: CylinderFunction, depth: int | None = None):
        if f.spec != gibbs.spec:
            raise ValueError("skew function lives on a different subshift")
        if not f.is_real:
            raise ValueError("skew function must be real-valued")
        if depth is None:
            depth = max(gibbs.depth, f.depth - 1, 1)
        if depth < gibbs.depth or depth < f.depth - 1:
            raise ValueError(f"depth {depth} too small for potential or skew data")
        spec = gibbs.spec
        words = spec.words(depth)
        idx = spec.word_index(depth)
        fvals = f.real_values()
        fidx = spec.word_index(f.depth)
        unorm = gibbs.normalized_potential
        rows, cols, logw, fy = [], [], [], []
        for i, x in enumerate(words):
            for a in preimage_symbols(spec, x):
                y = (a,) + x
                rows.append(i)
                cols.append(idx[y[:depth]])
                logw.append(unorm.evaluate(y).real)
                fy.append(fvals[fidx[y[: f.depth]]] if f.depth > 0 else fvals[0])
        self.gibbs = gibbs
        self.f = f
        self.depth = depth
        self.size = len(words)
        self._rows = np.array(rows)
        self._cols = np.array(cols)
        self._weights = np.exp(np.array(logw))
        self._fy = np.array(fy)

    def matrix(self, xi: float) -> np.ndarray:
        M = np.zeros((self.size, self.size), dtype=np.complex128)
        M[self._rows, self._cols] = self._weights * np.exp(-1j * xi * self._fy)
        return M

    def matrices(self, xis) -> np.ndarray:
        """Stacked twisted matrices, shape (len(xis), size, size)."""
        xis = np.asarray(xis, dtype=np.float64).ravel()
        out = np.zeros((xis.size, self.size, self.size), dtype=np.complex128)
        phases = np.exp(-1j * np.outer(xis, self._fy)) * self._weights
        out[:, self._rows, self._cols] = phases
        return out

    def leading(
        self,
        xi: float,
        warm_start: np.ndarray | None = None,
        tol: float = 1e-14,
        max_iter: int = 100_000,
        gap_rtol: float = 1e-10,
    ) -> TwistedEigendata:
        """Leading eigendata by phase-anchored power iteration.

        The returned right vector has its largest-modulus entry equal to 1
        and left·right = 1, so the pair directly defines the rank-one
        spectral projector.  Raises GapCollapseError when the two largest
        eigenvalue moduli agree to within the stated relative margin.
        """
        M = self.matrix(xi)
        evals = np.linalg.eigvals(M)
        moduli = np.sort(np.abs(evals))[::-1]
        lead_mod, sub_mod = moduli[0], moduli[1] if moduli.size > 1 else 0.0
        if lead_mod == 0 or (lead_mod - sub_mod) / lead_mod < gap_rtol:
            raise GapCollapseError(
                f"no spectral gap at xi={xi}: moduli {lead_mod:.6g}, {sub_mod:.6g}"
            )

        start = warm_start.astype(np.complex128).copy() if warm_start is not None else np.ones(
            self.size, dtype=np.complex128
        )

        def iterate(A: np.ndarray, v0: np.ndarray) -> np.ndarray:
            # anchor phase at one fixed entry so near-tied moduli cannot
            # flip the reference index between steps and stall convergence
            v = v0 / np.linalg.norm(v0)
            anchor_idx = int(np.argmax(np.abs(v)))
            for _ in range(max_iter):
                w = A @ v
                nw = np.linalg.norm(w)
                if nw == 0:
                    raise GapCollapseError(f"iteration annihilated at xi={xi}")
                w /= nw
                if abs(w[anchor_idx]) < 0.5 * np.max(np.abs(w)):
                    anchor_idx = int(np.argmax(np.abs(w)))
                anchor = w[anchor_idx]
                w *= anchor.conjugate() / abs(anchor)
                if np.max(np.abs(w - v)) < tol:
                    return w
                v = w
            raise RuntimeError(f"power iteration did not converge at xi={xi}")

        v = iterate(M, start)
        lam = (np.conj(v) @ (M @ v)) / (np.conj(v) @ v)
        u = iterate(M.conj().T, np.ones(self.size, dtype=np.complex128))
        left = np.conj(u)

        right = v / v[np.argmax(np.abs(v))]
        left = left / (left @ right)
        return TwistedEigendata(float(xi), complex(lam), right, left, float(sub_mod))

    def leading_curve(self, xis, **kwargs) -> list[TwistedEigendata]:
        """Eigendata along a grid, warm-starting each point from the last."""
        out = []
        warm = None
        for xi in np.asarray(xis, dtype=np.float64).ravel():
            data = self.leading(float(xi), warm_start=warm, **kwargs)
            out.append(data)
            warm = data.right
        return out

    def spectral_radius_profile(self, xis) -> np.ndarray:
        """max |eigenvalue| at each grid frequency, fully batched."""
        stacks = self.matrices(xis)
        return np.max(np.abs(np.linalg.eigvals(stacks)), axis=1)


@dataclass(frozen=True)
class DriftVariance:
    omega_green_kubo: float
    omega_eigen: float
    kappa: float

    @property
    def omega(self) -> float:
        return self.omega_green_kubo


def drift_green_kubo(
    gibbs: GibbsMeasure,
    f: CylinderFunction,
    term_tol: float = 1e-15,
    max_lag: int = 5000,
) -> float:
    """½·C₀ + Σ_{k≥1} C_k with C_k the lag-k autocovariance of f under μ.

    Truncates when three consecutive terms fall below term_tol; locally
    constant data on fixtures with finite memory terminates exactly.
    """
    mean = gibbs.integrate(f)
    if abs(mean) > 1e-12:
        raise ValueError(f"skew function must have zero mean, got {mean:.3e}")
    depth = max(gibbs.depth, f.depth, 1)
    P = gibbs.transition_matrix(depth)
    fvec = promote(f, depth).real_values()
    masses = gibbs.measure_vector(depth)
    c0 = math.fsum(masses * fvec * fvec)
    acc = [0.5 * c0]
    w = fvec.copy()
    small_run = 0
    for _ in range(1, max_lag + 1):
        w = P @ w
        ck = math.fsum(masses * fvec * w)
        acc.append(ck)
        small_run = small_run + 1 if abs(ck) < term_tol else 0
        if small_run >= 3:
            break
    else:
        raise RuntimeError("autocovariance series did not settle within max_lag")
    omega = math.fsum(acc)
    if omega <= 0:
        raise ValueError(
            f"drift variance {omega:.3e} not positive: f is a coboundary or zero"
        )
    return omega


def select_kappa(
    family: TwistedFamily,
    omega: float,
    gap_margin: float = 0.1,
    grid_points: int = 33,
    max_halvings: int = 40,
) -> float:
    """Perturbative radius: start at 0.5/√ω, halve until the curve behaves.

    Conditions: relative spectral gap above gap_margin on [0, κ], and
    |λ_ξ| < 1 for 0 < ξ ≤ κ.  Conjugation symmetry covers negative ξ.
    """
    kappa = 0.5 / math.sqrt(omega)
    for _ in range(max_halvings):
        ok = True
        warm = None
        for xi in np.linspace(0.0, kappa, grid_points):
            try:
                data = family.leading(float(xi), warm_start=warm)
            except GapCollapseError:
                ok = False
                break
            warm = data.right
            gap = (abs(data.lam) - data.subleading_radius) / abs(data.lam)
            if gap <= gap_margin or (xi > 0 and abs(data.lam) >= 1.0):
                ok = False
                break
        if ok:
            return kappa
        kappa /= 2
    raise RuntimeError("no perturbative radius found: eigenvalue curve misbehaves")


def drift_eigen(
    family: TwistedFamily,
    kappa: float,
    rtol: float = 1e-8,
) -> float:
    """−½·λ″(0) by fourth-order central differences with Richardson control.

    Steps κ/8, κ/16, κ/32; the two Richardson extrapolants must agree to
    rtol relative or the estimate is rejected.
    """
    def second_derivative(h: float) -> float:
        xis = [-2 * h, -h, h, 2 * h]
        vals = {}
        warm = None
        for xi in sorted(xis, key=abs):
            data = family.leading(xi, warm_start=warm)
            warm = data.right
            vals[xi] = data.lam
        num = (
            -vals[2 * h] + 16 * vals[h] - 30.0 + 16 * vals[-h] - vals[-2 * h]
        )
        d2 = num / (12 * h * h)
        if abs(d2.imag) > 1e-9 * max(1.0, abs(d2.real)):
            raise RuntimeError(f"second derivative not real: {d2:.6g}")
        return d2.real

    d8 = second_derivative(kappa / 8)
    d16 = second_derivative(kappa / 16)
    d32 = second_derivative(kappa / 32)
    r1 = (16 * d16 - d8) / 15
    r2 = (16 * d32 - d16) / 15
    if abs(r2 - r1) > rtol * max(1.0, abs(r2)):
        raise RuntimeError(
            f"Richardson extrapolants disagree: {r1:.12g} vs {r2:.12g}"
        )
    return -0.5 * r2


def drift_variance(
    gibbs: GibbsMeasure, f: CylinderFunction, depth: int | None = None
) -> DriftVariance:
    """Both drift-variance routes plus the validated perturbative radius."""
    omega_gk = drift_green_kubo(gibbs, f)
    family = TwistedFamily(gibbs, f, depth=depth)
    kappa = select_kappa(family, omega_gk)
    omega_ei = drift_eigen(family, kappa)
    return DriftVariance(omega_gk, omega_ei, kappa)


@dataclass(frozen=True)
class ScanReport:
    kappa: float
    xi_max: float
    grid_points: int
    max_radius: float
    argmax_xi: float
    threshold: float
    passed: bool


def aperiodicity_scan(
    gibbs: GibbsMeasure,
    f: CylinderFunction,
    kappa: float,
    xi_max: float = 20.0,
    grid_points: int = 4001,
    threshold: float = 1.0 - 1e-6,
    depth: int | None = None,
) -> ScanReport:
    """Spectral radius sweep over [κ, xi_max]; failing is data, not an error."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    if not xi_max > kappa:
        raise ValueError("xi_max must exceed kappa")
    family = TwistedFamily(gibbs, f, depth=depth)
    xis = np.linspace(kappa, xi_max, grid_points)
    radii = family.spectral_radius_profile(xis)
    imax = int(np.argmax(radii))
    max_radius = float(radii[imax])
    return ScanReport(
        kappa=float(kappa),
        xi_max=float(xi_max),
        grid_points=int(grid_points),
        max_radius=max_radius,
        argmax_xi=float(xis[imax]),
        threshold=float(threshold),
        passed=bool(max_radius < threshold),
    )
