"""Fiber algebra, coefficient windows, skew observables, norms."""

import math

import numpy as np
import pytest
from numpy.polynomial import hermite as nph
from scipy.integrate import quad

from skewmix.gibbs import GibbsMeasure
from skewmix.observables import (
    GaussPoly,
    SkewObservable,
    WindowFunction,
    cross_correlation,
    fourier_transform,
    gauss_moments,
    nu_integral,
    pq_norm,
    sup_weighted_abs,
    theta_lipschitz_seminorm,
)
from skewmix.sft import constant_function, indicator_cylinder

SQ2PI = math.sqrt(2 * math.pi)


@pytest.fixture
def bernoulli(full_shift_spec):
    return GibbsMeasure(constant_function(full_shift_spec, -math.log(2)))


@pytest.fixture
def messy():
    return GaussPoly(np.array([0.3, -1.0j, 0.7]), -0.4 + 0.1j, 0.2 - 0.3j, 0.1j)


def test_gauss_moments_closed_forms():
    I = gauss_moments(-1.0 + 0j, 0.0, 2)
    assert I[0] == pytest.approx(math.sqrt(math.pi), abs=1e-14)
    assert I[1] == pytest.approx(0.0, abs=1e-14)
    assert I[2] == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-14)
    J = gauss_moments(-0.5 + 0j, 0.0, 2)
    assert J[2] == pytest.approx(SQ2PI, abs=1e-13)


def test_gaussian_ft():
    g = GaussPoly.gaussian()
    xs = np.linspace(-5, 5, 41)
    assert np.max(np.abs(g.ft_values(xs) - SQ2PI * np.exp(-xs * xs / 2))) < 1e-12


def test_shifted_gaussian_ft_phase():
    m, s = 1.3, 0.7
    g = GaussPoly.gaussian(mean=m, sigma=s)
    xs = np.linspace(-4, 4, 17)
    expect = s * SQ2PI * np.exp(-1j * m * xs - s * s * xs * xs / 2)
    assert np.max(np.abs(g.ft_values(xs) - expect)) < 1e-12


@pytest.mark.parametrize("j", [0, 1, 2, 5])
def test_hermite_ft_self_reproducing(j):
    h = GaussPoly.hermite(j)
    xs = np.linspace(-4, 4, 33)
    e = np.zeros(j + 1)
    e[j] = 1.0
    expect = SQ2PI * (-1j) ** j * nph.hermval(xs, e) * np.exp(-xs * xs / 2)
    assert np.max(np.abs(h.ft_values(xs) - expect)) < 1e-10


def test_ft_against_quadrature(messy):
    for xi in (-2.0, 0.0, 0.7, 3.1):
        re = quad(lambda t: (messy.value(t) * np.exp(-1j * t * xi)).real, -40, 40,
                  limit=300)[0]
        im = quad(lambda t: (messy.value(t) * np.exp(-1j * t * xi)).imag, -40, 40,
                  limit=300)[0]
        assert messy.ft_values(xi) == pytest.approx(re + 1j * im, abs=1e-10)


def test_ft_zero_is_integral(messy):
    assert messy.ft_values(0.0) == pytest.approx(messy.integral(), abs=1e-13)


def test_ft_derivative_matches_difference(messy):
    h = 1e-5
    xi = 0.9
    num = (messy.ft_values(xi + h) - messy.ft_values(xi - h)) / (2 * h)
    assert messy.ft_derivative_values(xi, 1) == pytest.approx(num, abs=1e-8)


def test_derivative_matches_difference(messy):
    d = messy.derivative()
    ts = np.array([-1.7, 0.0, 0.4, 2.2])
    h = 1e-6
    num = (messy.value(ts + h) - messy.value(ts - h)) / (2 * h)
    assert np.max(np.abs(d.value(ts) - num)) < 1e-7


def test_shift_value_identity(messy):
    ts = np.linspace(-3, 3, 11)
    assert np.max(np.abs(messy.shift(0.8).value(ts) - messy.value(ts + 0.8))) < 1e-12


def test_product_and_conjugate_values(messy):
    other = GaussPoly.hermite(2, scale=0.5 - 0.2j)
    ts = np.linspace(-2, 2, 9)
    assert np.max(np.abs((messy * other).value(ts) - messy.value(ts) * other.value(ts))) < 1e-11
    assert np.max(np.abs(messy.conjugate().value(ts) - np.conj(messy.value(ts)))) < 1e-13


def test_integrals():
    assert GaussPoly.gaussian(2.0, 0.6).integral() == pytest.approx(0.6 * SQ2PI, abs=1e-13)
    assert GaussPoly.hermite(1).integral() == pytest.approx(0.0, abs=1e-13)
    assert GaussPoly.hermite(3).integral() == pytest.approx(0.0, abs=1e-13)
    assert GaussPoly.hermite(2).integral() == pytest.approx(2 * SQ2PI, abs=1e-12)


def test_gaussian_cross_correlation():
    g = GaussPoly.gaussian()
    for a in (0.0, 0.5, -1.7, 3.2):
        assert cross_correlation(g, g, a) == pytest.approx(
            math.sqrt(math.pi) * math.exp(-a * a / 4), abs=1e-13
        )


def test_cross_correlation_adjoint(messy):
    other = GaussPoly.hermite(1, scale=1.2)
    for a in (0.0, 0.9, -2.1):
        lhs = cross_correlation(messy, other, a)
        rhs = np.conj(cross_correlation(other, messy, -a))
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_hermite_cap():
    with pytest.raises(ValueError):
        GaussPoly.hermite(17)
    with pytest.raises(ValueError):
        GaussPoly.hermite(-1)
    GaussPoly.hermite(16)


def test_sup_weighted_abs_frozen():
    g = GaussPoly.gaussian()
    assert sup_weighted_abs([g], 0)[0] == pytest.approx(1.0, abs=1e-11)
    # max(1,t^2)e^{-t^2/2} still peaks at t=0: the t^2 branch tops out at 2/e < 1
    assert sup_weighted_abs([g], 2)[0] == pytest.approx(1.0, abs=1e-11)
    h1 = GaussPoly.hermite(1, scale=0.5)  # t e^{-t^2/2}
    assert sup_weighted_abs([h1], 0)[0] == pytest.approx(math.exp(-0.5), abs=1e-10)


def test_pq_norm_observable(full_shift_spec):
    s = SkewObservable(full_shift_spec, [(constant_function(full_shift_spec, 1.0),
                                          GaussPoly.gaussian())])
    assert pq_norm(s, 0, 0) == pytest.approx(1.0, abs=1e-11)
    assert pq_norm(s, 2, 0) == pytest.approx(1.0, abs=1e-11)
    h1 = SkewObservable(full_shift_spec, [(constant_function(full_shift_spec, 0.5),
                                           GaussPoly.hermite(1))])
    # derivative (1-t^2)e^{-t^2/2} peaks at 1 beating the plain sup e^{-1/2}
    assert pq_norm(h1, 0, 1) == pytest.approx(1.0, abs=1e-10)


def test_pq_norm_monotone(full_shift_spec):
    rng = np.random.default_rng(3)
    s = SkewObservable(
        full_shift_spec,
        [
            (indicator_cylinder(full_shift_spec, (0,)), GaussPoly.hermite(2, 0.3)),
            (indicator_cylinder(full_shift_spec, (1,)), GaussPoly.gaussian(0.5, 1.2)),
        ],
    )
    vals = {}
    for p in (0, 1, 2):
        for q in (0, 1, 2):
            vals[p, q] = pq_norm(s, p, q)
    for p in (0, 1):
        for q in (0, 1):
            assert vals[p, q] <= vals[p + 1, q] + 1e-12
            assert vals[p, q] <= vals[p, q + 1] + 1e-12


def test_window_basics(golden_spec):
    w = WindowFunction(golden_spec, 1, 1, np.array([1.0, 2.0, 3.0]))
    # words for past+future=2: 00, 01, 10, covering coords -1..0
    assert w.evaluate((0, 1)) == 2.0
    assert w.evaluate((0, 0, 1), word_past=2) == 2.0
    with pytest.raises(ValueError):
        w.evaluate((0,), word_past=0)
    with pytest.raises(ValueError):
        WindowFunction(golden_spec, 1, 1, np.array([1.0, 2.0]))


def test_window_promote_and_trim(golden_spec):
    w = WindowFunction(golden_spec, 0, 1, np.array([5.0, -2.0]))
    big = w.promote_window(2, 3)
    for word in golden_spec.words(5):
        assert big.evaluate(word, word_past=2) == w.evaluate(word[2:], word_past=0)
    t = big.trim()
    assert (t.past, t.future) == (0, 1)
    assert np.array_equal(t.values, w.values)


def test_window_shift_observe(golden_spec):
    w = WindowFunction(golden_spec, 1, 1, np.array([1.0, 2.0, 3.0]))
    g = w.shift_observe(2)
    assert (g.past, g.future) == (0, 3)
    for word in golden_spec.words(3):
        # g(x) = w(sigma^2 x): window of w sits at coords 1..2
        assert g.evaluate(word, word_past=0) == w.evaluate(word[1:3], word_past=1)


def test_window_birkhoff(golden_spec):
    f = WindowFunction(golden_spec, 0, 1, np.array([1.0, -1.0]))
    s3 = f.birkhoff(3)
    for word in golden_spec.words(s3.future):
        manual = sum(f.evaluate(word[j:], word_past=0) for j in range(3))
        assert s3.evaluate(word, word_past=0) == manual


def test_window_integrate_shift_invariant(golden_spec):
    g = GibbsMeasure(constant_function(golden_spec, 0.0))
    w = WindowFunction(golden_spec, 1, 1, np.array([0.3, -1.2, 2.0]))
    a = w.integrate(g)
    b = w.shift_observe(3).integrate(g)
    assert a == pytest.approx(b, abs=1e-12)


def test_nu_integral_examples(bernoulli, full_shift_spec):
    s = SkewObservable(full_shift_spec,
                       [(indicator_cylinder(full_shift_spec, (0,)), GaussPoly.gaussian())])
    assert nu_integral(bernoulli, s) == pytest.approx(0.5 * SQ2PI, abs=1e-12)
    odd = SkewObservable(full_shift_spec,
                         [(constant_function(full_shift_spec, 1.0), GaussPoly.hermite(3))])
    assert nu_integral(bernoulli, odd) == pytest.approx(0.0, abs=1e-12)


def test_nu_is_integrated_ft_at_zero(bernoulli, full_shift_spec):
    s = SkewObservable(
        full_shift_spec,
        [
            (indicator_cylinder(full_shift_spec, (0, 1)), GaussPoly.gaussian(0.3, 0.8)),
            (constant_function(full_shift_spec, 0.25), GaussPoly.hermite(2)),
        ],
    )
    phi0 = fourier_transform(s, 0.0)
    assert bernoulli.integrate(phi0) == pytest.approx(nu_integral(bernoulli, s), abs=1e-12)


def test_ft_matrix_matches_per_word(full_shift_spec):
    s = SkewObservable(
        full_shift_spec,
        [
            (indicator_cylinder(full_shift_spec, (0, 1)), GaussPoly.gaussian(0.3, 0.8)),
            (constant_function(full_shift_spec, 0.25 - 0.1j), GaussPoly.hermite(1)),
        ],
    )
    xis = np.array([-1.0, 0.0, 2.5])
    M = s.ft_matrix(xis)
    words = full_shift_spec.words(2)
    for i, xi in enumerate(xis):
        for j, w in enumerate(words):
            manual = sum(
                c.evaluate(w, word_past=0) * g.ft_values(xi)
                for c, g in s.terms
            )
            assert M[i, j] == pytest.approx(manual, abs=1e-12)


def test_compose_skew_evaluate(full_shift_spec):
    f = WindowFunction(full_shift_spec, 0, 1, np.array([1.0, -1.0]))
    s = SkewObservable(
        full_shift_spec,
        [(indicator_cylinder(full_shift_spec, (1,)), GaussPoly.gaussian())],
    )
    sn = s.compose_skew(f, 2)
    ts = np.linspace(-2, 2, 7)
    for word in full_shift_spec.words(max(sn.past_depth + sn.future_depth, 4)):
        S2 = f.evaluate(word, 0).real + f.evaluate(word[1:], 0).real
        direct = s.evaluate(word[2:], ts + S2)
        got = sn.evaluate(word, ts, word_past=sn.past_depth)
        assert np.max(np.abs(got - direct)) < 1e-12


def test_compose_skew_composes(full_shift_spec):
    f = WindowFunction(full_shift_spec, 0, 2, np.array([0.4, -0.3, 1.1, 0.2]))
    s = SkewObservable(
        full_shift_spec,
        [(indicator_cylinder(full_shift_spec, (0,)), GaussPoly.gaussian(0.2, 0.9))],
    )
    once = s.compose_skew(f, 1).compose_skew(f, 2)
    both = s.compose_skew(f, 3)
    ts = np.linspace(-1.5, 1.5, 5)
    d = max(once.future_depth, both.future_depth)
    for word in full_shift_spec.words(d):
        assert np.max(np.abs(once.evaluate(word, ts) - both.evaluate(word, ts))) < 1e-12


def test_nu_invariant_under_skew_composition(golden_spec):
    g = GibbsMeasure(constant_function(golden_spec, 0.0))
    f = WindowFunction(golden_spec, 0, 2, np.array([0.5, -0.2, 0.8]))
    s = SkewObservable(
        golden_spec,
        [
            (indicator_cylinder(golden_spec, (0,)), GaussPoly.gaussian(0.1, 1.1)),
            (indicator_cylinder(golden_spec, (1, 0)), GaussPoly.hermite(2, 0.4)),
        ],
    )
    for n in (1, 2, 3):
        assert nu_integral(g, s.compose_skew(f, n)) == pytest.approx(
            nu_integral(g, s), abs=1e-11
        )


def test_shift_fiber_by(golden_spec):
    h = WindowFunction(golden_spec, 1, 0, np.array([0.7, -0.4]))
    s = SkewObservable(
        golden_spec,
        [(indicator_cylinder(golden_spec, (0,)), GaussPoly.gaussian())],
    )
    shifted = s.shift_fiber_by(h, sign=-1)
    assert shifted.past_depth == 1
    ts = np.linspace(-2, 2, 7)
    for word in golden_spec.words(2):
        hv = h.evaluate(word, word_past=1).real
        direct = s.evaluate(word[1:], ts - hv)
        got = shifted.evaluate(word, ts, word_past=1)
        assert np.max(np.abs(got - direct)) < 1e-12
    back = shifted.shift_fiber_by(h, sign=1)
    for word in golden_spec.words(2):
        got = back.evaluate(word, ts, word_past=1)
        assert np.max(np.abs(got - s.evaluate(word[1:], ts))) < 1e-12


def test_seminorm_frozen_example(full_shift_spec):
    diff = indicator_cylinder(full_shift_spec, (0,)) - indicator_cylinder(
        full_shift_spec, (1,)
    )
    s = SkewObservable(full_shift_spec, [(diff, GaussPoly.gaussian())])
    assert theta_lipschitz_seminorm(s, 0, 0, 1) == pytest.approx(2.0, abs=1e-10)
    assert theta_lipschitz_seminorm(3.0 * s, 0, 0, 1) == pytest.approx(6.0, abs=1e-9)
    const = SkewObservable(
        full_shift_spec, [(constant_function(full_shift_spec, 4.2), GaussPoly.gaussian())]
    )
    assert theta_lipschitz_seminorm(const, 0, 0, 2) == 0.0


def test_ft_norm_bounds(full_shift_spec, bernoulli):
    # |s_x-hat| <= 4||s_x||_{2,0} and integral |s_x-hat| <= 16||s_x||_{2,2}
    s = SkewObservable(
        full_shift_spec,
        [
            (indicator_cylinder(full_shift_spec, (0,)), GaussPoly.hermite(2, 0.6)),
            (constant_function(full_shift_spec, 0.5), GaussPoly.gaussian(0.4, 0.9)),
        ],
    )
    xis = np.linspace(-40, 40, 4001)
    M = s.ft_matrix(xis)
    sup20 = pq_norm(s, 2, 0)
    assert np.max(np.abs(M)) <= 4 * sup20 + 1e-9
    sup22 = pq_norm(s, 2, 2)
    integ = np.max(np.trapezoid(np.abs(M), xis, axis=0))
    assert integ <= 16 * sup22 + 1e-9
    # |d^l/dxi^l phi| <= 4||s||_{inf,l+2,0}
    for ell in (1, 2):
        D = s.ft_matrix(np.linspace(-10, 10, 401), derivative=ell)
        assert np.max(np.abs(D)) <= 4 * pq_norm(s, ell + 2, 0) + 1e-9
    # large-xi decay |phi_xi| <= 4|xi|^{-k} ||s||_{inf,2,k}
    for k in (1, 2):
        bound = pq_norm(s, 2, k)
        for xi in (5.0, 10.0, 20.0):
            val = np.max(np.abs(s.ft_matrix([xi])))
            assert val <= 4 * bound / xi**k + 1e-9
