"""Rewriting maps, correction sums, and the cocycle reduction."""

import math

import numpy as np
import pytest

from skewmix.cohomology import (
    AnchorChoice,
    apply_omega,
    approximating_sequence,
    build_vm,
    conjugate_observable,
    omega_n,
    reduce_cocycle,
    window_separation,
)
from skewmix.gibbs import GibbsMeasure
from skewmix.observables import GaussPoly, SkewObservable, WindowFunction, pq_norm
from skewmix.sft import CylinderFunction
from skewmix.twisted import drift_green_kubo

SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def anchor_golden(golden_spec):
    return AnchorChoice(golden_spec)


@pytest.fixture(scope="module")
def anchor_full(full_shift_spec):
    return AnchorChoice(full_shift_spec)


@pytest.fixture(scope="module")
def parry(golden_spec):
    return GibbsMeasure(CylinderFunction(golden_spec, 1, [0.0, 0.0]))


@pytest.fixture(scope="module")
def bernoulli(full_shift_spec):
    val = -math.log(2.0)
    return GibbsMeasure(CylinderFunction(full_shift_spec, 1, [val, val]))


def coordinate_window(spec, k, u):
    """A window depending on coordinate -k alone, with values u[symbol]."""
    if k == 0:
        return WindowFunction(spec, 0, 1, [u[w[0]] for w in spec.words(1)])
    return WindowFunction(spec, k, 0, [u[w[0]] for w in spec.words(k)])


def geometric_window(spec, past, rate=0.5):
    """Past dependence decaying like rate^k; oscillation 2·rate^k at lag k."""
    acc = WindowFunction.constant(spec, 0.0)
    for k in range(past + 1):
        acc = acc + rate**k * coordinate_window(spec, k, (1.0, -1.0))
    return acc


# ---------------------------------------------------------------- anchors


def test_anchor_continuations(golden_spec, full_shift_spec):
    a = AnchorChoice(golden_spec)
    assert a.past(0, 5) == (0,) * 6
    assert a.past(1, 4) == (0, 0, 0, 0, 1)
    assert a.past(1, 0) == (1,)
    b = AnchorChoice(full_shift_spec)
    assert b.past(1, 3) == (0, 0, 0, 1)
    for sym in range(2):
        w = a.past(sym, 9)
        assert all(golden_spec.allows(w[i], w[i + 1]) for i in range(9))


def test_anchor_validation(golden_spec):
    a = AnchorChoice(golden_spec)
    with pytest.raises(ValueError):
        a.past(2, 3)
    with pytest.raises(ValueError):
        a.past(0, -1)


# ---------------------------------------------------------- rewriting maps


def test_omega_word_postconditions(golden_spec, anchor_golden):
    # preserved tail, anchored head, admissibility; exhaustive on width 9
    past, future = 4, 5
    for n in range(0, 7):
        for w in golden_spec.words(past + future):
            out = omega_n(anchor_golden, n, w, past)
            assert len(out) == len(w)
            assert golden_spec.is_admissible(out)
            if past <= n:
                assert out == w
                continue
            pos = past - n
            assert out[pos:] == w[pos:]
            assert out[:pos + 1] == anchor_golden.past(w[pos], pos)


def test_omega_idempotent(golden_spec, anchor_golden):
    past, future = 5, 4
    for n in range(0, 8):
        for w in golden_spec.words(past + future):
            once = omega_n(anchor_golden, n, w, past)
            assert omega_n(anchor_golden, n, once, past) == once


def test_omega_moves_points_less_than_theta_n(golden_spec, anchor_golden):
    past, future = 4, 5
    for n in range(0, 7):
        for w in golden_spec.words(past + future):
            out = omega_n(anchor_golden, n, w, past)
            assert window_separation(out, w, past) > n
            # shifted copies separate at least n+m deep
            for m in range(0, 4):
                assert window_separation(out, w, past + m) > n + m


def test_omega_is_metric_contraction(golden_spec, anchor_golden):
    past, future = 4, 5
    words = golden_spec.words(past + future)
    for n in (0, 1, 2, 3, 5):
        rewritten = [omega_n(anchor_golden, n, w, past) for w in words]
        for i, x in enumerate(words):
            for j in range(i + 1, len(words)):
                sep = window_separation(x, words[j], past)
                out = window_separation(rewritten[i], rewritten[j], past)
                assert out >= sep


def test_omega_word_validation(golden_spec, anchor_golden):
    with pytest.raises(ValueError):
        omega_n(anchor_golden, -1, (0, 0), 1)
    with pytest.raises(ValueError):
        omega_n(anchor_golden, 0, (0, 0), 3)
    # pure-past window cannot reach the splice symbol at coordinate 0
    with pytest.raises(ValueError):
        omega_n(anchor_golden, 0, (0, 0, 0), 3)


def test_window_separation_basics():
    assert window_separation((0, 1, 0), (0, 1, 0), 1) == math.inf
    assert window_separation((1, 1, 0), (0, 1, 0), 1) == 1
    assert window_separation((0, 0, 0), (0, 1, 0), 1) == 0
    with pytest.raises(ValueError):
        window_separation((0, 0), (0,), 1)


def test_apply_omega_matches_pointwise(golden_spec, anchor_golden):
    rng = np.random.default_rng(3)
    past, future = 3, 2
    vals = rng.normal(size=len(golden_spec.words(past + future)))
    s = WindowFunction(golden_spec, past, future, vals)
    for n in range(0, 5):
        rew = apply_omega(anchor_golden, s, n)
        assert rew.past == min(past, n)
        for w in golden_spec.words(past + future):
            expect = s.evaluate(omega_n(anchor_golden, n, w, past), past)
            assert rew.evaluate(w, past) == pytest.approx(expect, abs=0.0)


def test_apply_omega_fixed_points(golden_spec, anchor_golden):
    future_only = WindowFunction(golden_spec, 0, 2, [1.0, 2.0, 3.0])
    assert apply_omega(anchor_golden, future_only, 0) is future_only
    deep = WindowFunction(golden_spec, 2, 0, [1.0, 2.0, 3.0])
    assert apply_omega(anchor_golden, deep, 2) is deep
    assert apply_omega(anchor_golden, deep, 5) is deep


def test_apply_omega_past_only_window(full_shift_spec, anchor_full):
    # n = 0 on a past-only window must pull in coordinate 0 for the splice
    s = WindowFunction(full_shift_spec, 1, 0, [4.0, 7.0])
    rew = apply_omega(anchor_full, s, 0)
    assert rew.past == 0 and rew.future == 1
    # anchor past of either symbol starts at 0, so the value is s at 0
    assert np.allclose(rew.values, 4.0)


def test_apply_omega_observable(full_shift_spec, anchor_full):
    c = WindowFunction(full_shift_spec, 2, 0, [1.0, 2.0, 3.0, 4.0])
    g = GaussPoly.gaussian()
    s = SkewObservable(full_shift_spec, [(c, g)])
    rew = apply_omega(anchor_full, s, 1)
    assert rew.past_depth == 1
    assert rew.terms[0][1] is g
    scalar = apply_omega(anchor_full, c, 1)
    assert np.array_equal(rew.terms[0][0].values, scalar.values)


# ----------------------------------------------------------- correction sums


def test_vm_vanishes_for_future_only(golden_spec, anchor_golden):
    s = WindowFunction(golden_spec, 0, 2, [1.0, -2.0, 0.5])
    v = build_vm(s, 0, anchor_golden)
    assert v.max_abs() == 0.0
    f = CylinderFunction(golden_spec, 2, [1.0, -2.0, 0.5])
    assert build_vm(f, 0, anchor_golden).max_abs() == 0.0


def test_v0_single_lag_example(full_shift_spec, anchor_full):
    # f(x) = g(x_{-1}): the sum has the single term g(anchor(x0)_{-1}) - g(x_{-1})
    g = (3.0, -1.25)
    f = WindowFunction(full_shift_spec, 1, 0, list(g))
    v0 = build_vm(f, 0, anchor_full)
    for w in full_shift_spec.words(2):
        expect = g[0] - g[w[0]]
        assert v0.evaluate(w, 1) == pytest.approx(expect, abs=1e-15)
    assert build_vm(f, 1, anchor_full).max_abs() == 0.0


def test_vm_norm_decay_trend(golden_spec, anchor_golden):
    theta = golden_spec.theta
    s = geometric_window(golden_spec, 6)
    norms = []
    for m in range(0, 7):
        v = build_vm(s, m, anchor_golden)
        norms.append(v.max_abs())
    assert norms[6] == 0.0
    assert all(v > 0 for v in norms[:6])
    # oscillation at lag k is 2 theta^k, so the tail sums stay under
    # 2 theta^{m+1} / (1-theta)^2 and shrink geometrically
    for m, v in enumerate(norms[:6]):
        assert v <= 2.0 * theta ** (m + 1) / (1 - theta) ** 2 + 1e-12
    slope = np.polyfit(np.arange(6), np.log(norms[:6]), 1)[0]
    assert abs(slope - math.log(theta)) < 0.25


def test_vm_validation(golden_spec, anchor_golden, full_shift_spec, anchor_full):
    s = WindowFunction(golden_spec, 1, 1, [1.0, 0.0, -1.0])
    with pytest.raises(ValueError):
        build_vm(s, -1, anchor_golden)
    obs = SkewObservable(
        full_shift_spec,
        [(WindowFunction(full_shift_spec, 1, 0, [1.0, -1.0]), GaussPoly.gaussian())],
    )
    with pytest.raises(ValueError, match="skew"):
        build_vm(obs, 0, anchor_full)


# ---------------------------------------------------- approximating sequence


def test_scalar_sequence_matches_definition(golden_spec, anchor_golden):
    s = geometric_window(golden_spec, 5)
    for m in range(0, 8):
        v = build_vm(s, m, anchor_golden)
        direct = s.shift_observe(m) + v - v.shift_observe(1)
        tele = approximating_sequence(s, m, anchor_golden)
        assert tele.past == 0
        assert (tele - direct).max_abs() < 1e-13


def test_observable_sequence_matches_definition(full_shift_spec, anchor_full):
    rng = np.random.default_rng(11)
    skew = WindowFunction(
        full_shift_spec, 0, 2, [0.3, -0.2, 0.45, 0.05]
    )
    terms = [
        (
            WindowFunction(full_shift_spec, 2, 0, rng.normal(size=4)),
            GaussPoly.gaussian(),
        ),
        (
            WindowFunction(full_shift_spec, 1, 1, rng.normal(size=4)),
            GaussPoly.hermite(3, scale=0.5),
        ),
    ]
    s = SkewObservable(full_shift_spec, terms)
    ts = (-1.3, 0.0, 0.7, 2.1)
    for m in (0, 1, 2, 4):
        v = build_vm(s, m, anchor_full, skew=skew)
        direct = s.compose_skew(skew, m) + v - v.compose_skew(skew, 1)
        tele = approximating_sequence(s, m, anchor_full, skew=skew)
        assert tele.past_depth == 0
        wide = max(direct.past_depth, 2)
        future = max(direct.future_depth, tele.future_depth)
        for w in full_shift_spec.words(wide + future):
            for t in ts:
                lhs = tele.evaluate(w, t, word_past=wide)
                rhs = direct.evaluate(w, t, word_past=wide)
                assert lhs == pytest.approx(rhs, abs=1e-12)


def test_sequence_preserves_integral(full_shift_spec, anchor_full, bernoulli):
    rng = np.random.default_rng(5)
    skew = WindowFunction(full_shift_spec, 0, 2, [0.3, -0.2, 0.45, 0.05])
    s = SkewObservable(
        full_shift_spec,
        [
            (
                WindowFunction(full_shift_spec, 2, 1, rng.normal(size=8)),
                GaussPoly.gaussian(mean=0.4, sigma=1.3),
            ),
            (
                WindowFunction(full_shift_spec, 1, 0, rng.normal(size=2)),
                GaussPoly.hermite(2),
            ),
        ],
    )
    ref = s.nu_integral(bernoulli)
    for m in range(0, 7):
        sm = approximating_sequence(s, m, anchor_full, skew=skew)
        assert sm.nu_integral(bernoulli) == pytest.approx(ref, abs=1e-12)


def test_sequence_sup_decay_trend(full_shift_spec, anchor_full):
    theta = full_shift_spec.theta
    skew = WindowFunction(full_shift_spec, 0, 2, [0.3, -0.2, 0.45, 0.05])
    coeff = geometric_window(full_shift_spec, 4)
    s = SkewObservable(full_shift_spec, [(coeff, GaussPoly.gaussian())])
    norms = []
    for m in range(0, 5):
        sm = approximating_sequence(s, m, anchor_full, skew=skew)
        diff = sm - s.compose_skew(skew, m)
        norms.append(pq_norm(diff, 0, 0))
    assert norms[4] < 1e-15
    assert all(v > 0 for v in norms[:4])
    slope = np.polyfit(np.arange(4), np.log(norms[:4]), 1)[0]
    assert abs(slope - math.log(theta)) < 0.35


def test_future_only_sequence_is_composition(full_shift_spec, anchor_full):
    skew = WindowFunction(full_shift_spec, 0, 2, [0.3, -0.2, 0.45, 0.05])
    s = SkewObservable(
        full_shift_spec,
        [(WindowFunction(full_shift_spec, 0, 1, [1.0, -0.5]), GaussPoly.gaussian())],
    )
    for m in (0, 2):
        sm = approximating_sequence(s, m, anchor_full, skew=skew)
        direct = s.compose_skew(skew, m)
        for w in full_shift_spec.words(sm.future_depth + 1):
            for t in (-0.9, 0.4):
                assert sm.evaluate(w, t, 0) == pytest.approx(
                    direct.evaluate(w, t, 0), abs=1e-14
                )


def test_sequence_rejects_two_sided_skew(full_shift_spec, anchor_full):
    skew = WindowFunction(full_shift_spec, 1, 1, [0.1, 0.2, 0.3, 0.4])
    s = SkewObservable(
        full_shift_spec,
        [(WindowFunction(full_shift_spec, 1, 0, [1.0, -1.0]), GaussPoly.gaussian())],
    )
    with pytest.raises(ValueError, match="future-only"):
        approximating_sequence(s, 0, anchor_full, skew=skew)


# ------------------------------------------------------------ the reduction


def r1_two_sided(spec):
    """f(x) = g(x_{-1}) + sqrt2 g(x_0) with g = ±1 on symbols 0, 1."""
    g = (1.0, -1.0)
    vals = [g[w[0]] + SQRT2 * g[w[1]] for w in spec.words(2)]
    return WindowFunction(spec, 1, 1, vals)


def test_reduce_r1_closed_form(full_shift_spec, anchor_full):
    f = r1_two_sided(full_shift_spec)
    ftilde, h = reduce_cocycle(f, anchor_full)
    # the past term transfers onto the future symbol: (1+sqrt2) g(x_0)
    assert ftilde.depth == 1
    assert ftilde.values[0] == pytest.approx(1 + SQRT2, abs=1e-14)
    assert ftilde.values[1] == pytest.approx(-(1 + SQRT2), abs=1e-14)
    # h = g(x_{-1}) - 1, values {0, -2}
    for w in full_shift_spec.words(max(2, h.width)):
        expect = (1.0 if w[0] == 0 else -1.0) - 1.0
        assert h.evaluate(w, 1) == pytest.approx(expect, abs=1e-14)


def test_reduce_future_only_is_identity(golden_spec, anchor_golden):
    f = CylinderFunction(golden_spec, 2, [1.5, -0.5, 2.0])
    ftilde, h = reduce_cocycle(f, anchor_golden)
    assert h.max_abs() == 0.0
    assert ftilde.depth == 2
    assert np.array_equal(ftilde.values, f.values)


def test_reduce_exact_cohomology(golden_spec, anchor_golden, full_shift_spec, anchor_full):
    rng = np.random.default_rng(17)
    fixtures = [
        (r1_two_sided(full_shift_spec), anchor_full),
        (geometric_window(golden_spec, 6), anchor_golden),
        (
            WindowFunction(
                golden_spec, 3, 2, rng.normal(size=len(golden_spec.words(5)))
            ),
            anchor_golden,
        ),
    ]
    for f, anchor in fixtures:
        ftilde, h = reduce_cocycle(f, anchor)
        resid = f - WindowFunction.from_cylinder(ftilde) - h + h.shift_observe(1)
        assert resid.max_abs() <= 1e-12


def test_reduce_birkhoff_telescoping(full_shift_spec, anchor_full, golden_spec, anchor_golden):
    rng = np.random.default_rng(23)
    fixtures = [
        (r1_two_sided(full_shift_spec), anchor_full),
        (
            WindowFunction(
                golden_spec, 2, 1, rng.normal(size=len(golden_spec.words(3)))
            ),
            anchor_golden,
        ),
    ]
    for f, anchor in fixtures:
        ftilde, h = reduce_cocycle(f, anchor)
        fw = WindowFunction.from_cylinder(ftilde)
        for n in range(1, 9):
            lhs = fw.birkhoff(n) - f.birkhoff(n)
            rhs = h.shift_observe(n) - h
            assert (lhs - rhs).max_abs() <= 5e-12


def test_reduce_preserves_mean_and_drift(golden_spec, anchor_golden, parry):
    f = geometric_window(golden_spec, 4)
    f = f - f.integrate(parry).real
    ftilde, h = reduce_cocycle(f, anchor_golden)
    fw = WindowFunction.from_cylinder(ftilde)
    assert abs(fw.integrate(parry)) <= 1e-12

    # stationarity lets the two-sided lag sums run through the one-sided
    # engine on f∘σ^P, a coboundary-shifted alias with different cylinder
    # data than the reduced ftilde
    alias = f.shift_observe(f.past).to_cylinder()
    omega_two_sided = drift_green_kubo(parry, alias)
    omega_reduced = drift_green_kubo(parry, ftilde)
    assert omega_reduced == pytest.approx(omega_two_sided, abs=1e-8)


def test_reduce_rejects_complex(golden_spec, anchor_golden):
    f = WindowFunction(golden_spec, 1, 1, [1j, 0.0, 0.0])
    with pytest.raises(ValueError, match="real"):
        reduce_cocycle(f, anchor_golden)


# ------------------------------------------------------------- conjugation


def test_conjugate_zero_transfer_is_identity(full_shift_spec):
    s = SkewObservable(
        full_shift_spec,
        [
            (
                WindowFunction(full_shift_spec, 1, 1, [1.0, -2.0, 0.5, 3.0]),
                GaussPoly.gaussian(mean=0.2),
            )
        ],
    )
    zero = WindowFunction.constant(full_shift_spec, 0.0)
    out = conjugate_observable(s, zero)
    for w in full_shift_spec.words(2):
        for t in (-1.1, 0.0, 0.8):
            assert out.evaluate(w, t, 1) == pytest.approx(
                s.evaluate(w, t, 1), abs=1e-14
            )


def test_conjugate_pointwise(full_shift_spec, anchor_full):
    rng = np.random.default_rng(29)
    s = SkewObservable(
        full_shift_spec,
        [
            (
                WindowFunction(full_shift_spec, 1, 1, rng.normal(size=4)),
                GaussPoly.gaussian(sigma=1.2),
            ),
            (
                WindowFunction(full_shift_spec, 0, 1, rng.normal(size=2)),
                GaussPoly.hermite(3, scale=0.7),
            ),
        ],
    )
    _, h = reduce_cocycle(r1_two_sided(full_shift_spec), anchor_full)
    out = conjugate_observable(s, h)
    wide = max(out.past_depth, s.past_depth, h.past)
    fut = max(out.future_depth, s.future_depth, h.future)
    for w in full_shift_spec.words(wide + fut):
        hv = h.evaluate(w, wide).real
        for t in (-1.7, -0.3, 0.6, 2.4):
            assert out.evaluate(w, t, wide) == pytest.approx(
                s.evaluate(w, t - hv, wide), abs=1e-13
            )


def test_conjugate_preserves_integral(full_shift_spec, anchor_full, bernoulli):
    rng = np.random.default_rng(31)
    s = SkewObservable(
        full_shift_spec,
        [
            (
                WindowFunction(full_shift_spec, 1, 1, rng.normal(size=4)),
                GaussPoly.gaussian(mean=-0.3, sigma=0.9),
            ),
            (
                WindowFunction(full_shift_spec, 1, 0, rng.normal(size=2)),
                GaussPoly.hermite(4),
            ),
        ],
    )
    _, h = reduce_cocycle(r1_two_sided(full_shift_spec), anchor_full)
    out = conjugate_observable(s, h)
    assert out.nu_integral(bernoulli) == pytest.approx(
        s.nu_integral(bernoulli), abs=1e-12
    )


def test_conjugate_rejects_complex_transfer(full_shift_spec):
    s = SkewObservable(
        full_shift_spec,
        [(WindowFunction(full_shift_spec, 0, 1, [1.0, 0.0]), GaussPoly.gaussian())],
    )
    h = WindowFunction(full_shift_spec, 0, 1, [1j, 0.0])
    with pytest.raises(ValueError, match="real"):
        conjugate_observable(s, h)


def test_fiber_family_shift_cap():
    # shifts stay exact inside the algebra; the cap sits at construction
    with pytest.raises(ValueError, match="hermite"):
        GaussPoly.hermite(17)
