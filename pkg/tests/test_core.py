import math

import numpy as np
import pytest

from oscillab.core import (
    MixingAngle,
    PhasePair,
    TransitionResult,
    TwoStateAmplitudes,
    mixing_matrix,
    propagate,
    transition_probability_chain,
    transition_probability_closed,
)

RNG = np.random.default_rng(20240811)


def test_mixing_matrix_identity_at_zero():
    assert np.allclose(mixing_matrix(MixingAngle(0.0)), np.eye(2), atol=1e-15)


def test_mixing_matrix_45_degrees():
    r = math.sqrt(0.5)
    expected = np.array([[r, -r], [r, r]])
    assert np.allclose(mixing_matrix(MixingAngle(math.pi / 4)), expected, atol=1e-15)


def test_mixing_matrix_orthogonal_random():
    for theta in RNG.uniform(0, math.pi / 2, size=100):
        u = mixing_matrix(MixingAngle(theta))
        assert np.max(np.abs(u @ u.T - np.eye(2))) < 1e-12


def test_mixing_angle_canonicalization():
    assert MixingAngle(math.pi / 3).theta == pytest.approx(math.pi / 3)
    # reflection about pi/2 and wrapping preserve sin^2(2 theta)
    for raw in (-0.3, 2.0, math.pi + 0.4, 5 * math.pi / 2):
        folded = MixingAngle(raw)
        assert 0.0 <= folded.theta <= math.pi / 2
        assert math.sin(2 * folded.theta) ** 2 == pytest.approx(
            math.sin(2 * raw) ** 2, abs=1e-12
        )


def test_mixing_angle_rejects_nonfinite():
    with pytest.raises(ValueError):
        MixingAngle(math.nan)


def test_propagate_zero_phase_is_identity():
    state = TwoStateAmplitudes(a1=0.6, a2=0.8j)
    out = propagate(state, PhasePair(0.0, 0.0))
    assert out.a1 == pytest.approx(state.a1)
    assert out.a2 == pytest.approx(state.a2)


def test_propagate_preserves_norm():
    state = TwoStateAmplitudes(a1=complex(0.6, 0.0), a2=complex(0.0, 0.8))
    for _ in range(50):
        phases = PhasePair(*RNG.uniform(-10, 10, size=2))
        state = propagate(state, phases)
        assert abs(state.norm_sq - 1.0) < 1e-12


def test_propagate_phase_on_empty_component():
    state = TwoStateAmplitudes(a1=1.0, a2=0.0)
    out = propagate(state, PhasePair(0.0, math.pi))
    assert out.a1 == pytest.approx(1.0)
    assert abs(out.a2) == 0.0


def test_propagate_global_phase_unobservable():
    state = TwoStateAmplitudes(a1=math.sqrt(0.5), a2=math.sqrt(0.5))
    a = propagate(state, PhasePair(0.3, 1.7))
    b = propagate(state, PhasePair(0.3 + 2.1, 1.7 + 2.1))
    assert abs(a.a1) ** 2 == pytest.approx(abs(b.a1) ** 2, abs=1e-12)
    assert abs(a.a2) ** 2 == pytest.approx(abs(b.a2) ** 2, abs=1e-12)


def test_chain_maximal_mixing_half_period():
    res = transition_probability_chain(MixingAngle(math.pi / 4), PhasePair(0.0, math.pi))
    assert res.p_appear == pytest.approx(1.0, abs=1e-12)


def test_chain_no_mixing():
    for dphi in (0.1, 1.0, math.pi, 5.0):
        res = transition_probability_chain(MixingAngle(0.0), PhasePair(0.0, dphi))
        assert res.p_appear == pytest.approx(0.0, abs=1e-12)


def test_chain_30_degrees_half_period():
    res = transition_probability_chain(MixingAngle(math.pi / 6), PhasePair(0.0, math.pi))
    assert res.p_appear == pytest.approx(0.75, abs=1e-12)


def test_closed_examples():
    assert transition_probability_closed(
        MixingAngle(math.pi / 4), math.pi
    ).p_appear == pytest.approx(1.0)
    for theta in RNG.uniform(0, math.pi / 2, size=10):
        assert transition_probability_closed(MixingAngle(theta), 0.0).p_appear == 0.0


def test_chain_matches_closed_on_grid():
    thetas = np.linspace(0.0, math.pi / 2, 100)
    dphis = np.linspace(0.0, 4 * math.pi, 100)
    for theta in thetas:
        angle = MixingAngle(float(theta))
        for dphi in dphis:
            a = transition_probability_chain(angle, PhasePair(0.0, float(dphi)))
            b = transition_probability_closed(angle, float(dphi))
            assert abs(a.p_appear - b.p_appear) < 1e-12
            assert abs(a.p_survive - b.p_survive) < 1e-12


def test_chain_global_phase_invariance():
    angle = MixingAngle(0.6)
    base = transition_probability_chain(angle, PhasePair(0.0, 1.3))
    shifted = transition_probability_chain(angle, PhasePair(7.7, 1.3 + 7.7))
    assert base.p_appear == pytest.approx(shifted.p_appear, abs=1e-12)


def test_phase_sign_flip_invariance():
    angle = MixingAngle(0.5)
    plus = transition_probability_chain(angle, PhasePair(0.0, 2.1))
    minus = transition_probability_chain(angle, PhasePair(0.0, -2.1))
    assert plus.p_appear == pytest.approx(minus.p_appear, abs=1e-12)


def test_unitarity_everywhere():
    for theta in RNG.uniform(0, math.pi / 2, size=40):
        for dphi in RNG.uniform(0, 4 * math.pi, size=10):
            res = transition_probability_chain(MixingAngle(theta), PhasePair(0.0, dphi))
            assert res.p_appear + res.p_survive == pytest.approx(1.0, abs=1e-12)


def test_periodicity_in_phase():
    for theta in RNG.uniform(0, math.pi / 2, size=20):
        angle = MixingAngle(theta)
        for dphi in RNG.uniform(0, 2 * math.pi, size=5):
            a = transition_probability_closed(angle, dphi)
            b = transition_probability_closed(angle, dphi + 2 * math.pi)
            assert a.p_appear == pytest.approx(b.p_appear, abs=1e-12)


def test_mixing_symmetry():
    for theta in RNG.uniform(0, math.pi / 2, size=20):
        a = transition_probability_closed(MixingAngle(theta), 1.9)
        b = transition_probability_closed(MixingAngle(math.pi / 2 - theta), 1.9)
        assert a.p_appear == pytest.approx(b.p_appear, abs=1e-12)


def test_transition_result_clamps_rounding_only():
    assert TransitionResult(p_appear=1.0 + 5e-13, p_survive=-5e-13).p_appear == 1.0
    with pytest.raises(ValueError):
        TransitionResult(p_appear=1.1, p_survive=0.0)
