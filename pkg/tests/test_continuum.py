import fractions
import math

import numpy as np
import pytest

from blimpq.continuum import (
    InconsistentGearTrain,
    WorkspaceExceeded,
    arc_to_q,
    cable_deviations,
    cable_lengths,
    clamp_to_workspace,
    make_arm_spec,
    motors_from_q_rates,
    q_rates_from_motors,
    q_to_arc,
    reel_speeds,
    se3_transform,
    tip_from_q,
    tip_jacobian,
    workspace_radius,
)

L, D = 0.30, 0.04


def _random_offsets(count, seed, low=0.0, high=0.999):
    rng = np.random.default_rng(seed)
    radius = workspace_radius(D) * rng.uniform(low, high, count)
    angle = rng.uniform(0.0, 2.0 * math.pi, count)
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def test_cable_deviations_sum_to_zero():
    for delta in _random_offsets(10000, seed=1):
        assert abs(sum(cable_deviations(delta).deviations)) <= 1e-12


def test_cable_lengths_add_the_arm_length():
    lengths = cable_lengths((0.01, -0.02), L)
    deviations = cable_deviations((0.01, -0.02)).deviations
    assert lengths == pytest.approx([L + dl for dl in deviations])
    assert cable_deviations((0.01, 0.0)).deviations[0] == -0.01


def test_arc_round_trip():
    for delta in _random_offsets(10000, seed=2):
        arc = q_to_arc(delta, D)
        assert 0.0 <= arc.phi_bend < 2.0 * math.pi
        assert arc.gamma <= math.pi / 2.0
        back = arc_to_q(arc.gamma, arc.phi_bend, D)
        assert np.max(np.abs(np.subtract(back, delta))) <= 1e-12


def test_straight_arm_has_no_bending_direction():
    arc = q_to_arc((0.0, 0.0), D)
    assert arc.gamma == 0.0
    assert arc.phi_bend == 0.0


def test_offset_beyond_workspace_is_rejected():
    with pytest.raises(WorkspaceExceeded) as ctx:
        q_to_arc((0.07, 0.0), D)
    assert ctx.value.limit == pytest.approx(D * math.pi / 2.0)
    assert "exceeds workspace radius" in str(ctx.value)


@pytest.mark.parametrize(
    "delta, expected, clamped",
    [
        ((0.01, 0.02), (0.01, 0.02), False),
        ((0.1, 0.0), (D * math.pi / 2.0, 0.0), True),
        ((0.0, -0.2), (0.0, -D * math.pi / 2.0), True),
    ],
)
def test_clamp_to_workspace(delta, expected, clamped):
    result, saturated = clamp_to_workspace(delta, D)
    assert saturated is clamped
    assert result == pytest.approx(expected)


def test_straight_arm_tip():
    assert tip_from_q((0.0, 0.0), L, D) == pytest.approx([0.0, 0.0, L])


def test_quarter_circle_tip():
    tip = tip_from_q((D * math.pi / 2.0, 0.0), L, D)
    assert tip == pytest.approx([2.0 * L / math.pi, 0.0, 2.0 * L / math.pi])


def test_tip_is_continuous_across_series_threshold():
    below = tip_from_q((0.999e-4 * D, 0.0), L, D)
    above = tip_from_q((1.001e-4 * D, 0.0), L, D)
    assert np.max(np.abs(below - above)) < 1e-9


def test_tip_stays_on_the_arc():
    # The tip of a circular arc of length L lies at chord 2(L/γ)sin(γ/2).
    for delta in _random_offsets(200, seed=3, low=0.01):
        gamma = math.hypot(*delta) / D
        chord = 2.0 * L / gamma * math.sin(gamma / 2.0)
        assert np.linalg.norm(tip_from_q(delta, L, D)) == pytest.approx(
            chord, rel=1e-12
        )


def test_tip_jacobian_matches_central_differences():
    h = 1e-7
    for delta in _random_offsets(100, seed=4, low=0.01, high=0.95):
        analytic = tip_jacobian(delta, L, D)
        numeric = np.empty((3, 2))
        for i in range(2):
            step = np.zeros(2)
            step[i] = h
            numeric[:, i] = (
                tip_from_q(delta + step, L, D)
                - tip_from_q(delta - step, L, D)
            ) / (2.0 * h)
        error = np.linalg.norm(analytic - numeric) / np.linalg.norm(analytic)
        assert error < 1e-6


def test_tip_jacobian_at_straight_arm():
    assert tip_jacobian((0.0, 0.0), L, D) == pytest.approx(
        np.array([[L / (2 * D), 0.0], [0.0, L / (2 * D)], [0.0, 0.0]])
    )


def test_inconsistent_gear_train():
    with pytest.raises(InconsistentGearTrain) as ctx:
        make_arm_spec(tooth_counts=(20, 10, 20, 20, 20, 20, 20))
    assert "n_x/n_1=2" in str(ctx.value)


@pytest.mark.parametrize(
    "changes",
    [
        {"L": 0.0},
        {"d": -1.0},
        {"tooth_counts": (20,) * 6},
        {"rate_sign_y": 0.5},
    ],
)
def test_invalid_arm_spec(changes):
    with pytest.raises(ValueError):
        make_arm_spec(**changes)


def test_reel_speeds_are_exact_for_rational_inputs():
    spec = make_arm_spec(tooth_counts=(40, 20, 30, 15, 16, 8, 12))
    assert spec.k == 2
    first, second, third = reel_speeds(
        fractions.Fraction(3), fractions.Fraction(5), spec
    )
    assert (first, second, third) == (-6, -8, 2)
    assert all(isinstance(v, fractions.Fraction) for v in (second, third))


def test_reel_speeds_average_the_inputs():
    spec = make_arm_spec()
    x = fractions.Fraction(7, 3)
    first, second, third = reel_speeds(x, fractions.Fraction(0), spec)
    assert second == third == first / 2 == -x / 2


def test_q_rates_are_decoupled(arm):
    assert q_rates_from_motors(1.0, 0.0, arm)[0] == (
        q_rates_from_motors(1.0, 5.0, arm)[0]
    )
    assert q_rates_from_motors(0.0, 1.0, arm)[1] == (
        q_rates_from_motors(7.0, 1.0, arm)[1]
    )
    assert q_rates_from_motors(1.0, 0.0, arm)[1] == 0.0
    assert q_rates_from_motors(0.0, 1.0, arm)[0] == 0.0


def test_q_rate_scale(arm):
    rate_x, rate_y = q_rates_from_motors(10.0, 10.0, arm)
    assert rate_x == pytest.approx(arm.k * arm.r_reel * 10.0)
    assert rate_y == pytest.approx(arm.k * arm.r_reel * 10.0 / math.sqrt(3))


def test_motors_from_q_rates_inverts(arm):
    flipped = arm._replace(rate_sign_y=-1.0)
    for spec in (arm, flipped):
        motors = motors_from_q_rates(0.03, -0.02, spec)
        assert q_rates_from_motors(*motors, spec=spec) == pytest.approx(
            (0.03, -0.02)
        )
    assert q_rates_from_motors(0.0, 1.0, flipped)[1] < 0.0


def test_max_rates(arm):
    assert arm.max_rates[0] == pytest.approx(0.2)
    assert arm.workspace_radius == pytest.approx(D * math.pi / 2.0)


def test_se3_transform():
    gamma, phi = 0.8, 2.1
    transform = se3_transform(gamma, phi, L)
    rotation = transform[:3, :3]
    assert rotation @ rotation.T == pytest.approx(np.eye(3))
    assert np.linalg.det(rotation) == pytest.approx(1.0)
    assert transform[3] == pytest.approx([0.0, 0.0, 0.0, 1.0])
    tip = tip_from_q(arc_to_q(gamma, phi, D), L, D)
    assert transform[:3, 3] == pytest.approx(tip)
    assert np.max(np.abs(transform[:3, 3] - tip)) <= 1e-12


def test_se3_transform_without_bending_direction():
    gamma = 0.6
    c, s = math.cos(gamma), math.sin(gamma)
    rotation = se3_transform(gamma, 0.0, L)[:3, :3]
    assert np.array_equal(
        rotation, np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    )


def test_se3_transform_of_straight_arm():
    transform = se3_transform(0.0, 1.3, L)
    assert transform[:3, :3] == pytest.approx(np.eye(3))
    assert transform[:3, 3] == pytest.approx([0.0, 0.0, L])


def test_se3_transform_rejects_overbending():
    with pytest.raises(WorkspaceExceeded):
        se3_transform(2.0, 0.0, L)
