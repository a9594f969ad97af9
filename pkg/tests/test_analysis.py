import math

import numpy as np
import pytest

from blimpq.analysis import (
    DegenerateTrajectory,
    EmptySeries,
    InsufficientRuns,
    NoRoot,
    approximation_error_sweep,
    arm_study,
    attitude_spread,
    calibrate_power_model,
    chord_length,
    confidence_ellipse,
    constraint_residual,
    cum_rmse,
    ellipse_coverage,
    equilibrium_closed_form,
    equilibrium_exact,
    make_arm_study,
    repeatability_stats,
    thrust_load,
    trajectory_metrics,
)
from blimpq.dynamics import GRAM_FORCE, make_state
from blimpq.structs import TrajectoryLog, make_record

RADIUS_TWO_SHARE = 1.0 - math.exp(-2.0)


@pytest.fixture(scope="module")
def study_params():
    return make_arm_study(L=0.40, h=0.30, ma=0.030, ma2=0.015)


def test_arm_study_gains(study_params):
    study = arm_study(study_params)
    assert study.K_cont == pytest.approx(0.57, abs=0.005)
    assert study.K_rig == pytest.approx(0.47, abs=0.005)
    assert math.degrees(study.phi_cont) == pytest.approx(34.2, abs=0.1)
    assert math.degrees(study.phi_rig) == pytest.approx(28.2, abs=0.1)
    assert study.ratio == pytest.approx(0.82, abs=0.01)
    assert study.improvement == pytest.approx(0.213, abs=0.005)


def test_heavier_joint_widens_the_gap():
    light = arm_study(make_arm_study(ma2=0.005))
    heavy = arm_study(make_arm_study(ma2=0.030))
    assert light.K_cont == heavy.K_cont
    assert heavy.improvement > light.improvement


@pytest.mark.parametrize("changes", [{"L": 0.0}, {"ma": -0.01}, {"h": 0}])
def test_invalid_arm_study(changes):
    with pytest.raises(ValueError):
        make_arm_study(**changes)


@pytest.mark.parametrize("kind", ["rigid", "continuum"])
@pytest.mark.parametrize("theta_deg", [-60, -37.5, -10, -0.001, 0.5, 25, 60])
def test_exact_equilibrium_matches_the_closed_form(
    study_params, kind, theta_deg
):
    theta = math.radians(theta_deg)
    phi = equilibrium_exact(theta, study_params, kind)
    assert phi == pytest.approx(
        equilibrium_closed_form(theta, study_params, kind), abs=1e-10
    )
    assert constraint_residual(phi, theta, study_params, kind) == (
        pytest.approx(0.0, abs=1e-12)
    )


@pytest.mark.parametrize("kind", ["rigid", "continuum"])
def test_roll_opposes_pitch(study_params, kind):
    theta = math.radians(30.0)
    assert equilibrium_exact(theta, study_params, kind) < 0
    assert equilibrium_exact(-theta, study_params, kind) > 0
    assert equilibrium_exact(0.0, study_params, kind) == 0.0


def test_continuum_arm_rolls_further(study_params):
    theta = math.radians(45.0)
    continuum = equilibrium_exact(theta, study_params, "continuum")
    rigid = equilibrium_exact(theta, study_params, "rigid")
    assert abs(continuum) > abs(rigid)


def test_equilibrium_outside_the_operating_range(study_params):
    with pytest.raises(NoRoot) as ctx:
        equilibrium_exact(math.radians(75.0), study_params, "rigid")
    assert ctx.value.arm_kind == "rigid"
    assert "75.000 deg" in str(ctx.value)


def test_unknown_arm_kind(study_params):
    with pytest.raises(ValueError):
        equilibrium_exact(0.3, study_params, "telescopic")
    with pytest.raises(ValueError):
        equilibrium_closed_form(0.3, study_params, "telescopic")


def test_linearization_error(study_params):
    sweep = approximation_error_sweep(study_params)
    assert 0 < sweep.continuum <= math.radians(4.0)
    assert 0 < sweep.rigid <= math.radians(4.0)
    narrow = approximation_error_sweep(study_params, limit=math.radians(10))
    assert max(narrow) < math.radians(0.3)


def test_sweep_needs_points(study_params):
    with pytest.raises(ValueError):
        approximation_error_sweep(study_params, n_points=5)


def test_chord_length():
    assert chord_length(0.0, 0.4) == 0.4
    assert chord_length(math.pi, 0.4) == pytest.approx(0.8 / math.pi)
    assert chord_length(1e-9, 0.4) == pytest.approx(0.4)


def test_cum_rmse_of_a_constant_error():
    result = cum_rmse(np.full(5, 2.0), dt=0.5)
    assert list(result) == pytest.approx([1.0, 2.0, 3.0, 4.0, 5.0])
    running = cum_rmse([3.0, 4.0], cumulative=False)
    assert list(running) == pytest.approx([3.0, math.sqrt(12.5)])


def test_cum_rmse_against_a_reference():
    series = np.array([1.0, 2.0, 3.0])
    assert list(cum_rmse(series, series)) == [0.0, 0.0, 0.0]


def test_cum_rmse_is_nondecreasing():
    rng = np.random.default_rng(3)
    result = cum_rmse(rng.normal(size=200), dt=0.1)
    assert np.all(np.diff(result) >= 0)


def test_cum_rmse_of_nothing():
    with pytest.raises(EmptySeries):
        cum_rmse([])


def _circle_log(radius=2.0, rate=0.5, duration=10.0, interval=0.1):
    records = []
    for k in range(int(round(duration / interval)) + 1):
        t = k * interval
        angle = rate * t
        state = make_state(
            p=(radius * math.cos(angle), radius * math.sin(angle), 0.0),
            v=(
                -radius * rate * math.sin(angle),
                radius * rate * math.cos(angle),
                0.0,
            ),
        )
        records.append(
            make_record(
                t,
                state,
                0.0,
                np.zeros(6),
                charge_mah=0.1 * t,
                energy_mwh=0.2 * t,
            )
        )
    return TrajectoryLog({"dt": interval, "decimation": 1}, records)


def test_metrics_of_a_circle():
    metrics = trajectory_metrics(_circle_log())
    assert metrics.duration == pytest.approx(10.0)
    assert metrics.path_length == pytest.approx(10.0, rel=1e-3)
    assert metrics.horizontal_speed_std == pytest.approx(0.0, abs=1e-12)
    assert metrics.vertical_speed_std == 0.0
    assert metrics.curvature_mean == pytest.approx(0.5, rel=1e-3)
    assert metrics.curvature_std == pytest.approx(0.0, abs=1e-6)
    assert metrics.power_rate == pytest.approx(6.0)
    assert metrics.specific_energy == pytest.approx(
        2.0 / metrics.path_length
    )


def test_metrics_of_a_short_log():
    log = _circle_log(duration=0.1)
    with pytest.raises(DegenerateTrajectory) as ctx:
        trajectory_metrics(log)
    assert ctx.value.samples == 2


def test_metrics_of_a_hovering_blimp():
    log = _circle_log(radius=0.0)
    with pytest.raises(DegenerateTrajectory):
        trajectory_metrics(log)


def test_confidence_ellipse_axes():
    ellipse = confidence_ellipse(np.diag([4.0, 1.0]), scale=2.0)
    assert ellipse.semi_major == pytest.approx(4.0)
    assert ellipse.semi_minor == pytest.approx(2.0)
    assert math.sin(ellipse.angle) == pytest.approx(0.0, abs=1e-12)
    assert ellipse.radius == 2.0


def test_default_ellipse_holds_ninety_five_percent():
    ellipse = confidence_ellipse(np.eye(2))
    assert ellipse.radius == pytest.approx(math.sqrt(-2.0 * math.log(0.05)))
    assert ellipse.radius == pytest.approx(2.4477, abs=1e-4)


def test_confidence_level_picks_the_radius():
    ellipse = confidence_ellipse(np.eye(2), confidence=RADIUS_TWO_SHARE)
    assert ellipse.radius == pytest.approx(2.0)
    with pytest.raises(ValueError):
        confidence_ellipse(np.eye(2), confidence=1.0)
    with pytest.raises(ValueError):
        confidence_ellipse(np.eye(2), scale=0.0)


def test_two_sigma_ellipse_coverage():
    rng = np.random.default_rng(11)
    samples = rng.multivariate_normal(
        [0.1, -0.05], [[0.004, 0.001], [0.001, 0.002]], size=20000
    )
    spread = attitude_spread(samples)
    assert spread.sigma_theta == pytest.approx(math.sqrt(0.004), rel=0.05)
    assert spread.sigma_phi == pytest.approx(math.sqrt(0.002), rel=0.05)
    assert ellipse_coverage(samples, spread) == pytest.approx(0.95, abs=0.03)


def test_attitude_ellipse_coverage_on_independent_axes():
    rng = np.random.default_rng(3)
    samples = np.column_stack(
        [rng.normal(0.0, 0.02, 100000), rng.normal(0.0, 0.01, 100000)]
    )
    spread = attitude_spread(samples)
    assert ellipse_coverage(samples, spread) == pytest.approx(0.95, abs=0.03)


def test_fixed_radius_ellipse_coverage():
    rng = np.random.default_rng(11)
    samples = rng.multivariate_normal(
        [0.1, -0.05], [[0.004, 0.001], [0.001, 0.002]], size=20000
    )
    spread = attitude_spread(samples, scale=2.0)
    assert ellipse_coverage(samples, spread) == pytest.approx(
        RADIUS_TWO_SHARE, abs=0.01
    )


def test_spread_needs_two_runs():
    with pytest.raises(InsufficientRuns):
        attitude_spread([[0.1, 0.2]])


def test_repeatability_takes_the_nearest_sample():
    logs = [_circle_log(), _circle_log(radius=2.5)]
    result = repeatability_stats(logs, [1.02, 5.0])
    assert len(result) == 2
    assert result[0].sigma_theta == 0.0
    with pytest.raises(InsufficientRuns) as ctx:
        repeatability_stats(logs[:1], [1.0])
    assert ctx.value.runs == 1


def test_thrust_load():
    assert thrust_load([4.0, -1.0]) == pytest.approx(9.0)
    assert thrust_load([]) == 0.0


def test_power_calibration_reproduces_the_drain_rates():
    model = calibrate_power_model()
    q_mode = [9.0 * GRAM_FORCE]
    omni = [4.5 * GRAM_FORCE, 4.5 * GRAM_FORCE, 6.7 * GRAM_FORCE]
    assert model.current(1, thrust_load(q_mode), 0.1) / 60.0 == (
        pytest.approx(5.6)
    )
    assert model.current(3, thrust_load(omni), 0.0) / 60.0 == (
        pytest.approx(12.5)
    )
    assert model.idle > 0
    assert model.thrust_coefficient > 0


def test_power_calibration_rejects_degenerate_modes():
    with pytest.raises(ValueError):
        calibrate_power_model(loads=((9.0,), (9.0,)), duties=(0.0, 0.0))
