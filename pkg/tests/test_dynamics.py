import math
import warnings

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from blimpq.dynamics import (
    GRAM_FORCE,
    ActuationCommand,
    Environment,
    GimbalProximity,
    NoTrimFound,
    NumericalConditioning,
    WorkspaceSaturated,
    derivative,
    effective_inertia,
    euler_rate_matrix,
    first_moment,
    integrate,
    make_state,
    make_vehicle_params,
    mass_matrix,
    mechanical_energy,
    moving_mass_offset,
    rotation_from_euler,
    skew,
    state_from_vector,
    state_vector,
    static_trim,
    step,
    wrap_angle,
)

CALM = Environment(wind=np.zeros(3), disturbance=None)


def _axis_rotation(axis, angle):
    c, s = math.cos(angle), math.sin(angle)
    if axis == "x":
        return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])
    if axis == "y":
        return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def test_rotation_composes_axis_rotations():
    eta = np.radians([10.0, 20.0, 30.0])
    expected = (
        _axis_rotation("z", eta[2])
        @ _axis_rotation("y", eta[1])
        @ _axis_rotation("x", eta[0])
    )
    assert np.max(np.abs(rotation_from_euler(eta) - expected)) < 1e-12


def test_rotation_matches_scipy():
    rng = np.random.default_rng(5)
    for _ in range(200):
        eta = rng.uniform([-math.pi, -1.5, -math.pi], [math.pi, 1.5, math.pi])
        R = rotation_from_euler(eta)
        expected = Rotation.from_euler("ZYX", eta[::-1]).as_matrix()
        assert np.max(np.abs(R - expected)) < 1e-12
        assert np.max(np.abs(R.T @ R - np.eye(3))) < 1e-12
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)


def test_euler_rates_of_level_flight():
    assert euler_rate_matrix((0.0, 0.0, 0.3)) == pytest.approx(np.eye(3))


@pytest.mark.parametrize("theta", [math.pi / 2, -math.pi / 2 + 1e-4])
def test_gimbal_proximity(theta):
    with pytest.raises(GimbalProximity) as ctx:
        euler_rate_matrix((0.0, theta, 0.0))
    assert ctx.value.theta == theta


def test_skew_is_the_cross_product():
    a, b = np.array([1.0, -2.0, 0.5]), np.array([0.3, 0.1, -4.0])
    assert skew(a) @ b == pytest.approx(np.cross(a, b))


def test_moving_mass_hangs_below_the_base(params):
    ra = moving_mass_offset(params, (0.0, 0.0))
    assert ra == pytest.approx([0.0, 0.0, params.h + params.arm.L])
    lg = first_moment(params, ra)
    assert lg == pytest.approx(params.m0 * params.r0 + params.ma * ra)


def test_random_mass_matrices_are_positive_definite(arm):
    rng = np.random.default_rng(6)
    failures = 0
    for _ in range(10000):
        J = np.diag(rng.uniform(0.005, 0.05, 3))
        off = rng.uniform(-0.001, 0.001, 3)
        J[0, 1] = J[1, 0] = off[0]
        J[0, 2] = J[2, 0] = off[1]
        J[1, 2] = J[2, 1] = off[2]
        params = make_vehicle_params(
            arm,
            m0=rng.uniform(0.05, 0.2),
            ma=rng.uniform(0.01, 0.2),
            r0=rng.uniform(-0.05, 0.05, 3),
            J=J,
        )
        ra = rng.uniform(-0.7, 0.7, 3)
        R = Rotation.from_euler(
            "ZYX", rng.uniform(-math.pi, math.pi, 3)
        ).as_matrix()
        M = mass_matrix(params, R, ra)
        J_eff = effective_inertia(params.J, params.ma, ra)
        total = params.m0 + params.ma
        lg_x = skew(first_moment(params, ra))
        schur = J_eff + lg_x @ lg_x / total
        if not (
            np.linalg.eigvalsh(J_eff).min() > 0
            and np.linalg.eigvalsh(schur).min() > 0
            and np.linalg.det(M) > 0
            and np.allclose(M, M.T)
        ):
            failures += 1
    assert failures == 0


def test_ill_conditioned_mass_matrix(params):
    ra = moving_mass_offset(params, (0.0, 0.0))
    with pytest.raises(NumericalConditioning) as ctx:
        mass_matrix(params, np.eye(3), ra, max_condition=1.0)
    assert ctx.value.condition > 1.0


def test_free_fall(arm):
    params = make_vehicle_params(arm, Fb=0.0)
    deriv = derivative(make_state(), ActuationCommand(), params, CALM)
    assert np.linalg.norm(deriv.domega) < 1e-10
    assert deriv.dv == pytest.approx([0.0, 0.0, params.g])


def test_neutral_float_at_rest(neutral_params):
    deriv = derivative(make_state(), ActuationCommand(), neutral_params)
    assert np.linalg.norm(deriv.dv) < 1e-10
    assert np.linalg.norm(deriv.domega) < 1e-10


def test_net_weight_sinks(params):
    deriv = derivative(make_state(), ActuationCommand(), params)
    assert deriv.dv[2] > 0.0


def test_thrust_pushes_forward(neutral_params):
    cmd = ActuationCommand(F=5.0 * GRAM_FORCE)
    deriv = derivative(make_state(), cmd, neutral_params)
    assert deriv.dv[0] > 0.0


def test_forward_mass_pitches_nose_down(neutral_params):
    state = make_state(q_arm=(0.02, 0.0))
    deriv = derivative(state, ActuationCommand(), neutral_params)
    assert deriv.domega[1] < 0.0


def test_arm_rate_is_integrated(neutral_params):
    cmd = ActuationCommand(ddelta=(0.01, -0.02))
    deriv = derivative(make_state(), cmd, neutral_params)
    assert deriv.dq_arm == pytest.approx([0.01, -0.02])


def test_state_vector_layout():
    state = make_state(
        p=(1, 2, 3), eta=(4, 5, 6), v=(7, 8, 9), omega=(10, 11, 12),
        q_arm=(13, 14),
    )
    x = state_vector(state)
    assert list(x) == [1, 2, 3, 4, 5, 6, 13, 14, 7, 8, 9, 10, 11, 12]
    back = state_from_vector(x)
    assert all(
        np.array_equal(a, b) for a, b in zip(back, state)
    )


@pytest.mark.parametrize(
    "angle, expected",
    [
        (math.pi, math.pi),
        (-math.pi, math.pi),
        (3 * math.pi, math.pi),
        (0.5, 0.5),
        (-0.5 - 2 * math.pi, -0.5),
    ],
)
def test_wrap_angle(angle, expected):
    assert wrap_angle(angle) == pytest.approx(expected)


def _tilted_state():
    return make_state(
        eta=(0.3, 0.2, 0.1),
        v=(0.05, -0.02, 0.01),
        omega=(0.1, -0.2, 0.05),
        q_arm=(0.02, -0.01),
    )


def test_energy_is_conserved(neutral_params):
    state = _tilted_state()
    cmd = ActuationCommand()
    start = mechanical_energy(state, neutral_params)
    for _ in range(10000):
        state = integrate(state, cmd, neutral_params, CALM, 0.001).state
    drift = abs(mechanical_energy(state, neutral_params) - start)
    assert drift / abs(start) < 1e-6


def _flow(params, dt, duration=5.0):
    state = _tilted_state()
    cmd = ActuationCommand()
    for _ in range(int(round(duration / dt))):
        state = integrate(state, cmd, params, CALM, dt).state
    return state_vector(state)


def test_rk4_is_fourth_order(neutral_params):
    dt = 0.02
    reference = _flow(neutral_params, dt / 8.0)
    errors = [
        np.linalg.norm(_flow(neutral_params, h) - reference)
        for h in (dt, dt / 2.0)
    ]
    assert 12.0 <= errors[0] / errors[1] <= 20.0


def test_integrate_rejects_bad_step(neutral_params):
    with pytest.raises(ValueError):
        integrate(make_state(), ActuationCommand(), neutral_params, CALM, 0.0)


def test_integrate_clamps_the_arm(neutral_params):
    radius = neutral_params.arm.workspace_radius
    state = make_state(q_arm=(radius, 0.0))
    cmd = ActuationCommand(ddelta=(0.1, 0.0))
    stepped = integrate(state, cmd, neutral_params, CALM, 0.01)
    assert stepped.saturated
    assert math.hypot(*stepped.state.q_arm) == pytest.approx(radius)


def test_step_warns_on_saturation(neutral_params):
    radius = neutral_params.arm.workspace_radius
    state = make_state(q_arm=(0.0, -radius))
    cmd = ActuationCommand(ddelta=(0.0, -0.1))
    with pytest.warns(WorkspaceSaturated):
        step(state, cmd, neutral_params, CALM, 0.01)


def test_step_is_quiet_inside_the_workspace(neutral_params):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        step(make_state(), ActuationCommand(), neutral_params, CALM, 0.01)


def test_yaw_stays_wrapped(neutral_params):
    state = make_state(eta=(0.0, 0.0, math.pi - 1e-3), omega=(0.0, 0.0, 1.0))
    new = integrate(state, ActuationCommand(), neutral_params, CALM, 0.01)
    assert -math.pi < new.state.eta[2] <= math.pi
    assert new.state.eta[2] < 0.0


def test_neutral_static_trim_balances_the_arm(neutral_params):
    q_arm = (0.02, 0.0)
    state = static_trim(neutral_params, q_arm, tolerance=1e-12)
    deriv = derivative(state, ActuationCommand(), neutral_params)
    assert np.linalg.norm(np.concatenate([deriv.dv, deriv.domega])) < 1e-10
    lg = first_moment(
        neutral_params, moving_mass_offset(neutral_params, q_arm)
    )
    assert state.eta[1] == pytest.approx(math.atan2(-lg[0], lg[2]))
    assert state.eta[0] == pytest.approx(0.0, abs=1e-9)


def test_trim_matches_a_damped_time_march(neutral_params):
    q_arm = (-0.015, 0.0)
    trimmed = static_trim(neutral_params, q_arm)
    damped = neutral_params._replace(
        aero=_Damping(np.array([-0.05, -0.05, -0.05]))
    )
    state = make_state(q_arm=q_arm)
    for _ in range(3000):
        state = integrate(state, ActuationCommand(), damped, CALM, 0.01).state
    assert state.eta[1] == pytest.approx(trimmed.eta[1], abs=1e-4)


class _Damping(object):
    """Rate damping only; stands in for an aerodynamic model."""

    def __init__(self, damping):
        self.damping = damping

    def body_wrench(self, v_air_body, omega):
        return _Wrench(np.zeros(3), self.damping * omega)


class _Wrench(object):
    def __init__(self, force, torque):
        self.force = force
        self.torque = torque


def test_trim_gives_up(params):
    with pytest.raises(NoTrimFound) as ctx:
        static_trim(params, (0.0, 0.0), max_iterations=1)
    assert ctx.value.iterations <= 1
    assert ctx.value.residual > 1e-8


def test_heavy_vehicle_without_aero_has_no_trim(arm):
    default = make_vehicle_params(arm)
    weight = (default.m0 + default.ma) * default.g
    margin = weight - default.Fb
    assert margin > 0
    heavy = make_vehicle_params(arm, Fb=weight - 10.0 * margin)
    assert heavy.aero is None
    with pytest.raises(NoTrimFound) as ctx:
        static_trim(heavy, (0.0, 0.0))
    assert ctx.value.residual > 0.1


def test_unknown_trim_mode(params):
    with pytest.raises(ValueError):
        static_trim(params, (0.0, 0.0), mode="lateral")


@pytest.mark.parametrize(
    "changes",
    [{"m0": 0.0}, {"ma": -1.0}, {"J": (0.01, -0.02, 0.01)}, {"Fb": -1.0}],
)
def test_invalid_vehicle_params(arm, changes):
    with pytest.raises(ValueError):
        make_vehicle_params(arm, **changes)


def test_actuation_defaults():
    cmd = ActuationCommand()
    assert cmd.F == 0.0
    assert list(cmd.ddelta) == [0.0, 0.0]
    assert cmd.force is None and cmd.torque is None
