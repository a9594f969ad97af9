"""Attitude control laws, stability diagnostics and baseline actuators.

Every function here is pure; per-trajectory integral state lives in the
controllers built on top of them.
"""

import collections
import math

import numpy as np

from .continuum import (
    clamp_to_workspace,
    motors_from_q_rates,
    q_rates_from_motors,
)
from .dynamics import GRAM_FORCE, euler_rate_matrix, wrap_angle

AxisGains = collections.namedtuple("AxisGains", "kp ki kd")

ControlGains = collections.namedtuple(
    "ControlGains",
    [
        "roll",
        "pitch",
        "yaw",
        "inner",
        "lam",
        "epsilon",
        "rho_theta",
        "D_theta",
        "yaw_sign",
        "roll_limit",
    ],
)

OuterCommand = collections.namedtuple(
    "OuterCommand",
    "delta thrust roll_ref errors unclamped saturated",
)

InnerCommand = collections.namedtuple("InnerCommand", "motors ddelta")

GainReport = collections.namedtuple(
    "GainReport",
    [
        "weight_threshold",
        "weight_margin",
        "damping_margin",
        "uub_radius",
    ],
)

LyapunovReport = collections.namedtuple("LyapunovReport", "V V_dot_bound")

BaselineActuator = collections.namedtuple(
    "BaselineActuator",
    [
        "kind",
        "thrust_limit",
        "vertical_limit",
        "half_span",
        "vertical_arm",
        "vertical_bias",
        "elevator_range",
        "elevator_effectiveness",
        "pitch",
        "yaw",
    ],
)

BaselineCommand = collections.namedtuple(
    "BaselineCommand",
    "F force torque thrusters deflection errors",
)

BASELINE_KINDS = ("omni-thrust", "elevator")


def default_gains(**changes):
    gains = ControlGains(
        roll=AxisGains(0.05, 0.1, 0.04),
        pitch=AxisGains(0.05, 0.1, 0.04),
        yaw=AxisGains(2.0, 0.0, 0.5),
        inner=AxisGains(20.0, 0.0, 0.0),
        lam=2.0,
        epsilon=0.2,
        rho_theta=0.05,
        D_theta=0.052,
        yaw_sign=1.0,
        roll_limit=math.radians(20.0),
    )
    gains = gains._replace(**changes)
    problems = []
    if not (gains.pitch.kp > 0 and gains.pitch.kd > 0):
        problems.append("pitch kp and kd must be positive")
    if not gains.lam > 0:
        problems.append("lambda must be positive")
    if not gains.epsilon > 0:
        problems.append("epsilon must be positive")
    if gains.rho_theta < 0:
        problems.append("rho_theta must be non-negative")
    if gains.yaw_sign not in (1, -1, 1.0, -1.0):
        problems.append("yaw_sign must be +1 or -1")
    if problems:
        raise ValueError("; ".join(problems))
    return gains


def default_baseline(kind, **changes):
    if kind not in BASELINE_KINDS:
        raise ValueError("unknown baseline {!r}".format(kind))
    if kind == "omni-thrust":
        pitch = AxisGains(0.2, 0.02, 0.2)
        yaw = AxisGains(0.05, 0.0, 0.05)
    else:
        pitch = AxisGains(3.0, 0.5, 2.0)
        yaw = AxisGains(0.0, 0.0, 0.0)
    baseline = BaselineActuator(
        kind=kind,
        thrust_limit=30.0 * GRAM_FORCE,
        vertical_limit=30.0 * GRAM_FORCE,
        half_span=0.15,
        vertical_arm=0.30,
        vertical_bias=0.0,
        elevator_range=math.radians(45.0),
        elevator_effectiveness=-0.03,
        pitch=pitch,
        yaw=yaw,
    )
    baseline = baseline._replace(**changes)
    if min(baseline.thrust_limit, baseline.vertical_limit) <= 0:
        raise ValueError("thrust limits must be positive")
    if min(baseline.half_span, baseline.vertical_arm) <= 0:
        raise ValueError("thruster lever arms must be positive")
    if not 0 <= baseline.vertical_bias <= baseline.vertical_limit:
        raise ValueError("vertical bias must lie within the vertical limit")
    if not 0 < baseline.elevator_range <= math.radians(45.0):
        raise ValueError("elevator range must lie in (0, 45] degrees")
    return baseline


def pid_output(gains, error, integral, rate):
    """``rate`` is the derivative of the error."""
    return gains.kp * error + gains.ki * integral + gains.kd * rate


def outer_attitude_law(
    eta,
    eta_ref,
    rates,
    gains,
    radius,
    integrals=(0.0, 0.0, 0.0),
    thrust=0.0,
):
    """Moving-mass attitude law.

    ``rates`` are Euler angle rates, ``integrals`` the accumulated
    (roll, pitch, yaw) errors. A reference yaw of None leaves yaw free;
    otherwise the yaw error commands an extra roll angle, bounded by
    ``gains.roll_limit``. The arm offset is saturated to ``radius``.
    """
    phi, theta, psi = eta
    phi_ref, theta_ref, psi_ref = eta_ref
    roll_ref = phi_ref
    e_psi = 0.0
    if psi_ref is not None:
        e_psi = wrap_angle(psi_ref - psi)
        turn = gains.yaw_sign * pid_output(
            gains.yaw, e_psi, integrals[2], -rates[2]
        )
        limit = gains.roll_limit
        roll_ref = phi_ref + min(limit, max(-limit, turn))
    e_theta = theta_ref - theta
    e_phi = roll_ref - phi
    unclamped = np.array(
        [
            -pid_output(gains.pitch, e_theta, integrals[1], -rates[1]),
            pid_output(gains.roll, e_phi, integrals[0], -rates[0]),
        ]
    )
    delta, saturated = clamp_to_workspace(unclamped, 2.0 * radius / math.pi)
    return OuterCommand(
        delta=delta,
        thrust=thrust,
        roll_ref=roll_ref,
        errors=(e_phi, e_theta, e_psi),
        unclamped=unclamped,
        saturated=saturated,
    )


def inner_arm_law(
    q,
    q_ref,
    gains,
    spec,
    integral=(0.0, 0.0),
    q_rate=(0.0, 0.0),
):
    """Motor speeds steering the arm configuration towards ``q_ref``."""
    g = gains.inner
    rate_x, rate_y = (
        pid_output(g, q_ref[i] - q[i], integral[i], -q_rate[i])
        for i in range(2)
    )
    limit = spec.motor_limit
    motors = tuple(
        min(limit, max(-limit, w))
        for w in motors_from_q_rates(rate_x, rate_y, spec)
    )
    return InnerCommand(
        motors=motors,
        ddelta=q_rates_from_motors(motors[0], motors[1], spec),
    )


def pitch_envelope(spec):
    """Largest |δx·δ̇x| allowed by the workspace and motor limits."""
    return spec.workspace_radius * spec.max_rates[0]


def gain_condition(gains, params, envelope=None):
    """Check the pitch-loop gain conditions; positive margins pass."""
    arm = params.arm
    if envelope is None:
        envelope = pitch_envelope(arm)
    kp, kd = gains.pitch.kp, gains.pitch.kd
    threshold = params.ma * arm.L ** 2 / arm.d ** 2 * envelope / kp
    damping = (
        gains.D_theta
        + params.ma * params.g * arm.L * kd / (2.0 * arm.d)
        + gains.lam * kd / 2.0
    )
    return GainReport(
        weight_threshold=threshold,
        weight_margin=gains.lam - threshold,
        damping_margin=damping - gains.rho_theta / 2.0,
        uub_radius=abs(gains.rho_theta)
        / math.sqrt(gains.epsilon * gains.lam * kp),
    )


def effective_pitch_inertia(params, delta_x):
    arm = params.arm
    return params.J[1, 1] + params.ma * (
        arm.L ** 2 * delta_x ** 2 / (4.0 * arm.d ** 2)
        + (params.h + arm.L) ** 2
    )


def lyapunov_diagnostics(state, reference, gains, params):
    """Pitch-axis Lyapunov value and the upper bound on its derivative.

    ``state`` is a `BodyState` and ``reference`` the (roll, pitch, yaw)
    attitude reference; only its pitch is used. The roll offset is taken
    as held, so only δx acts on pitch.
    """
    arm = params.arm
    kp, kd = gains.pitch.kp, gains.pitch.kd
    theta_rate = (euler_rate_matrix(state.eta) @ state.omega)[1]
    delta_x = state.q_arm[0]
    e = reference[1] - state.eta[1]
    e_dot = -theta_rate
    V = (
        0.5 * effective_pitch_inertia(params, delta_x) * e_dot ** 2
        + 0.5 * kp * e ** 2
        + gains.lam / 4.0 * delta_x ** 2
    )
    a = (
        gains.D_theta
        + params.ma * params.g * arm.L * kd / (2.0 * arm.d)
        + gains.lam * kd / 2.0
        - gains.epsilon / 2.0
    )
    b = gains.lam * kp / 2.0
    bound = (
        -a * e_dot ** 2
        - b * e ** 2
        + gains.rho_theta ** 2 / (2.0 * gains.epsilon)
    )
    return LyapunovReport(V=V, V_dot_bound=bound)


def elevator_moment(airspeed, deflection, scale, effectiveness):
    """Pitch moment of a tail elevator; vanishes with airspeed."""
    return scale * airspeed ** 2 * effectiveness * deflection


def omni_allocation(thrust, yaw_torque, pitch_torque, baseline):
    """Split demands over the left, right and vertical thrusters.

    Side thrusters push forward only; the vertical one is reversible and
    carries ``vertical_bias`` on top of the pitch demand.
    """
    lim = baseline.thrust_limit
    diff = yaw_torque / (2.0 * baseline.half_span)
    left = min(lim, max(0.0, thrust / 2.0 + diff))
    right = min(lim, max(0.0, thrust / 2.0 - diff))
    vlim = baseline.vertical_limit
    demand = baseline.vertical_bias + pitch_torque / baseline.vertical_arm
    vertical = min(vlim, max(-vlim, demand))
    return left, right, vertical


def baseline_command(
    baseline,
    eta,
    eta_ref,
    rates,
    airspeed,
    aero_scale,
    thrust=0.0,
    integrals=(0.0, 0.0),
):
    """Actuator loads of a comparison baseline.

    ``integrals`` holds the accumulated (pitch, yaw) errors. Returns the
    forward thrust plus the extra body force and torque.
    """
    theta, psi = eta[1], eta[2]
    e_theta = eta_ref[1] - theta
    e_psi = 0.0 if eta_ref[2] is None else wrap_angle(eta_ref[2] - psi)
    pitch = pid_output(baseline.pitch, e_theta, integrals[0], -rates[1])
    if baseline.kind == "omni-thrust":
        yaw = 0.0
        if eta_ref[2] is not None:
            yaw = pid_output(baseline.yaw, e_psi, integrals[1], -rates[2])
        left, right, vertical = omni_allocation(thrust, yaw, pitch, baseline)
        return BaselineCommand(
            F=left + right,
            force=np.array([0.0, 0.0, -vertical]),
            torque=np.array(
                [
                    0.0,
                    baseline.vertical_arm
                    * (vertical - baseline.vertical_bias),
                    baseline.half_span * (left - right),
                ]
            ),
            thrusters=(left, right, vertical),
            deflection=0.0,
            errors=(e_theta, e_psi),
        )
    limit = baseline.elevator_range
    deflection = min(limit, max(-limit, -pitch))
    moment = elevator_moment(
        airspeed,
        deflection,
        aero_scale,
        baseline.elevator_effectiveness,
    )
    return BaselineCommand(
        F=thrust,
        force=None,
        torque=np.array([0.0, moment, 0.0]),
        thrusters=(thrust,),
        deflection=deflection,
        errors=(e_theta, e_psi),
    )
