import collections
import math
import warnings

import numpy as np
from scipy import optimize

from .continuum import clamp_to_workspace, tip_from_q, tip_jacobian

GRAM_FORCE = 9.80665e-3

GIMBAL_MARGIN = 1e-3

DEFAULT_MAX_CONDITION = 1e12

_E3 = np.array([0.0, 0.0, 1.0])
_E1 = np.array([1.0, 0.0, 0.0])
_E2 = np.array([0.0, 1.0, 0.0])


class DynamicsException(Exception):
    """A base class for all exceptions raised by this module."""


class GimbalProximity(DynamicsException):
    def __init__(self, theta):
        super(GimbalProximity, self).__init__(theta)
        self.theta = theta

    def __str__(self):
        return "Pitch {:.6g} rad is within {} rad of the gimbal lock".format(
            self.theta,
            GIMBAL_MARGIN,
        )


class NumericalConditioning(DynamicsException):
    def __init__(self, condition, bound):
        super(NumericalConditioning, self).__init__(condition, bound)
        self.condition = condition
        self.bound = bound

    def __str__(self):
        return "Mass matrix condition number {:.3e} exceeds {:.3e}".format(
            self.condition,
            self.bound,
        )


class NonFinite(DynamicsException):
    def __init__(self, field):
        super(NonFinite, self).__init__(field)
        self.field = field

    def __str__(self):
        return "Non-finite value in {}".format(self.field)


class NoTrimFound(DynamicsException):
    def __init__(self, iterations, residual):
        super(NoTrimFound, self).__init__(iterations, residual)
        self.iterations = iterations
        self.residual = residual

    def __str__(self):
        return "No trim after {} iterations (residual {:.3e})".format(
            self.iterations,
            self.residual,
        )


class WorkspaceSaturated(UserWarning):
    """The integrator clamped the arm onto its workspace boundary."""


VehicleParams = collections.namedtuple(
    "VehicleParams",
    "m0 ma r0 J Fb h g aero arm thrust_limit",
)

BodyState = collections.namedtuple("BodyState", "p eta v omega q_arm")

StateDerivative = collections.namedtuple(
    "StateDerivative",
    "dp deta dq_arm dv domega",
)

# Zero-order-held over one integration step. ``force`` (N) and ``torque``
# (N·m) are extra body-frame loads from baseline actuators.
_ActuationCommand = collections.namedtuple(
    "ActuationCommand",
    "F ddelta force torque",
)


class ActuationCommand(_ActuationCommand):
    __slots__ = ()

    def __new__(cls, F=0.0, ddelta=(0.0, 0.0), force=None, torque=None):
        return super(ActuationCommand, cls).__new__(
            cls,
            float(F),
            np.asarray(ddelta, dtype=float),
            None if force is None else np.asarray(force, dtype=float),
            None if torque is None else np.asarray(torque, dtype=float),
        )


# Wind (inertial, m/s) and an external body torque disturbance (N·m),
# both held over one step.
Environment = collections.namedtuple("Environment", "wind disturbance")

CALM = Environment(wind=np.zeros(3), disturbance=None)

Stepped = collections.namedtuple("Stepped", "state saturated")


def make_vehicle_params(
    arm,
    aero=None,
    m0=0.10869,
    ma=0.09221,
    r0=(0.0, 0.0, 0.05),
    J=(0.035, 0.020, 0.015),
    Fb=194.23 * GRAM_FORCE,
    h=None,
    g=9.81,
    thrust_limit=30.0 * GRAM_FORCE,
):
    """Build validated `VehicleParams`.

    ``J`` may be three diagonal entries or a full 3×3 matrix. ``h``
    defaults to the arm base offset, which also carries the propeller.
    """
    J = np.asarray(J, dtype=float)
    if J.shape == (3,):
        J = np.diag(J)
    problems = []
    if m0 <= 0:
        problems.append("m0 must be positive")
    if ma <= 0:
        problems.append("ma must be positive")
    if J.shape != (3, 3):
        problems.append("J must be 3 values or a 3x3 matrix")
    elif not np.allclose(J, J.T) or np.linalg.eigvalsh(J).min() <= 0:
        problems.append("J must be symmetric positive definite")
    if Fb < 0:
        problems.append("Fb must be non-negative")
    if h is None:
        h = arm.h
    if h <= 0:
        problems.append("h must be positive")
    if problems:
        raise ValueError("; ".join(problems))
    return VehicleParams(
        m0=float(m0),
        ma=float(ma),
        r0=np.asarray(r0, dtype=float),
        J=J,
        Fb=float(Fb),
        h=float(h),
        g=float(g),
        aero=aero,
        arm=arm,
        thrust_limit=float(thrust_limit),
    )


def neutral_buoyancy(params):
    """Return ``params`` with the buoyant lift matching the total weight."""
    return params._replace(Fb=(params.m0 + params.ma) * params.g)


def make_state(
    p=(0.0, 0.0, 0.0),
    eta=(0.0, 0.0, 0.0),
    v=(0.0, 0.0, 0.0),
    omega=(0.0, 0.0, 0.0),
    q_arm=(0.0, 0.0),
):
    return BodyState(
        p=np.asarray(p, dtype=float),
        eta=np.asarray(eta, dtype=float),
        v=np.asarray(v, dtype=float),
        omega=np.asarray(omega, dtype=float),
        q_arm=np.asarray(q_arm, dtype=float),
    )


def state_vector(state):
    return np.concatenate(
        [state.p, state.eta, state.q_arm, state.v, state.omega]
    )


def state_from_vector(x):
    return BodyState(
        p=x[0:3].copy(),
        eta=x[3:6].copy(),
        v=x[8:11].copy(),
        omega=x[11:14].copy(),
        q_arm=x[6:8].copy(),
    )


def derivative_vector(deriv):
    return np.concatenate(
        [deriv.dp, deriv.deta, deriv.dq_arm, deriv.dv, deriv.domega]
    )


def skew(a):
    return np.array(
        [
            [0.0, -a[2], a[1]],
            [a[2], 0.0, -a[0]],
            [-a[1], a[0], 0.0],
        ]
    )


def rotation_from_euler(eta):
    """Body-to-inertial rotation Rz(ψ)·Ry(θ)·Rx(φ)."""
    phi, theta, psi = eta
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
            [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
            [-st, ct * sf, ct * cf],
        ]
    )


def euler_rate_matrix(eta):
    """The map P with dη/dt = P·ω for body rates ω."""
    phi, theta = eta[0], eta[1]
    if abs(theta) >= math.pi / 2.0 - GIMBAL_MARGIN:
        raise GimbalProximity(float(theta))
    cf, sf = math.cos(phi), math.sin(phi)
    ct, tt = math.cos(theta), math.tan(theta)
    return np.array(
        [
            [1.0, sf * tt, cf * tt],
            [0.0, cf, -sf],
            [0.0, sf / ct, cf / ct],
        ]
    )


def effective_inertia(J, ma, ra):
    ra = np.asarray(ra, dtype=float)
    return J + ma * (ra.dot(ra) * np.eye(3) - np.outer(ra, ra))


def moving_mass_offset(params, q_arm):
    """r_a: moving mass position relative to the centre of buoyancy."""
    arm = params.arm
    return np.array([0.0, 0.0, params.h]) + tip_from_q(q_arm, arm.L, arm.d)


def first_moment(params, ra):
    """l_g = m0·r0 + ma·r_a, the mass-weighted offset of the CG."""
    return params.m0 * params.r0 + params.ma * np.asarray(ra, dtype=float)


def mass_matrix(params, R, ra, max_condition=DEFAULT_MAX_CONDITION):
    """The symmetric 6×6 matrix coupling (dv, dω) in the equations of motion.

    :raises NumericalConditioning: if the condition number exceeds
        ``max_condition``. Pass None to skip the check.
    """
    total = params.m0 + params.ma
    lg_x = skew(first_moment(params, ra))
    M = np.empty((6, 6))
    M[:3, :3] = total * np.eye(3)
    M[:3, 3:] = -R @ lg_x
    M[3:, :3] = lg_x @ R.T
    M[3:, 3:] = effective_inertia(params.J, params.ma, ra)
    if max_condition is not None:
        condition = np.linalg.cond(M)
        if not condition <= max_condition:
            raise NumericalConditioning(float(condition), max_condition)
    return M


def derivative(state, cmd, params, env=CALM):
    eta, v, omega, q_arm = state.eta, state.v, state.omega, state.q_arm
    R = rotation_from_euler(eta)
    P = euler_rate_matrix(eta)
    arm = params.arm
    ra = moving_mass_offset(params, q_arm)
    lg = first_moment(params, ra)
    M = mass_matrix(params, R, ra, max_condition=None)
    J_eff = M[3:, 3:]

    if params.aero is not None:
        v_air = R.T @ (v - env.wind)
        wrench = params.aero.body_wrench(v_air, omega)
        f_aero, t_aero = wrench.force, wrench.torque
    else:
        f_aero = t_aero = np.zeros(3)

    down_body = R.T @ _E3
    weight = (params.m0 + params.ma) * params.g - params.Fb
    f = (
        R @ np.cross(np.cross(omega, lg), omega)
        + weight * _E3
        + R @ f_aero
    )
    t = (
        np.cross(J_eff @ omega, omega)
        + np.cross(lg, params.g * down_body)
        + t_aero
    )

    # Thrust acts along body x from the arm's top plate, h below the CB.
    f = f + cmd.F * (R @ _E1)
    t = t + cmd.F * params.h * _E2
    if cmd.force is not None:
        f = f + R @ cmd.force
    if cmd.torque is not None:
        t = t + cmd.torque
    if env.disturbance is not None:
        t = t + env.disturbance

    # Arm motion, with the arm's own acceleration neglected.
    ra_dot = tip_jacobian(q_arm, arm.L, arm.d) @ cmd.ddelta
    coriolis = 2.0 * params.ma * np.cross(omega, ra_dot)
    f = f - R @ coriolis
    t = t - np.cross(ra, coriolis)

    accel = np.linalg.solve(M, np.concatenate([f, t]))
    deriv = StateDerivative(
        dp=np.array(v, dtype=float),
        deta=P @ omega,
        dq_arm=np.array(cmd.ddelta, dtype=float),
        dv=accel[:3],
        domega=accel[3:],
    )
    if not np.all(np.isfinite(derivative_vector(deriv))):
        raise NonFinite("state derivative")
    return deriv


def wrap_angle(angle):
    """Wrap into (−π, π]."""
    return angle - 2.0 * math.pi * math.ceil((angle - math.pi) / (2 * math.pi))


def integrate(state, cmd, params, env, dt):
    """Advance one classical fourth-order Runge-Kutta step.

    Returns the new state and whether the arm had to be clamped back onto
    its workspace.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")

    def f(x):
        return derivative_vector(
            derivative(state_from_vector(x), cmd, params, env)
        )

    x = state_vector(state)
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    new = state_from_vector(x)
    new.eta[2] = wrap_angle(new.eta[2])
    q_arm, saturated = clamp_to_workspace(new.q_arm, params.arm.d)
    return Stepped(new._replace(q_arm=np.array(q_arm)), saturated)


def step(state, cmd, params, env, dt):
    stepped = integrate(state, cmd, params, env, dt)
    if stepped.saturated:
        warnings.warn(
            "arm clamped to workspace",
            WorkspaceSaturated,
            stacklevel=2,
        )
    return stepped.state


def mechanical_energy(state, params):
    """Kinetic plus gravitational and buoyant potential energy.

    Potentials are measured from the inertial origin, z pointing down.
    """
    R = rotation_from_euler(state.eta)
    ra = moving_mass_offset(params, state.q_arm)
    M = mass_matrix(params, R, ra, max_condition=None)
    nu = np.concatenate([state.v, state.omega])
    kinetic = 0.5 * nu @ M @ nu
    lg = first_moment(params, ra)
    total = params.m0 + params.ma
    depth = total * state.p[2] + (R @ lg)[2]
    return kinetic - params.g * depth + params.Fb * state.p[2]


def _trim_residual(params, q_arm, thrust, mode, unknowns):
    if mode == "longitudinal":
        theta, vx, vz = unknowns
        state = make_state(eta=(0.0, theta, 0.0), v=(vx, 0.0, vz), q_arm=q_arm)
    else:
        phi, theta, vx, vy, vz = unknowns
        state = make_state(
            eta=(phi, theta, 0.0),
            v=(vx, vy, vz),
            q_arm=q_arm,
        )
    deriv = derivative(state, ActuationCommand(F=thrust), params)
    if mode == "longitudinal":
        residual = np.array([deriv.dv[0], deriv.dv[2], deriv.domega[1]])
    else:
        residual = np.concatenate([deriv.dv, deriv.domega])
    return state, residual


def static_trim(
    params,
    q_arm_fixed,
    thrust=0.0,
    mode="full",
    guess=None,
    tolerance=1e-8,
    max_iterations=10000,
):
    """Find an unaccelerated state with the arm held at ``q_arm_fixed``.

    ``mode="full"`` solves roll, pitch and the inertial velocity against all
    six acceleration components, which covers static floating and steady
    straight descent. ``mode="longitudinal"`` solves pitch and the forward
    and vertical speed against the symmetric-plane residual only, and is
    used for thrusted cruise.

    ``max_iterations`` bounds the residual evaluations of the
    least-squares solve.

    Without an aerodynamic model a net weight or lift has nothing to
    balance it, so no trim exists.

    :raises NoTrimFound: when the solver stops with a residual norm above
        ``tolerance``.
    """
    if mode not in ("full", "longitudinal"):
        raise ValueError("unknown trim mode {!r}".format(mode))
    q_arm = np.asarray(q_arm_fixed, dtype=float)
    if guess is None:
        guess = np.zeros(3 if mode == "longitudinal" else 5)

    def residual(x):
        return _trim_residual(params, q_arm, thrust, mode, x)[1]

    try:
        result = optimize.least_squares(
            residual,
            np.array(guess, dtype=float),
            method="lm",
            ftol=1e-14,
            xtol=1e-14,
            gtol=1e-14,
            max_nfev=max_iterations,
        )
    except (GimbalProximity, NonFinite):
        raise NoTrimFound(0, float("inf"))
    state, r = _trim_residual(params, q_arm, thrust, mode, result.x)
    norm = float(np.linalg.norm(r))
    if not norm < tolerance:
        raise NoTrimFound(result.nfev, norm)
    return state
