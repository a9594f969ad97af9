import bisect
import collections
import math

import numpy as np

from .control import (
    baseline_command,
    elevator_moment,
    inner_arm_law,
    outer_attitude_law,
)
from .dynamics import ActuationCommand, euler_rate_matrix

Actuation = collections.namedtuple(
    "Actuation",
    "command eta_ref motors thrusts duty claw_closed perched",
)

INTERPOLATIONS = ("linear", "hold", "cosine")

# Script columns: time, arm offsets, thrust and elevator deflection.
ScriptRow = collections.namedtuple("ScriptRow", "t delta_x delta_y F elevator")

ClawEvent = collections.namedtuple("ClawEvent", "t action")

CLAW_ACTIONS = ("open", "close", "grasp")

Schedule = collections.namedtuple("Schedule", "times setpoints")


class AbstractController(object):
    """Delegate class to provide actuation to the simulator.

    A controller instance belongs to a single trajectory and may keep
    integral state between calls.
    """

    def reset(self, state):
        """Prepare for a new run starting at ``state``."""
        raise NotImplementedError

    def command(self, t, state, airspeed, dt):
        """Produce the `Actuation` held over the step starting at ``t``.

        :param airspeed: Magnitude of the air-relative velocity, m/s.
        :param dt: The step the command will be held for; integral state
            advances by this much.
        """
        raise NotImplementedError


def _eased(fraction, interpolation):
    if interpolation == "hold":
        return 0.0
    if interpolation == "cosine":
        return 0.5 * (1.0 - math.cos(math.pi * fraction))
    return fraction


def interpolate_rows(rows, t, interpolation="linear"):
    """Scripted values at ``t``; ends are held."""
    times = [row.t for row in rows]
    index = bisect.bisect_right(times, t)
    if index == 0:
        return rows[0]
    if index == len(rows):
        return rows[-1]
    before, after = rows[index - 1], rows[index]
    span = after.t - before.t
    w = _eased((t - before.t) / span if span > 0 else 1.0, interpolation)
    return ScriptRow._make(
        [t]
        + [
            (1.0 - w) * a + w * b
            for a, b in zip(before[1:], after[1:])
        ]
    )


def schedule_at(schedule, t):
    """The latest setpoint switched in at or before ``t``."""
    index = bisect.bisect_right(schedule.times, t)
    return schedule.setpoints[max(0, index - 1)]


class _ClawScript(object):
    def __init__(self, events):
        self.events = sorted(events, key=lambda e: e.t)

    def at(self, t):
        closed, perched = False, False
        for event in self.events:
            if event.t > t:
                break
            closed = event.action != "open"
            perched = event.action == "grasp"
        return closed, perched


class _InnerLoop(object):
    """Arm configuration servo shared by the moving-mass controllers."""

    def __init__(self, gains, arm):
        self.gains = gains
        self.arm = arm
        self.integral = np.zeros(2)

    def reset(self):
        self.integral = np.zeros(2)

    def track(self, q, q_ref, dt):
        inner = inner_arm_law(q, q_ref, self.gains, self.arm, self.integral)
        limit = self.arm.motor_limit
        if max(abs(m) for m in inner.motors) < limit:
            self.integral = self.integral + (np.asarray(q_ref) - q) * dt
        return inner


def _duty(motors, limit):
    return (abs(motors[0]) + abs(motors[1])) / (2.0 * limit)


class ScriptController(AbstractController):
    """Open-loop playback of arm offsets, thrust and elevator deflection.

    The arm servo tracks the scripted offsets within its motor limits.
    """

    def __init__(
        self,
        rows,
        gains,
        arm,
        interpolation="linear",
        claw=(),
        elevator=None,
        aero_scale=0.0,
    ):
        if interpolation not in INTERPOLATIONS:
            raise ValueError(
                "unknown interpolation {!r}".format(interpolation)
            )
        self.rows = list(rows)
        self.interpolation = interpolation
        self.loop = _InnerLoop(gains, arm)
        self.claw = _ClawScript(claw)
        self.elevator = elevator
        self.aero_scale = aero_scale

    def reset(self, state):
        self.loop.reset()

    def command(self, t, state, airspeed, dt):
        row = interpolate_rows(self.rows, t, self.interpolation)
        inner = self.loop.track(state.q_arm, (row.delta_x, row.delta_y), dt)
        torque = None
        if self.elevator is not None and row.elevator:
            limit = self.elevator.elevator_range
            moment = elevator_moment(
                airspeed,
                min(limit, max(-limit, row.elevator)),
                self.aero_scale,
                self.elevator.elevator_effectiveness,
            )
            torque = np.array([0.0, moment, 0.0])
        closed, perched = self.claw.at(t)
        return Actuation(
            command=ActuationCommand(
                F=row.F,
                ddelta=inner.ddelta,
                torque=torque,
            ),
            eta_ref=None,
            motors=inner.motors,
            thrusts=(row.F,),
            duty=_duty(inner.motors, self.loop.arm.motor_limit),
            claw_closed=closed,
            perched=perched,
        )


class _ReferenceTracker(AbstractController):
    def __init__(self, reference, thrust):
        self.reference = reference
        self.thrust = float(thrust)
        self._held_yaw = None

    def _eta_ref(self, t):
        phi, theta, psi = schedule_at(self.reference, t)
        if psi == "hold":
            psi = self._held_yaw
        return (phi, theta, psi)

    def reset(self, state):
        self._held_yaw = float(state.eta[2])


class AttitudeController(_ReferenceTracker):
    """Dual-loop moving-mass attitude control.

    The outer loop turns attitude errors into arm offsets, the inner loop
    drives the arm motors to reach them.
    """

    def __init__(self, gains, arm, reference, thrust=0.0):
        super(AttitudeController, self).__init__(reference, thrust)
        self.gains = gains
        self.arm = arm
        self.loop = _InnerLoop(gains, arm)
        self.integrals = np.zeros(3)

    def reset(self, state):
        super(AttitudeController, self).reset(state)
        self.loop.reset()
        self.integrals = np.zeros(3)

    def command(self, t, state, airspeed, dt):
        eta_ref = self._eta_ref(t)
        rates = euler_rate_matrix(state.eta) @ state.omega
        outer = outer_attitude_law(
            state.eta,
            eta_ref,
            rates,
            self.gains,
            self.arm.workspace_radius,
            self.integrals,
            self.thrust,
        )
        self._integrate(outer, eta_ref, dt)
        inner = self.loop.track(state.q_arm, outer.delta, dt)
        return Actuation(
            command=ActuationCommand(F=outer.thrust, ddelta=inner.ddelta),
            eta_ref=(outer.roll_ref, eta_ref[1], eta_ref[2]),
            motors=inner.motors,
            thrusts=(outer.thrust,),
            duty=_duty(inner.motors, self.arm.motor_limit),
            claw_closed=False,
            perched=False,
        )

    def _integrate(self, outer, eta_ref, dt):
        # Conditional integration: a saturated channel only integrates
        # errors that pull it back inside.
        e_phi, e_theta, e_psi = outer.errors
        ux, uy = outer.unclamped
        if not outer.saturated or e_theta * ux > 0:
            self.integrals[1] += e_theta * dt
        if not outer.saturated or e_phi * uy < 0:
            self.integrals[0] += e_phi * dt
        turn = outer.roll_ref - eta_ref[0]
        if eta_ref[2] is not None and abs(turn) < self.gains.roll_limit:
            self.integrals[2] += e_psi * dt


class OmniThrustController(_ReferenceTracker):
    """Comparison baseline steering with differential and vertical thrust."""

    def __init__(self, baseline, reference, thrust=0.0):
        super(OmniThrustController, self).__init__(reference, thrust)
        self.baseline = baseline
        self.integrals = np.zeros(2)

    def reset(self, state):
        super(OmniThrustController, self).reset(state)
        self.integrals = np.zeros(2)

    def command(self, t, state, airspeed, dt):
        eta_ref = self._eta_ref(t)
        rates = euler_rate_matrix(state.eta) @ state.omega
        out = baseline_command(
            self.baseline,
            state.eta,
            eta_ref,
            rates,
            airspeed,
            0.0,
            self.thrust,
            self.integrals,
        )
        self.integrals = self.integrals + np.asarray(out.errors) * dt
        left, right, vertical = out.thrusters
        return Actuation(
            command=ActuationCommand(
                F=out.F,
                force=out.force,
                torque=out.torque,
            ),
            eta_ref=eta_ref,
            motors=(0.0, 0.0),
            thrusts=(left, right, abs(vertical)),
            duty=0.0,
            claw_closed=False,
            perched=False,
        )


class ElevatorController(_ReferenceTracker):
    """Comparison baseline pitching with a tail elevator; the arm is held."""

    def __init__(self, baseline, reference, aero_scale, thrust=0.0):
        super(ElevatorController, self).__init__(reference, thrust)
        self.baseline = baseline
        self.aero_scale = aero_scale
        self.integral = 0.0

    def reset(self, state):
        super(ElevatorController, self).reset(state)
        self.integral = 0.0

    def command(self, t, state, airspeed, dt):
        eta_ref = self._eta_ref(t)
        rates = euler_rate_matrix(state.eta) @ state.omega
        out = baseline_command(
            self.baseline,
            state.eta,
            eta_ref,
            rates,
            airspeed,
            self.aero_scale,
            self.thrust,
            (self.integral, 0.0),
        )
        if abs(out.deflection) < self.baseline.elevator_range:
            self.integral += out.errors[0] * dt
        return Actuation(
            command=ActuationCommand(F=out.F, torque=out.torque),
            eta_ref=eta_ref,
            motors=(0.0, 0.0),
            thrusts=(out.F,),
            duty=0.0,
            claw_closed=False,
            perched=False,
        )
