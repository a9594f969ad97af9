import math

import numpy as np

from .aero import aero_wrench, cruise_trim, total_wind
from .analysis import thrust_load
from .control import lyapunov_diagnostics
from .controllers import (
    AttitudeController,
    ElevatorController,
    OmniThrustController,
    ScriptController,
)
from .dynamics import (
    DynamicsException,
    Environment,
    integrate,
    make_state,
    static_trim,
)
from .reporters import BaseReporter
from .structs import Flags, TrajectoryLog, make_record


class SimulationError(Exception):
    """A base class for all exceptions raised by this module."""


class SimulationFailed(SimulationError):
    def __init__(self, t, cause):
        super(SimulationFailed, self).__init__(t, cause)
        self.t = t
        self.cause = cause

    def __str__(self):
        return "Simulation failed at t={:.6g} s: {}".format(self.t, self.cause)


def _rot_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def initial_state(config, rng=None):
    """Starting state of a scenario, trimmed if the scenario asks for it.

    A trimmed start keeps the configured yaw, position and arm offset; the
    configured velocity is added to the trimmed one, which is how a start
    drifting with a uniform wind is expressed.
    """
    init = config.initial
    eta = np.array(init.eta, dtype=float)
    if rng is not None and init.jitter > 0:
        eta[:2] = eta[:2] + rng.normal(0.0, init.jitter, size=2)
    state = make_state(
        p=init.p,
        eta=eta,
        v=init.v,
        omega=init.omega,
        q_arm=init.q_arm,
    )
    if init.trim == "none":
        return state
    params = config.params
    try:
        if init.trim == "static":
            trimmed = static_trim(params, init.q_arm)
        else:
            thrust = config.thrust
            if config.script is not None:
                thrust = config.script.rows[0].F
            trimmed = cruise_trim(params, thrust, init.q_arm)
    except DynamicsException as e:
        raise SimulationFailed(0.0, e)
    yaw = _rot_z(eta[2])
    return state._replace(
        eta=np.array([trimmed.eta[0], trimmed.eta[1], eta[2]]),
        v=yaw @ trimmed.v + state.v,
        omega=trimmed.omega,
    )


def build_controller(config):
    params = config.params
    if config.mode == "script":
        return ScriptController(
            config.script.rows,
            config.gains,
            params.arm,
            interpolation=config.script.interpolation,
            claw=config.script.claw,
            elevator=config.baseline,
            aero_scale=0.0 if params.aero is None else params.aero.scale,
        )
    if config.mode == "attitude":
        return AttitudeController(
            config.gains,
            params.arm,
            config.reference,
            config.thrust,
        )
    if config.mode == "omni-thrust":
        return OmniThrustController(
            config.baseline,
            config.reference,
            config.thrust,
        )
    if config.mode == "elevator":
        return ElevatorController(
            config.baseline,
            config.reference,
            0.0 if params.aero is None else params.aero.scale,
            config.thrust,
        )
    raise ValueError("unknown mode {!r}".format(config.mode))


def _disturbance(config, t):
    d = config.disturbance
    if d is None or d.amplitude == 0:
        return None
    torque = d.amplitude * math.sin(2.0 * math.pi * d.frequency * t + d.phase)
    return np.array([0.0, torque, 0.0])


class Simulation(object):
    """Stateful simulation object.

    This is designed as a one-off object that holds a scenario, advances
    it step by step, and holds the resulting log afterwards.
    """

    def __init__(self, config, controller, reporter):
        self._config = config
        self._c = controller
        self._r = reporter
        self._log = None

    @property
    def log(self):
        if self._log is None:
            raise AttributeError("log")
        return self._log

    def _header(self):
        config = self._config
        return {
            "name": config.name,
            "mode": config.mode,
            "duration": config.duration,
            "dt": config.dt,
            "decimation": config.decimation,
            "seed": config.seed,
        }

    def _lyapunov(self, state, actuation):
        if actuation.eta_ref is None or self._config.mode != "attitude":
            return None
        return lyapunov_diagnostics(
            state,
            actuation.eta_ref,
            self._config.gains,
            self._config.params,
        ).V

    def run(self):
        if self._log is not None:
            raise RuntimeError("already simulated")
        config = self._config
        params = config.params
        dt = config.dt
        self._r.starting(config)
        self._log = TrajectoryLog(self._header())

        state = initial_state(config, np.random.default_rng(config.seed))
        self._c.reset(state)
        steps = int(round(config.duration / dt))
        charge = energy = 0.0
        saturated = outside = claw = False

        for index in range(steps):
            t = index * dt
            try:
                wind = total_wind(state.p, t, config.wind)
                airspeed = float(np.linalg.norm(state.v - wind))
                act = self._c.command(t, state, airspeed, dt)
                if params.aero is not None:
                    wrench = aero_wrench(state, wind, params.aero)
                    force, torque = wrench.force, wrench.torque
                    stagnant, now_outside = wrench.stagnant, wrench.outside
                else:
                    force = torque = np.zeros(3)
                    stagnant, now_outside = False, False
                lyapunov = self._lyapunov(state, act)
            except DynamicsException as e:
                raise SimulationFailed(t, e)

            if now_outside and not outside:
                self._r.leaving_envelope(t, wrench.alpha, wrench.beta)
            outside = now_outside
            if act.claw_closed != claw:
                self._r.toggling_claw(t, act.claw_closed)
                claw = act.claw_closed
            perched = act.perched

            load = thrust_load(act.thrusts)
            current = config.power.current(
                sum(1 for f in act.thrusts if f > 0),
                load,
                act.duty,
            )

            if index % config.decimation == 0 or perched:
                record = make_record(
                    t,
                    state,
                    act.command.F,
                    tuple(force) + tuple(torque),
                    lyapunov=lyapunov,
                    charge_mah=charge,
                    energy_mwh=energy,
                    flags=Flags(saturated, outside, stagnant, claw, perched),
                    eta_ref=act.eta_ref,
                    thrust_load=load,
                    arm_duty=act.duty,
                    motors=act.motors,
                )
                self._log.append(record)
                self._r.sampling(len(self._log) - 1, record)
            if perched:
                self._r.perching(t)
                break

            env = Environment(wind=wind, disturbance=_disturbance(config, t))
            try:
                state, saturated = integrate(
                    state, act.command, params, env, dt
                )
            except DynamicsException as e:
                raise SimulationFailed(t, e)
            if saturated:
                self._r.saturating(t + dt, tuple(state.q_arm))
            charge += current * dt / 3600.0
            energy += config.power.voltage * current * dt / 3600.0

        self._r.ending(self._log)
        return self._log


class Simulator(object):
    """The thing that runs scenarios.

    A simulator is reusable; every call builds a fresh controller and a
    one-off `Simulation`.
    """

    base_exception = SimulationError

    def __init__(self, reporter=None):
        self.reporter = reporter or BaseReporter()

    def simulate(self, config):
        """Run a scenario to completion and return its `TrajectoryLog`.

        :raises: `SimulationFailed` carrying the failing time and the
            underlying dynamics error.
        """
        controller = build_controller(config)
        return Simulation(config, controller, self.reporter).run()


def run_scenario(config, reporter=None):
    return Simulator(reporter).simulate(config)

