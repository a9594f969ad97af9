"""Identified aerodynamic model of the envelope and simple wind fields."""

import collections
import math
import warnings

import numpy as np

from .dynamics import (
    NoTrimFound,
    rotation_from_euler,
    static_trim,
)

# Below this airspeed the aerodynamic angles are undefined.
V_MIN = 1e-3

DEFAULT_VALIDITY = math.radians(30.0)

DEFAULT_SCALE = 1.2


class AeroException(Exception):
    """A base class for all exceptions raised by this module."""


class Stagnation(AeroException):
    def __init__(self, speed, threshold):
        super(Stagnation, self).__init__(speed, threshold)
        self.speed = speed
        self.threshold = threshold

    def __str__(self):
        return "Airspeed {:.3g} m/s is at or below {:.3g} m/s".format(
            self.speed,
            self.threshold,
        )


class ValidityExceeded(UserWarning):
    """Aerodynamic angles fall outside the identified envelope."""


# Each term is coefficient * angle**degree.
Coefficient = collections.namedtuple(
    "Coefficient",
    "constant alpha alpha_degree beta beta_degree",
)

AeroCoefficients = collections.namedtuple(
    "AeroCoefficients",
    "drag side lift roll pitch yaw",
)

AeroAngles = collections.namedtuple("AeroAngles", "alpha beta V rotation")

AeroWrench = collections.namedtuple(
    "AeroWrench",
    "force torque alpha beta V stagnant outside",
)

IDENTIFIED = AeroCoefficients(
    drag=Coefficient(0.243, 8.838, 2, 9.016, 2),
    side=Coefficient(-0.082, -0.285, 2, -2.356, 1),
    lift=Coefficient(0.159, 2.938, 1, 8.103, 2),
    roll=Coefficient(-0.036, 0.553, 1, -0.683, 1),
    pitch=Coefficient(0.057, 0.093, 1, 5.236, 2),
    yaw=Coefficient(0.093, -0.209, 1, -0.356, 1),
)

IDENTIFIED_DAMPING = (-0.073, -0.052, -0.032)

# Terms that vanish for a mirror-symmetric envelope.
LATERAL_TERMS = ("side", "roll", "yaw")

_AeroModel = collections.namedtuple(
    "AeroModel",
    "coefficients damping scale validity",
)


class AeroModel(_AeroModel):
    """Coefficient table, rate damping and the combined ½ρA scale.

    Forces are ``scale * V**2 * C``; ``validity`` bounds |α| and |β| in
    radians.
    """

    __slots__ = ()

    def body_wrench(self, v_air_body, omega, check=False):
        return body_aero_wrench(v_air_body, omega, self, check=check)


def default_aero_model(
    scale=DEFAULT_SCALE,
    lateral_bias=1.0,
    validity=DEFAULT_VALIDITY,
    damping=IDENTIFIED_DAMPING,
    overrides=None,
):
    """Build an `AeroModel` from the identified table.

    ``lateral_bias`` scales the constant side force, roll and yaw terms.
    ``overrides`` maps ``(name, term)`` pairs such as ``("lift", "alpha")``
    to replacement values.
    """
    if not scale > 0:
        raise ValueError("aerodynamic scale must be positive")
    damping = np.asarray(damping, dtype=float)
    if damping.shape != (3,) or np.any(damping > 0):
        raise ValueError("damping coefficients must be three values <= 0")
    table = IDENTIFIED._asdict()
    for name in LATERAL_TERMS:
        entry = table[name]
        table[name] = entry._replace(constant=entry.constant * lateral_bias)
    for (name, term), value in (overrides or {}).items():
        if name not in table or term not in ("constant", "alpha", "beta"):
            raise KeyError("{}_{}".format(name, term))
        table[name] = table[name]._replace(**{term: float(value)})
    return AeroModel(
        coefficients=AeroCoefficients(**table),
        damping=damping,
        scale=float(scale),
        validity=float(validity),
    )


def velocity_frame_rotation(alpha, beta):
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    return np.array(
        [
            [ca * cb, -ca * sb, -sa],
            [sb, cb, 0.0],
            [sa * cb, -sa * sb, ca],
        ]
    )


def aero_angles(v_air_body, v_min=V_MIN):
    u, v, w = (float(c) for c in v_air_body)
    speed = math.sqrt(u * u + v * v + w * w)
    if speed <= v_min:
        raise Stagnation(speed, v_min)
    alpha = math.atan2(w, u)
    beta = math.asin(max(-1.0, min(1.0, v / speed)))
    return AeroAngles(
        alpha=alpha,
        beta=beta,
        V=speed,
        rotation=velocity_frame_rotation(alpha, beta),
    )


def outside_envelope(alpha, beta, model):
    return abs(alpha) > model.validity or abs(beta) > model.validity


def aero_coefficients(alpha, beta, model, check=True):
    if check and outside_envelope(alpha, beta, model):
        warnings.warn(
            "alpha={:.1f} deg, beta={:.1f} deg outside +/-{:.0f} deg".format(
                math.degrees(alpha),
                math.degrees(beta),
                math.degrees(model.validity),
            ),
            ValidityExceeded,
            stacklevel=2,
        )
    return AeroCoefficients._make(
        c.constant
        + c.alpha * alpha ** c.alpha_degree
        + c.beta * beta ** c.beta_degree
        for c in model.coefficients
    )


def body_aero_wrench(v_air_body, omega, model, check=False):
    """Aerodynamic force and moment in the body frame.

    ``v_air_body`` is the air-relative velocity in body axes. At
    stagnation only the rate damping remains.
    """
    damping = model.damping * np.asarray(omega, dtype=float)
    try:
        angles = aero_angles(v_air_body)
    except Stagnation:
        return AeroWrench(np.zeros(3), damping, 0.0, 0.0, 0.0, True, False)
    c = aero_coefficients(angles.alpha, angles.beta, model, check=check)
    dynamic = model.scale * angles.V ** 2
    force = angles.rotation @ np.array([-c.drag, c.side, -c.lift]) * dynamic
    moment = angles.rotation @ np.array([c.roll, c.pitch, c.yaw]) * dynamic
    return AeroWrench(
        force=force,
        torque=moment + damping,
        alpha=angles.alpha,
        beta=angles.beta,
        V=angles.V,
        stagnant=False,
        outside=outside_envelope(angles.alpha, angles.beta, model),
    )


def aero_wrench(state, wind, model, check=False):
    """Body-frame aerodynamic wrench for a vehicle state in a wind."""
    R = rotation_from_euler(state.eta)
    v_air = R.T @ (np.asarray(state.v, dtype=float) - wind)
    return body_aero_wrench(v_air, state.omega, model, check=check)


def calibrate_scale(params, thrust, speed):
    """Pick the aerodynamic scale giving cruise ``speed`` at ``thrust``.

    Trims straight cruise at unit scale; since every aerodynamic term in
    the trim is proportional to scale·V², the scale reaching ``speed`` is
    the ratio of squared speeds.
    """
    if params.aero is None:
        raise ValueError("calibration needs an aerodynamic model")
    if not speed > 0 or not thrust > 0:
        raise ValueError("cruise thrust and speed must be positive")
    unit = params._replace(aero=params.aero._replace(scale=1.0))
    drag = unit.aero.coefficients.drag.constant
    guess = (0.0, math.sqrt(thrust / drag), 0.0)
    trimmed = static_trim(
        unit,
        (0.0, 0.0),
        thrust=thrust,
        mode="longitudinal",
        guess=guess,
    )
    reached = float(np.linalg.norm(trimmed.v))
    if not reached > 0:
        raise NoTrimFound(0, float("nan"))
    return reached ** 2 / speed ** 2


def cruise_trim(params, thrust, q_arm=(0.0, 0.0)):
    """Longitudinal trim for straight flight at ``thrust``."""
    drag = params.aero.coefficients.drag.constant * params.aero.scale
    guess = (0.0, math.sqrt(thrust / drag) if thrust > 0 else 0.0, 0.0)
    return static_trim(
        params,
        q_arm,
        thrust=thrust,
        mode="longitudinal",
        guess=guess,
    )


WindField = collections.namedtuple(
    "WindField",
    "kind vector start end ramp apex axis half_angle reach",
)

WIND_KINDS = ("constant", "gust-pulse", "fan-jet")


def constant_wind(vector):
    return WindField(
        "constant",
        np.asarray(vector, dtype=float),
        None,
        None,
        0.0,
        None,
        None,
        None,
        None,
    )


def gust_pulse(vector, start, end, ramp=0.0):
    if not start < end:
        raise ValueError("gust window must start before it ends")
    if ramp < 0 or 2 * ramp > end - start:
        raise ValueError("gust ramp must fit twice inside the window")
    return WindField(
        "gust-pulse",
        np.asarray(vector, dtype=float),
        float(start),
        float(end),
        float(ramp),
        None,
        None,
        None,
        None,
    )


def fan_jet(apex, axis, speed, half_angle, reach=None):
    """A cone of uniform air flow leaving ``apex`` along ``axis``."""
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if not norm > 0:
        raise ValueError("fan axis must be non-zero")
    if speed < 0:
        raise ValueError("fan speed must be non-negative")
    if not 0 < half_angle < math.pi / 2:
        raise ValueError("fan half angle must lie in (0, 90) degrees")
    axis = axis / norm
    return WindField(
        "fan-jet",
        axis * speed,
        None,
        None,
        0.0,
        np.asarray(apex, dtype=float),
        axis,
        float(half_angle),
        None if reach is None else float(reach),
    )


def wind_at(position, time, field):
    if field.kind == "constant":
        return field.vector.copy()
    if field.kind == "gust-pulse":
        if not field.start <= time <= field.end:
            return np.zeros(3)
        if field.ramp > 0:
            edge = min(time - field.start, field.end - time)
            return field.vector * min(1.0, edge / field.ramp)
        return field.vector.copy()
    if field.kind == "fan-jet":
        offset = np.asarray(position, dtype=float) - field.apex
        axial = float(offset @ field.axis)
        if axial <= 0 or (field.reach is not None and axial > field.reach):
            return np.zeros(3)
        radial = np.linalg.norm(offset - axial * field.axis)
        if math.atan2(radial, axial) > field.half_angle:
            return np.zeros(3)
        return field.vector.copy()
    raise ValueError("unknown wind kind {!r}".format(field.kind))


def total_wind(position, time, fields):
    wind = np.zeros(3)
    for field in fields:
        wind = wind + wind_at(position, time, field)
    return wind
