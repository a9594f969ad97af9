"""Scenario files: INI text describing one simulated experiment.

Angles are given in degrees (``*_deg``), arm offsets in millimetres
(``*_mm``), thrust and buoyancy in gram-force (``*_gf``); everything else
is SI. Missing values fall back to the prototype's identified parameters.
"""

import collections
import configparser
import math
import os
import pkgutil
import re

import numpy as np

from .aero import (
    DEFAULT_SCALE,
    calibrate_scale,
    constant_wind,
    default_aero_model,
    fan_jet,
    gust_pulse,
)
from .analysis import PowerModel, calibrate_power_model
from .continuum import ArmException, make_arm_spec
from .control import (
    BASELINE_KINDS,
    AxisGains,
    default_baseline,
    default_gains,
)
from .controllers import (
    CLAW_ACTIONS,
    INTERPOLATIONS,
    ClawEvent,
    Schedule,
    ScriptRow,
)
from .dynamics import (
    GRAM_FORCE,
    DynamicsException,
    make_vehicle_params,
    neutral_buoyancy,
)
from .simulators import run_scenario

MODES = ("script", "attitude", "omni-thrust", "elevator")

TRIMS = ("none", "static", "cruise")

MAX_DT = 0.01

PRESETS = (
    "fig13-float",
    "fig14-spiral",
    "fig15-yaw",
    "fig16-outdoor",
    "fig19-omni",
    "fig19-q",
    "fig20-omni",
    "fig20-q",
    "fig21-elevator",
    "fig21-mass",
)


class ScenarioException(Exception):
    """A base class for all exceptions raised by this module."""


class ParseError(ScenarioException):
    def __init__(self, source, line, field, message):
        super(ParseError, self).__init__(source, line, field, message)
        self.source = source
        self.line = line
        self.field = field
        self.message = message

    def __str__(self):
        where = self.source
        if self.line is not None:
            where = "{}:{}".format(where, self.line)
        if self.field:
            return "{}: {}: {}".format(where, self.field, self.message)
        return "{}: {}".format(where, self.message)


class ValidationError(ScenarioException):
    def __init__(self, source, problems):
        super(ValidationError, self).__init__(source, problems)
        self.source = source
        self.problems = problems

    def __str__(self):
        return "{}: invalid scenario\n{}".format(
            self.source,
            "\n".join("  - {}".format(p) for p in self.problems),
        )


class UnknownPreset(ScenarioException):
    def __init__(self, name):
        super(UnknownPreset, self).__init__(name)
        self.name = name

    def __str__(self):
        return "No scenario file or preset named {!r} (presets: {})".format(
            self.name,
            ", ".join(PRESETS),
        )


ScenarioConfig = collections.namedtuple(
    "ScenarioConfig",
    [
        "name",
        "duration",
        "dt",
        "decimation",
        "seed",
        "mode",
        "params",
        "wind",
        "gains",
        "baseline",
        "initial",
        "reference",
        "script",
        "disturbance",
        "power",
        "thrust",
        "source",
    ],
)

InitialCondition = collections.namedtuple(
    "InitialCondition",
    "p eta v omega q_arm trim jitter",
)

ScriptSpec = collections.namedtuple("ScriptSpec", "rows interpolation claw")

Disturbance = collections.namedtuple(
    "Disturbance",
    "amplitude frequency phase",
)

_AERO_TERMS = ("constant", "alpha", "beta")
_AERO_NAMES = ("drag", "side", "lift", "roll", "pitch", "yaw")
_AXES = ("roll", "pitch", "yaw", "inner")


# Value converters. Each takes the raw text and raises ValueError.


def _text(raw):
    return raw.strip()


def _float(raw):
    return float(raw)


def _int(raw):
    return int(raw)


def _bool(raw):
    value = raw.strip().lower()
    if value in ("1", "yes", "true", "on"):
        return True
    if value in ("0", "no", "false", "off"):
        return False
    raise ValueError("expected yes or no, got {!r}".format(raw))


def _split(raw):
    return [part for part in re.split(r"[,\s]+", raw.strip()) if part]


def _floats(count):
    def convert(raw):
        values = [float(part) for part in _split(raw)]
        if count is not None and len(values) not in count:
            raise ValueError(
                "expected {} values, got {}".format(
                    " or ".join(str(c) for c in count),
                    len(values),
                )
            )
        return values

    return convert


def _choice(options):
    def convert(raw):
        value = raw.strip().lower()
        if value not in options:
            raise ValueError(
                "expected one of {}, got {!r}".format(", ".join(options), raw)
            )
        return value

    return convert


def _rows(raw):
    return [_split(line) for line in raw.splitlines() if line.strip()]


def _scale(raw):
    if raw.strip().lower() == "auto":
        return "auto"
    return float(raw)


def _yaw_ref(part):
    part = part.strip().lower()
    if part in ("hold", "free"):
        return part
    return math.radians(float(part))


def _attitude(raw):
    parts = _split(raw)
    if len(parts) != 3:
        raise ValueError("expected roll, pitch and yaw")
    return (
        math.radians(float(parts[0])),
        math.radians(float(parts[1])),
        _yaw_ref(parts[2]),
    )


_GAIN_KEYS = {
    "{}_{}".format(axis, term): _float
    for axis in _AXES
    for term in ("kp", "ki", "kd")
}

SCHEMA = {
    "scenario": {
        "name": _text,
        "duration": _float,
        "dt": _float,
        "decimation": _int,
        "seed": _int,
        "mode": _choice(MODES),
    },
    "vehicle": {
        "m0": _float,
        "ma": _float,
        "r0": _floats((3,)),
        "inertia": _floats((3, 9)),
        "buoyancy_gf": _float,
        "neutral": _bool,
        "g": _float,
        "thrust_limit_gf": _float,
    },
    "arm": {
        "length": _float,
        "cable_distance": _float,
        "base_offset": _float,
        "reel_radius": _float,
        "teeth": _floats((7,)),
        "motor_limit": _float,
        "rate_sign_y": _float,
    },
    "aero": dict(
        {
            "enabled": _bool,
            "scale": _scale,
            "cruise_speed": _float,
            "cruise_thrust_gf": _float,
            "lateral_bias": _float,
            "validity_deg": _float,
            "damping": _floats((3,)),
        },
        **{
            "{}_{}".format(name, term): _float
            for name in _AERO_NAMES
            for term in _AERO_TERMS
        }
    ),
    "wind": {
        "kind": _choice(("constant", "gust-pulse", "fan-jet")),
        "vector": _floats((3,)),
        "start": _float,
        "end": _float,
        "ramp": _float,
        "apex": _floats((3,)),
        "axis": _floats((3,)),
        "speed": _float,
        "half_angle_deg": _float,
        "reach": _float,
    },
    "controller": dict(
        {
            "lambda": _float,
            "epsilon": _float,
            "rho_theta": _float,
            "d_theta": _float,
            "yaw_sign": _float,
            "roll_limit_deg": _float,
            "thrust_gf": _float,
        },
        **_GAIN_KEYS
    ),
    "baseline": {
        "thrust_limit_gf": _float,
        "vertical_limit_gf": _float,
        "half_span": _float,
        "vertical_arm": _float,
        "vertical_bias_gf": _float,
        "elevator_range_deg": _float,
        "elevator_effectiveness": _float,
        "pitch_kp": _float,
        "pitch_ki": _float,
        "pitch_kd": _float,
        "yaw_kp": _float,
        "yaw_ki": _float,
        "yaw_kd": _float,
    },
    "initial": {
        "p": _floats((3,)),
        "eta_deg": _floats((3,)),
        "v": _floats((3,)),
        "omega": _floats((3,)),
        "delta_mm": _floats((2,)),
        "trim": _choice(TRIMS),
        "jitter_deg": _float,
    },
    "reference": {
        "eta_deg": _attitude,
        "schedule": _rows,
    },
    "script": {
        "rows": _rows,
        "interpolation": _choice(INTERPOLATIONS),
        "claw": _rows,
    },
    "disturbance": {
        "pitch_torque": _float,
        "frequency": _float,
        "phase_deg": _float,
    },
    "power": {
        "voltage": _float,
        "base_ma": _float,
        "idle_ma": _float,
        "thrust_coefficient": _float,
        "duty_ma": _float,
    },
}

_SECTION = re.compile(r"^\s*\[([^\]]+)\]")
_OPTION = re.compile(r"^([^\s#;\[][^=:]*?)\s*[=:]")


def _locate(text):
    """Map (section, key) to the line the key is defined on."""
    lines = {}
    section = None
    for number, line in enumerate(text.splitlines(), 1):
        match = _SECTION.match(line)
        if match:
            section = match.group(1).strip()
            lines[(section, None)] = number
            continue
        match = _OPTION.match(line)
        if match and section is not None:
            lines.setdefault((section, match.group(1).strip().lower()), number)
    return lines


def _schema_for(section):
    if section.startswith("wind."):
        return SCHEMA["wind"]
    return SCHEMA.get(section)


def _read(text, source):
    parser = configparser.ConfigParser(
        interpolation=None,
        comment_prefixes=("#", ";"),
        inline_comment_prefixes=("#",),
        empty_lines_in_values=False,
        default_section="__defaults__",
    )
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as e:
        raise ParseError(source, e.lineno, None, "missing section header")
    except configparser.DuplicateSectionError as e:
        raise ParseError(source, e.lineno, e.section, "duplicate section")
    except configparser.DuplicateOptionError as e:
        raise ParseError(
            source,
            e.lineno,
            "{}.{}".format(e.section, e.option),
            "duplicate key",
        )
    except configparser.ParsingError as e:
        line, content = e.errors[0]
        raise ParseError(source, line, None, "cannot parse {}".format(content))

    located = _locate(text)
    values = collections.OrderedDict()
    for section in parser.sections():
        schema = _schema_for(section)
        if schema is None:
            raise ParseError(
                source,
                located.get((section, None)),
                section,
                "unknown section",
            )
        converted = {}
        for key, raw in parser.items(section):
            field = "{}.{}".format(section, key)
            if key not in schema:
                raise ParseError(
                    source,
                    located.get((section, key)),
                    field,
                    "unknown key",
                )
            try:
                converted[key] = schema[key](raw)
            except ValueError as e:
                raise ParseError(
                    source,
                    located.get((section, key)),
                    field,
                    str(e),
                )
        values[section] = converted
    return values, located


class _Builder(object):
    """Turn converted sections into a `ScenarioConfig`.

    Problems are collected rather than raised one at a time, so a single
    `ValidationError` lists everything wrong with the file.
    """

    def __init__(self, values, located, source):
        self.values = values
        self.located = located
        self.source = source
        self.problems = []

    def section(self, name):
        return self.values.get(name, {})

    def problem(self, section, key, message):
        line = self.located.get((section, key))
        field = section if key is None else "{}.{}".format(section, key)
        if line is not None:
            field = "{} (line {})".format(field, line)
        self.problems.append("{}: {}".format(field, message))

    def row_number(self, section, key, index):
        line = self.located.get((section, key))
        return None if line is None else line + index

    def build(self):
        s = self.section("scenario")
        name = s.get("name", "scenario")
        duration = s.get("duration", 10.0)
        dt = s.get("dt", 0.001)
        decimation = s.get("decimation", 10)
        if duration < 0:
            self.problem("scenario", "duration", "must not be negative")
        if not dt > 0:
            self.problem("scenario", "dt", "must be positive")
        elif dt > MAX_DT:
            self.problem("scenario", "dt", "must not exceed {}".format(MAX_DT))
        if decimation < 1:
            self.problem("scenario", "decimation", "must be at least 1")
        mode = s.get("mode", "script")

        params = self.build_params()
        gains = self.build_gains()
        baseline = self.build_baseline(mode)
        thrust = self.build_thrust(params)
        initial = self.build_initial(params)
        reference = self.build_reference()
        script = self.build_script(mode, params)
        wind = self.build_wind()
        disturbance = self.build_disturbance()
        power = self.build_power()
        if self.problems:
            raise ValidationError(self.source, self.problems)
        return ScenarioConfig(
            name=name,
            duration=float(duration),
            dt=float(dt),
            decimation=int(decimation),
            seed=int(s.get("seed", 0)),
            mode=mode,
            params=params,
            wind=wind,
            gains=gains,
            baseline=baseline,
            initial=initial,
            reference=reference,
            script=script,
            disturbance=disturbance,
            power=power,
            thrust=thrust,
            source=self.source,
        )

    def build_params(self):
        a = self.section("arm")
        try:
            arm = make_arm_spec(
                L=a.get("length", 0.30),
                d=a.get("cable_distance", 0.04),
                h=a.get("base_offset", 0.30),
                r_reel=a.get("reel_radius", 0.005),
                tooth_counts=a.get("teeth", (20,) * 7),
                motor_limit=a.get("motor_limit", 40.0),
                rate_sign_y=a.get("rate_sign_y", 1.0),
            )
        except (ValueError, ArmException) as e:
            self.problem("arm", None, str(e))
            return None

        v = self.section("vehicle")
        if "vehicle" in self.values:
            for key in ("m0", "ma"):
                if key not in v:
                    self.problem("vehicle", None, "{} is required".format(key))
            if "m0" not in v or "ma" not in v:
                return None
        ae = self.section("aero")
        aero = None
        if ae.get("enabled", True):
            overrides = {}
            for key, value in ae.items():
                name, _, term = key.partition("_")
                if name in _AERO_NAMES and term in _AERO_TERMS:
                    overrides[(name, term)] = value
            scale = ae.get("scale", DEFAULT_SCALE)
            try:
                aero = default_aero_model(
                    scale=1.0 if scale == "auto" else scale,
                    lateral_bias=ae.get("lateral_bias", 1.0),
                    validity=math.radians(ae.get("validity_deg", 30.0)),
                    damping=ae.get("damping", (-0.073, -0.052, -0.032)),
                    overrides=overrides,
                )
            except ValueError as e:
                self.problem("aero", None, str(e))
                return None
        inertia = v.get("inertia", (0.035, 0.020, 0.015))
        if len(inertia) == 9:
            inertia = np.reshape(inertia, (3, 3))
        try:
            params = make_vehicle_params(
                arm,
                aero=aero,
                m0=v.get("m0", 0.10869),
                ma=v.get("ma", 0.09221),
                r0=v.get("r0", (0.0, 0.0, 0.05)),
                J=inertia,
                Fb=v.get("buoyancy_gf", 194.23) * GRAM_FORCE,
                g=v.get("g", 9.81),
                thrust_limit=v.get("thrust_limit_gf", 30.0) * GRAM_FORCE,
            )
        except ValueError as e:
            self.problem("vehicle", None, str(e))
            return None
        if v.get("neutral", False):
            params = neutral_buoyancy(params)
        if aero is not None and ae.get("scale") == "auto":
            speed = ae.get("cruise_speed", 0.5)
            thrust = ae.get("cruise_thrust_gf", 8.0) * GRAM_FORCE
            try:
                scale = calibrate_scale(params, thrust, speed)
            except (ValueError, DynamicsException) as e:
                self.problem(
                    "aero", "scale", "calibration failed: {}".format(e)
                )
                return None
            params = params._replace(aero=aero._replace(scale=scale))
        return params

    def build_gains(self):
        c = self.section("controller")
        changes = {}
        for axis in _AXES:
            if any("{}_{}".format(axis, t) in c for t in ("kp", "ki", "kd")):
                default = getattr(default_gains(), axis)
                changes[axis] = AxisGains(
                    *(
                        c.get("{}_{}".format(axis, t), default[i])
                        for i, t in enumerate(("kp", "ki", "kd"))
                    )
                )
        for key, field in (
            ("lambda", "lam"),
            ("epsilon", "epsilon"),
            ("rho_theta", "rho_theta"),
            ("d_theta", "D_theta"),
            ("yaw_sign", "yaw_sign"),
        ):
            if key in c:
                changes[field] = c[key]
        if "roll_limit_deg" in c:
            changes["roll_limit"] = math.radians(c["roll_limit_deg"])
        try:
            return default_gains(**changes)
        except ValueError as e:
            self.problem("controller", None, str(e))
            return None

    def build_baseline(self, mode):
        b = self.section("baseline")
        if mode == "attitude":
            if b:
                self.problem("baseline", None, "not used in attitude mode")
            return None
        # Scripts may deflect an elevator through their last column.
        kind = mode if mode in BASELINE_KINDS else "elevator"
        changes = {}
        for key, field, factor in (
            ("thrust_limit_gf", "thrust_limit", GRAM_FORCE),
            ("vertical_limit_gf", "vertical_limit", GRAM_FORCE),
            ("half_span", "half_span", 1.0),
            ("vertical_arm", "vertical_arm", 1.0),
            ("vertical_bias_gf", "vertical_bias", GRAM_FORCE),
            ("elevator_range_deg", "elevator_range", math.pi / 180.0),
            ("elevator_effectiveness", "elevator_effectiveness", 1.0),
        ):
            if key in b:
                changes[field] = b[key] * factor
        default = default_baseline(kind)
        for axis in ("pitch", "yaw"):
            gains = getattr(default, axis)
            changes[axis] = AxisGains(
                *(
                    b.get("{}_{}".format(axis, t), gains[i])
                    for i, t in enumerate(("kp", "ki", "kd"))
                )
            )
        try:
            return default_baseline(kind, **changes)
        except ValueError as e:
            self.problem("baseline", None, str(e))
            return None

    def build_thrust(self, params):
        thrust = self.section("controller").get("thrust_gf", 0.0) * GRAM_FORCE
        if thrust < 0:
            self.problem("controller", "thrust_gf", "must not be negative")
        elif params is not None and thrust > params.thrust_limit:
            self.problem("controller", "thrust_gf", "exceeds the thrust limit")
        return thrust

    def build_initial(self, params):
        i = self.section("initial")
        eta = [math.radians(a) for a in i.get("eta_deg", (0.0, 0.0, 0.0))]
        if abs(eta[0]) >= math.pi / 2 or abs(eta[1]) >= math.pi / 2:
            self.problem("initial", "eta_deg", "roll and pitch must be < 90")
        q_arm = [x * 1e-3 for x in i.get("delta_mm", (0.0, 0.0))]
        if params is not None:
            radius = params.arm.workspace_radius
            if math.hypot(*q_arm) > radius:
                self.problem(
                    "initial",
                    "delta_mm",
                    "outside the workspace radius {:.1f} mm".format(
                        radius * 1e3
                    ),
                )
        trim = i.get("trim", "none")
        if trim == "cruise" and params is not None and params.aero is None:
            self.problem("initial", "trim", "cruise trim needs aerodynamics")
        jitter = math.radians(i.get("jitter_deg", 0.0))
        if jitter < 0:
            self.problem("initial", "jitter_deg", "must not be negative")
        return InitialCondition(
            p=tuple(i.get("p", (0.0, 0.0, 0.0))),
            eta=tuple(eta),
            v=tuple(i.get("v", (0.0, 0.0, 0.0))),
            omega=tuple(i.get("omega", (0.0, 0.0, 0.0))),
            q_arm=tuple(q_arm),
            trim=trim,
            jitter=jitter,
        )

    def build_reference(self):
        r = self.section("reference")
        times, setpoints = [], []
        if "eta_deg" in r:
            times.append(0.0)
            setpoints.append(self._setpoint(r["eta_deg"]))
        for index, row in enumerate(r.get("schedule", ())):
            try:
                if len(row) != 4:
                    raise ValueError("expected t, roll, pitch, yaw")
                t = float(row[0])
                eta = _attitude(" ".join(row[1:]))
            except ValueError as e:
                self.problem(
                    "reference",
                    "schedule",
                    "row {}: {}".format(index + 1, e),
                )
                continue
            times.append(t)
            setpoints.append(self._setpoint(eta))
        if not times:
            return Schedule((0.0,), ((0.0, 0.0, None),))
        if any(b <= a for a, b in zip(times, times[1:])):
            self.problem("reference", "schedule", "times must increase")
        return Schedule(tuple(times), tuple(setpoints))

    @staticmethod
    def _setpoint(eta):
        phi, theta, psi = eta
        return (phi, theta, None if psi == "free" else psi)

    def build_script(self, mode, params):
        sc = self.section("script")
        if mode != "script":
            if sc:
                self.problem("script", None, "only used in script mode")
            return None
        rows = []
        for index, parts in enumerate(sc.get("rows", ())):
            try:
                if len(parts) not in (4, 5):
                    raise ValueError(
                        "expected t, dx_mm, dy_mm, F_gf[, de_deg]"
                    )
                values = [float(p) for p in parts] + [0.0]
            except ValueError as e:
                self.problem(
                    "script", "rows", "row {}: {}".format(index + 1, e)
                )
                continue
            rows.append(
                ScriptRow(
                    t=values[0],
                    delta_x=values[1] * 1e-3,
                    delta_y=values[2] * 1e-3,
                    F=values[3] * GRAM_FORCE,
                    elevator=math.radians(values[4]),
                )
            )
        if not rows:
            self.problem("script", "rows", "at least one row is required")
        times = [row.t for row in rows]
        if any(b <= a for a, b in zip(times, times[1:])):
            self.problem("script", "rows", "times must increase")
        if params is not None:
            radius = params.arm.workspace_radius
            for row in rows:
                if math.hypot(row.delta_x, row.delta_y) > radius:
                    self.problem(
                        "script",
                        "rows",
                        "offset at t={} outside the workspace".format(row.t),
                    )
                if not 0 <= row.F <= params.thrust_limit:
                    self.problem(
                        "script",
                        "rows",
                        "thrust at t={} outside [0, limit]".format(row.t),
                    )
        claw = []
        for index, parts in enumerate(sc.get("claw", ())):
            if len(parts) != 2 or parts[1].lower() not in CLAW_ACTIONS:
                self.problem(
                    "script",
                    "claw",
                    "row {}: expected t, open|close|grasp".format(index + 1),
                )
                continue
            try:
                claw.append(ClawEvent(float(parts[0]), parts[1].lower()))
            except ValueError as e:
                self.problem("script", "claw", str(e))
        return ScriptSpec(
            rows=tuple(rows),
            interpolation=sc.get("interpolation", "linear"),
            claw=tuple(claw),
        )

    def build_wind(self):
        fields = []
        for section, w in self.values.items():
            if not section.startswith("wind."):
                continue
            kind = w.get("kind", "constant")
            try:
                if kind == "constant":
                    fields.append(constant_wind(w.get("vector", (0, 0, 0))))
                elif kind == "gust-pulse":
                    for key in ("vector", "start", "end"):
                        if key not in w:
                            raise ValueError("{} is required".format(key))
                    fields.append(
                        gust_pulse(
                            w["vector"],
                            w["start"],
                            w["end"],
                            w.get("ramp", 0.0),
                        )
                    )
                else:
                    for key in ("apex", "axis", "speed", "half_angle_deg"):
                        if key not in w:
                            raise ValueError("{} is required".format(key))
                    fields.append(
                        fan_jet(
                            w["apex"],
                            w["axis"],
                            w["speed"],
                            math.radians(w["half_angle_deg"]),
                            w.get("reach"),
                        )
                    )
            except ValueError as e:
                self.problem(section, None, str(e))
        return tuple(fields)

    def build_disturbance(self):
        d = self.section("disturbance")
        if not d:
            return None
        frequency = d.get("frequency", 0.0)
        if frequency < 0:
            self.problem("disturbance", "frequency", "must not be negative")
        return Disturbance(
            amplitude=d.get("pitch_torque", 0.0),
            frequency=frequency,
            phase=math.radians(d.get("phase_deg", 0.0)),
        )

    def build_power(self):
        p = self.section("power")
        voltage = p.get("voltage", 7.4)
        base = p.get("base_ma", 80.0)
        duty = p.get("duty_ma", 50.0)
        if "idle_ma" in p or "thrust_coefficient" in p:
            if not ("idle_ma" in p and "thrust_coefficient" in p):
                self.problem(
                    "power",
                    None,
                    "idle_ma and thrust_coefficient go together",
                )
                return None
            return PowerModel(
                voltage,
                base,
                p["idle_ma"],
                p["thrust_coefficient"],
                duty,
            )
        return calibrate_power_model(
            voltage=voltage,
            base=base,
            duty_coefficient=duty,
        )


def loads_scenario(text, source="<string>"):
    """Parse and validate scenario text."""
    values, located = _read(text, source)
    return _Builder(values, located, source).build()


def list_presets():
    return list(PRESETS)


def preset_text(name):
    if name not in PRESETS:
        raise UnknownPreset(name)
    data = pkgutil.get_data(__package__, "presets/{}.ini".format(name))
    return data.decode("utf-8")


def load_scenario(path):
    """Load a scenario file, or a bundled preset when no such file exists."""
    path = os.fspath(path)
    if os.path.isfile(path):
        with open(path, encoding="utf-8") as f:
            return loads_scenario(f.read(), source=path)
    if path in PRESETS:
        return loads_scenario(preset_text(path), source=path)
    raise UnknownPreset(path)


def open_loop(config):
    """The same flight with the arm and thrust frozen at their start."""
    dx, dy = config.initial.q_arm
    row = ScriptRow(0.0, dx, dy, config.thrust, 0.0)
    return config._replace(
        name="{}-open-loop".format(config.name),
        mode="script",
        baseline=None,
        script=ScriptSpec(rows=(row,), interpolation="hold", claw=()),
    )


def _run_seeded(args):
    config, seed = args
    return run_scenario(config._replace(seed=seed))


def run_repeated(config, runs, executor=None):
    """Run ``config`` several times with consecutive seeds.

    Each run draws its own initial attitude jitter from its seed. Pass a
    `concurrent.futures` executor to run them in parallel.
    """
    if runs < 1:
        raise ValueError("at least one run is required")
    jobs = [(config, config.seed + index) for index in range(runs)]
    if executor is None:
        return [_run_seeded(job) for job in jobs]
    return list(executor.map(_run_seeded, jobs))
