import collections
import math

import numpy as np
from scipy import optimize, stats

from .dynamics import GRAM_FORCE

OPERATIONAL_LIMIT = math.radians(60.0)

_BRACKET = math.radians(89.9)


class AnalysisException(Exception):
    """A base class for all exceptions raised by this module."""


class NoRoot(AnalysisException):
    def __init__(self, theta, arm_kind):
        super(NoRoot, self).__init__(theta, arm_kind)
        self.theta = theta
        self.arm_kind = arm_kind

    def __str__(self):
        return "No {} equilibrium roll for pitch {:.3f} deg".format(
            self.arm_kind,
            math.degrees(self.theta),
        )


class EmptySeries(AnalysisException):
    def __str__(self):
        return "Series has no samples"


class DegenerateTrajectory(AnalysisException):
    def __init__(self, samples, length):
        super(DegenerateTrajectory, self).__init__(samples, length)
        self.samples = samples
        self.length = length

    def __str__(self):
        return "Trajectory of {} samples spans {:.3g} m".format(
            self.samples,
            self.length,
        )


class InsufficientRuns(AnalysisException):
    def __init__(self, runs):
        super(InsufficientRuns, self).__init__(runs)
        self.runs = runs

    def __str__(self):
        return "Need at least 2 runs, got {}".format(self.runs)


_ArmStudyParams = collections.namedtuple("ArmStudyParams", "L h ma ma2")


class ArmStudyParams(_ArmStudyParams):
    """Geometry of the rigid-versus-continuum arm comparison.

    ``ma2`` is the joint actuator mass the rigid arm carries.
    """

    __slots__ = ()

    @property
    def km(self):
        return self.ma2 / self.ma

    @property
    def kl_rigid(self):
        return self.h / self.L

    def kl_continuum(self, theta):
        return self.h / chord_length(theta, self.L)


def make_arm_study(L=0.40, h=0.30, ma=0.030, ma2=0.015):
    if min(L, h, ma, ma2) <= 0:
        raise ValueError("arm study lengths and masses must be positive")
    return ArmStudyParams(float(L), float(h), float(ma), float(ma2))


ArmStudy = collections.namedtuple(
    "ArmStudy",
    "K_cont K_rig phi_cont phi_rig ratio improvement",
)

ErrorSweep = collections.namedtuple("ErrorSweep", "rigid continuum")

MetricsReport = collections.namedtuple(
    "MetricsReport",
    [
        "duration",
        "path_length",
        "horizontal_speed_std",
        "vertical_speed_std",
        "curvature_mean",
        "curvature_std",
        "power_rate",
        "specific_energy",
    ],
)

Ellipse = collections.namedtuple(
    "Ellipse",
    "semi_major semi_minor angle radius",
)

WaypointStats = collections.namedtuple(
    "WaypointStats",
    "mean sigma_theta sigma_phi covariance ellipse",
)


def chord_length(theta, L):
    """Straight-line distance between the ends of an arc of angle θ."""
    if abs(theta) < 1e-8:
        return L * (1.0 - theta * theta / 24.0)
    return 2.0 * L / theta * math.sin(theta / 2.0)


def _constraint(theta, params, arm_kind):
    # Both constraints multiplied through by the sines, so the roots stay
    # put and the residual is bounded on the bracket.
    st, ct = math.sin(theta), math.cos(theta)
    if arm_kind == "rigid":
        lever = ct + (1.0 + params.km) * params.kl_rigid

        def h(phi):
            return math.cos(phi) * st + math.sin(phi) * lever

    elif arm_kind == "continuum":
        lever = ct * st + params.kl_continuum(theta) * theta

        def h(phi):
            return math.cos(phi) * st * st + math.sin(phi) * lever

    else:
        raise ValueError("unknown arm kind {!r}".format(arm_kind))
    return h


def equilibrium_exact(theta, params, arm_kind):
    """Equilibrium roll φ balancing an arm rotated by θ."""
    if abs(theta) > OPERATIONAL_LIMIT * (1.0 + 1e-12):
        raise NoRoot(theta, arm_kind)
    h = _constraint(theta, params, arm_kind)
    if theta == 0.0:
        return 0.0
    lo, hi = -_BRACKET, _BRACKET
    if h(lo) * h(hi) > 0:
        raise NoRoot(theta, arm_kind)
    return optimize.bisect(h, lo, hi, xtol=1e-14)


def equilibrium_closed_form(theta, params, arm_kind):
    """The root of `equilibrium_exact()` written as an arctangent."""
    if theta == 0.0:
        return 0.0
    st, ct = math.sin(theta), math.cos(theta)
    if arm_kind == "rigid":
        lever = ct + (1.0 + params.km) * params.kl_rigid
    elif arm_kind == "continuum":
        lever = ct + params.kl_continuum(theta) * theta / st
    else:
        raise ValueError("unknown arm kind {!r}".format(arm_kind))
    if lever <= 0:
        raise NoRoot(theta, arm_kind)
    return math.atan(-st / lever)


def constraint_residual(phi, theta, params, arm_kind):
    return _constraint(theta, params, arm_kind)(phi)


def linear_gains(params):
    """First-order gains (K_cont, K_rig) of φ ≈ −K·θ."""
    K_cont = 1.0 / (1.0 + params.h / params.L)
    K_rig = 1.0 / (1.0 + (1.0 + params.km) * params.kl_rigid)
    return K_cont, K_rig


def arm_study(params, theta=OPERATIONAL_LIMIT):
    K_cont, K_rig = linear_gains(params)
    return ArmStudy(
        K_cont=K_cont,
        K_rig=K_rig,
        phi_cont=K_cont * theta,
        phi_rig=K_rig * theta,
        ratio=K_rig / K_cont,
        improvement=K_cont / K_rig - 1.0,
    )


def approximation_error_sweep(params, n_points=121, limit=OPERATIONAL_LIMIT):
    """Largest |φ_exact − φ_linear| in radians, per arm, over ±limit."""
    if n_points < 10:
        raise ValueError("the sweep needs at least 10 points")
    K_cont, K_rig = linear_gains(params)
    worst = {"rigid": 0.0, "continuum": 0.0}
    for theta in np.linspace(-limit, limit, n_points):
        for kind, K in (("rigid", K_rig), ("continuum", K_cont)):
            phi = equilibrium_exact(float(theta), params, kind)
            worst[kind] = max(worst[kind], abs(phi + K * theta))
    return ErrorSweep(**worst)


def cum_rmse(series, reference=None, dt=1.0, cumulative=True):
    """Running RMSE of ``series - reference`` over [0, t].

    With ``cumulative`` (the default) the running RMSE is further summed
    over time, so the curve keeps growing while any error persists.
    """
    error = np.asarray(series, dtype=float)
    if reference is not None:
        error = error - np.asarray(reference, dtype=float)
    if error.size == 0:
        raise EmptySeries()
    counts = np.arange(1, error.size + 1)
    running = np.sqrt(np.cumsum(error ** 2) / counts)
    if not cumulative:
        return running
    return np.cumsum(running) * dt


def _curvatures(points, stride):
    values = []
    for k in range(stride, len(points) - stride):
        a, b, c = points[k - stride], points[k], points[k + stride]
        ab, bc, ca = b - a, c - b, a - c
        sides = (
            np.linalg.norm(ab) * np.linalg.norm(bc) * np.linalg.norm(ca)
        )
        if sides == 0.0:
            values.append(0.0)
            continue
        cross = ab[0] * (c - a)[1] - ab[1] * (c - a)[0]
        values.append(2.0 * abs(cross) / sides)
    return np.array(values)


def trajectory_metrics(log, spacing=0.5):
    """Flight metrics of a logged trajectory.

    Curvature is estimated from circles through three horizontal
    positions ``spacing`` seconds apart.
    """
    records = log.records
    if len(records) < 3:
        raise DegenerateTrajectory(len(records), 0.0)
    t = np.array([r.t for r in records])
    p = np.array([r.p for r in records])
    v = np.array([r.v for r in records])
    length = float(np.sum(np.linalg.norm(np.diff(p, axis=0), axis=1)))
    if length < 1e-9:
        raise DegenerateTrajectory(len(records), length)
    duration = float(t[-1] - t[0])
    sample = duration / (len(t) - 1)
    stride = max(1, int(round(spacing / sample)))
    kappa = _curvatures(p[:, :2], stride)
    if kappa.size == 0:
        kappa = np.zeros(1)
    charge = records[-1].charge_mah - records[0].charge_mah
    energy = records[-1].energy_mwh - records[0].energy_mwh
    return MetricsReport(
        duration=duration,
        path_length=length,
        horizontal_speed_std=float(np.std(np.hypot(v[:, 0], v[:, 1]))),
        vertical_speed_std=float(np.std(v[:, 2])),
        curvature_mean=float(np.mean(kappa)),
        curvature_std=float(np.std(kappa)),
        power_rate=charge / (duration / 60.0) if duration > 0 else 0.0,
        specific_energy=energy / length,
    )


def confidence_ellipse(cov, confidence=0.95, scale=None):
    """Axes of the ellipse enclosing ``confidence`` of a bivariate normal.

    The default is the 2σ ellipse holding 95 % of the samples. An explicit
    ``scale`` fixes the Mahalanobis radius instead and takes precedence.
    """
    if scale is None:
        if not 0 < confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")
        scale = math.sqrt(stats.chi2.ppf(confidence, df=2))
    elif not scale > 0:
        raise ValueError("scale must be positive")
    values, vectors = np.linalg.eigh(np.asarray(cov, dtype=float))
    values = np.clip(values, 0.0, None)
    major = vectors[:, 1]
    return Ellipse(
        semi_major=scale * math.sqrt(values[1]),
        semi_minor=scale * math.sqrt(values[0]),
        angle=math.atan2(major[1], major[0]),
        radius=scale,
    )


def attitude_spread(samples, confidence=0.95, scale=None):
    """Sample statistics of (θ, φ) pairs gathered at one waypoint."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] < 2:
        raise InsufficientRuns(0 if samples.ndim != 2 else samples.shape[0])
    cov = np.cov(samples, rowvar=False, ddof=1)
    return WaypointStats(
        mean=samples.mean(axis=0),
        sigma_theta=math.sqrt(cov[0, 0]),
        sigma_phi=math.sqrt(cov[1, 1]),
        covariance=cov,
        ellipse=confidence_ellipse(cov, confidence=confidence, scale=scale),
    )


def ellipse_coverage(samples, stats_):
    """Share of ``samples`` inside the ellipse of ``stats_``."""
    samples = np.asarray(samples, dtype=float)
    offset = samples - stats_.mean
    inverse = np.linalg.pinv(stats_.covariance)
    distance = np.einsum("ij,jk,ik->i", offset, inverse, offset)
    return float(np.mean(distance <= stats_.ellipse.radius ** 2))


def repeatability_stats(runs, waypoints, confidence=0.95, scale=None):
    """Per-waypoint attitude statistics across repeated logs.

    Each waypoint is a time; the sample nearest to it is taken from every
    run.
    """
    runs = list(runs)
    if len(runs) < 2:
        raise InsufficientRuns(len(runs))
    result = []
    for when in waypoints:
        samples = []
        for log in runs:
            times = np.array([r.t for r in log.records])
            if times.size == 0:
                raise EmptySeries()
            record = log.records[int(np.argmin(np.abs(times - when)))]
            samples.append((record.eta[1], record.eta[0]))
        result.append(
            attitude_spread(samples, confidence=confidence, scale=scale)
        )
    return result


_PowerModel = collections.namedtuple(
    "PowerModel",
    "voltage base idle thrust_coefficient duty_coefficient",
)


class PowerModel(_PowerModel):
    """Battery current drawn by the propulsion and the arm motors.

    Currents are in mA, thrusts in N. ``idle`` is drawn per running
    thruster; ``thrust_coefficient`` multiplies Σ F^{3/2}.
    """

    __slots__ = ()

    def current(self, thrusters, thrust_load, duty):
        return (
            self.base
            + thrusters * self.idle
            + self.thrust_coefficient * thrust_load
            + self.duty_coefficient * duty
        )


def thrust_load(thrusts):
    return float(sum(abs(f) ** 1.5 for f in thrusts))


def calibrate_power_model(
    rates=(5.6, 12.5),
    loads=((9.0,), (4.5, 4.5, 6.7)),
    duties=(0.1, 0.0),
    voltage=7.4,
    base=80.0,
    duty_coefficient=50.0,
):
    """Solve idle and thrust coefficients so two flight modes match.

    ``rates`` are battery drain rates in mAh/min for the two modes,
    ``loads`` their per-thruster thrusts in gram-force. The defaults are
    the endurance presets: one 9 gf propeller, and two 4.5 gf side
    propellers with the vertical one carrying the 6.7 gf net weight.
    """
    rows, rhs = [], []
    for rate, load, duty in zip(rates, loads, duties):
        forces = [f * GRAM_FORCE for f in load]
        rows.append([len(forces), thrust_load(forces)])
        rhs.append(rate * 60.0 - base - duty_coefficient * duty)
    try:
        idle, coefficient = np.linalg.solve(np.array(rows), np.array(rhs))
    except np.linalg.LinAlgError:
        raise ValueError("calibration loads do not separate the two modes")
    return PowerModel(
        voltage=float(voltage),
        base=float(base),
        idle=float(idle),
        thrust_coefficient=float(coefficient),
        duty_coefficient=float(duty_coefficient),
    )
