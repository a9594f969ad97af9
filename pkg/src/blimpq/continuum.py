import collections
import math

import numpy as np

# Below this value of delta/d the closed forms are 0/0; use the expansion.
SERIES_THRESHOLD = 1e-4

_SQRT3_2 = math.sqrt(3.0) / 2.0
_SQRT3_3 = math.sqrt(3.0) / 3.0


class ArmException(Exception):
    """A base class for all exceptions raised by this module."""


class WorkspaceExceeded(ArmException):
    def __init__(self, delta, limit):
        super(WorkspaceExceeded, self).__init__(delta, limit)
        self.delta = delta
        self.limit = limit

    def __str__(self):
        return "Arm offset {!r} exceeds workspace radius {:.6g} m".format(
            tuple(float(v) for v in self.delta),
            self.limit,
        )


class InconsistentGearTrain(ArmException):
    def __init__(self, ratios):
        super(InconsistentGearTrain, self).__init__(ratios)
        self.ratios = ratios

    def __str__(self):
        return "Gear train ratios must agree, got {}".format(
            ", ".join("{}={:.6g}".format(k, v) for k, v in self.ratios),
        )


ArmConfig = collections.namedtuple("ArmConfig", "delta gamma phi_bend")

CableState = collections.namedtuple("CableState", "deviations")

ReelSpeeds = collections.namedtuple("ReelSpeeds", "first second third")

# Tooth counts in the order n_x, n_1, n_y, n_5', n_y', n_7', n_8.
TOOTH_FIELDS = ("n_x", "n_1", "n_y", "n_5p", "n_yp", "n_7p", "n_8")

_ArmSpec = collections.namedtuple(
    "ArmSpec",
    "L d h k r_reel tooth_counts motor_limit rate_sign_y",
)


class ArmSpec(_ArmSpec):
    """Geometry and drive train of the cable-driven continuum arm.

    Use `make_arm_spec()` to build one; it derives the drive ratio ``k``
    from the tooth counts and rejects a gear train whose three stages do
    not share it.
    """

    __slots__ = ()

    @property
    def workspace_radius(self):
        return workspace_radius(self.d)

    @property
    def max_rates(self):
        """Largest (δ̇x, δ̇y) magnitudes the motors can produce."""
        return q_rates_from_motors(self.motor_limit, self.motor_limit, self)


def make_arm_spec(
    L=0.30,
    d=0.04,
    h=0.30,
    r_reel=0.005,
    tooth_counts=(20, 20, 20, 20, 20, 20, 20),
    motor_limit=40.0,
    rate_sign_y=1.0,
):
    if L <= 0 or d <= 0:
        raise ValueError("arm length and cable distance must be positive")
    if h <= 0:
        raise ValueError("arm base offset must be positive")
    counts = tuple(int(n) for n in tooth_counts)
    if len(counts) != len(TOOTH_FIELDS) or min(counts) <= 0:
        raise ValueError(
            "expected {} positive tooth counts".format(len(TOOTH_FIELDS))
        )
    teeth = dict(zip(TOOTH_FIELDS, counts))
    ratios = [
        ("n_x/n_1", teeth["n_x"] / teeth["n_1"]),
        ("n_y/n_5'", teeth["n_y"] / teeth["n_5p"]),
        ("n_y'/n_7'", teeth["n_yp"] / teeth["n_7p"]),
    ]
    k = ratios[0][1]
    if any(not math.isclose(r, k, rel_tol=1e-12) for _, r in ratios[1:]):
        raise InconsistentGearTrain(ratios)
    if rate_sign_y not in (1, -1, 1.0, -1.0):
        raise ValueError("rate_sign_y must be +1 or -1")
    return ArmSpec(
        L=float(L),
        d=float(d),
        h=float(h),
        k=k,
        r_reel=float(r_reel),
        tooth_counts=counts,
        motor_limit=float(motor_limit),
        rate_sign_y=float(rate_sign_y),
    )


def workspace_radius(d):
    """Largest admissible ‖δ‖, reached when the arc subtends a right angle."""
    return d * math.pi / 2.0


def clamp_to_workspace(delta, d):
    """Project ``delta`` radially onto the workspace disc.

    Returns the (possibly scaled) offset and whether scaling happened.
    """
    delta = np.asarray(delta, dtype=float)
    limit = workspace_radius(d)
    norm = math.hypot(delta[0], delta[1])
    if norm <= limit:
        return delta, False
    return delta * (limit / norm), True


def q_to_arc(delta, d):
    dx, dy = float(delta[0]), float(delta[1])
    norm = math.hypot(dx, dy)
    gamma = norm / d
    if gamma > math.pi / 2.0 * (1.0 + 1e-12):
        raise WorkspaceExceeded((dx, dy), workspace_radius(d))
    if norm == 0.0:
        return ArmConfig(delta=(dx, dy), gamma=0.0, phi_bend=0.0)
    phi = math.atan2(dy, dx)
    if phi < 0.0:
        phi += 2.0 * math.pi
    return ArmConfig(delta=(dx, dy), gamma=gamma, phi_bend=phi)


def arc_to_q(gamma, phi_bend, d):
    return (d * gamma * math.cos(phi_bend), d * gamma * math.sin(phi_bend))


def _half_versine(x):
    # 1 - cos(x) without cancellation.
    s = math.sin(0.5 * x)
    return 2.0 * s * s


def tip_from_q(delta, L, d):
    """Tip translation r'_a of the arm, in the arm base frame.

    The z component points away from the base, i.e. down the body z axis.
    """
    dx, dy = float(delta[0]), float(delta[1])
    s = math.hypot(dx, dy)
    if s / d < SERIES_THRESHOLD:
        a = L / (2.0 * d)
        return np.array([a * dx, a * dy, L * (1.0 - s * s / (6.0 * d * d))])
    x = s / d
    f = L * d * _half_versine(x) / (s * s)
    return np.array([f * dx, f * dy, L * d * math.sin(x) / s])


def tip_jacobian(delta, L, d):
    """Analytic ∂r'_a/∂(δx, δy) as a 3×2 array."""
    dx, dy = float(delta[0]), float(delta[1])
    s = math.hypot(dx, dy)
    if s / d < SERIES_THRESHOLD:
        f = L / (2.0 * d) * (1.0 - s * s / (12.0 * d * d))
        fs = -L / (12.0 * d ** 3)
        gs = -L / (3.0 * d * d)
    else:
        x = s / d
        sin_x = math.sin(x)
        versine = _half_versine(x)
        f = L * d * versine / (s * s)
        # f'(s)/s and g'(s)/s where r' = (δx f, δy f, g).
        fs = (L * sin_x / (s * s) - 2.0 * L * d * versine / s ** 3) / s
        gs = (L * math.cos(x) / s - L * d * sin_x / (s * s)) / s
    return np.array(
        [
            [f + dx * dx * fs, dx * dy * fs],
            [dx * dy * fs, f + dy * dy * fs],
            [dx * gs, dy * gs],
        ]
    )


def cable_deviations(delta):
    dx, dy = float(delta[0]), float(delta[1])
    first = -dx
    second = 0.5 * dx - _SQRT3_2 * dy
    # Closing the triple this way keeps the sum exactly zero.
    third = -(first + second)
    return CableState(deviations=(first, second, third))


def cable_lengths(delta, L):
    return tuple(L + dl for dl in cable_deviations(delta).deviations)


def reel_speeds(omega_in_x, omega_in_y, spec):
    """Output speeds of the three reels of the compound gear train.

    Plain arithmetic on the tooth counts, so rational inputs such as
    `fractions.Fraction` stay exact.
    """
    n_x, n_1, n_y, n_5p, n_yp, n_7p, n_8 = spec.tooth_counts
    first = -omega_in_x * n_x / n_1
    # Gears 4 and 6 share the shaft of gear 1.
    omega_5 = -omega_in_y * n_y / n_5p
    omega_7 = omega_in_y * n_8 * n_yp / (n_7p * n_8)
    second = (first + omega_5) / 2
    third = (first + omega_7) / 2
    return ReelSpeeds(first, second, third)


def q_rates_from_motors(omega_in_x, omega_in_y, spec):
    gain = spec.k * spec.r_reel
    return (
        gain * omega_in_x,
        spec.rate_sign_y * _SQRT3_3 * gain * omega_in_y,
    )


def motors_from_q_rates(ddelta_x, ddelta_y, spec):
    gain = spec.k * spec.r_reel
    return (
        ddelta_x / gain,
        ddelta_y / (spec.rate_sign_y * _SQRT3_3 * gain),
    )


def _rot_x(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def se3_transform(gamma, phi_bend, L):
    """Homogeneous transform from the arm base frame to the tip frame.

    The rotation block is Rz(φ)·Rx(γ)·Rz(−φ); the translation is the same
    tip vector `tip_from_q()` returns for the equivalent q-configuration.
    """
    if gamma < 0.0 or gamma > math.pi / 2.0 * (1.0 + 1e-12):
        raise WorkspaceExceeded(arc_to_q(gamma, phi_bend, 1.0), math.pi / 2)
    transform = np.eye(4)
    transform[:3, :3] = _rot_z(phi_bend) @ _rot_x(gamma) @ _rot_z(-phi_bend)
    # Unit cable distance: the tip only depends on γ, φ and L.
    transform[:3, 3] = tip_from_q(arc_to_q(gamma, phi_bend, 1.0), L, 1.0)
    return transform
