"""Coefficient schedules: constant, linearly decreasing inertia, time-varying acceleration.

All schedules are pure functions of the run-global iteration clock; staging
never resets the clock. Endpoint values are exact by construction: the
interpolation computes the fraction ``t / t_max`` first and blends the two
extremes, so t=0 and t=t_max return the configured values bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError

KIND_CONSTANT = "constant"
KIND_LDIW = "ldiw"
KIND_TVAC = "tvac"
_KINDS = (KIND_CONSTANT, KIND_LDIW, KIND_TVAC)

# Constriction-equivalent constants; overridable in any ScheduleSpec.
DEFAULT_OMEGA = 0.729
DEFAULT_C = 1.49445
DEFAULT_OMEGA_MAX = 0.9
DEFAULT_OMEGA_MIN = 0.4
DEFAULT_C1_MAX = 2.5
DEFAULT_C1_MIN = 0.5
DEFAULT_C2_MAX = 2.5
DEFAULT_C2_MIN = 0.5


@dataclass(frozen=True)
class IterationClock:
    """Current iteration t and run length t_max, with 0 <= t <= t_max."""

    t: int
    t_max: int

    def __post_init__(self):
        if self.t_max < 1:
            raise ConfigurationError(f"t_max must be >= 1, got {self.t_max}")
        if not 0 <= self.t <= self.t_max:
            raise ConfigurationError(f"t must be in [0, {self.t_max}], got {self.t}")


@dataclass(frozen=True)
class ScheduleSpec:
    """Which schedule runs and with what extremes.

    Constant fields feed the constant kind and the acceleration
    coefficients of ldiw; the max/min pairs feed the time-varying kinds.
    """

    kind: str = KIND_CONSTANT
    omega_const: float = DEFAULT_OMEGA
    c1_const: float = DEFAULT_C
    c2_const: float = DEFAULT_C
    omega_max: float = DEFAULT_OMEGA_MAX
    omega_min: float = DEFAULT_OMEGA_MIN
    c1_max: float = DEFAULT_C1_MAX
    c1_min: float = DEFAULT_C1_MIN
    c2_max: float = DEFAULT_C2_MAX
    c2_min: float = DEFAULT_C2_MIN

    def __post_init__(self):
        problems = []
        if self.kind not in _KINDS:
            problems.append(f"unknown schedule kind {self.kind!r}; expected one of {_KINDS}")
        fields = (
            "omega_const c1_const c2_const omega_max omega_min "
            "c1_max c1_min c2_max c2_min".split()
        )
        for name in fields:
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                problems.append(f"{name} must be finite and non-negative, got {v}")
        if self.kind in (KIND_LDIW, KIND_TVAC) and self.omega_max < self.omega_min:
            problems.append(f"omega_max {self.omega_max} < omega_min {self.omega_min}")
        if self.kind == KIND_TVAC:
            if self.c1_max < self.c1_min:
                problems.append(f"c1_max {self.c1_max} < c1_min {self.c1_min}")
            if self.c2_max < self.c2_min:
                problems.append(f"c2_max {self.c2_max} < c2_min {self.c2_min}")
        if problems:
            raise ConfigurationError(*problems)

    @classmethod
    def constant(cls, omega=DEFAULT_OMEGA, c1=DEFAULT_C, c2=DEFAULT_C) -> "ScheduleSpec":
        return cls(kind=KIND_CONSTANT, omega_const=omega, c1_const=c1, c2_const=c2)

    @classmethod
    def ldiw(
        cls,
        omega_max=DEFAULT_OMEGA_MAX,
        omega_min=DEFAULT_OMEGA_MIN,
        c1=DEFAULT_C,
        c2=DEFAULT_C,
    ) -> "ScheduleSpec":
        return cls(
            kind=KIND_LDIW, omega_max=omega_max, omega_min=omega_min, c1_const=c1, c2_const=c2
        )

    @classmethod
    def tvac(
        cls,
        omega_max=DEFAULT_OMEGA_MAX,
        omega_min=DEFAULT_OMEGA_MIN,
        c1_max=DEFAULT_C1_MAX,
        c1_min=DEFAULT_C1_MIN,
        c2_max=DEFAULT_C2_MAX,
        c2_min=DEFAULT_C2_MIN,
    ) -> "ScheduleSpec":
        return cls(
            kind=KIND_TVAC,
            omega_max=omega_max,
            omega_min=omega_min,
            c1_max=c1_max,
            c1_min=c1_min,
            c2_max=c2_max,
            c2_min=c2_min,
        )


def _blend(high: float, low: float, fraction: float) -> float:
    # Convex combination: exact at fraction 0 and 1, which the subtractive
    # form high - fraction*(high-low) does not guarantee.
    return high * (1.0 - fraction) + low * fraction


def ldiw_weight(clock: IterationClock, omega_max: float, omega_min: float) -> float:
    """Inertia weight decreasing linearly from omega_max at t=0 to omega_min at t=t_max."""
    if omega_max < omega_min:
        raise ConfigurationError(f"omega_max {omega_max} < omega_min {omega_min}")
    return _blend(omega_max, omega_min, clock.t / clock.t_max)


def tvac_coeffs(clock: IterationClock, spec: ScheduleSpec) -> tuple[float, float]:
    """Acceleration pair: cognitive c1 falls max->min, social c2 rises min->max."""
    if spec.kind != KIND_TVAC:
        raise ConfigurationError(f"tvac_coeffs requires a tvac spec, got kind {spec.kind!r}")
    fraction = clock.t / clock.t_max
    c1 = _blend(spec.c1_max, spec.c1_min, fraction)
    c2 = _blend(spec.c2_min, spec.c2_max, fraction)
    return c1, c2


def coefficients_at(spec: ScheduleSpec, clock: IterationClock) -> tuple[float, float, float]:
    """(omega, c1, c2) for this iteration under the given schedule.

    The tvac kind also runs the decreasing inertia weight; the constant
    kind ignores the clock entirely.
    """
    if spec.kind == KIND_CONSTANT:
        return spec.omega_const, spec.c1_const, spec.c2_const
    if spec.kind == KIND_LDIW:
        return (
            ldiw_weight(clock, spec.omega_max, spec.omega_min),
            spec.c1_const,
            spec.c2_const,
        )
    if spec.kind == KIND_TVAC:
        omega = ldiw_weight(clock, spec.omega_max, spec.omega_min)
        c1, c2 = tvac_coeffs(clock, spec)
        return omega, c1, c2
    raise ConfigurationError(f"unknown schedule kind {spec.kind!r}")
