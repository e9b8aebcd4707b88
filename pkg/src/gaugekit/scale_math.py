"""Value-to-geometry mathematics for instrument faces.

Angle conventions: dial angles are radians measured clockwise from the
12 o'clock direction (positive y up on the face, before rasterization).
An angular scale maps its value range affinely onto [min_rot, max_rot];
sweeps may run in either direction, so min_rot > max_rot is legal.
Clock hand angles are reported in degrees, clockwise from 12 o'clock.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import GaugekitError, ReadingCandidate, Rng

_REL_TOL = 1e-9


class ScaleRangeError(GaugekitError, ValueError):
    """A value or angle falls outside the scale it is mapped through."""


@dataclass(frozen=True)
class LinearScale:
    """A graduated value axis: majors every ``major_step``, subdivided minors."""

    min_value: float
    max_value: float
    major_step: float
    minor_divisions: int
    unit: str

    def __post_init__(self):
        if not self.min_value < self.max_value:
            raise ValueError("min_value must be < max_value")
        if self.major_step <= 0:
            raise ValueError("major_step must be > 0")
        if self.minor_divisions < 1:
            raise ValueError("minor_divisions must be >= 1")
        ratio = (self.max_value - self.min_value) / self.major_step
        if abs(ratio - round(ratio)) > _REL_TOL * max(1.0, abs(ratio)):
            raise ValueError("scale span must be an integer multiple of major_step")

    @property
    def span(self) -> float:
        return self.max_value - self.min_value

    @property
    def major_intervals(self) -> int:
        return round(self.span / self.major_step)

    @property
    def minor_tick(self) -> float:
        return self.major_step / self.minor_divisions


@dataclass(frozen=True)
class AngularScale:
    """A linear scale wrapped onto an arc between two rotations."""

    scale: LinearScale
    min_rot: float
    max_rot: float

    def __post_init__(self):
        if self.min_rot == self.max_rot:
            raise ValueError("min_rot and max_rot must differ")

    @property
    def sweep(self) -> float:
        return self.max_rot - self.min_rot


@dataclass(frozen=True)
class ClockState:
    hour: int
    minute: int
    second: int = 0

    def __post_init__(self):
        if not 0 <= self.hour <= 23:
            raise ValueError("hour must be in 0..23")
        if not 0 <= self.minute <= 59:
            raise ValueError("minute must be in 0..59")
        if not 0 <= self.second <= 59:
            raise ValueError("second must be in 0..59")

    def face_seconds(self) -> int:
        """Seconds since 12:00:00 on the 12-hour face."""
        return (self.hour % 12) * 3600 + self.minute * 60 + self.second


@dataclass(frozen=True)
class DialTrain:
    """A row of base-10 pointer dials, one per decimal place."""

    num_dials: int
    base: int = 10
    alternate_direction: bool = False

    def __post_init__(self):
        if self.num_dials < 2:
            raise ValueError("a dial train needs at least 2 dials")
        if self.base != 10:
            raise ValueError("dial trains are base 10")


@dataclass(frozen=True)
class VernierLayout:
    """A sliding auxiliary scale refining a main scale reading."""

    main_resolution: float
    vernier_divisions: int
    value: float

    def __post_init__(self):
        if self.main_resolution <= 0:
            raise ValueError("main_resolution must be > 0")
        if self.vernier_divisions < 1:
            raise ValueError("vernier_divisions must be >= 1")
        if self.value < 0:
            raise ValueError("value must be >= 0")

    @property
    def fine_resolution(self) -> float:
        return self.main_resolution / self.vernier_divisions


# ---------------------------------------------------------------------------
# Pointer angle mapping
# ---------------------------------------------------------------------------

def value_to_angle(s: AngularScale, v: float) -> float:
    """Affine map of a value onto the scale's arc: min_rot at min_value."""
    sc = s.scale
    if not sc.min_value <= v <= sc.max_value:
        raise ScaleRangeError(
            f"value {v} outside scale range [{sc.min_value}, {sc.max_value}]"
        )
    t = (v - sc.min_value) / (sc.max_value - sc.min_value)
    return s.min_rot + t * (s.max_rot - s.min_rot)


def angle_to_value(s: AngularScale, theta: float) -> float:
    """Exact inverse of value_to_angle; rejects angles outside the sweep."""
    lo, hi = sorted((s.min_rot, s.max_rot))
    slack = _REL_TOL * max(1.0, hi - lo)
    if not lo - slack <= theta <= hi + slack:
        raise ScaleRangeError(f"angle {theta} outside sweep [{lo}, {hi}]")
    theta = min(max(theta, lo), hi)
    t = (theta - s.min_rot) / (s.max_rot - s.min_rot)
    sc = s.scale
    return sc.min_value + t * (sc.max_value - sc.min_value)


# ---------------------------------------------------------------------------
# Clock hands
# ---------------------------------------------------------------------------

def clock_hand_angles(
    c: ClockState,
    has_second_hand: bool = True,
    hour_seconds_term: bool = False,
) -> tuple[float, float, Optional[float]]:
    """Hand angles in degrees clockwise from 12 o'clock.

    second = 6s, minute = 6m + 0.1s, hour = 30(h mod 12) + 0.5m. The hour
    hand's seconds creep (s/120 degrees) is off by default and can be enabled
    with ``hour_seconds_term``. Without a second hand the third element is
    None; the minute hand still moves continuously with the seconds.
    """
    second_deg = 6.0 * c.second
    minute_deg = 6.0 * c.minute + 0.1 * c.second
    hour_deg = 30.0 * (c.hour % 12) + 0.5 * c.minute
    if hour_seconds_term:
        hour_deg += c.second / 120.0
    return (hour_deg, minute_deg, second_deg if has_second_hand else None)


def clock_from_angles(
    hour_deg: float, minute_deg: float, second_deg: Optional[float]
) -> ClockState:
    """Invert hand angles back to the displayed time (12-hour face).

    Decoding runs fastest hand first: each slower hand's sub-tick creep is
    subtracted before rounding, so float noise on the angles cannot flip a
    digit. Hour 12 is reported as 0.
    """
    s = int(round(second_deg / 6.0)) % 60 if second_deg is not None else 0
    m = int(round((minute_deg - 0.1 * s) / 6.0)) % 60
    h = int(round((hour_deg - 0.5 * m) / 30.0)) % 12
    return ClockState(hour=h, minute=m, second=s)


# ---------------------------------------------------------------------------
# Tick layout
# ---------------------------------------------------------------------------

def tick_positions(s: LinearScale) -> list[tuple[float, bool]]:
    """All tick values on the scale, ascending, flagged major/minor.

    Majors sit at min + k * major_step; each major span is divided into
    ``minor_divisions`` equal parts. Duplicates within 1e-9 are merged.
    """
    ticks: list[tuple[float, bool]] = []
    n = s.major_intervals
    for k in range(n + 1):
        ticks.append((s.min_value + k * s.major_step, True))
        if k < n and s.minor_divisions > 1:
            for j in range(1, s.minor_divisions):
                ticks.append(
                    (s.min_value + k * s.major_step + j * s.minor_tick, False)
                )
    ticks.sort(key=lambda t: (t[0], not t[1]))
    out: list[tuple[float, bool]] = []
    tol = _REL_TOL * max(1.0, abs(s.min_value), abs(s.max_value))
    for v, major in ticks:
        if out and abs(v - out[-1][0]) <= tol:
            continue
        out.append((v, major))
    return out


_NICE_MANTISSAS = (1.0, 2.0, 2.5, 5.0, 10.0)


def _nice_ceil(x: float) -> float:
    """Smallest value m * 10^k >= x with mantissa m in {1, 2, 2.5, 5}."""
    if x <= 0:
        raise ValueError("x must be > 0")
    exp = math.floor(math.log10(x))
    base = 10.0 ** exp
    for m in _NICE_MANTISSAS:
        step = m * base
        if step >= x * (1.0 - _REL_TOL):
            return step
    raise AssertionError("unreachable")


def nice_scale(rng: Rng, range_hint: float, unit_pool: Sequence[str]) -> LinearScale:
    """Draw a readable scale roughly spanning ``range_hint``.

    Picks 3..10 major intervals and rounds the implied step up to the nearest
    1/2/2.5/5 mantissa, so the face never shows awkward graduations.
    """
    if range_hint <= 0:
        raise ValueError("range_hint must be a positive span")
    if not unit_pool:
        raise ValueError("unit_pool must be non-empty")
    intervals = rng.randint(3, 10)
    step = _nice_ceil(range_hint / intervals)
    minor = rng.choice((2, 5, 5, 10))
    unit = rng.choice(unit_pool)
    return LinearScale(
        min_value=0.0,
        max_value=intervals * step,
        major_step=step,
        minor_divisions=minor,
        unit=unit,
    )


# ---------------------------------------------------------------------------
# Multi-dial trains
# ---------------------------------------------------------------------------

def dial_train_angles(value: float, train: DialTrain) -> list[float]:
    """Pointer angle in degrees for each dial; index 0 is the units dial.

    The dial for place value 10^k sits at 36 * ((value / 10^k) mod 10)
    degrees, a real number: lower-order places displace higher-order
    pointers between their ticks, exactly like a geared register. With
    ``alternate_direction`` every odd-indexed dial sweeps counterclockwise
    (its angle is negated).
    """
    if value < 0 or value >= 10 ** train.num_dials:
        raise ValueError(f"value {value} outside 0 <= v < 10^{train.num_dials}")
    angles = []
    for k in range(train.num_dials):
        pos = (value / 10.0 ** k) % 10.0
        deg = 36.0 * pos
        if train.alternate_direction and k % 2 == 1:
            deg = -deg
        angles.append(deg)
    return angles


def dial_train_truth(value: float, n: int) -> int:
    """The reading obtained by the right-to-left protocol: floor(value)."""
    if value < 0 or value >= 10 ** n:
        raise ValueError(f"value {value} outside 0 <= v < 10^{n}")
    return math.floor(value)


def dial_train_decode(positions: Sequence[float]) -> int:
    """Decode per-dial readings (units dial first, each in [0, 10)) to an integer.

    Implements the right-to-left protocol: the units dial is floored, and
    every higher dial's expected sub-tick displacement (reconstructed from
    the lower places) is subtracted before rounding, so a pointer sitting
    just before a tick never gets advanced early.
    """
    digits: list[int] = []
    lower = 0.0
    for k, pos in enumerate(positions):
        pos = pos % 10.0
        if k == 0:
            d = math.floor(pos + 1e-9)
            if d == 10:
                d = 9
            lower = pos
        else:
            d = int(round(pos - lower / 10.0 ** k)) % 10
            lower += d * 10.0 ** k
        digits.append(d)
    return sum(d * 10 ** k for k, d in enumerate(digits))


# ---------------------------------------------------------------------------
# Vernier scales
# ---------------------------------------------------------------------------

def vernier_layout(v: VernierLayout) -> tuple[int, float, int]:
    """(main_index, vernier_offset, coincident_tick) for a slide position.

    main_index counts whole main divisions below the slide zero;
    coincident_tick is the auxiliary tick aligned with a main tick
    (round-half-even on exact ties, clamped to [0, divisions]);
    vernier_offset is the slide translation, i.e. the value itself.
    """
    main_index = math.floor(v.value / v.main_resolution)
    remainder = v.value - main_index * v.main_resolution
    k = round(remainder / v.fine_resolution)
    k = min(max(k, 0), v.vernier_divisions)
    return main_index, v.value, k


def vernier_value(
    main_index: int, coincident_tick: int, main_resolution: float, vernier_divisions: int
) -> float:
    """Reconstruct the reading encoded by a main index and coincident tick."""
    return main_index * main_resolution + coincident_tick * (
        main_resolution / vernier_divisions
    )


# ---------------------------------------------------------------------------
# Label tolerance
# ---------------------------------------------------------------------------

def tolerance_interval(
    truth: float, minor_tick: float, frac: float = 0.5
) -> ReadingCandidate:
    """Acceptable interval around a truth value: +- frac of the finest tick.

    A minor_tick of 0 yields the degenerate [truth, truth] interval used for
    digital readouts, which display the value exactly.
    """
    if minor_tick < 0:
        raise ValueError("minor_tick must be >= 0")
    if not 0 < frac <= 1:
        raise ValueError("frac must be in (0, 1]")
    half = frac * minor_tick
    return ReadingCandidate(truth - half, truth + half)
