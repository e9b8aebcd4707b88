"""Backend-agnostic display lists for instrument faces.

A RenderPlan is an ordered list of drawing primitives plus the semantic
geometry needed to invert the picture back into a reading without
rasterizing: pointers carry their angle and owning scale id, level marks
carry their axis position, and the plan maps scale ids to the scales that
decode them. ``read_back`` is that inversion and serves as the label
consistency oracle for every generated sample.

Coordinates are pixels with y growing downward. Angles on primitives are
radians clockwise from 12 o'clock, matching scale_math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .core import GaugekitError
from .scale_math import (
    AngularScale,
    LinearScale,
    angle_to_value,
    clock_from_angles,
    dial_train_decode,
    vernier_value,
)

Color = tuple[int, int, int]


class ReadBackError(GaugekitError):
    """The plan's semantic geometry could not be inverted to a reading."""


def face_point(cx: float, cy: float, angle: float, radius: float) -> tuple[float, float]:
    """Point at ``radius`` from (cx, cy) along an angle clockwise from 12."""
    return cx + radius * math.sin(angle), cy - radius * math.cos(angle)


# ---------------------------------------------------------------------------
# Primitives (draw order = list order)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Disc:
    cx: float
    cy: float
    r: float
    color: Color


@dataclass(frozen=True)
class Ring:
    cx: float
    cy: float
    r: float
    width: float
    color: Color


@dataclass(frozen=True)
class RadialShade:
    """Soft radial gradient from inner_color at the center to outer_color at r."""

    cx: float
    cy: float
    r: float
    inner_color: Color
    outer_color: Color


@dataclass(frozen=True)
class ArcStroke:
    cx: float
    cy: float
    r: float
    start: float
    end: float
    width: float
    color: Color


@dataclass(frozen=True)
class Segment:
    x0: float
    y0: float
    x1: float
    y1: float
    width: float
    color: Color


@dataclass(frozen=True)
class Poly:
    points: tuple[tuple[float, float], ...]
    color: Color


@dataclass(frozen=True)
class TextRun:
    text: str
    x: float
    y: float
    size: float
    color: Color
    align: str = "center"  # left | center | right
    rotation: float = 0.0  # radians clockwise, about the anchor


@dataclass(frozen=True)
class SegmentCell:
    """One seven-segment digit cell; ``char`` is the displayed character."""

    x: float
    y: float
    w: float
    h: float
    char: str
    on_color: Color
    off_color: Color
    show_dp: bool = False


@dataclass(frozen=True)
class DrumCell:
    """One odometer drum window showing ``digit``, rolled up by ``offset`` drums."""

    x: float
    y: float
    w: float
    h: float
    digit: int
    offset: float  # 0 <= offset < 1, fraction rolled toward the next digit
    face_color: Color
    glyph_color: Color
    frame_color: Color


@dataclass(frozen=True)
class Pointer:
    """A needle. Carries its semantic angle and owning scale id."""

    cx: float
    cy: float
    angle: float  # radians clockwise from 12 o'clock
    length: float
    width: float
    color: Color
    scale_id: str
    back_length: float = 0.0


@dataclass(frozen=True)
class LevelLine:
    """Horizontal fill/meniscus mark; its y position encodes the reading."""

    x0: float
    x1: float
    y: float
    width: float
    color: Color
    scale_id: str


@dataclass(frozen=True)
class EdgeLine:
    """Vertical edge mark; its x position encodes the reading."""

    x: float
    y0: float
    y1: float
    width: float
    color: Color
    scale_id: str


Primitive = Union[
    Disc,
    Ring,
    RadialShade,
    ArcStroke,
    Segment,
    Poly,
    TextRun,
    SegmentCell,
    DrumCell,
    Pointer,
    LevelLine,
    EdgeLine,
]


# ---------------------------------------------------------------------------
# Scale references (semantic decode targets for marks)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AngularRef:
    scale: AngularScale


@dataclass(frozen=True)
class AxisRef:
    """A linear scale laid out between two pixel anchor points."""

    scale: LinearScale
    p_min: tuple[float, float]
    p_max: tuple[float, float]

    def pixel_at(self, value: float) -> tuple[float, float]:
        t = (value - self.scale.min_value) / self.scale.span
        return (
            self.p_min[0] + t * (self.p_max[0] - self.p_min[0]),
            self.p_min[1] + t * (self.p_max[1] - self.p_min[1]),
        )

    def value_at(self, point: tuple[float, float]) -> float:
        dx = self.p_max[0] - self.p_min[0]
        dy = self.p_max[1] - self.p_min[1]
        denom = dx * dx + dy * dy
        t = ((point[0] - self.p_min[0]) * dx + (point[1] - self.p_min[1]) * dy) / denom
        return self.scale.min_value + t * self.scale.span


ScaleRef = Union[AngularRef, AxisRef]


# ---------------------------------------------------------------------------
# Readout descriptors (how to combine decoded marks into one reading)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointerReadout:
    scale_id: str


@dataclass(frozen=True)
class ClockReadout:
    hour_id: str
    minute_id: str
    second_id: Optional[str] = None


@dataclass(frozen=True)
class LevelReadout:
    scale_id: str


@dataclass(frozen=True)
class VernierReadout:
    main_index: int
    coincident_tick: int
    main_resolution: float
    vernier_divisions: int


@dataclass(frozen=True)
class DialTrainReadout:
    scale_ids: tuple[str, ...]  # units dial first
    alternate_direction: bool = False


@dataclass(frozen=True)
class DigitsReadout:
    """Decode seven-segment cells (left to right) as a decimal number."""


@dataclass(frozen=True)
class DrumReadout:
    """Decode odometer drums (left to right, highest place first)."""


@dataclass(frozen=True)
class CaliperReadout:
    """Linear jaw position refined by a rotary fraction dial."""

    axis_scale_id: str
    dial_scale_id: str


Readout = Union[
    PointerReadout,
    ClockReadout,
    LevelReadout,
    VernierReadout,
    DialTrainReadout,
    DigitsReadout,
    DrumReadout,
    CaliperReadout,
]


@dataclass
class RenderPlan:
    width: int
    height: int
    background: Color
    primitives: list[Primitive] = field(default_factory=list)
    scales: dict[str, ScaleRef] = field(default_factory=dict)
    readout: Optional[Readout] = None

    def add(self, *prims: Primitive) -> "RenderPlan":
        self.primitives.extend(prims)
        return self


# ---------------------------------------------------------------------------
# Read-back oracle
# ---------------------------------------------------------------------------

def _pointer(plan: RenderPlan, scale_id: str) -> Pointer:
    for p in plan.primitives:
        if isinstance(p, Pointer) and p.scale_id == scale_id:
            return p
    raise ReadBackError(f"no pointer with scale id {scale_id!r}")


def _angular(plan: RenderPlan, scale_id: str) -> AngularScale:
    ref = plan.scales.get(scale_id)
    if not isinstance(ref, AngularRef):
        raise ReadBackError(f"scale id {scale_id!r} is not an angular scale")
    return ref.scale


def _pointer_value(plan: RenderPlan, scale_id: str) -> float:
    return angle_to_value(_angular(plan, scale_id), _pointer(plan, scale_id).angle)


def _level_value(plan: RenderPlan, scale_id: str) -> float:
    ref = plan.scales.get(scale_id)
    if not isinstance(ref, AxisRef):
        raise ReadBackError(f"scale id {scale_id!r} is not an axis")
    for p in plan.primitives:
        if isinstance(p, LevelLine) and p.scale_id == scale_id:
            return ref.value_at(((p.x0 + p.x1) / 2.0, p.y))
        if isinstance(p, EdgeLine) and p.scale_id == scale_id:
            return ref.value_at((p.x, (p.y0 + p.y1) / 2.0))
    raise ReadBackError(f"no level mark with scale id {scale_id!r}")


_SEGMENT_DIGITS = "0123456789"


def read_back(plan: RenderPlan) -> float:
    """Invert the plan's semantic geometry into the displayed reading.

    Goes through the same scale mathematics the generators used forward
    (angle_to_value, vernier reconstruction, dial-train decode), so a
    generator bug that breaks the picture/label correspondence surfaces
    here rather than in model scores.
    """
    r = plan.readout
    if r is None:
        raise ReadBackError("plan has no readout descriptor")

    if isinstance(r, PointerReadout):
        return _pointer_value(plan, r.scale_id)

    if isinstance(r, ClockReadout):
        hour_pos = _pointer_value(plan, r.hour_id)  # hours in [0, 12)
        minute_pos = _pointer_value(plan, r.minute_id)  # minutes in [0, 60)
        second_deg = None
        if r.second_id is not None:
            second_deg = _pointer_value(plan, r.second_id) * 6.0
        state = clock_from_angles(hour_pos * 30.0, minute_pos * 6.0, second_deg)
        return float(state.face_seconds())

    if isinstance(r, LevelReadout):
        return _level_value(plan, r.scale_id)

    if isinstance(r, VernierReadout):
        return vernier_value(
            r.main_index, r.coincident_tick, r.main_resolution, r.vernier_divisions
        )

    if isinstance(r, DialTrainReadout):
        positions = []
        for k, sid in enumerate(r.scale_ids):
            pos = _pointer_value(plan, sid)
            positions.append(pos)
        return float(dial_train_decode(positions))

    if isinstance(r, DigitsReadout):
        cells = sorted(
            (p for p in plan.primitives if isinstance(p, SegmentCell)),
            key=lambda c: c.x,
        )
        if not cells:
            raise ReadBackError("no segment cells to decode")
        text = ""
        for c in cells:
            if c.char not in _SEGMENT_DIGITS and c.char not in "- ":
                raise ReadBackError(f"undecodable segment cell char {c.char!r}")
            text += c.char
            if c.show_dp:
                text += "."
        try:
            return float(text.replace(" ", "") or "0")
        except ValueError:
            raise ReadBackError(f"segment cells spell {text!r}") from None

    if isinstance(r, DrumReadout):
        drums = sorted(
            (p for p in plan.primitives if isinstance(p, DrumCell)),
            key=lambda d: d.x,
        )
        if not drums:
            raise ReadBackError("no drums to decode")
        value = 0
        for d in drums:
            value = value * 10 + d.digit
        return float(value)

    if isinstance(r, CaliperReadout):
        frac = _pointer_value(plan, r.dial_scale_id)  # one main unit per turn
        raw = _level_value(plan, r.axis_scale_id)
        whole = round(raw - frac)
        return whole + frac

    raise ReadBackError(f"unknown readout {type(r).__name__}")
