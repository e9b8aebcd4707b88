"""Domain model, generator registry, seed derivation, and manifest persistence.

A dataset is a manifest (one JSON record per line, plus a header) binding
sample ids, labels, image paths, and the seeds that regenerate them.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .textnorm import normalize_text

SCHEMA = "measurebench/1"
PIPELINE_VERSION = "1.0.0"

_U64 = (1 << 64) - 1


class GaugekitError(Exception):
    """Base class for toolkit errors."""


class DuplicateAppearanceError(GaugekitError):
    """Raised when an appearance id is registered twice."""

    def __init__(self, appearance_id: str):
        super().__init__(f"appearance id already registered: {appearance_id!r}")
        self.appearance_id = appearance_id


class UnknownAppearanceError(GaugekitError, KeyError):
    def __init__(self, appearance_id: str):
        super().__init__(f"no generator registered for {appearance_id!r}")
        self.appearance_id = appearance_id


class ManifestError(GaugekitError):
    """Manifest file is malformed; carries the offending line and field."""

    def __init__(self, lineno: int, field_name: Optional[str], message: str):
        where = f"line {lineno}"
        if field_name:
            where += f", field {field_name!r}"
        super().__init__(f"{where}: {message}")
        self.lineno = lineno
        self.field_name = field_name


class DesignKind(Enum):
    """The four readout designs an instrument face can use."""

    DIAL = "dial"
    DIGITAL = "digital"
    LINEAR = "linear"
    COMPOSITE = "composite"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ReadingCandidate:
    """One acceptable grading target: a closed value interval plus optional units.

    Unit strings are trimmed, unicode-normalized, and deduplicated at
    construction so grading never depends on annotation encoding.
    """

    interval_lo: float
    interval_hi: float
    units: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if not (self.interval_lo <= self.interval_hi):
            raise ValueError(
                f"interval_lo {self.interval_lo} > interval_hi {self.interval_hi}"
            )
        if self.units is not None:
            cleaned = []
            for u in self.units:
                u = normalize_text(u).strip()
                if not u:
                    raise ValueError("unit strings must be non-empty after trimming")
                if u not in cleaned:
                    cleaned.append(u)
            object.__setattr__(self, "units", tuple(sorted(cleaned)))

    def contains(self, value: float) -> bool:
        return self.interval_lo <= value <= self.interval_hi

    @property
    def width(self) -> float:
        return self.interval_hi - self.interval_lo

    @property
    def midpoint(self) -> float:
        return (self.interval_lo + self.interval_hi) / 2.0


_EXPECT_KINDS = ("numeric", "time", "either")


@dataclass(frozen=True)
class SampleLabel:
    """Ground truth for one generated image."""

    candidates: tuple[ReadingCandidate, ...]
    design: DesignKind
    instrument_type: str
    appearance_id: str
    truth_value: float
    truth_unit: Optional[str] = None
    expect: str = "numeric"

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("label must carry at least one candidate")
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not any(c.contains(self.truth_value) for c in self.candidates):
            raise ValueError(
                f"truth_value {self.truth_value} outside every candidate interval"
            )
        if self.expect not in _EXPECT_KINDS:
            raise ValueError(f"expect must be one of {_EXPECT_KINDS}")


@dataclass(frozen=True)
class Sample:
    """One benchmark row: image, question, label, and the seed that made it."""

    id: str
    image_path: str
    question: str
    label: SampleLabel
    seed: int
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not (0 <= self.seed <= _U64):
            raise ValueError("seed must fit in 64 unsigned bits")
        object.__setattr__(self, "meta", dict(self.meta))


@dataclass(frozen=True)
class DatasetManifest:
    pipeline_version: str
    master_seed: int
    samples: tuple[Sample, ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        seen = set()
        for s in self.samples:
            if s.id in seen:
                raise ValueError(f"duplicate sample id {s.id!r}")
            seen.add(s.id)

    def by_id(self) -> dict[str, Sample]:
        return {s.id: s for s in self.samples}


@dataclass(frozen=True)
class GeneratorDescriptor:
    """A registered instrument appearance and its generate function.

    ``generate(seed, config)`` returns ``(RenderPlan, SampleLabel, question)``.
    """

    appearance_id: str
    design: DesignKind
    instrument_type: str
    generate: Callable


class GeneratorRegistry:
    """Ordered, write-once mapping of appearance ids to generators.

    Lookup fails closed: unknown ids raise rather than returning a default.
    The registry is meant to be fully populated at startup and treated as
    immutable afterwards.
    """

    def __init__(self):
        self._by_id: dict[str, GeneratorDescriptor] = {}

    def register(self, descriptor: GeneratorDescriptor) -> "GeneratorRegistry":
        if descriptor.appearance_id in self._by_id:
            raise DuplicateAppearanceError(descriptor.appearance_id)
        self._by_id[descriptor.appearance_id] = descriptor
        return self

    def lookup(self, appearance_id: str) -> GeneratorDescriptor:
        try:
            return self._by_id[appearance_id]
        except KeyError:
            raise UnknownAppearanceError(appearance_id) from None

    def descriptors(self) -> list[GeneratorDescriptor]:
        """All descriptors in registration order."""
        return list(self._by_id.values())

    def appearance_ids(self) -> list[str]:
        return list(self._by_id)

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, appearance_id: str) -> bool:
        return appearance_id in self._by_id

    def __iter__(self) -> Iterator[GeneratorDescriptor]:
        return iter(self._by_id.values())


# ---------------------------------------------------------------------------
# Seed derivation and deterministic RNG
# ---------------------------------------------------------------------------

def _avalanche64(x: int) -> int:
    """Finalizer of the splitmix64 generator (Steele et al.); bijective on u64."""
    x &= _U64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _U64
    return (x ^ (x >> 31)) & _U64


_FNV_PRIME = 0x100000001B3


def derive_sample_seed(master_seed: int, appearance_id: str, index: int) -> int:
    """Derive the per-sample seed from the run seed, appearance, and index.

    Construction: the master seed is avalanched (splitmix64 finalizer), the
    appearance id's UTF-8 bytes are folded in FNV-1a style, the index is
    xored in, and the result is avalanched twice more. Pure arithmetic on
    64-bit integers, so the mapping is identical on every platform.
    """
    if index < 0:
        raise ValueError("index must be >= 0")
    h = _avalanche64(master_seed)
    for b in appearance_id.encode("utf-8"):
        h = ((h ^ b) * _FNV_PRIME) & _U64
    h = _avalanche64(h)
    h = _avalanche64(h ^ (index & _U64))
    return h


class Rng:
    """Deterministic 64-bit PRNG (splitmix64 stream).

    Python's random module does not promise cross-version stream stability
    for all methods, and dataset regeneration must be exact years from now,
    so the pipeline uses this self-contained generator throughout.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _U64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _U64
        return _avalanche64(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], rejection-sampled for exactness."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span

    def choice(self, seq: Sequence):
        if not seq:
            raise ValueError("cannot choose from an empty sequence")
        return seq[self.randint(0, len(seq) - 1)]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]

    def split(self, label: str) -> "Rng":
        """Child stream keyed by a label; independent of draws on the parent."""
        return Rng(derive_sample_seed(self._state, label, 0))


# ---------------------------------------------------------------------------
# Manifest serialization (line-oriented records, canonical bytes)
# ---------------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _candidate_to_json(c: ReadingCandidate) -> dict:
    return {
        "interval_lo": c.interval_lo,
        "interval_hi": c.interval_hi,
        "units": list(c.units) if c.units is not None else None,
    }


def _sample_to_json(s: Sample) -> dict:
    return {
        "id": s.id,
        "image_path": s.image_path,
        "question": s.question,
        "label": {
            "candidates": [_candidate_to_json(c) for c in s.label.candidates],
            "design": s.label.design.value,
            "instrument_type": s.label.instrument_type,
            "appearance_id": s.label.appearance_id,
            "truth_value": s.label.truth_value,
            "truth_unit": s.label.truth_unit,
            "expect": s.label.expect,
        },
        "seed": s.seed,
        "meta": {k: s.meta[k] for k in sorted(s.meta)},
    }


def serialize_manifest(manifest: DatasetManifest) -> bytes:
    """Canonical UTF-8 bytes: header record, then one sample record per line."""
    lines = [
        _dump(
            {
                "schema": SCHEMA,
                "pipeline_version": manifest.pipeline_version,
                "master_seed": manifest.master_seed,
            }
        )
    ]
    lines.extend(_dump(_sample_to_json(s)) for s in manifest.samples)
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_manifest(manifest: DatasetManifest, path: str | os.PathLike) -> None:
    data = serialize_manifest(manifest)
    with open(path, "wb") as f:
        f.write(data)


def _need(record: dict, key: str, lineno: int):
    if key not in record:
        raise ManifestError(lineno, key, "missing field")
    return record[key]


def _parse_candidate(obj, lineno: int) -> ReadingCandidate:
    if not isinstance(obj, dict):
        raise ManifestError(lineno, "candidates", "candidate is not an object")
    lo = _need(obj, "interval_lo", lineno)
    hi = _need(obj, "interval_hi", lineno)
    units = obj.get("units")
    if not isinstance(lo, (int, float)) or not isinstance(hi, (int, float)):
        raise ManifestError(lineno, "interval_lo", "interval bounds must be numbers")
    try:
        return ReadingCandidate(
            float(lo), float(hi), tuple(units) if units is not None else None
        )
    except (TypeError, ValueError) as e:
        raise ManifestError(lineno, "candidates", str(e)) from None


def _parse_sample(record: dict, lineno: int) -> Sample:
    label_obj = _need(record, "label", lineno)
    if not isinstance(label_obj, dict):
        raise ManifestError(lineno, "label", "label is not an object")
    cands = _need(label_obj, "candidates", lineno)
    if not isinstance(cands, list) or not cands:
        raise ManifestError(lineno, "candidates", "must be a non-empty list")
    design_token = _need(label_obj, "design", lineno)
    try:
        design = DesignKind(design_token)
    except ValueError:
        raise ManifestError(lineno, "design", f"unknown design {design_token!r}") from None
    try:
        label = SampleLabel(
            candidates=tuple(_parse_candidate(c, lineno) for c in cands),
            design=design,
            instrument_type=_need(label_obj, "instrument_type", lineno),
            appearance_id=_need(label_obj, "appearance_id", lineno),
            truth_value=float(_need(label_obj, "truth_value", lineno)),
            truth_unit=label_obj.get("truth_unit"),
            expect=label_obj.get("expect", "numeric"),
        )
    except ManifestError:
        raise
    except (TypeError, ValueError) as e:
        raise ManifestError(lineno, "label", str(e)) from None
    seed = _need(record, "seed", lineno)
    if not isinstance(seed, int) or not (0 <= seed <= _U64):
        raise ManifestError(lineno, "seed", "seed must be a 64-bit unsigned integer")
    try:
        return Sample(
            id=_need(record, "id", lineno),
            image_path=_need(record, "image_path", lineno),
            question=_need(record, "question", lineno),
            label=label,
            seed=seed,
            meta=record.get("meta", {}),
        )
    except ManifestError:
        raise
    except (TypeError, ValueError) as e:
        raise ManifestError(lineno, None, str(e)) from None


def parse_manifest(data: bytes) -> DatasetManifest:
    text = data.decode("utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ManifestError(1, "schema", "empty manifest file")
    records = []
    for i, line in enumerate(lines, start=1):
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as e:
            raise ManifestError(i, None, f"invalid JSON record: {e.msg}") from None
    header = records[0]
    if not isinstance(header, dict):
        raise ManifestError(1, "schema", "header is not an object")
    schema = _need(header, "schema", 1)
    if schema != SCHEMA:
        raise ManifestError(1, "schema", f"unsupported schema {schema!r}")
    samples = [_parse_sample(r, i) for i, r in enumerate(records[1:], start=2)]
    try:
        return DatasetManifest(
            pipeline_version=_need(header, "pipeline_version", 1),
            master_seed=_need(header, "master_seed", 1),
            samples=tuple(samples),
        )
    except ValueError as e:
        raise ManifestError(1, None, str(e)) from None


def read_manifest(path: str | os.PathLike) -> DatasetManifest:
    with open(path, "rb") as f:
        return parse_manifest(f.read())
