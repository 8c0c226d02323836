"""Simulated location source: rectangular fences and scripted CSV traces."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from .errors import FenceInvalid, IndexOutOfRange, OutOfRangeCoordinate, StorageUnavailable, TraceFormatError
from .geokey import GeoFix


@dataclass(frozen=True)
class GeoFence:
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def __post_init__(self) -> None:
        if not (self.lat_min < self.lat_max and self.lon_min < self.lon_max):
            raise FenceInvalid(f"empty fence {self.as_text()}")
        if not (-90 <= self.lat_min and self.lat_max <= 90 and -180 <= self.lon_min and self.lon_max <= 180):
            raise FenceInvalid(f"fence {self.as_text()} exceeds coordinate ranges")

    @classmethod
    def parse(cls, text: str) -> GeoFence:
        """Parse ``latmin,latmax,lonmin,lonmax``."""
        parts = text.split(",")
        if len(parts) != 4:
            raise FenceInvalid(f"fence needs 4 comma-separated numbers: {text!r}")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError as exc:
            raise FenceInvalid(f"bad fence {text!r}: {exc}") from None

    def as_text(self) -> str:
        return ",".join(repr(float(v)) for v in (self.lat_min, self.lat_max, self.lon_min, self.lon_max))

    def contains(self, other: GeoFence) -> bool:
        return (
            self.lat_min <= other.lat_min
            and other.lat_max <= self.lat_max
            and self.lon_min <= other.lon_min
            and other.lon_max <= self.lon_max
        )


def inside(fence: GeoFence, fix: GeoFix) -> bool:
    """Closed-rectangle membership; the boundary counts as inside."""
    return fence.lat_min <= fix.lat <= fence.lat_max and fence.lon_min <= fix.lon <= fence.lon_max


@dataclass(frozen=True)
class Sample:
    t: float
    fix: GeoFix


@dataclass(frozen=True)
class LocationScript:
    samples: tuple[Sample, ...]

    def __post_init__(self) -> None:
        if not self.samples:
            raise TraceFormatError("a trace needs at least one sample")
        for prev, cur in zip(self.samples, self.samples[1:]):
            if cur.t <= prev.t:
                raise TraceFormatError(f"timestamps must increase strictly: {prev.t} then {cur.t}")

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, index: int) -> Sample:
        return self.samples[index]


def parse_trace(text: str) -> LocationScript:
    samples = []
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 3:
            raise TraceFormatError(f"line {lineno}: expected t,lat,lon, got {len(row)} fields")
        try:
            t, lat, lon = (float(v) for v in row)
            samples.append(Sample(t, GeoFix(lat, lon)))
        except (ValueError, OutOfRangeCoordinate) as exc:
            raise TraceFormatError(f"line {lineno}: {exc}") from None
    if not samples:
        raise TraceFormatError("trace contains no samples")
    return LocationScript(tuple(samples))


def load_trace(path: str | Path) -> LocationScript:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageUnavailable(f"cannot read trace {path}: {exc.strerror}") from None
    return parse_trace(text)


@dataclass(frozen=True)
class DeviceState:
    current: GeoFix
    previous: Optional[GeoFix] = None


MoveListener = Callable[[GeoFix, GeoFix], None]


def step(
    state: DeviceState,
    script: LocationScript,
    index: int,
    on_move: MoveListener | None = None,
) -> DeviceState:
    """Advance the device to ``script[index]``.

    ``on_move(prev, cur)`` is the hook where the lock screen observes the
    movement (see ``lockscreen.observe_fix``).
    """
    if not 0 <= index < len(script):
        raise IndexOutOfRange(f"sample {index} outside trace of {len(script)}")
    new = DeviceState(current=script[index].fix, previous=state.current)
    if on_move is not None:
        on_move(state.current, new.current)
    return new
