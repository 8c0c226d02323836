"""Location-derived permutation keys.

A coordinate is truncated to two decimals and reduced to four digits (last
two integer digits plus the two decimals). Those digits seed a permutation of
1..6: usable digits are kept in order and the missing ones appended.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal

from .cipher import BLOCK_SIZE, PermutationKey
from .errors import OutOfRangeCoordinate


@dataclass(frozen=True)
class GeoFix:
    latitude_deg: float
    longitude_deg: float

    def __post_init__(self) -> None:
        _check_range(self.latitude_deg, 90.0, "latitude")
        _check_range(self.longitude_deg, 180.0, "longitude")

    @property
    def lat(self) -> float:
        return self.latitude_deg

    @property
    def lon(self) -> float:
        return self.longitude_deg


def _check_range(value: float, limit: float, what: str) -> None:
    if not (-limit <= value <= limit):
        raise OutOfRangeCoordinate(f"{what} {value!r} outside [-{limit:g}, {limit:g}]")


def quantize_digits(coord: float, limit: float = 180.0) -> str:
    """Return the 4-digit seed for ``coord``: ``26.15875768 -> "2615"``.

    Truncation goes through the shortest decimal repr of the float so that
    e.g. ``26.15`` is not pulled down to ``26.14`` by binary rounding.
    """
    _check_range(coord, limit, "coordinate")
    hundredths = int((abs(Decimal(repr(float(coord)))) * 100).to_integral_value(ROUND_DOWN))
    whole, frac = divmod(hundredths, 100)
    return f"{whole % 100:02d}{frac:02d}"


def complete_key(seed: str) -> PermutationKey:
    if len(seed) != 4 or not seed.isdigit():
        raise ValueError(f"seed must be 4 decimal digits: {seed!r}")
    kept: list[int] = []
    for ch in seed:
        d = int(ch)
        if 1 <= d <= BLOCK_SIZE and d not in kept:
            kept.append(d)
    if not kept:
        return PermutationKey(tuple(range(1, BLOCK_SIZE + 1)))
    top = max(kept)
    missing = [d for d in range(1, BLOCK_SIZE + 1) if d not in kept]
    above = [d for d in missing if d > top]
    below = [d for d in missing if d < top]
    return PermutationKey(tuple(kept + above + below))


def seeds_for(fix: GeoFix) -> tuple[str, str]:
    return quantize_digits(fix.latitude_deg, 90.0), quantize_digits(fix.longitude_deg, 180.0)


def derive_keys(fix: GeoFix) -> tuple[PermutationKey, PermutationKey]:
    lat_seed, lon_seed = seeds_for(fix)
    return complete_key(lat_seed), complete_key(lon_seed)
