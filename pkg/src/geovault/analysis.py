"""Security audit of the vault scheme.

* ``leak_decrypt_all`` rebuilds every message from the raw records alone: the
  inverse keys sit in the headers, so no location and no pattern are needed.
* ``keyspace_census`` counts how many key pairs a region of the map can
  produce at all.
* ``brute_force_pair`` ignores the header keys and searches that keyspace.
* ``pattern_space`` counts lock patterns for a grid size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable, Mapping

from . import cipher, codec
from .cipher import PermutationKey
from .errors import GeoVaultError, GridTooLarge, LengthOutOfRange
from .geokey import complete_key, quantize_digits

DEFAULT_MAX_CELLS = 10**8
PART2_LIMIT = 498


# ---------------------------------------------------------------- header leak


def leak_decrypt_all(records: Mapping[int, str] | Iterable[tuple[int, str]]) -> list[tuple[int, str]]:
    """Decrypt every message using nothing but the raw ``(address, value)`` records.

    Accepts a mapping, an iterable of pairs, or a ``Vault`` (its ``records``).
    Returns ``(handle, plaintext)`` oldest first.
    """
    if hasattr(records, "records"):
        records = records.records
    raw = dict(records.items() if isinstance(records, Mapping) else records)

    chunks: dict[int, tuple[str, int]] = {}
    for addr in sorted(raw, reverse=True):
        if addr <= PART2_LIMIT:
            continue
        part1 = codec.StoredRecord.parse(addr, raw[addr])
        a2 = part1.header.link_field // 2
        part2 = codec.StoredRecord.parse(a2, raw[a2])
        chunks[addr] = codec.disassemble_pair(codec.RecordPair(part1, part2))

    pointed = {nxt for _, nxt in chunks.values()}
    out = []
    for start in chunks:  # insertion order: descending address, i.e. oldest first
        if start in pointed:
            continue
        text, addr, seen = [], start, set()
        while addr and addr not in seen:
            seen.add(addr)
            chunk, addr = chunks[addr]
            text.append(chunk)
        out.append((start, "".join(text)))
    return out


def leak_decrypt_file(path) -> list[tuple[int, str]]:
    """Same as :func:`leak_decrypt_all`, reading REC lines straight from the file."""
    raw = {}
    with open(path, encoding="ascii") as f:
        for line in f:
            tag, _, rest = line.rstrip("\n").partition(" ")
            if tag == "REC":
                addr, _, value = rest.partition(" ")
                raw[int(addr)] = value
    return leak_decrypt_all(raw)


def redact_keys(value: str) -> str:
    """Blank the inverse-key field of a serialized record."""
    return value[:5] + "000000" + value[11:]


# ---------------------------------------------------------------- keyspace


@dataclass(frozen=True)
class GridSpec:
    lat_range: tuple[float, float]
    lon_range: tuple[float, float]
    step: float = 0.01

    def __post_init__(self) -> None:
        (la, lb), (oa, ob) = self.lat_range, self.lon_range
        if not (la < lb and oa < ob and self.step > 0):
            raise ValueError(f"invalid grid {self}")
        if not (-90 <= la and lb <= 90 and -180 <= oa and ob <= 180):
            raise ValueError(f"grid {self} exceeds coordinate ranges")

    def _axis(self, lo: float, hi: float) -> list[float]:
        lo_d, hi_d, step = Decimal(repr(lo)), Decimal(repr(hi)), Decimal(repr(self.step))
        n = max(1, int(((hi_d - lo_d) / step).to_integral_value()))
        return [float(lo_d + (i + Decimal("0.5")) * step) for i in range(n)]

    def lat_centers(self) -> list[float]:
        return self._axis(*self.lat_range)

    def lon_centers(self) -> list[float]:
        return self._axis(*self.lon_range)

    @property
    def cell_count(self) -> int:
        return len(self.lat_centers()) * len(self.lon_centers())


def _check_size(g: GridSpec, max_cells: int) -> None:
    lat_n = len(g.lat_centers())
    lon_n = len(g.lon_centers())
    if lat_n * lon_n > max_cells:
        raise GridTooLarge(f"{lat_n * lon_n} cells exceeds limit {max_cells}")


def _axis_keys(centers: list[float], limit: float) -> list[tuple[int, float, str, PermutationKey]]:
    """First cell (index, center, seed) producing each distinct key along one axis."""
    seen: dict[PermutationKey, tuple[int, float, str, PermutationKey]] = {}
    for i, c in enumerate(centers):
        seed = quantize_digits(c, limit)
        key = complete_key(seed)
        if key not in seen:
            seen[key] = (i, c, seed, key)
    return list(seen.values())


def keyspace_census(g: GridSpec, max_cells: int = DEFAULT_MAX_CELLS) -> tuple[int, int]:
    """Return ``(distinct_key_pairs, cell_count)`` over the cell centers of ``g``.

    K1 depends on latitude only and K2 on longitude only, so the distinct pairs
    are exactly the product of the per-axis distinct keys.
    """
    _check_size(g, max_cells)
    lat = g.lat_centers()
    lon = g.lon_centers()
    return len(_axis_keys(lat, 90.0)) * len(_axis_keys(lon, 180.0)), len(lat) * len(lon)


# ---------------------------------------------------------------- brute force


@dataclass(frozen=True)
class CandidateResult:
    fix_cell: tuple[str, str]
    lat: float
    lon: float
    plaintext: str
    next_address: int
    score: float
    order: tuple[int, int] = (0, 0)


def score_text(text: str) -> float:
    if not text:
        return 0.0
    return sum(codec.is_admissible_char(ch) for ch in text) / len(text)


def brute_force_pair(
    part1: tuple[int, str],
    part2: tuple[int, str],
    g: GridSpec,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> list[CandidateResult]:
    """Try every key pair reachable from ``g`` against a record pair.

    The key fields of both headers are ignored (they may be redacted). Each
    distinct key pair is tried once and reported at the first cell producing
    it; candidates whose pointer suffix does not parse are dropped. Ranking is
    score descending, then lat-major cell order.
    """
    _check_size(g, max_cells)
    a1, v1 = part1
    a2, v2 = part2
    _, link1, _, ea2 = codec.split_record(v1)
    _, link2, _, ea1 = codec.split_record(v2)
    codec.RecordPair(_unkeyed(a1, link1, ea2), _unkeyed(a2, link2, ea1)).check_links()

    lat_keys = _axis_keys(g.lat_centers(), 90.0)
    lon_keys = _axis_keys(g.lon_centers(), 180.0)
    halves1 = [cipher.decrypt(ea1, cipher.invert_key(k)) for *_, k in lat_keys]
    halves2 = [cipher.decrypt(ea2, cipher.invert_key(k)) for *_, k in lon_keys]

    found = []
    for (i, lat, lat_seed, _), h1 in zip(lat_keys, halves1):
        for (j, lon, lon_seed, _), h2 in zip(lon_keys, halves2):
            try:
                chunk, nxt = codec.detach_pointer(codec.unscramble(h1 + h2))
            except GeoVaultError:
                continue
            found.append(CandidateResult((lat_seed, lon_seed), lat, lon, chunk, nxt, score_text(chunk), (i, j)))
    found.sort(key=lambda c: (-c.score, c.order))
    return found


def _unkeyed(address: int, link: int, ct: str) -> codec.StoredRecord:
    return codec.StoredRecord(address, codec.RecordHeader(0, link, cipher.IDENTITY), ct)


def rank_one(candidates: list[CandidateResult]) -> list[CandidateResult]:
    if not candidates:
        return []
    best = candidates[0].score
    return [c for c in candidates if c.score == best]


# ---------------------------------------------------------------- patterns


def pattern_space(grid_side: int, length: int) -> int:
    """Number of ordered distinct-cell sequences of ``length`` on a square grid."""
    if grid_side < 2:
        raise LengthOutOfRange(f"grid side {grid_side} below 2")
    n = grid_side * grid_side
    if not 1 <= length <= n:
        raise LengthOutOfRange(f"length {length} outside 1..{n}")
    return math.perm(n, length)


# ---------------------------------------------------------------- report lines


def format_candidate(c: CandidateResult) -> str:
    return f"CAND {c.score:.3f} {c.lat:.6g} {c.lon:.6g} {c.plaintext}"


def format_census(distinct: int, cells: int) -> str:
    return f"CENSUS {distinct} {cells}"
