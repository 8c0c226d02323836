"""Pattern lock over a 4x4 grid with fence-triggered rotation.

Cells are numbered 0..15 row-major. A pattern is an ordered run of distinct
cells; only a salted SHA-256 of its canonical form is kept. Leaving the fence
records a rotation proposal seeded from the new location; the old pattern is
then needed to accept or skip it, and plaintext stays closed until one of the
two happens.
"""

from __future__ import annotations

import enum
import hashlib
import hmac
import os
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .errors import (
    CorruptVault,
    DuplicateCell,
    LengthOutOfRange,
    NoRotationPending,
    PatternMismatch,
    PatternTooShort,
)
from .geokey import GeoFix, quantize_digits
from .geosim import GeoFence, inside

GRID_SIDE = 4
GRID_CELLS = GRID_SIDE * GRID_SIDE
MIN_PATTERN = 4
SALT_BYTES = 16
DIGEST_ALGORITHM = "sha256"


@dataclass(frozen=True)
class Pattern:
    cells: tuple[int, ...]

    def __post_init__(self) -> None:
        cells = tuple(int(c) for c in self.cells)
        if len(cells) < MIN_PATTERN:
            raise PatternTooShort(f"pattern needs at least {MIN_PATTERN} cells, got {len(cells)}")
        if len(cells) > GRID_CELLS:
            raise LengthOutOfRange(f"pattern longer than {GRID_CELLS} cells")
        for c in cells:
            if not 0 <= c < GRID_CELLS:
                raise LengthOutOfRange(f"cell {c} outside 0..{GRID_CELLS - 1}")
        if len(set(cells)) != len(cells):
            raise DuplicateCell(f"pattern repeats a cell: {cells}")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def parse(cls, text: str) -> Pattern:
        """Parse the dash-separated form, e.g. ``0-5-10-15``."""
        return cls(tuple(parse_cells(text)))

    def __str__(self) -> str:
        return serialize_cells(self.cells)

    def __len__(self) -> int:
        return len(self.cells)


def parse_cells(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(part) for part in text.split("-")]
    except ValueError:
        raise PatternMismatch(f"unreadable pattern {text!r}") from None


def serialize_cells(cells: Sequence[int]) -> str:
    return "-".join(str(int(c)) for c in cells)


def pattern_digest(salt: bytes, cells: Sequence[int]) -> bytes:
    return hashlib.sha256(salt + serialize_cells(cells).encode("ascii")).digest()


@dataclass(frozen=True)
class LockMeta:
    pattern_digest: bytes
    salt: bytes
    fence: GeoFence
    pattern_len: int
    pending_rotation: bool = False
    proposed_seed: Optional[tuple[str, str]] = None

    def __post_init__(self) -> None:
        if self.pending_rotation and self.proposed_seed is None:
            raise ValueError("pending rotation without a proposed seed")

    def to_fields(self) -> dict[str, str]:
        fields = {
            "digest": self.pattern_digest.hex(),
            "salt": self.salt.hex(),
            "fence": self.fence.as_text(),
            "plen": str(self.pattern_len),
            "pending": "1" if self.pending_rotation else "0",
        }
        if self.pending_rotation:
            fields["seed"] = ",".join(self.proposed_seed)
        return fields

    @classmethod
    def from_fields(cls, fields: dict[str, str]) -> LockMeta:
        try:
            digest = bytes.fromhex(fields["digest"])
            salt = bytes.fromhex(fields["salt"])
            fence = GeoFence.parse(fields["fence"])
            plen = int(fields["plen"])
            pending = {"0": False, "1": True}[fields["pending"]]
            seed = None
            if pending:
                lat_seed, lon_seed = fields["seed"].split(",")
                if not (len(lat_seed) == len(lon_seed) == 4 and (lat_seed + lon_seed).isdigit()):
                    raise ValueError(f"bad seed {fields['seed']!r}")
                seed = (lat_seed, lon_seed)
        except (KeyError, ValueError) as exc:
            raise CorruptVault(f"bad lock metadata: {exc}") from None
        if len(digest) != 32 or len(salt) != SALT_BYTES or not MIN_PATTERN <= plen <= GRID_CELLS:
            raise CorruptVault("lock metadata fields have wrong sizes")
        return cls(digest, salt, fence, plen, pending, seed)


class SessionState(enum.Enum):
    LOCKED = "locked"
    UNLOCKED = "unlocked"


@dataclass(frozen=True)
class Session:
    state: SessionState = SessionState.LOCKED
    rotation_pending: bool = False

    @property
    def unlocked(self) -> bool:
        return self.state is SessionState.UNLOCKED


class Request(enum.Enum):
    READ_PLAINTEXT = "read-plaintext"
    READ_RAW = "read-raw"


class Access(enum.Enum):
    ALLOW = "allow"
    JUNK_ONLY = "junk-only"


def enroll(pattern: Pattern, fence: GeoFence, salt: bytes | None = None) -> LockMeta:
    """Register ``pattern``; ``salt`` is random unless given (tests pin it)."""
    if salt is None:
        salt = os.urandom(SALT_BYTES)
    if len(salt) != SALT_BYTES:
        raise ValueError(f"salt must be {SALT_BYTES} bytes")
    return LockMeta(pattern_digest(salt, pattern.cells), salt, fence, len(pattern))


def verify_pattern(meta: LockMeta, attempt: Sequence[int] | Pattern) -> Session:
    """Return an unlocked session, or raise PatternMismatch.

    ``attempt`` may be any cell sequence, including an empty or malformed one;
    those simply fail to match.
    """
    cells = attempt.cells if isinstance(attempt, Pattern) else tuple(attempt)
    if not hmac.compare_digest(pattern_digest(meta.salt, cells), meta.pattern_digest):
        raise PatternMismatch("pattern does not match")
    return Session(SessionState.UNLOCKED, meta.pending_rotation)


def observe_fix(meta: LockMeta, prev: GeoFix, cur: GeoFix) -> LockMeta:
    """Record a rotation proposal when the device leaves the fence.

    Only an inside-to-outside transition counts. A proposal already pending is
    kept as is, so one excursion yields exactly one rotation event.
    """
    if meta.pending_rotation:
        return meta
    if inside(meta.fence, prev) and not inside(meta.fence, cur):
        seed = (quantize_digits(cur.lat, 90.0), quantize_digits(cur.lon, 180.0))
        return replace(meta, pending_rotation=True, proposed_seed=seed)
    return meta


def _stream(salt: bytes, seed: tuple[str, str]):
    prefix = salt + seed[0].encode("ascii") + seed[1].encode("ascii")
    counter = 0
    while True:
        yield from hashlib.sha256(prefix + counter.to_bytes(8, "big")).digest()
        counter += 1


def generate_pattern(seed: tuple[str, str], salt: bytes, length: int) -> Pattern:
    if not MIN_PATTERN <= length <= GRID_CELLS:
        raise LengthOutOfRange(f"pattern length {length} outside {MIN_PATTERN}..{GRID_CELLS}")
    remaining = list(range(GRID_CELLS))
    stream = _stream(salt, seed)
    cells = [remaining.pop(next(stream) % len(remaining)) for _ in range(length)]
    return Pattern(tuple(cells))


def rotation_pattern(meta: LockMeta) -> Pattern:
    """The pattern an accepted rotation would install."""
    if not meta.pending_rotation:
        raise NoRotationPending("no rotation is pending")
    return generate_pattern(meta.proposed_seed, meta.salt, meta.pattern_len)


def apply_rotation(
    meta: LockMeta,
    old_attempt: Sequence[int] | Pattern,
    accept: bool,
    new_fence: GeoFence | None = None,
) -> LockMeta:
    if not meta.pending_rotation:
        raise NoRotationPending("no rotation is pending")
    verify_pattern(meta, old_attempt)
    if not accept:
        return replace(meta, pending_rotation=False, proposed_seed=None)
    if new_fence is None:
        raise ValueError("accepting a rotation requires a new fence")
    new = rotation_pattern(meta)
    return replace(
        meta,
        pattern_digest=pattern_digest(meta.salt, new.cells),
        fence=new_fence,
        pending_rotation=False,
        proposed_seed=None,
    )


def view_policy(session: Session, request: Request) -> Access:
    if request is Request.READ_RAW:
        return Access.ALLOW
    if session.unlocked and not session.rotation_pending:
        return Access.ALLOW
    return Access.JUNK_ONLY


def prompt_banner(meta: LockMeta) -> str:
    """Prompt line; changes whenever a new pattern has been proposed."""
    if meta.pending_rotation:
        return f"Pattern (rotation proposed for cell {meta.proposed_seed[0]}/{meta.proposed_seed[1]}): "
    return "Pattern: "
