"""File-backed vault of paired records.

Pair ``k`` (1-based) lives at part-2 address ``k`` and part-1 address
``1000 - k``; at most 498 pairs fit. A message is cut into chunks of up to 144
characters, each chunk ending in the part-1 address of the next one (0 at the
end), and its handle is the part-1 address of the first chunk.

File layout::

    GEOVAULT v1
    META <key>=<value> ...
    REC <address> <value>        (ascending address)
"""

from __future__ import annotations

import contextlib
import fcntl
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from . import codec
from .codec import RecordPair, StoredRecord
from .errors import (
    AddressNotFound,
    BrokenChain,
    CapacityExceeded,
    CorruptVault,
    CycleDetected,
    EmptyMessage,
    EmptyQuery,
    GeoVaultError,
    StorageUnavailable,
)
from .geokey import GeoFix
from .lockscreen import LockMeta

MAGIC = "GEOVAULT v1"
MAX_PAIRS = 498
ADDRESS_SPAN = 1000
CHUNK_SIZE = codec.MAX_CHUNK


def part1_address(k: int) -> int:
    return ADDRESS_SPAN - k


def part2_address(k: int) -> int:
    return k


@dataclass
class Vault:
    records: dict[int, str] = field(default_factory=dict)
    pairs_allocated: int = 0
    meta: Optional[LockMeta] = None
    location: Optional[GeoFix] = None
    path: Optional[Path] = None

    @property
    def capacity_left(self) -> int:
        return MAX_PAIRS - self.pairs_allocated

    def record(self, address: int) -> StoredRecord:
        try:
            value = self.records[address]
        except KeyError:
            raise AddressNotFound(f"no record at address {address}") from None
        return StoredRecord.parse(address, value)

    def pair_at(self, handle: int) -> RecordPair:
        part1 = self.record(handle)
        a2, odd = divmod(part1.header.link_field, 2)
        if odd or a2 == 0:
            raise BrokenChain(f"record {handle} links to {part1.header.link_field}, not a doubled address")
        try:
            part2 = self.record(a2)
        except AddressNotFound:
            raise BrokenChain(f"record {handle} links to missing part-2 record {a2}") from None
        return RecordPair(part1, part2)


# ---------------------------------------------------------------- file format


def dump_vault(v: Vault) -> str:
    meta_fields = v.meta.to_fields() if v.meta is not None else {}
    if v.location is not None:
        meta_fields["loc"] = f"{v.location.lat!r},{v.location.lon!r}"
    meta = " ".join(["META"] + [f"{k}={val}" for k, val in meta_fields.items()])
    lines = [MAGIC, meta]
    lines += [f"REC {addr} {v.records[addr]}" for addr in sorted(v.records)]
    return "\n".join(lines) + "\n"


def _parse_meta(line: str) -> tuple[Optional[LockMeta], Optional[GeoFix]]:
    tokens = line.split(" ")
    if tokens[0] != "META":
        raise CorruptVault("second line must be the META line")
    fields: dict[str, str] = {}
    for tok in tokens[1:]:
        key, sep, val = tok.partition("=")
        if not sep or not key:
            raise CorruptVault(f"bad META token {tok!r}")
        fields[key] = val
    location = None
    if "loc" in fields:
        try:
            lat, lon = (float(x) for x in fields.pop("loc").split(","))
            location = GeoFix(lat, lon)
        except (ValueError, GeoVaultError) as exc:
            raise CorruptVault(f"bad stored location: {exc}") from None
    meta = LockMeta.from_fields(fields) if fields else None
    return meta, location


def parse_vault(text: str, path: Optional[Path] = None) -> Vault:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 2 or lines[0] != MAGIC:
        raise CorruptVault(f"missing {MAGIC!r} header")
    meta, location = _parse_meta(lines[1])

    records: dict[int, str] = {}
    last = 0
    for lineno, line in enumerate(lines[2:], start=3):
        tag, _, rest = line.partition(" ")
        addr_text, _, value = rest.partition(" ")
        if tag != "REC" or not addr_text.isdigit():
            raise CorruptVault(f"line {lineno}: expected 'REC <address> <value>'")
        addr = int(addr_text)
        if addr <= last:
            raise CorruptVault(f"line {lineno}: address {addr} out of order")
        try:
            codec.decode_header(value)
        except GeoVaultError as exc:
            raise CorruptVault(f"line {lineno}: {exc.name}: {exc}") from None
        records[addr] = value
        last = addr

    part2 = sorted(a for a in records if a <= MAX_PAIRS)
    k = part2[-1] if part2 else 0
    expected = {part2_address(i) for i in range(1, k + 1)} | {part1_address(i) for i in range(1, k + 1)}
    if set(records) != expected:
        stray = sorted(set(records) ^ expected)
        raise CorruptVault(f"records do not form {k} contiguous pairs (stray or missing: {stray[:5]})")
    return Vault(records, k, meta, location, path)


def open_vault(path: str | Path, create_if_missing: bool = False) -> Vault:
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
    except FileNotFoundError:
        if create_if_missing:
            return Vault(path=path)
        raise StorageUnavailable(f"no vault at {path}") from None
    except UnicodeDecodeError:
        raise CorruptVault(f"{path} is not printable ASCII text") from None
    except OSError as exc:
        raise StorageUnavailable(f"cannot read {path}: {exc.strerror}") from None
    return parse_vault(text, path)


def save_vault(v: Vault, path: str | Path | None = None) -> None:
    """Write the vault atomically (temp file in the same directory, then rename)."""
    target = Path(path) if path is not None else v.path
    if target is None:
        raise StorageUnavailable("vault has no backing path")
    data = dump_vault(v).encode("ascii")
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or ".")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, target)
        except BaseException:
            with contextlib.suppress(OSError):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise StorageUnavailable(f"cannot write {target}: {exc.strerror}") from None


@contextlib.contextmanager
def vault_lock(path: str | Path) -> Iterator[None]:
    """Advisory exclusive lock held for the duration of a mutating command."""
    lock_path = Path(f"{path}.lock")
    try:
        f = open(lock_path, "a")
    except OSError as exc:
        raise StorageUnavailable(f"cannot lock {path}: {exc.strerror}") from None
    with f:
        fcntl.flock(f, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(f, fcntl.LOCK_UN)


# ---------------------------------------------------------------- messages


def split_chunks(text: str) -> list[str]:
    return [text[i : i + CHUNK_SIZE] for i in range(0, len(text), CHUNK_SIZE)]


def put_message(v: Vault, text: str, fix: GeoFix, persist: bool = True) -> int:
    """Store ``text`` and return its handle (part-1 address of the first chunk).

    Every pair is built before the vault is touched, so a rejected chunk
    leaves it unchanged; with a backing path the write is all-or-nothing.
    """
    if not text:
        raise EmptyMessage("message is empty")
    codec.check_alphabet(text)
    chunks = split_chunks(text)
    if len(chunks) > v.capacity_left:
        raise CapacityExceeded(
            f"message needs {len(chunks)} pairs, only {v.capacity_left} of {MAX_PAIRS} left"
        )

    first_k = v.pairs_allocated + 1
    pairs = []
    for i, chunk in enumerate(chunks):
        k = first_k + i
        nxt = part1_address(k + 1) if i + 1 < len(chunks) else 0
        pair = codec.assemble_pair(codec.attach_pointer(chunk, nxt), fix, part1_address(k), part2_address(k))
        pairs.append(pair)

    before = (dict(v.records), v.pairs_allocated)
    for pair in pairs:
        v.records[pair.part1.address] = pair.part1.value
        v.records[pair.part2.address] = pair.part2.value
    v.pairs_allocated += len(pairs)
    if persist and v.path is not None:
        try:
            save_vault(v)
        except StorageUnavailable:
            v.records, v.pairs_allocated = before
            raise
    return part1_address(first_k)


def get_message(v: Vault, handle: int) -> str:
    if handle not in v.records or handle <= MAX_PAIRS:
        raise AddressNotFound(f"no message starts at {handle}")
    parts = []
    seen: set[int] = set()
    addr = handle
    while addr:
        if addr in seen:
            raise CycleDetected(f"chain starting at {handle} revisits {addr}")
        seen.add(addr)
        if addr not in v.records:
            raise BrokenChain(f"chain starting at {handle} points to missing address {addr}")
        chunk, addr = codec.disassemble_pair(v.pair_at(addr))
        parts.append(chunk)
    return "".join(parts)


def list_records(v: Vault) -> list[tuple[int, str]]:
    """Raw stored values in address order. Never decrypts."""
    return [(addr, v.records[addr]) for addr in sorted(v.records)]


def message_handles(v: Vault) -> list[int]:
    """Handles of every stored message, oldest first."""
    pointed_to = set()
    for k in range(1, v.pairs_allocated + 1):
        try:
            _, nxt = codec.disassemble_pair(v.pair_at(part1_address(k)))
        except GeoVaultError:
            continue
        pointed_to.add(nxt)
    return [part1_address(k) for k in range(1, v.pairs_allocated + 1) if part1_address(k) not in pointed_to]


def find_messages(v: Vault, term: str) -> list[tuple[int, str]]:
    if not term:
        raise EmptyQuery("search term is empty")
    hits = []
    for handle in message_handles(v):
        text = get_message(v, handle)
        if term in text:
            hits.append((handle, text))
    return hits
