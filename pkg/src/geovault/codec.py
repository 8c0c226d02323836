"""Chunk pipeline between a plaintext chunk and its two stored records.

Forward direction::

    chunk -> chunk + " <next>" -> out-shuffle -> split (A1, A2)
          -> EA1 = E(A1, K1), EA2 = E(A2, K2)
          -> part1 @ a1 = header(code, 2*a2, inv K1) "*" EA2
             part2 @ a2 = header(code,   a2, inv K2) "*" EA1

Each record stores the *other* half's ciphertext next to its own inverse key,
so decoding swaps payloads before decrypting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import cipher
from .cipher import PermutationKey
from .errors import (
    AddressOutOfRange,
    AlphabetViolation,
    BadHeader,
    BadPointerSuffix,
    ChunkEndsWithPad,
    ChunkTooLong,
    EmptyMessage,
    FieldOutOfRange,
    LinkMismatch,
    MessageTooShort,
)
from .geokey import GeoFix, derive_keys

MAX_CHUNK = 144
MAX_ADDRESS = 999
HEADER_WIDTH = 11
DELIMITER = "*"

_HEADER_RE = re.compile(r"^(\d{2})(\d{3})(\d{6})\*")
_POINTER_RE = re.compile(r"^\d{1,3}$")


def is_admissible_char(ch: str) -> bool:
    """Printable ASCII, space included; no control characters or line breaks."""
    return " " <= ch <= "~"


def check_alphabet(text: str) -> None:
    for i, ch in enumerate(text):
        if not is_admissible_char(ch):
            raise AlphabetViolation(f"character {ch!r} at offset {i} is not admissible")


def attach_pointer(chunk: str, next_address: int) -> str:
    if not chunk:
        raise EmptyMessage("chunk is empty")
    if len(chunk) > MAX_CHUNK:
        raise ChunkTooLong(f"chunk of {len(chunk)} chars exceeds {MAX_CHUNK}")
    check_alphabet(chunk)
    if not 0 <= next_address <= MAX_ADDRESS:
        raise AddressOutOfRange(f"pointer {next_address} outside 0..{MAX_ADDRESS}")
    return f"{chunk} {next_address}"


def detach_pointer(text: str) -> tuple[str, int]:
    chunk, sep, tail = text.rpartition(" ")
    if not sep or not _POINTER_RE.match(tail):
        raise BadPointerSuffix(f"no pointer suffix in {text[-12:]!r}")
    return chunk, int(tail)


def scramble(text: str) -> str:
    h = (len(text) + 1) // 2
    first, second = text[:h], text[h:]
    out = []
    for a, b in zip(first, second):
        out.append(a)
        out.append(b)
    if len(first) > len(second):
        out.append(first[-1])
    return "".join(out)


def unscramble(text: str) -> str:
    return text[0::2] + text[1::2]


def split_halves(text: str) -> tuple[str, str]:
    n = len(text)
    if n < 3:
        raise MessageTooShort(f"need at least 3 characters to split, got {n}")
    tail = cipher.BLOCK_SIZE * (n // 12) or n // 2
    return text[: n - tail], text[n - tail :]


def first_char_code(text: str) -> int:
    if not text:
        raise EmptyMessage("no first character")
    ch = text[0].lower()
    if "a" <= ch <= "z":
        return ord(ch) - ord("a") + 1
    return 0


@dataclass(frozen=True)
class RecordHeader:
    first_char_code: int
    link_field: int
    inverse_key: PermutationKey


@dataclass(frozen=True)
class StoredRecord:
    address: int
    header: RecordHeader
    ciphertext: str

    @property
    def value(self) -> str:
        return encode_header(self.header) + self.ciphertext

    @classmethod
    def parse(cls, address: int, value: str) -> StoredRecord:
        header, ct = decode_header(value)
        return cls(address, header, ct)


@dataclass(frozen=True)
class RecordPair:
    part1: StoredRecord
    part2: StoredRecord

    def check_links(self) -> None:
        a2 = self.part2.address
        if self.part1.header.link_field != 2 * a2:
            raise LinkMismatch(
                f"record {self.part1.address} links to {self.part1.header.link_field}, expected {2 * a2}"
            )
        if self.part2.header.link_field != a2:
            raise LinkMismatch(f"record {a2} carries link {self.part2.header.link_field}")


def encode_header(h: RecordHeader) -> str:
    if not 0 <= h.first_char_code <= 26:
        raise FieldOutOfRange(f"character code {h.first_char_code} outside 0..26")
    if not 0 <= h.link_field <= MAX_ADDRESS:
        raise FieldOutOfRange(f"link field {h.link_field} outside 0..{MAX_ADDRESS}")
    return f"{h.first_char_code:02d}{h.link_field:03d}{h.inverse_key}{DELIMITER}"


def split_record(value: str) -> tuple[int, int, str, str]:
    """Parse the fixed-width fields without validating the key digits.

    Returns ``(code, link, key_digits, ciphertext)``.
    """
    m = _HEADER_RE.match(value)
    if m is None:
        raise BadHeader(f"malformed record header: {value[:HEADER_WIDTH + 1]!r}")
    return int(m[1]), int(m[2]), m[3], value[m.end() :]


def decode_header(value: str) -> tuple[RecordHeader, str]:
    code, link, key_digits, ct = split_record(value)
    if code > 26:
        raise BadHeader(f"character code {code} outside 0..26")
    return RecordHeader(code, link, PermutationKey.parse(key_digits)), ct


def _check_address(a: int) -> None:
    if not 1 <= a <= MAX_ADDRESS:
        raise AddressOutOfRange(f"address {a} outside 1..{MAX_ADDRESS}")


def assemble_pair(chunk_with_pointer: str, fix: GeoFix, a1: int, a2: int) -> RecordPair:
    _check_address(a1)
    _check_address(a2)
    if a1 == a2:
        raise AddressOutOfRange(f"pair addresses must differ, both are {a1}")
    if 2 * a2 > MAX_ADDRESS:
        raise AddressOutOfRange(f"part-2 address {a2} cannot be doubled into 3 digits")
    check_alphabet(chunk_with_pointer)

    half1, half2 = split_halves(scramble(chunk_with_pointer))
    for half in (half1, half2):
        if half.endswith(cipher.PAD_CHAR):
            raise ChunkEndsWithPad(f"a split half of {chunk_with_pointer[:20]!r}... ends in the pad character")
    k1, k2 = derive_keys(fix)
    ea1 = cipher.encrypt(half1, k1)
    ea2 = cipher.encrypt(half2, k2)
    code = first_char_code(chunk_with_pointer)
    part1 = StoredRecord(a1, RecordHeader(code, 2 * a2, cipher.invert_key(k1)), ea2)
    part2 = StoredRecord(a2, RecordHeader(code, a2, cipher.invert_key(k2)), ea1)
    return RecordPair(part1, part2)


def open_payloads(ea1: str, ea2: str, inv1: PermutationKey, inv2: PermutationKey) -> str:
    """Decrypt both halves and undo the shuffle, returning the pointer-suffixed chunk."""
    return unscramble(cipher.decrypt(ea1, inv1) + cipher.decrypt(ea2, inv2))


def disassemble_pair(pair: RecordPair) -> tuple[str, int]:
    pair.check_links()
    # part2 holds EA1, which inverts under part1's key (and vice versa)
    text = open_payloads(
        pair.part2.ciphertext,
        pair.part1.ciphertext,
        pair.part1.header.inverse_key,
        pair.part2.header.inverse_key,
    )
    return detach_pointer(text)
