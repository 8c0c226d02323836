"""Block transposition over 6-digit permutation keys.

A key ``d1..d6`` maps each 6-character block so that output position ``l``
takes input position ``d_l``. Encryption pads with ``'z'`` and transposes
twice with the same key; decryption transposes twice with the inverse key and
strips the trailing pad.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import EmptyInput, EndsWithPadChar, InvalidKey, LengthNotBlockMultiple

BLOCK_SIZE = 6
PAD_CHAR = "z"
PASSES = 2


@dataclass(frozen=True)
class PermutationKey:
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        digits = tuple(self.digits)
        if sorted(digits) != list(range(1, BLOCK_SIZE + 1)):
            raise InvalidKey(f"not a permutation of 1..{BLOCK_SIZE}: {digits!r}")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def parse(cls, text: str) -> PermutationKey:
        if len(text) != BLOCK_SIZE or not text.isdigit():
            raise InvalidKey(f"key must be {BLOCK_SIZE} digits: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def of(cls, value: str | int | Iterable[int] | PermutationKey) -> PermutationKey:
        if isinstance(value, PermutationKey):
            return value
        if isinstance(value, (str, int)):
            return cls.parse(str(value))
        return cls(tuple(value))

    def __str__(self) -> str:
        return "".join(map(str, self.digits))

    def is_identity(self) -> bool:
        return self.digits == tuple(range(1, BLOCK_SIZE + 1))


IDENTITY = PermutationKey(tuple(range(1, BLOCK_SIZE + 1)))


def transpose_once(text: str, key: PermutationKey) -> str:
    n = len(text)
    if n == 0 or n % BLOCK_SIZE:
        raise LengthNotBlockMultiple(f"length {n} is not a positive multiple of {BLOCK_SIZE}")
    idx = [d - 1 for d in key.digits]
    out = []
    for start in range(0, n, BLOCK_SIZE):
        out.extend(text[start + i] for i in idx)
    return "".join(out)


def invert_key(key: PermutationKey) -> PermutationKey:
    inv = [0] * BLOCK_SIZE
    for pos, d in enumerate(key.digits, start=1):
        inv[d - 1] = pos
    return PermutationKey(tuple(inv))


def pad(text: str) -> str:
    return text + PAD_CHAR * (-len(text) % BLOCK_SIZE)


def encrypt(text: str, key: PermutationKey) -> str:
    if not text:
        raise EmptyInput("cannot encrypt empty text")
    if text.endswith(PAD_CHAR):
        raise EndsWithPadChar(f"plaintext may not end with the pad character {PAD_CHAR!r}")
    out = pad(text)
    for _ in range(PASSES):
        out = transpose_once(out, key)
    return out


def decrypt(cipher_text: str, inverse_key: PermutationKey) -> str:
    out = cipher_text
    for _ in range(PASSES):
        out = transpose_once(out, inverse_key)
    return out.rstrip(PAD_CHAR)
