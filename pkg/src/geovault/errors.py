"""Exception types raised across the package.

Every domain failure derives from :class:`GeoVaultError`; the CLI prints the
class name as the first token of the error line, so names are part of the
public surface and should not be renamed casually.
"""


class GeoVaultError(Exception):
    """Base class for all domain errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


# cipher
class LengthNotBlockMultiple(GeoVaultError, ValueError):
    pass


class EndsWithPadChar(GeoVaultError, ValueError):
    pass


class EmptyInput(GeoVaultError, ValueError):
    pass


class InvalidKey(GeoVaultError, ValueError):
    pass


# geokey
class OutOfRangeCoordinate(GeoVaultError, ValueError):
    pass


# codec
class ChunkTooLong(GeoVaultError, ValueError):
    pass


class EmptyMessage(GeoVaultError, ValueError):
    pass


class AlphabetViolation(GeoVaultError, ValueError):
    pass


class BadPointerSuffix(GeoVaultError, ValueError):
    pass


class MessageTooShort(GeoVaultError, ValueError):
    pass


class FieldOutOfRange(GeoVaultError, ValueError):
    pass


class BadHeader(GeoVaultError, ValueError):
    pass


class AddressOutOfRange(GeoVaultError, ValueError):
    pass


class LinkMismatch(GeoVaultError):
    pass


class ChunkEndsWithPad(EndsWithPadChar):
    """A split half of a chunk ends in the pad character and would not survive decryption."""


# store
class CorruptVault(GeoVaultError):
    pass


class StorageUnavailable(GeoVaultError, OSError):
    pass


class CapacityExceeded(GeoVaultError):
    pass


class AddressNotFound(GeoVaultError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class BrokenChain(GeoVaultError):
    pass


class CycleDetected(GeoVaultError):
    pass


class EmptyQuery(GeoVaultError, ValueError):
    pass


class NoLocation(GeoVaultError):
    pass


# lockscreen
class PatternTooShort(GeoVaultError, ValueError):
    pass


class DuplicateCell(GeoVaultError, ValueError):
    pass


class FenceInvalid(GeoVaultError, ValueError):
    pass


class PatternMismatch(GeoVaultError):
    pass


class NoRotationPending(GeoVaultError):
    pass


class RotationPending(GeoVaultError):
    """Plaintext access is refused until a pending pattern rotation is accepted or skipped."""


class NotEnrolled(GeoVaultError):
    pass


class LengthOutOfRange(GeoVaultError, ValueError):
    pass


# geosim
class TraceFormatError(GeoVaultError, ValueError):
    pass


class IndexOutOfRange(GeoVaultError, IndexError):
    pass


# analysis
class GridTooLarge(GeoVaultError, ValueError):
    pass


# cli
class VaultExists(GeoVaultError):
    pass
