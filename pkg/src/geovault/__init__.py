"""Location-keyed transposition vault with a geofenced pattern lock."""

from .cipher import PermutationKey, decrypt, encrypt, invert_key, transpose_once
from .geokey import GeoFix, complete_key, derive_keys, quantize_digits
from .store import Vault, get_message, list_records, open_vault, put_message

__all__ = [
    "GeoFix",
    "PermutationKey",
    "Vault",
    "complete_key",
    "decrypt",
    "derive_keys",
    "encrypt",
    "get_message",
    "invert_key",
    "list_records",
    "open_vault",
    "put_message",
    "quantize_digits",
    "transpose_once",
]
