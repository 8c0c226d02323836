import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geovault.cipher import PermutationKey
from geovault.errors import OutOfRangeCoordinate
from geovault.geokey import GeoFix, complete_key, derive_keys, quantize_digits

K = PermutationKey.parse


@pytest.mark.parametrize(
    "coord,digits",
    [
        (26.15875768, "2615"),
        (32.153457537, "3215"),
        (0.0, "0000"),
        (-117.259, "1725"),
        (26.15, "2615"),  # would be 2614 with naive float truncation
        (0.29, "0029"),
        (180.0, "8000"),
    ],
)
def test_quantize_digits(coord, digits):
    assert quantize_digits(coord) == digits


def test_quantize_truncates_not_rounds():
    assert quantize_digits(26.159999) == "2615"
    assert quantize_digits(-0.019) == "0001"


@pytest.mark.parametrize("bad", [180.01, -181, float("nan")])
def test_quantize_out_of_range(bad):
    with pytest.raises(OutOfRangeCoordinate):
        quantize_digits(bad)


def test_geofix_ranges():
    with pytest.raises(OutOfRangeCoordinate):
        GeoFix(90.5, 0)
    with pytest.raises(OutOfRangeCoordinate):
        GeoFix(0, -180.5)


@pytest.mark.parametrize(
    "seed,key",
    [("2615", "261534"), ("3215", "321564"), ("0000", "123456"), ("2215", "215634"), ("7789", "123456"), ("6000", "612345")],
)
def test_complete_key(seed, key):
    assert complete_key(seed) == K(key)


def reference_complete(seed):
    kept = list(dict.fromkeys(int(c) for c in seed if c in "123456"))
    if not kept:
        return tuple(range(1, 7))
    rest = sorted(set(range(1, 7)) - set(kept))
    return tuple(kept + [d for d in rest if d > max(kept)] + [d for d in rest if d < max(kept)])


def test_complete_key_all_seeds():
    seen = set()
    for digits in itertools.product("0123456789", repeat=4):
        seed = "".join(digits)
        key = complete_key(seed)
        assert sorted(key.digits) == [1, 2, 3, 4, 5, 6]
        assert key.digits == reference_complete(seed)
        seen.add(key)
    assert len(seen) <= 720


def test_derive_keys_examples():
    assert derive_keys(GeoFix(26.15875768, 32.153457537)) == (K("261534"), K("321564"))
    assert derive_keys(GeoFix(0.0, 0.0)) == (K("123456"), K("123456"))
    assert derive_keys(GeoFix(26.15999, 32.15001)) == (K("261534"), K("321564"))


@given(
    st.integers(-8999, 8999),
    st.integers(-17999, 17999),
    st.floats(0, 0.0099),
    st.floats(0, 0.0099),
    st.floats(0, 0.0099),
    st.floats(0, 0.0099),
)
def test_cell_stability(lat_c, lon_c, a, b, c, d):
    # two points inside the same 0.01 degree cell (same sign) share keys
    sl = 1 if lat_c >= 0 else -1
    so = 1 if lon_c >= 0 else -1
    base_lat, base_lon = abs(lat_c) / 100, abs(lon_c) / 100
    f1 = GeoFix(sl * (base_lat + 0.0001 + a * 0.98), so * (base_lon + 0.0001 + b * 0.98))
    f2 = GeoFix(sl * (base_lat + 0.0001 + c * 0.98), so * (base_lon + 0.0001 + d * 0.98))
    assert derive_keys(f1) == derive_keys(f2)
