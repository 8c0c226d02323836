"""Exit criteria for the build, one test per criterion.

Run ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion is
printed in the terminal summary.
"""

import io
import itertools
import random
import re
import time
from pathlib import Path

import pytest

from geovault import analysis, cipher, codec, lockscreen, store
from geovault.cipher import PermutationKey
from geovault.cli import run
from geovault.errors import CapacityExceeded
from geovault.geokey import GeoFix, derive_keys

from .conftest import random_fix, random_message
from .golden_data import TEXT as GOLDEN_TEXT
from .golden_data import build_chain500

K = PermutationKey.parse
GOLDEN = Path(__file__).parent / "golden" / "chain500.vault"
SALT = "000102030405060708090a0b0c0d0e0f"
CORPUS = [
    "We are working on well....things are going on",
    "Hai...Dear...Howz Life",
    "Dinner at 3:00 pm City Center",
    "PQRST 976543767",
]


def cli(vault, *argv, stdin=""):
    out = io.StringIO()
    code = run([*argv, "--vault", str(vault)], io.StringIO(stdin), out)
    return code, out.getvalue()


def test_criterion_01_paper_key_derivation():
    assert derive_keys(GeoFix(26.15875768, 32.153457537)) == (K("261534"), K("321564"))


def test_criterion_02_paper_cipher_outputs():
    assert cipher.encrypt("P65Q9767", K("261534")) == "7Q65P9zz7z6z"
    assert cipher.encrypt("R73S4T", K("321564")) == "R73TS4"


def test_criterion_03_cipher_laws():
    rng = random.Random(3)
    alphabet = "".join(chr(c) for c in range(0x20, 0x7F))
    blocks = ["".join(rng.choice(alphabet) for _ in range(6)) for _ in range(200)]
    start = time.perf_counter()
    failures = 0
    for digits in itertools.permutations(range(1, 7)):
        k = PermutationKey(digits)
        inv = cipher.invert_key(k)
        for b in blocks:
            failures += cipher.transpose_once(cipher.transpose_once(b, k), inv) != b
            plain = b.rstrip("z") or "a"
            failures += cipher.decrypt(cipher.encrypt(plain, k), inv) != plain
    elapsed = time.perf_counter() - start
    assert failures == 0
    assert elapsed < 5.0, f"{elapsed:.2f}s"


def test_criterion_04_pipeline_round_trip():
    rng = random.Random(4)
    fixes = [random_fix(rng) for _ in range(50)]
    messages = [random_message(rng, rng.randint(1, 1000)) for _ in range(1000)]
    start = time.perf_counter()
    v = store.Vault()
    for i, text in enumerate(messages):
        if v.capacity_left < len(store.split_chunks(text)):
            v = store.Vault()
        h = store.put_message(v, text, fixes[i % 50])
        assert store.get_message(v, h) == text
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"{elapsed:.2f}s"


def test_criterion_05_chunk_chaining_golden():
    v = build_chain500()
    assert sorted(v.records) == [1, 2, 3, 4, 996, 997, 998, 999]
    pairs = [v.pair_at(a) for a in (999, 998, 997, 996)]
    assert [(p.part1.address, p.part2.address) for p in pairs] == [(999, 1), (998, 2), (997, 3), (996, 4)]
    assert [codec.disassemble_pair(p)[1] for p in pairs] == [998, 997, 996, 0]
    assert store.get_message(v, 999) == GOLDEN_TEXT
    assert store.dump_vault(v).encode("ascii") == GOLDEN.read_bytes()
    assert store.get_message(store.open_vault(GOLDEN), 999) == GOLDEN_TEXT


def test_criterion_06_capacity():
    v = store.Vault()
    fix = GeoFix(26.15875768, 32.153457537)
    for i in range(498):
        store.put_message(v, f"memo {i}", fix)
    assert v.pairs_allocated == 498
    with pytest.raises(CapacityExceeded):
        store.put_message(v, "memo 498", fix)


def test_criterion_07_lock_policy(tmp_path):
    vault = tmp_path / "v"
    locked_out = []
    assert cli(vault, "init", "--pattern", "0-5-10-15", "--fence", "26,27,32,33", "--salt-hex", SALT)[0] == 0
    assert cli(vault, "locate", "--lat", "26.15875768", "--lon", "32.153457537")[0] == 0
    for memo in CORPUS:
        code, out = cli(vault, "store", "--text", memo)
        assert code == 0
        locked_out.append(out)

    code, listing = cli(vault, "list")
    assert code == 0
    assert all(re.match(r"^\d{11}\*", line) for line in listing.splitlines())
    locked_out.append(listing)
    for argv in [("get", "--id", "999"), ("get", "--id", "998", "--pattern", "3-2-1-0"), ("find", "--term", "a")]:
        code, out = cli(vault, *argv)
        assert code == 1
        locked_out.append(out)
    locked_out.append(cli(vault, "status")[1])
    blob = "".join(locked_out)
    assert not any(memo in blob for memo in CORPUS)
    assert not any(memo[i : i + 6] in blob for memo in CORPUS for i in range(len(memo) - 5))

    assert cli(vault, "get", "--id", "997", "--pattern", "0-5-10-15") == (0, CORPUS[2] + "\n")
    assert cli(vault, "find", "--term", "Dinner", "--pattern", "0-5-10-15") == (0, f"997 {CORPUS[2]}\n")


def _rotation_run(tmp_path, name):
    d = tmp_path / name
    d.mkdir()
    vault = d / "v"
    trace = d / "trace.csv"
    trace.write_text("0,26.40,32.40\n10,26.70,32.80\n20,27.20,32.80\n30,27.60,33.10\n40,26.50,32.50\n")
    cli(vault, "init", "--pattern", "0-5-10-15", "--fence", "26,27,32,33", "--salt-hex", SALT)
    code, out = cli(vault, "trace", "--file", str(trace))
    return vault, code, out


def test_criterion_08_rotation(tmp_path):
    vault, code, out = _rotation_run(tmp_path, "a")
    assert code == 0 and out.count("ROTATION") == 1
    assert cli(vault, "status")[1] == "pairs=0 locked=yes pending=yes\n"
    # rotation needs the old pattern
    assert cli(vault, "rotate", "--accept", "--pattern", "1-2-3-4", "--fence", "27,28,32,34")[0] == 1
    code, out = cli(vault, "rotate", "--accept", "--pattern", "0-5-10-15", "--fence", "27,28,32,34")
    assert code == 0
    new_a = re.search(r"pattern=([\d-]+)", out)[1]
    expected = lockscreen.generate_pattern(("2720", "3280"), bytes.fromhex(SALT), 4)
    assert new_a == str(expected) != "0-5-10-15"
    assert cli(vault, "status", "--pattern", new_a)[0] == 0
    assert cli(vault, "status", "--pattern", "0-5-10-15")[0] == 1

    vault_b, _, _ = _rotation_run(tmp_path, "b")
    code, out = cli(vault_b, "rotate", "--accept", "--pattern", "0-5-10-15", "--fence", "27,28,32,34")
    assert re.search(r"pattern=([\d-]+)", out)[1] == new_a
    assert vault.read_bytes() == vault_b.read_bytes()

    vault_c, _, _ = _rotation_run(tmp_path, "c")
    assert cli(vault_c, "rotate", "--skip", "--pattern", "0-5-10-15") == (0, "rotation skipped\n")
    assert cli(vault_c, "status", "--pattern", "0-5-10-15") == (0, "pairs=0 locked=no pending=no\n")


def test_criterion_09_audit_leak(tmp_path):
    rng = random.Random(9)
    path = tmp_path / "v"
    v = store.Vault(path=path)
    for _ in range(100):
        store.put_message(v, random_message(rng, rng.randint(1, 600)), random_fix(rng), persist=False)
    store.save_vault(v)
    owner = {h: store.get_message(v, h) for h in store.message_handles(v)}
    assert len(owner) == 100

    start = time.perf_counter()
    leaked = analysis.leak_decrypt_file(path)
    elapsed = time.perf_counter() - start
    assert dict(leaked) == owner
    assert all(dict(leaked)[h].encode() == owner[h].encode() for h in owner)
    assert elapsed < 5.0, f"{elapsed:.2f}s"


def test_criterion_10_audit_brute_force():
    fix = GeoFix(26.437, 32.781)
    secret = "Dinner at 3:00 pm City Center"
    v = store.Vault()
    h = store.put_message(v, secret, fix)
    pair = v.pair_at(h)
    p1 = (pair.part1.address, analysis.redact_keys(pair.part1.value))
    p2 = (pair.part2.address, analysis.redact_keys(pair.part2.value))
    g = analysis.GridSpec((26.0, 27.0), (32.0, 33.0), 0.01)

    start = time.perf_counter()
    cands = analysis.brute_force_pair(p1, p2, g)
    distinct, cells = analysis.keyspace_census(g)
    elapsed = time.perf_counter() - start

    assert secret in [c.plaintext for c in analysis.rank_one(cands)]
    oracle = {derive_keys(GeoFix(la, lo)) for la in g.lat_centers() for lo in g.lon_centers()}
    assert (distinct, cells) == (len(oracle), 10000)
    print(analysis.format_census(distinct, cells))
    assert elapsed < 60.0, f"{elapsed:.2f}s"


def test_criterion_11_pattern_space():
    assert analysis.pattern_space(4, 4) == 43680 == sum(1 for _ in itertools.permutations(range(16), 4))
    for length in range(1, 5):
        counts = [analysis.pattern_space(side, length) for side in range(2, 6)]
        assert all(a < b for a, b in zip(counts, counts[1:]))
