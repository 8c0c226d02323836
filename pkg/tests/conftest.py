import random
import string

import pytest

from geovault import codec, store
from geovault.errors import ChunkEndsWithPad
from geovault.geokey import GeoFix

PRINTABLE = string.printable[:95]  # space..~ minus control chars, in some order
WORKED_FIX = GeoFix(26.15875768, 32.153457537)


def admissible(text: str) -> bool:
    """True when every chunk of ``text`` survives the pad-stripping rule."""
    chunks = store.split_chunks(text)
    for i, chunk in enumerate(chunks):
        nxt = store.part1_address(i + 2) if i + 1 < len(chunks) else 0
        h1, h2 = codec.split_halves(codec.scramble(codec.attach_pointer(chunk, nxt)))
        if h1.endswith("z") or h2.endswith("z"):
            return False
    return True


def random_message(rng: random.Random, length: int) -> str:
    alphabet = "".join(chr(c) for c in range(0x20, 0x7F))
    while True:
        text = "".join(rng.choice(alphabet) for _ in range(length))
        if admissible(text):
            return text


def random_fix(rng: random.Random) -> GeoFix:
    return GeoFix(rng.uniform(-90, 90), rng.uniform(-180, 180))


@pytest.fixture
def rng():
    return random.Random(20261018)


@pytest.fixture
def worked_fix():
    return WORKED_FIX


_acceptance: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion_" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome.upper()))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        status = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
