import numpy as np
import pytest

from artifact.imagecore import GrayImage

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def random_image(rng):
    def make(h, w=None):
        return GrayImage(rng.integers(0, 256, size=(h, w or h), dtype=np.uint8))

    return make


@pytest.fixture
def acceptance():
    """Record a criterion outcome so it shows up in the terminal summary, then assert it."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))
