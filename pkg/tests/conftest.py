from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pmcs import IrradianceKind, IrradianceProfile, RtcConfig, SimConfig, simulate  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"

DARK = IrradianceProfile(kind=IrradianceKind.CONSTANT, peak_fraction=0.0)
ALWAYS_SUN = IrradianceProfile(kind=IrradianceKind.CONSTANT, sunrise_s=0.0, sunset_s=86400.0)
NO_RTC = RtcConfig(enabled=False)


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    """Load the compiled kernels once so timing checks measure simulation only."""
    simulate(SimConfig(dt_s=3600.0))


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> bool:
    """Remember a one-line verdict for the terminal summary and echo it."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
