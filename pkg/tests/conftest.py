import json
import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bsdim.shift_space import Potential, validate_sft

PHI = (1 + math.sqrt(5)) / 2
LN2 = math.log(2)
LN_PHI = math.log(PHI)
MORAN_VALUES = (math.log(2), math.log(4))

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def full2():
    sft = validate_sft(2, [[1, 1], [1, 1]])
    return sft, Potential.constant(sft)


@pytest.fixture
def golden():
    sft = validate_sft(2, [[1, 1], [1, 0]])
    return sft, Potential.constant(sft)


@pytest.fixture
def moran():
    sft = validate_sft(2, [[1, 1], [1, 1]])
    return sft, Potential.from_symbol_values(sft, MORAN_VALUES)


@pytest.fixture
def golden_depth2():
    sft = validate_sft(2, [[1, 1], [1, 0]])
    return sft, Potential.from_table(sft, 2, {"00": 1.0, "01": 2.0, "10": 1.5})


def write_system(path: Path, adjacency, table, depth=1) -> Path:
    path.write_text(json.dumps({
        "alphabet": len(adjacency),
        "adjacency": adjacency,
        "potential": {"depth": depth, "table": table},
    }))
    return path


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion."""
    def record(number: int, passed: bool, detail: str) -> None:
        ACCEPTANCE[number] = (passed, detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
