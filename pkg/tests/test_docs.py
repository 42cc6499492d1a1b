import doctest
import re
from pathlib import Path

import fastmme
import fastmme.elimination

DOC = Path(__file__).resolve().parents[1] / "docs" / "algorithm.md"

OPERATIONS = [
    "validate_design", "assemble", "eliminate_stage", "eliminate_all",
    "solve_fixed_effects", "back_substitute", "solve", "dense_assemble",
    "dense_solve", "simulate",
]


def referenced_names():
    return set(re.findall(r"`fastmme\.(\w+)`", DOC.read_text()))


def test_walkthrough_names_exist():
    missing = [name for name in referenced_names() if not hasattr(fastmme, name)]
    assert not missing


def test_walkthrough_covers_every_operation():
    assert set(OPERATIONS) <= referenced_names()


def test_docstring_examples():
    result = doctest.testmod(fastmme.elimination)
    assert result.attempted > 0 and result.failed == 0
