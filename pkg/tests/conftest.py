from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # oracle_augment importable

from benchscript.sandbox import (
    ALL_CAPABILITIES,
    ExecutionPolicy,
    IntegrityLevel,
    ResourceLimits,
    create_or_get_profile,
)

FIXTURES = Path(__file__).parent / "fixtures"


def make_policy(
    capabilities=ALL_CAPABILITIES,
    integrity=IntegrityLevel.MEDIUM,
    max_steps=1_000_000,
    max_heap_cells=100_000,
    max_output_bytes=1_000_000,
    max_wall_ms=10_000,
    name="test",
) -> ExecutionPolicy:
    return ExecutionPolicy(
        create_or_get_profile(name, capabilities, integrity),
        ResourceLimits(max_steps, max_heap_cells, max_output_bytes, max_wall_ms),
    )


@pytest.fixture
def policy() -> ExecutionPolicy:
    return make_policy()


@pytest.fixture
def factorial_source() -> str:
    return (FIXTURES / "factorial.bs").read_text(encoding="utf-8")


@pytest.fixture
def postcard() -> str:
    return (FIXTURES / "postcard.st").read_text(encoding="utf-8")
