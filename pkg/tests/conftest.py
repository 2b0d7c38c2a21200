"""Shared fixtures: parsed and checked golden signatures, translations."""

from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from lfr import check_signature, parse_signature, trans_sig

settings.register_profile(
    "lfr",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("lfr")

GOLDEN_DIR = Path(__file__).parent / "golden"

# Signatures that must check; bad-* files are rejection fixtures.
GOLDEN_NAMES = ("nat", "even-odd", "double", "coerce", "cbv", "coherence")


def golden_path(name: str) -> Path:
    return GOLDEN_DIR / f"{name}.lfr"


@pytest.fixture(scope="session")
def golden_texts() -> dict[str, str]:
    return {name: golden_path(name).read_text() for name in GOLDEN_NAMES}


@pytest.fixture(scope="session")
def parsed_goldens(golden_texts):
    return {name: parse_signature(text, filename=f"{name}.lfr")
            for name, text in golden_texts.items()}


@pytest.fixture(scope="session")
def checked_goldens(parsed_goldens):
    return {name: check_signature(sig) for name, sig in parsed_goldens.items()}


@pytest.fixture(scope="session")
def translated_goldens(checked_goldens):
    return {name: trans_sig(sig) for name, sig in checked_goldens.items()}


@pytest.fixture(scope="session")
def nat_sig(checked_goldens):
    return checked_goldens["nat"]


@pytest.fixture(scope="session")
def even_odd_sig(checked_goldens):
    return checked_goldens["even-odd"]


@pytest.fixture(scope="session")
def double_sig(checked_goldens):
    return checked_goldens["double"]


@pytest.fixture(scope="session")
def coerce_sig(checked_goldens):
    return checked_goldens["coerce"]


@pytest.fixture(scope="session")
def cbv_sig(checked_goldens):
    return checked_goldens["cbv"]


@pytest.fixture(scope="session")
def coherence_sig(checked_goldens):
    return checked_goldens["coherence"]
