from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from moltiers.fgroups import PrevalenceTable
from moltiers.graph import perceive_aromaticity
from moltiers.smiles import parse_smiles

ACCEPTANCE_LOG: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def mol():
    """Parse + perceive helper shared across test modules."""

    def build(smiles: str):
        return perceive_aromaticity(parse_smiles(smiles))

    return build


# Hand-authored prevalence constants for tier tests.  The carbonyl and iodide
# values follow the corpus anchors (0.661 / 0.011); the rest are invented but
# fixed, so top-6 membership and every rarity value below are reproducible.
SUITE_PREVALENCE = {
    "carbonyl": 0.661,
    "ether": 0.52,
    "hydroxyl": 0.46,
    "amide": 0.39,
    "ester": 0.31,
    "tertiary_amine": 0.27,
    "secondary_amine": 0.22,
    "aniline": 0.20,
    "fluoride": 0.18,
    "ketone": 0.17,
    "chloride": 0.15,
    "phenol": 0.13,
    "carboxylic_acid": 0.12,
    "primary_amine": 0.11,
    "alkene": 0.10,
    "nitrile": 0.09,
    "sulfonamide": 0.08,
    "aldehyde": 0.07,
    "nitro": 0.06,
    "thioether": 0.05,
    "sulfone": 0.045,
    "bromide": 0.04,
    "urea": 0.035,
    "imine": 0.03,
    "alkyne": 0.025,
    "guanidine": 0.02,
    "sulfoxide": 0.018,
    "thiol": 0.015,
    "azo": 0.013,
    "iodide": 0.011,
    "phosphate": 0.009,
}

TOP6 = frozenset(
    ("carbonyl", "ether", "hydroxyl", "amide", "ester", "tertiary_amine")
)


@pytest.fixture(scope="session")
def suite_prevalence() -> PrevalenceTable:
    return PrevalenceTable(dict(SUITE_PREVALENCE), corpus_size=1000)
