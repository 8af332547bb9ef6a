"""Seeded generator of drug-like SMILES for benchmarks and fuzz corpora.

Molecules are assembled from ring templates, linkers, and substituents so
the output exercises the full supported notation: aromatic and aliphatic
rings, branches, charges, bracket atoms, ring-closure digits, stereo marks,
and occasional multi-component salts.  Every template combination is
valence-safe: units that receive an incoming linker bond keep their tail
slot empty and never start on a saturated heteroatom.
"""

from __future__ import annotations

import random
from typing import Iterator

# Ring templates as format strings; each {} slot accepts "" or "(<sub>)".
# The final slot sits on the atom where a continuation linker attaches.
_RINGS = [
    "c1cc{}ccc1{}",
    "c1cc{}c(cc1{}){}",
    "c1ccc2ccccc2c1{}",
    "c1cc{}ncc1{}",
    "c1cncnc1{}",
    "c1ccoc1{}",
    "c1ccsc1{}",
    "c1cc[nH]c1{}",
    "C1CCCCC1{}",
    "C1CC{}CCC1{}",
    "C1CCNCC1{}",
    "C1CCOCC1{}",
    "C1CCOC1{}",
    "C1OCCNC1{}",
    "C1CCC2CCCCC2C1{}",
]

_SUBSTITUENTS = [
    "C", "C", "CC", "C(C)C", "O", "OC", "OCC", "N", "NC", "N(C)C",
    "F", "F", "Cl", "Cl", "Br", "I", "C#N", "C=C",
    "C(=O)O", "C(=O)OC", "C(=O)N", "C(=O)NC", "C(=O)C",
    "S(=O)(=O)N", "S(=O)(=O)C", "SC", "S", "[N+](=O)[O-]",
    "C(F)(F)F", "OC(F)F", "N1CCCC1", "NC(=O)C", "OC(=O)C",
]

_STEREO_SUBS = [
    "[C@H](C)O", "[C@@H](C)N", "[C@H](O)CC", "[C@@H](N)C(=O)O",
]

_LINKERS = ["", "C", "CC", "CCC", "O", "OC", "N", "NC", "C(=O)", "C(=O)N",
            "S", "C=C", "/C=C/", "C#C", "CO", "CN"]

# chains usable anywhere (terminal valence can absorb one more bond)
_SAFE_CHAINS = [
    "CCO", "CCC(C)C", "CC(=O)NC", "CCN(CC)CC", "CC(C)(C)C", "CCOC(=O)C",
    "CC(=O)O", "CCS", "CC(N)C(=O)O",
]

# chains only safe in terminal position
_END_CHAINS = _SAFE_CHAINS + ["CCCl", "CCC#N", "CC=CC"]

_HYDROCARBONS = [
    "CCCCCC", "CC(C)CC(C)C", "C1CCCCC1", "C1CCCCC1CC", "CCC=CC",
    "c1ccccc1", "Cc1ccccc1C", "C1CCC2CCCCC2C1", "CC(C)(C)CC", "C=CC=C",
]


def _ring_unit(rng: random.Random, allow_stereo: bool, keep_tail_open: bool) -> str:
    template = rng.choice(_RINGS)
    n_slots = template.count("{}")
    subs = []
    for k in range(n_slots):
        if keep_tail_open and k == n_slots - 1:
            subs.append("")
            continue
        roll = rng.random()
        if roll < 0.45:
            subs.append("")
        elif allow_stereo and roll < 0.50:
            subs.append("(" + rng.choice(_STEREO_SUBS) + ")")
        else:
            subs.append("(" + rng.choice(_SUBSTITUENTS) + ")")
    return template.format(*subs)


def random_smiles(rng: random.Random) -> str:
    """One synthetic molecule; drug-like most of the time."""
    roll = rng.random()
    if roll < 0.05:
        return rng.choice(_HYDROCARBONS)
    if roll < 0.12:
        return rng.choice(_END_CHAINS)
    allow_stereo = rng.random() < 0.25
    n_units = rng.randint(1, 3)
    parts = []
    for k in range(n_units):
        last = k == n_units - 1
        if k > 0:
            parts.append(rng.choice(_LINKERS))
        if last and rng.random() < 0.2:
            parts.append(rng.choice(_END_CHAINS))
        elif not last and rng.random() < 0.15:
            parts.append(rng.choice(_SAFE_CHAINS))
        else:
            parts.append(_ring_unit(rng, allow_stereo, keep_tail_open=not last))
    smiles = "".join(parts)
    if rng.random() < 0.03:
        smiles += "." + rng.choice(["[Na+]", "Cl", "O", "[K+]"])
    return smiles


def generate_corpus(n: int, seed: int = 0) -> Iterator[str]:
    """Yield n deterministic synthetic SMILES strings."""
    rng = random.Random(seed)
    for _ in range(n):
        yield random_smiles(rng)
