"""The five structural-complexity descriptors and the per-molecule record.

All descriptors are pure functions of the (aromaticity-perceived) graph and
invariant under atom re-indexing; records are safe to compute in parallel
across molecules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyMolecule
from .fgroups import FGLibrary, PrevalenceTable, default_library, present_groups
from .graph import (
    RingInfo,
    StructuralCounts,
    conjugated_components,
    murcko_scaffold,
    perceive_aromaticity,
    ring_info,
    structural_counts,
)
from .smiles import AROMATIC, MolecularGraph


@dataclass(slots=True)
class DescriptorRecord:
    d_scaf: float
    rarity: float
    conjugation: int
    arom_sub: int
    bertz_ct: float
    counts: StructuralCounts
    n_fg: int
    fg_names: frozenset[str]


def scaffold_decoration(
    graph: MolecularGraph, rings: RingInfo | None = None
) -> float:
    """1 - n_scaffold / heavy atoms, clamped to [0, 1]; 1 when acyclic."""
    n_ha = sum(1 for a in graph.atoms if a.element != "H")
    if n_ha == 0:
        raise EmptyMolecule("scaffold decoration needs a heavy atom")
    scaffold = murcko_scaffold(graph, rings)
    value = 1.0 - scaffold.n_scaffold / n_ha
    return min(1.0, max(0.0, value))


def fg_rarity(
    graph: MolecularGraph,
    table: PrevalenceTable,
    library: FGLibrary | None = None,
    groups: frozenset[str] | None = None,
) -> float:
    """Mean inverse corpus prevalence of the molecule's groups; 0 if none."""
    if groups is None:
        groups = present_groups(graph, library)
    if not groups:
        return 0.0
    # sorted so the float sum is byte-identical across interpreter runs
    # (set iteration order follows the per-process string hash seed)
    return sum(1.0 - table.prevalence[name] for name in sorted(groups)) / len(groups)


def conjugation_extent(graph: MolecularGraph) -> int:
    """Atom count of the largest connected conjugated pi-system."""
    components = conjugated_components(graph)
    return max((len(c) for c in components), default=0)


def _gap_pattern(positions: list[int], size: int) -> tuple[int, ...]:
    """Cyclic gaps between substituted positions, canonicalised.

    The representative is the lexicographically smallest rotation over both
    traversal directions: an abstract ring has no intrinsic orientation, so
    folding direction is required for the pattern to be well defined under
    atom re-indexing.
    """
    positions = sorted(positions)
    k = len(positions)
    gaps = [
        (positions[(i + 1) % k] - positions[i]) % size or size for i in range(k)
    ]
    best: tuple[int, ...] | None = None
    for seq in (gaps, gaps[::-1]):
        for r in range(k):
            rot = tuple(seq[r:] + seq[:r])
            if best is None or rot < best:
                best = rot
    return best  # type: ignore[return-value]


def aromatic_substitution_complexity(
    graph: MolecularGraph, rings: RingInfo | None = None
) -> int:
    """Distinct ring substitution patterns plus total substituent count.

    A ring position is substituted when the ring atom has a heavy neighbor
    outside the ring; fused-ring partners count as substituents of each ring
    they do not belong to.
    """
    if rings is None:
        rings = ring_info(graph)
    if not rings.rings:
        return 0
    bonds = graph.bonds
    atoms = graph.atoms
    adj = graph.neighbors()
    aromatic_bond = [b.order == AROMATIC for b in bonds]
    patterns: set[tuple[int, ...]] = set()
    total_subs = 0
    for cycle in rings.rings:
        cset = set(cycle)
        # aromatic ring: every bond along the cycle is aromatic
        ok = True
        for i, a in enumerate(cycle):
            b = cycle[(i + 1) % len(cycle)]
            for nb, bi in adj[a]:
                if nb == b:
                    if not aromatic_bond[bi]:
                        ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        positions = []
        for pos, a in enumerate(cycle):
            ext = 0
            for nb, _ in adj[a]:
                if nb not in cset and atoms[nb].element != "H":
                    ext += 1
            if ext:
                positions.append(pos)
                total_subs += ext
        if positions:
            patterns.add(_gap_pattern(positions, len(cycle)))
    return len(patterns) + total_subs


def bertz_ct(graph: MolecularGraph) -> float:
    """Entropy-style complexity over the bond-environment distribution.

    A bond's environment is the unordered pair of its endpoint descriptors
    (element, aromatic flag, heavy degree) together with the bond order.
    Returns 0 for bond-free graphs.
    """
    if not graph.bonds:
        return 0.0
    atoms = graph.atoms
    deg = [0] * len(atoms)
    for bond in graph.bonds:
        if atoms[bond.b].element != "H":
            deg[bond.a] += 1
        if atoms[bond.a].element != "H":
            deg[bond.b] += 1
    hist: dict[tuple, int] = {}
    for bond in graph.bonds:
        a, b = bond.a, bond.b
        da = (atoms[a].element, atoms[a].aromatic, deg[a])
        db = (atoms[b].element, atoms[b].aromatic, deg[b])
        env = (da, db, bond.order) if da <= db else (db, da, bond.order)
        hist[env] = hist.get(env, 0) + 1
    total = 0.0
    for count in hist.values():
        if count > 1:
            total += count * math.log2(count)
    n_e = len(hist)
    if n_e > 1:
        total += n_e * math.log2(n_e)
    return 0.5 * total


def descriptor_record(
    graph: MolecularGraph,
    table: PrevalenceTable,
    library: FGLibrary | None = None,
) -> DescriptorRecord:
    """All five descriptors plus counts and group names in one pass.

    Aromaticity perception is applied internally (idempotent), and ring
    analysis is shared across the descriptors that need it.
    """
    library = library or default_library()
    rings = ring_info(graph)
    perceived = perceive_aromaticity(graph, rings)
    counts = structural_counts(perceived)
    if counts.n_ha == 0:
        raise EmptyMolecule("descriptor record needs a heavy atom")
    groups = present_groups(perceived, library)
    return DescriptorRecord(
        d_scaf=scaffold_decoration(perceived, rings),
        rarity=fg_rarity(perceived, table, library, groups),
        conjugation=conjugation_extent(perceived),
        arom_sub=aromatic_substitution_complexity(perceived, rings),
        bertz_ct=bertz_ct(perceived),
        counts=counts,
        n_fg=len(groups),
        fg_names=groups,
    )
