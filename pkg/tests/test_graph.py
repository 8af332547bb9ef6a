from __future__ import annotations

import random

import pytest

from moltiers.errors import EmptyMolecule
from moltiers.graph import (
    AROMATIC,
    conjugated_components,
    connected_components,
    cyclomatic_number,
    murcko_scaffold,
    perceive_aromaticity,
    ring_info,
    structural_counts,
)
from moltiers.smiles import parse_smiles
from moltiers.synth import generate_corpus

from oracles import brute_conjugation_extent, brute_scaffold, ring_atoms_exhaustive


class TestStructuralCounts:
    def test_benzene(self, mol):
        c = structural_counts(mol("c1ccccc1"))
        assert (c.n_ha, c.n_het, c.n_ring, c.n_sc) == (6, 0, 1, 0)
        assert c.mw == pytest.approx(78.11, abs=5e-3)

    def test_methane(self, mol):
        c = structural_counts(mol("C"))
        assert (c.n_ha, c.n_het, c.n_ring) == (1, 0, 0)
        assert c.mw == pytest.approx(16.04, abs=5e-3)

    def test_water_heteroatom(self, mol):
        assert structural_counts(mol("O")).n_het == 1

    def test_stereocenter_counts(self, mol):
        assert structural_counts(mol("C[C@H](N)C(=O)O")).n_sc == 1
        assert structural_counts(mol("F/C=C/F")).n_sc == 1
        assert structural_counts(mol("F/C=C/C=C/F")).n_sc == 2
        # mark on one side only does not make a stereo double bond
        assert structural_counts(mol("F/C=CF")).n_sc == 0

    def test_ring_count_is_cyclomatic(self, mol):
        for smiles, expected in [
            ("CCCC", 0),
            ("C1CC1", 1),
            ("c1ccc2ccccc2c1", 2),
            ("C1CC2CCC1CC2", 2),
            ("CC.O", 0),
            ("C1CC1.C1CC1", 2),
        ]:
            g = mol(smiles)
            assert structural_counts(g).n_ring == expected
            assert cyclomatic_number(g) == expected

    def test_ring_count_identity_random(self, mol):
        for smiles in generate_corpus(150, seed=5):
            g = mol(smiles)
            assert structural_counts(g).n_ring == (
                len(g.bonds) - len(g.atoms) + len(connected_components(g))
            )

    def test_explicit_h_not_heavy(self, mol):
        c = structural_counts(mol("[H]C([H])([H])[H]"))
        assert c.n_ha == 1
        assert c.mw == pytest.approx(16.04, abs=5e-3)


class TestAromaticityPerception:
    def test_already_aromatic_kept(self, mol):
        g = mol("c1ccccc1")
        assert all(a.aromatic for a in g.atoms)

    def test_kekule_benzene(self, mol):
        g = mol("C1=CC=CC=C1")
        assert all(a.aromatic for a in g.atoms)
        assert all(b.order == AROMATIC for b in g.bonds)

    def test_kekule_pyridine(self, mol):
        g = mol("C1=CC=CC=N1")
        assert all(a.aromatic for a in g.atoms)

    def test_cyclohexane_untouched(self, mol):
        g = mol("C1CCCCC1")
        assert not any(a.aromatic for a in g.atoms)

    def test_cyclohexene_untouched(self, mol):
        g = mol("C1=CCCCC1")
        assert not any(a.aromatic for a in g.atoms)

    def test_seven_ring_untouched(self, mol):
        g = mol("C1=CC=CC=CC1")
        assert not any(a.aromatic for a in g.atoms)

    def test_hetero_ring_with_o_untouched(self, mol):
        # only C/N six-rings qualify for Kekule promotion
        g = mol("O1C=CC=CC1")
        assert not any(a.aromatic for a in g.atoms)

    def test_idempotent_and_object_identity(self):
        g = parse_smiles("C1=CC=CC=C1")
        once = perceive_aromaticity(g)
        twice = perceive_aromaticity(once)
        assert twice is once  # no candidates left -> same object

    def test_monotone(self):
        for smiles in generate_corpus(120, seed=8):
            g = parse_smiles(smiles)
            before = [a.aromatic for a in g.atoms]
            after = perceive_aromaticity(g)
            for b, a in zip(before, after.atoms):
                assert a.aromatic >= b

    def test_kekule_naphthalene(self, mol):
        # both rings written with alternating bonds (fusion bond double)
        g = mol("C1=CC=CC2=C1C=CC=C2")
        assert sum(a.aromatic for a in g.atoms) == 10

    def test_kekule_partial_ring_only(self, mol):
        # this resonance form alternates only in one ring; per-ring rule
        # promotes just that ring (full Hueckel perception is a non-goal)
        g = mol("C1=CC2=CC=CC=C2C=C1")
        assert sum(a.aromatic for a in g.atoms) == 6


class TestRingInfo:
    def test_benzene_ring(self, mol):
        info = ring_info(mol("c1ccccc1"))
        assert len(info.rings) == 1
        assert len(info.rings[0]) == 6
        assert info.ring_atoms == frozenset(range(6))

    def test_naphthalene_two_rings(self, mol):
        info = ring_info(mol("c1ccc2ccccc2c1"))
        assert len(info.rings) == 2
        assert all(len(r) == 6 for r in info.rings)

    def test_acyclic_no_rings(self, mol):
        info = ring_info(mol("CCO"))
        assert not info.rings
        assert not info.ring_atoms

    def test_macrocycle_excluded_from_small_rings(self, mol):
        g = mol("C1CCCCCCCCCCC1")  # 12-ring
        info = ring_info(g)
        assert not info.rings                  # above the size-8 cap
        assert len(info.ring_atoms) == 12      # membership still detected
        assert structural_counts(g).n_ring == 1

    def test_ring_atoms_match_exhaustive(self, mol):
        for smiles in generate_corpus(120, seed=13):
            g = mol(smiles)
            assert ring_info(g).ring_atoms == frozenset(ring_atoms_exhaustive(g))


class TestMurckoScaffold:
    def test_benzene_full(self, mol):
        res = murcko_scaffold(mol("c1ccccc1"))
        assert res.n_scaffold == 6
        assert not res.is_empty

    def test_hexane_empty(self, mol):
        res = murcko_scaffold(mol("CCCCCC"))
        assert res.is_empty
        assert res.n_scaffold == 0

    def test_toluene_prunes_methyl(self, mol):
        res = murcko_scaffold(mol("Cc1ccccc1"))
        assert res.n_scaffold == 6
        assert 0 not in res.scaffold_atoms

    def test_biphenyl_keeps_link(self, mol):
        res = murcko_scaffold(mol("c1ccccc1-c1ccccc1"))
        assert res.n_scaffold == 12

    def test_benzophenone_keeps_carbonyl(self, mol):
        res = murcko_scaffold(mol("c1ccccc1C(=O)c1ccccc1"))
        assert res.n_scaffold == 14  # two rings + linker C + exocyclic O

    def test_acetophenone_side_chain_removed(self, mol):
        res = murcko_scaffold(mol("CC(=O)c1ccccc1"))
        assert res.n_scaffold == 6

    def test_linker_chain_kept(self, mol):
        res = murcko_scaffold(mol("c1ccccc1CCCc1ccccc1"))
        assert res.n_scaffold == 15

    def test_order_independence_randomized(self, mol):
        rng = random.Random(17)
        for smiles in generate_corpus(150, seed=21):
            g = mol(smiles)
            expected = frozenset(brute_scaffold(g, rng))
            assert murcko_scaffold(g).scaffold_atoms == expected


class TestConjugation:
    def test_ethane_empty(self, mol):
        assert conjugated_components(mol("CC")) == []

    def test_benzene_single_component(self, mol):
        comps = conjugated_components(mol("c1ccccc1"))
        assert [len(c) for c in comps] == [6]

    def test_butadiene_bridged(self, mol):
        comps = conjugated_components(mol("C=CC=C"))
        assert [len(c) for c in comps] == [4]

    def test_isolated_dienes_split(self, mol):
        comps = conjugated_components(mol("C=CCCC=C"))
        assert sorted(len(c) for c in comps) == [2, 2]

    def test_components_disjoint(self, mol):
        for smiles in generate_corpus(150, seed=34):
            comps = conjugated_components(mol(smiles))
            seen = set()
            for comp in comps:
                assert not (comp & seen)
                seen |= comp

    def test_matches_oracle(self, mol):
        for smiles in generate_corpus(200, seed=55):
            g = mol(smiles)
            comps = conjugated_components(g)
            largest = max((len(c) for c in comps), default=0)
            assert largest == brute_conjugation_extent(g)


def test_empty_graph_counts_raise():
    from moltiers.smiles import MolecularGraph

    with pytest.raises(EmptyMolecule):
        structural_counts(MolecularGraph([], [], ""))
