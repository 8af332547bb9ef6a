"""The hand-curated 20-molecule tier suite.

Tiers and rule traces were derived by hand against the fixed prevalence
constants in conftest.py before the rule engine was written: rarity values
are means of (1 - P) over each molecule's group set, substitution scores
come from counting ring positions on paper, and the fused tricyclic for the
complexity-density clause was chosen so CT per heavy atom clears 1.5 with
three rings.  The suite covers every tier clause plus three fallback cases.

The density clause threshold is pinned at 1.5 here because the entropy-style
complexity index keeps CT per heavy atom in single digits for drug-like
molecules; the config default of 50 targets a different CT scale and never
fires on this index (see TierConfig).
"""

from moltiers.tiering import TierConfig

SUITE_CONFIG = TierConfig(ct_per_ha_threshold=1.5)

# (smiles, expected tier, expected rule trace)
TIER_SUITE = [
    # T0: pure hydrocarbons dominate every other signal
    ("CCCCCC", "T0", "t0_pure_hydrocarbon"),
    ("c1ccccc1", "T0", "t0_pure_hydrocarbon"),
    ("C=CC1CCCCC1", "T0", "t0_pure_hydrocarbon"),  # rarity 0.90 but still T0
    # T4 via stereo marks
    ("C[C@H](O)C(=O)O", "T4", "t4_stereocenter"),
    ("F/C=C/F", "T4", "t4_stereocenter"),
    # T4 via rare groups: iodide 1-0.011, phosphate 1-0.009
    ("Ic1ccccc1", "T4", "t4_rare_groups"),
    ("OP(=O)(O)O", "T4", "t4_rare_groups"),
    # T3 via substitution: 4 chlorines -> 1 pattern + 4 subs = 5;
    # pentamethylpyridine -> 1 pattern + 5 subs = 6
    ("Clc1cc(Cl)c(Cl)cc1Cl", "T3", "t3_substitution_complexity"),
    ("Cc1nc(C)c(C)c(C)c1C", "T3", "t3_substitution_complexity"),
    # T3 via complexity density: CT/n_ha = 1.67 > 1.5 with 3 rings
    ("O=C1CCC2(C)C(CCC3CC(=O)CCC23)C1", "T3", "t3_ct_density"),
    # T1: one or two groups, all among the top-6 common set
    ("CCO", "T1", "t1_common_groups"),
    ("CCOCC", "T1", "t1_common_groups"),
    ("CCN(CC)CC", "T1", "t1_common_groups"),
    ("COc1ccccc1", "T1", "t1_common_groups"),
    # T2: three to five groups with low ring substitution
    ("CC(=O)Oc1ccccc1C(=O)O", "T2", "t2_multi_group"),
    ("CC(=O)Nc1ccc(O)cc1", "T2", "t2_multi_group"),
    ("CCOC(=O)c1ccc(N)cc1", "T2", "t2_multi_group"),
    # fallbacks: chloride/ketone miss the top-6 subset but n_fg <= 5 -> T2;
    # seven distinct groups -> T3
    ("Clc1ccccc1", "T2", "t2_fallback"),
    ("CC(C)=O", "T2", "t2_fallback"),
    ("OC(=O)COC(=O)CNC(C)=O", "T3", "t3_fallback"),
]
