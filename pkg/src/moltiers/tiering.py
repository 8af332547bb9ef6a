"""Deterministic curriculum tier assignment (T0-T4) and tier histograms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .descriptors import DescriptorRecord

TIERS = ("T0", "T1", "T2", "T3", "T4")


@dataclass(frozen=True)
class TierConfig:
    rarity_threshold: float = 0.9
    top_k: int = 6
    s_threshold: int = 4
    ct_per_ha_threshold: float = 50.0
    min_rings_t3: int = 3
    fg_low: int = 2
    fg_mid_lo: int = 3
    fg_mid_hi: int = 5

    def __post_init__(self) -> None:
        if not (self.fg_low < self.fg_mid_lo <= self.fg_mid_hi):
            raise ValueError("require fg_low < fg_mid_lo <= fg_mid_hi")
        if min(self.rarity_threshold, self.s_threshold,
               self.ct_per_ha_threshold, self.min_rings_t3, self.top_k) <= 0:
            raise ValueError("thresholds must be positive")


@dataclass(frozen=True)
class TierLabel:
    tier: str
    rule_trace: str


def assign_tier(
    record: DescriptorRecord,
    top_groups: frozenset[str] | set[str],
    config: TierConfig = TierConfig(),
) -> TierLabel:
    """First-match tier rules, evaluated in fixed order.

    Hydrocarbons always land in T0; stereo or rare chemistry carves out T4
    before the broad positional-complexity tier T3; anything matching no
    explicit clause falls back by group count.
    """
    counts = record.counts
    if counts.n_het == 0:
        return TierLabel("T0", "t0_pure_hydrocarbon")
    if counts.n_sc > 0:
        return TierLabel("T4", "t4_stereocenter")
    if record.rarity >= config.rarity_threshold:
        return TierLabel("T4", "t4_rare_groups")
    if record.arom_sub > config.s_threshold:
        return TierLabel("T3", "t3_substitution_complexity")
    if (
        counts.n_ha > 0
        and record.bertz_ct / counts.n_ha > config.ct_per_ha_threshold
        and counts.n_ring >= config.min_rings_t3
    ):
        return TierLabel("T3", "t3_ct_density")
    if record.n_fg <= config.fg_low and record.fg_names <= set(top_groups):
        return TierLabel("T1", "t1_common_groups")
    if (
        config.fg_mid_lo <= record.n_fg <= config.fg_mid_hi
        and record.arom_sub <= config.s_threshold
    ):
        return TierLabel("T2", "t2_multi_group")
    if record.n_fg <= config.fg_mid_hi:
        return TierLabel("T2", "t2_fallback")
    return TierLabel("T3", "t3_fallback")


def tier_histogram(labels: Iterable[TierLabel | str]) -> dict[str, int]:
    """Counts per tier; always returns all five keys."""
    hist = {tier: 0 for tier in TIERS}
    for label in labels:
        tier = label if isinstance(label, str) else label.tier
        hist[tier] += 1
    return hist
