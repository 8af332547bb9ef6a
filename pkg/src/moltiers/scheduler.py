"""Curriculum schedules: active tier sets, mixed-regime weights, per-epoch
manifests, and exact sample-budget arithmetic.

Mixed-regime sampling uses a counter-style hash of (seed, molecule id,
epoch), so manifests are reproducible and independent of worker count or
iteration order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import EpochOutOfRange, Staged10RequiresTenEpochs

REGIMES = ("additive", "staged10", "mixed", "standard", "anti")

N_TIERS = 5

_STAGED10 = (
    (0, 1), (0, 1), (0, 1),
    (0, 1, 2), (0, 1, 2),
    (0, 1, 2, 3), (0, 1, 2, 3), (0, 1, 2, 3),
    (0, 1, 2, 3, 4), (0, 1, 2, 3, 4),
)


@dataclass(frozen=True)
class ScheduleSpec:
    regime: str = "staged10"
    epochs: int = 10
    hard_start: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0.0 <= self.hard_start <= 1.0:
            raise ValueError("hard_start must lie in [0, 1]")


@dataclass(frozen=True)
class EpochManifest:
    epoch: int
    regime: str
    active_tiers: frozenset[int] | None
    tier_weights: tuple[float, ...] | None
    sampled_ids: list[int]

    @property
    def size(self) -> int:
        return len(self.sampled_ids)


def active_tiers(regime: str, epoch: int, epochs: int) -> frozenset[int]:
    """Tier indices in the active pool for the deterministic regimes."""
    if not 0 <= epoch < epochs:
        raise EpochOutOfRange(f"epoch {epoch} outside [0, {epochs})")
    if regime == "additive":
        return frozenset(range(min(epoch, N_TIERS - 1) + 1))
    if regime == "staged10":
        if epochs != 10:
            raise Staged10RequiresTenEpochs(f"staged10 needs 10 epochs, got {epochs}")
        return frozenset(_STAGED10[epoch])
    if regime == "standard":
        stage = min(N_TIERS - 1, (epoch * N_TIERS) // epochs)
        return frozenset(range(stage + 1))
    if regime == "anti":
        stage = min(N_TIERS - 1, (epoch * N_TIERS) // epochs)
        return frozenset(range(N_TIERS - 1 - stage, N_TIERS))
    raise ValueError(f"regime {regime!r} has no deterministic tier set")


def tier_weights_mixed(
    epoch: int, epochs: int, hard_start: float = 0.1
) -> tuple[float, ...]:
    """Inclusion probability per tier: simple tiers stay at 1, complex tiers
    ramp linearly from the hard-start fraction to 1 at the final epoch."""
    if epochs < 2:
        raise ValueError("mixed regime needs at least 2 epochs")
    if not 0 <= epoch < epochs:
        raise EpochOutOfRange(f"epoch {epoch} outside [0, {epochs})")
    if epoch == epochs - 1:
        ramp = 1.0  # exact endpoint; float rounding must not exclude anyone
    else:
        ramp = hard_start + (1.0 - hard_start) * epoch / (epochs - 1)
    return (1.0, 1.0, ramp, ramp, ramp)


def _mix64(x: int) -> int:
    # splitmix64 finaliser
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def uniform_draw(seed: int, mol_id: int, epoch: int) -> float:
    """Deterministic Uniform[0, 1) keyed by (seed, molecule, epoch)."""
    h = _mix64(_mix64(_mix64(seed & 0xFFFFFFFFFFFFFFFF) ^ mol_id) ^ (epoch + 1))
    return (h >> 11) / float(1 << 53)


class TierIndex:
    """Molecule ids grouped by tier, kept in sorted order."""

    def __init__(self, ids_by_tier: Mapping[int, Sequence[int]]):
        self.ids_by_tier: dict[int, list[int]] = {
            t: sorted(ids_by_tier.get(t, ())) for t in range(N_TIERS)
        }

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "TierIndex":
        """Build from (molecule id, tier index) pairs."""
        by_tier: dict[int, list[int]] = {t: [] for t in range(N_TIERS)}
        for mol_id, tier in pairs:
            by_tier[tier].append(mol_id)
        return cls(by_tier)

    def counts(self) -> tuple[int, ...]:
        return tuple(len(self.ids_by_tier[t]) for t in range(N_TIERS))

    def total(self) -> int:
        return sum(self.counts())


def sample_epoch(index: TierIndex, spec: ScheduleSpec, epoch: int) -> EpochManifest:
    """Molecule ids active at the epoch, in ascending id order."""
    if spec.regime == "mixed":
        weights = tier_weights_mixed(epoch, spec.epochs, spec.hard_start)
        ids: list[int] = []
        for tier in range(N_TIERS):
            rho = weights[tier]
            if rho >= 1.0:
                ids.extend(index.ids_by_tier[tier])
                continue
            if rho <= 0.0:
                continue
            seed = spec.seed
            ids.extend(
                m for m in index.ids_by_tier[tier]
                if uniform_draw(seed, m, epoch) < rho
            )
        ids.sort()
        return EpochManifest(epoch, spec.regime, None, weights, ids)
    tiers = active_tiers(spec.regime, epoch, spec.epochs)
    ids = []
    for tier in sorted(tiers):
        ids.extend(index.ids_by_tier[tier])
    ids.sort()
    return EpochManifest(epoch, spec.regime, tiers, None, ids)


def budget(tier_counts: Sequence[int], spec: ScheduleSpec) -> int | Fraction:
    """Total molecule-views over all epochs.

    Deterministic regimes return an exact integer.  The mixed regime returns
    the exact expected count as a Fraction (the hard-start fraction is read
    through its decimal representation, so 0.1 means exactly 1/10).
    """
    if len(tier_counts) != N_TIERS:
        raise ValueError("expected five tier counts")
    if any(c < 0 for c in tier_counts):
        raise ValueError("tier counts must be >= 0")
    if spec.regime == "mixed":
        if spec.epochs < 2:
            raise ValueError("mixed regime needs at least 2 epochs")
        alpha = Fraction(str(spec.hard_start))
        simple = sum(tier_counts[:2])
        complex_ = sum(tier_counts[2:])
        total = Fraction(0)
        for e in range(spec.epochs):
            rho = alpha + (1 - alpha) * Fraction(e, spec.epochs - 1)
            total += simple + complex_ * rho
        return total
    views = 0
    for e in range(spec.epochs):
        for tier in active_tiers(spec.regime, e, spec.epochs):
            views += tier_counts[tier]
    return views


def baseline_budget(tier_counts: Sequence[int], epochs: int) -> int:
    """All tiers active every epoch (the non-curriculum reference)."""
    return epochs * sum(tier_counts)
