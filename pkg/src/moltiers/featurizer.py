"""Corpus-fitted annotator with a scikit-learn style estimator surface.

``fit`` learns functional-group prevalence (and the top-k common groups)
from a SMILES corpus; ``transform`` turns SMILES into descriptor/tier
records ready for JSON serialization.  ``get_params``/``set_params`` follow
the scikit-learn contract so the annotator drops into sklearn pipelines and
search utilities without this package depending on sklearn.
"""

from __future__ import annotations

import inspect
from typing import Iterable

from .descriptors import DescriptorRecord, descriptor_record
from .errors import NotFitted, SmilesError
from .fgroups import (
    FGLibrary,
    PrevalenceTable,
    corpus_prevalence,
    default_library,
    top_k_groups,
)
from .graph import perceive_aromaticity
from .smiles import parse_smiles
from .tiering import TierConfig, TierLabel, assign_tier

RECORD_FIELDS = (
    "id", "smiles", "d_scaf", "rarity", "conjugation", "arom_sub", "bertz_ct",
    "n_ha", "n_het", "n_ring", "n_sc", "n_fg", "mw", "fg_names", "tier",
)


def record_to_dict(
    mol_id: int,
    smiles: str,
    record: DescriptorRecord,
    label: TierLabel,
    include_trace: bool = False,
) -> dict:
    """Flatten a record into the fixed JSONL schema (field order matters)."""
    out = {
        "id": mol_id,
        "smiles": smiles,
        "d_scaf": record.d_scaf,
        "rarity": record.rarity,
        "conjugation": record.conjugation,
        "arom_sub": record.arom_sub,
        "bertz_ct": record.bertz_ct,
        "n_ha": record.counts.n_ha,
        "n_het": record.counts.n_het,
        "n_ring": record.counts.n_ring,
        "n_sc": record.counts.n_sc,
        "n_fg": record.n_fg,
        "mw": record.counts.mw,
        "fg_names": sorted(record.fg_names),
        "tier": label.tier,
    }
    if include_trace:
        out["rule_trace"] = label.rule_trace
    return out


class ComplexityAnnotator:
    """fit on a corpus, transform SMILES into descriptor/tier records."""

    def __init__(
        self,
        rarity_threshold: float = 0.9,
        top_k: int = 6,
        s_threshold: int = 4,
        ct_per_ha_threshold: float = 50.0,
        min_rings_t3: int = 3,
        fg_low: int = 2,
        fg_mid_lo: int = 3,
        fg_mid_hi: int = 5,
        library: FGLibrary | None = None,
    ):
        self.rarity_threshold = rarity_threshold
        self.top_k = top_k
        self.s_threshold = s_threshold
        self.ct_per_ha_threshold = ct_per_ha_threshold
        self.min_rings_t3 = min_rings_t3
        self.fg_low = fg_low
        self.fg_mid_lo = fg_mid_lo
        self.fg_mid_hi = fg_mid_hi
        self.library = library

    # -- sklearn-style parameter plumbing ---------------------------------
    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "ComplexityAnnotator":
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"invalid parameter {key!r}")
            setattr(self, key, value)
        return self

    # -- estimator surface -------------------------------------------------
    def tier_config(self) -> TierConfig:
        return TierConfig(
            rarity_threshold=self.rarity_threshold,
            top_k=self.top_k,
            s_threshold=self.s_threshold,
            ct_per_ha_threshold=self.ct_per_ha_threshold,
            min_rings_t3=self.min_rings_t3,
            fg_low=self.fg_low,
            fg_mid_lo=self.fg_mid_lo,
            fg_mid_hi=self.fg_mid_hi,
        )

    def _lib(self) -> FGLibrary:
        return self.library if self.library is not None else default_library()

    def fit(self, X: Iterable[str], y=None) -> "ComplexityAnnotator":
        """Learn group prevalence from a SMILES corpus.

        Unparseable entries are skipped and counted in ``n_skipped_``.
        """
        library = self._lib()

        def graphs():
            skipped = 0
            for text in X:
                try:
                    yield perceive_aromaticity(parse_smiles(text.strip()))
                except SmilesError:
                    skipped += 1
            self.n_skipped_ = skipped

        self.n_skipped_ = 0
        self.prevalence_ = corpus_prevalence(graphs(), library)
        self.top_groups_ = frozenset(top_k_groups(self.prevalence_, self.top_k))
        self.n_fitted_ = self.prevalence_.corpus_size
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "prevalence_"):
            raise NotFitted("call fit() before transform()/predict()")

    def set_prevalence(self, table: PrevalenceTable) -> "ComplexityAnnotator":
        """Adopt a precomputed prevalence table instead of fitting."""
        self.prevalence_ = table
        self.top_groups_ = frozenset(top_k_groups(table, self.top_k))
        self.n_fitted_ = table.corpus_size
        self.n_skipped_ = 0
        return self

    def annotate_one(self, smiles: str) -> tuple[DescriptorRecord, TierLabel]:
        self._check_fitted()
        # descriptor_record perceives aromaticity itself; don't do it twice
        graph = parse_smiles(smiles.strip())
        record = descriptor_record(graph, self.prevalence_, self._lib())
        label = assign_tier(record, self.top_groups_, self.tier_config())
        return record, label

    def transform(self, X: Iterable[str]) -> list[dict]:
        """One record dict per parseable input, in input order."""
        self._check_fitted()
        out = []
        for i, text in enumerate(X):
            try:
                record, label = self.annotate_one(text)
            except SmilesError:
                continue
            out.append(record_to_dict(i, text.strip(), record, label))
        return out

    def fit_transform(self, X, y=None) -> list[dict]:
        smiles = list(X)
        return self.fit(smiles).transform(smiles)

    def predict(self, X: Iterable[str]) -> list[str]:
        """Tier label per input SMILES."""
        self._check_fitted()
        return [self.annotate_one(text)[1].tier for text in X]
