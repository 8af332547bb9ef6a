"""Command-line interface.

Subcommands: prevalence, annotate, schedule, stats, bench, loss-check.
Options resolve as flag > config file > built-in default; the config file is
plain ``key = value`` lines with ``#`` comments.  Exit codes: 0 success,
1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .check import run_gradient_suite, run_property_suite
from .errors import EmptyCorpus, MissingTierField, MoltiersError
from .featurizer import ComplexityAnnotator
from .fgroups import FGLibrary, top_k_groups
from .losses import load_embeddings, pairwise_distance_correlation
from .pipeline import (
    annotate_chunk,
    chunked,
    fit_prevalence_streaming,
    iter_input,
    load_prevalence,
    read_annotated,
    run_annotate,
    save_prevalence,
)
from .scheduler import (
    REGIMES,
    ScheduleSpec,
    TierIndex,
    baseline_budget,
    budget,
    sample_epoch,
)
from .synth import generate_corpus
from .tiering import TIERS, tier_histogram

log = logging.getLogger("moltiers")


def load_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {raw.strip()!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def resolve(args: argparse.Namespace, config: dict[str, str]) -> None:
    """Fill None-valued options from the config file, then from defaults."""
    for key, value in vars(args).items():
        if value is None and key in config:
            setattr(args, key, config[key])
    for key, default in _DEFAULTS.items():
        if getattr(args, key, 0) is None:
            setattr(args, key, default)
    # coerce strings coming from the config file
    for key, default in _DEFAULTS.items():
        if not hasattr(args, key):
            continue
        value = getattr(args, key)
        if isinstance(default, bool) and isinstance(value, str):
            setattr(args, key, value.lower() in ("1", "true", "yes", "on"))
        elif isinstance(default, int) and not isinstance(value, bool) \
                and isinstance(value, str):
            setattr(args, key, int(value))
        elif isinstance(default, float) and isinstance(value, str):
            setattr(args, key, float(value))


_DEFAULTS = {
    "workers": 1,
    "seed": 0,
    "epochs": 10,
    "hard_start": 0.1,
    "top_k": 6,
    "chunk_size": 256,
    "smiles_column": "smiles",
    "format": "auto",
    "delimiter": "",
    "regime": "staged10",
    "n": 10_000,
    "seeds": 100,
    "n_pairs": 1000,
    "rarity_threshold": 0.9,
    "s_threshold": 4,
    "ct_per_ha_threshold": 50.0,
    "min_rings_t3": 3,
    "fg_low": 2,
    "fg_mid_lo": 3,
    "fg_mid_hi": 5,
}


def _annotator_from_args(args: argparse.Namespace) -> ComplexityAnnotator:
    library = FGLibrary.from_json(args.library) if getattr(args, "library", None) else None
    return ComplexityAnnotator(
        rarity_threshold=args.rarity_threshold,
        top_k=args.top_k,
        s_threshold=args.s_threshold,
        ct_per_ha_threshold=args.ct_per_ha_threshold,
        min_rings_t3=args.min_rings_t3,
        fg_low=args.fg_low,
        fg_mid_lo=args.fg_mid_lo,
        fg_mid_hi=args.fg_mid_hi,
        library=library,
    )


def _input_records(args: argparse.Namespace):
    return iter_input(args.input, args.format, args.smiles_column,
                      args.delimiter or None)


def cmd_prevalence(args: argparse.Namespace) -> int:
    annotator = _annotator_from_args(args)
    stats = fit_prevalence_streaming(_input_records(args), annotator)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    save_prevalence(annotator.prevalence_, outdir / "prevalence.tsv")
    top = top_k_groups(annotator.prevalence_, args.top_k)
    (outdir / "top_groups.txt").write_text("\n".join(top) + "\n", encoding="utf-8")
    log.info("prevalence over %d molecules (%d skipped) -> %s",
             stats.written, stats.skipped, outdir)
    for name in top:
        print(f"{name}\t{annotator.prevalence_.prevalence[name]:.6f}")
    return 0


def cmd_annotate(args: argparse.Namespace) -> int:
    annotator = _annotator_from_args(args)
    out_path = Path(args.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if args.prevalence:
        annotator.set_prevalence(load_prevalence(args.prevalence))
    else:
        log.info("no prevalence table given; running two-phase streaming fit")
        try:
            fit_prevalence_streaming(_input_records(args), annotator)
        except EmptyCorpus:
            out_path.write_text("")
            log.info("empty input; wrote empty output")
            return 0
    t0 = time.perf_counter()
    with open(out_path, "w", encoding="utf-8") as out:
        stats = run_annotate(
            _input_records(args), annotator, out,
            workers=args.workers, chunk_size=args.chunk_size,
            include_trace=args.trace, library_path=args.library,
        )
    dt = time.perf_counter() - t0
    log.info("annotated %d molecules (skipped %d malformed) in %.2fs",
             stats.written, stats.skipped, dt)
    return 0


def _parse_tier_counts(text: str) -> tuple[int, ...]:
    parts = [p.strip() for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 5:
        raise ValueError("--tier-counts needs five comma-separated integers")
    return tuple(int(p.replace("_", "")) for p in parts)


def _budget_rows(counts, spec: ScheduleSpec):
    rows = []
    cumulative = 0
    for e in range(spec.epochs):
        if spec.regime == "mixed":
            from .scheduler import tier_weights_mixed

            weights = tier_weights_mixed(e, spec.epochs, spec.hard_start)
            alpha = Fraction(str(spec.hard_start))
            rho = alpha + (1 - alpha) * Fraction(e, spec.epochs - 1)
            size = Fraction(sum(counts[:2])) + sum(counts[2:]) * rho
            rows.append((e, f"rho={weights[2]:.4f}", size))
            cumulative += size
        else:
            from .scheduler import active_tiers

            tiers = sorted(active_tiers(spec.regime, e, spec.epochs))
            size = sum(counts[t] for t in tiers)
            rows.append((e, "{" + ",".join(f"T{t}" for t in tiers) + "}", size))
            cumulative += size
    return rows, cumulative


def cmd_schedule(args: argparse.Namespace) -> int:
    spec = ScheduleSpec(args.regime, args.epochs, args.hard_start, args.seed)
    outdir = Path(args.output_dir) if args.output_dir else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)

    if args.tier_counts:
        counts = _parse_tier_counts(args.tier_counts)
        index = None
    else:
        if not args.annotated:
            raise MissingTierField("schedule needs --annotated or --tier-counts")
        pairs = []
        for row in read_annotated(args.annotated):
            if "tier" not in row or "id" not in row:
                raise MissingTierField(f"record without tier/id: {row}")
            pairs.append((int(row["id"]), TIERS.index(row["tier"])))
        index = TierIndex.from_pairs(pairs)
        counts = index.counts()

    total = budget(counts, spec)
    base = baseline_budget(counts, spec.epochs)
    ratio = float(Fraction(total) / base) if base else float("nan")
    rows, _ = _budget_rows(counts, spec)

    print(f"regime={spec.regime} epochs={spec.epochs} seed={spec.seed}")
    print(f"tier counts: {dict(zip(TIERS, counts))}")
    print(f"{'epoch':>5}  {'active':<24} {'views':>14}")
    for e, desc, size in rows:
        shown = f"{int(size):d}" if spec.regime != "mixed" else f"{float(size):.1f}"
        print(f"{e:>5}  {desc:<24} {shown:>14}")
    exact = f"{total}" if spec.regime == "mixed" else f"{total:d}"
    print(f"total molecule-views: {exact}")
    print(f"baseline (all tiers x {spec.epochs} epochs): {base}")
    print(f"budget ratio: {float(Fraction(total) / base):.4f}")

    deterministic = spec.regime != "mixed"
    cumulative = 0
    per_epoch = []
    for e, desc, size in rows:
        cumulative += size
        per_epoch.append({
            "epoch": e,
            "active": desc,
            "views": int(size) if deterministic else float(size),
            "cumulative_views": int(cumulative) if deterministic
            else float(cumulative),
        })
    summary = {
        "regime": spec.regime,
        "epochs": spec.epochs,
        "seed": spec.seed,
        "hard_start": spec.hard_start,
        "tier_counts": list(counts),
        "per_epoch": per_epoch,
        "total_views": int(total) if deterministic else float(total),
        "total_views_exact": str(total),
        "baseline_views": base,
        "ratio": ratio,
    }
    if outdir:
        (outdir / "schedule_summary.json").write_text(
            json.dumps(summary, indent=2) + "\n", encoding="utf-8"
        )
    if index is not None and outdir and not args.no_manifests:
        for e in range(spec.epochs):
            manifest = sample_epoch(index, spec, e)
            path = outdir / f"manifest_epoch_{e:03d}.jsonl"
            with open(path, "w", encoding="utf-8") as fh:
                for mol_id in manifest.sampled_ids:
                    fh.write(json.dumps(
                        {"epoch": e, "regime": spec.regime, "id": mol_id},
                        separators=(",", ":"),
                    ) + "\n")
            log.info("epoch %d manifest: %d ids -> %s", e, manifest.size, path)
    return 0


def _percentiles(values, probs=(25, 50, 75)):
    import numpy as np

    arr = np.asarray(values, dtype=float)
    return [float(np.percentile(arr, p)) for p in probs]


def cmd_stats(args: argparse.Namespace) -> int:
    import numpy as np

    rows = list(read_annotated(args.annotated))
    if not rows:
        raise EmptyCorpus(f"no records in {args.annotated}")
    report: dict = {"n": len(rows)}
    for key in ("mw", "bertz_ct", "n_ring"):
        arr = np.asarray([r[key] for r in rows], dtype=float)
        report[key] = {
            "mean": float(arr.mean()),
            "median": float(np.median(arr)),
            "p99": float(np.percentile(arr, 99)),
        }
    hist = tier_histogram(r["tier"] for r in rows)
    report["tier_histogram"] = hist
    per_tier = {}
    for tier in TIERS:
        values = [r["bertz_ct"] for r in rows if r["tier"] == tier]
        if values:
            q25, q50, q75 = _percentiles(values)
            per_tier[tier] = {"n": len(values), "q25": q25, "median": q50, "q75": q75}
    report["bertz_ct_per_tier"] = per_tier

    print(f"records: {report['n']}")
    for key in ("mw", "bertz_ct", "n_ring"):
        s = report[key]
        print(f"{key:>9}: mean {s['mean']:.2f}  median {s['median']:.2f}  "
              f"p99 {s['p99']:.2f}")
    print(f"{'tier':>5} {'count':>9}  bertz_ct q25/median/q75")
    for tier in TIERS:
        q = per_tier.get(tier)
        quartiles = (
            f"{q['q25']:.2f} / {q['median']:.2f} / {q['q75']:.2f}" if q else "-"
        )
        print(f"{tier:>5} {hist[tier]:>9}  {quartiles}")
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2) + "\n",
                                   encoding="utf-8")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.input:
        corpus = [s for _, s in iter_input(args.input, args.format,
                                           args.smiles_column,
                                           args.delimiter or None)]
    else:
        corpus = list(generate_corpus(args.n, args.seed))
    pairs = list(enumerate(corpus))
    log.info("bench corpus: %d molecules, seed=%d, workers=%d",
             len(pairs), args.seed, args.workers)

    annotator = _annotator_from_args(args)
    annotator.fit(corpus)

    # warm-up (imports, caches) before timing descriptor computation
    annotate_chunk(pairs[:64], annotator, False)

    t0 = time.perf_counter()
    skipped = 0
    for chunk in chunked(pairs, args.chunk_size):
        _, s = annotate_chunk(chunk, annotator, False)
        skipped += s
    t1 = time.perf_counter()
    single = len(pairs) / (t1 - t0)
    print(f"single-worker: {1000.0 * (t1 - t0) / len(pairs):.4f} ms/mol  "
          f"{single:,.0f} mol/s  (skipped {skipped})")

    if args.workers > 1:
        import io

        sink = io.StringIO()
        t2 = time.perf_counter()
        run_annotate(iter(pairs), annotator, sink, workers=args.workers,
                     chunk_size=args.chunk_size, library_path=args.library)
        t3 = time.perf_counter()
        multi = len(pairs) / (t3 - t2)
        speedup = multi / single
        print(f"{args.workers}-worker:  {1000.0 * (t3 - t2) / len(pairs):.4f} "
              f"ms/mol  {multi:,.0f} mol/s")
        print(f"speedup {speedup:.2f}x, parallel efficiency "
              f"{speedup / args.workers:.2f} (host cores: {os.cpu_count()})")
    return 0


def cmd_loss_check(args: argparse.Namespace) -> int:
    results = run_gradient_suite(args.seeds) + run_property_suite()
    failed = 0
    for result in results:
        print(result.line())
        failed += not result.passed
    if args.matrix_a and args.matrix_b:
        a = load_embeddings(args.matrix_a)
        b = load_embeddings(args.matrix_b)
        rho, r = pairwise_distance_correlation(a, b, args.n_pairs, args.seed)
        print(f"pairwise-distance correlation: spearman={rho:.4f} pearson={r:.4f} "
              f"({args.n_pairs} pairs, seed {args.seed})")
    if failed:
        raise MoltiersError(f"{failed} loss checks failed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moltiers",
        description="Molecular complexity descriptors, curriculum tiers, "
                    "schedules, and loss kernels.",
    )
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="corpus (.smi/.csv/.tsv)")
        p.add_argument("--format", choices=("auto", "smi", "delimited"))
        p.add_argument("--smiles-column", dest="smiles_column")
        p.add_argument("--delimiter")
        p.add_argument("--library", help="functional-group library JSON")

    def add_tier_config(p):
        p.add_argument("--rarity-threshold", dest="rarity_threshold", type=float)
        p.add_argument("--top-k", dest="top_k", type=int)
        p.add_argument("--s-threshold", dest="s_threshold", type=int)
        p.add_argument("--ct-per-ha-threshold", dest="ct_per_ha_threshold",
                       type=float)
        p.add_argument("--min-rings-t3", dest="min_rings_t3", type=int)
        p.add_argument("--fg-low", dest="fg_low", type=int)
        p.add_argument("--fg-mid-lo", dest="fg_mid_lo", type=int)
        p.add_argument("--fg-mid-hi", dest="fg_mid_hi", type=int)

    p = sub.add_parser("prevalence", help="compute group prevalence P(f)")
    add_io(p)
    add_tier_config(p)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_prevalence)

    p = sub.add_parser("annotate", help="descriptor + tier JSONL per molecule")
    add_io(p)
    add_tier_config(p)
    p.add_argument("--output", required=True)
    p.add_argument("--prevalence", help="prevalence.tsv from the prevalence step")
    p.add_argument("--workers", type=int)
    p.add_argument("--chunk-size", dest="chunk_size", type=int)
    p.add_argument("--trace", action="store_true",
                   help="include the tier rule trace in each record")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("schedule", help="per-epoch manifests and budget report")
    p.add_argument("--annotated", help="annotate output (JSONL with id+tier)")
    p.add_argument("--tier-counts", dest="tier_counts",
                   help="five counts, e.g. 268,107370,153955,703283,35124 "
                        "(budget report only)")
    p.add_argument("--regime", choices=REGIMES)
    p.add_argument("--epochs", type=int)
    p.add_argument("--hard-start", dest="hard_start", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output-dir")
    p.add_argument("--no-manifests", action="store_true")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("stats", help="summary statistics of an annotated file")
    p.add_argument("--annotated", required=True)
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="descriptor throughput benchmark")
    add_io(p, needs_input=False)
    p.add_argument("--input", help="benchmark corpus; default: bundled generator")
    add_tier_config(p)
    p.add_argument("--n", type=int, help="synthetic corpus size")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--chunk-size", dest="chunk_size", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("loss-check", help="gradient and invariant self-checks")
    p.add_argument("--seeds", type=int)
    p.add_argument("--matrix-a", dest="matrix_a")
    p.add_argument("--matrix-b", dest="matrix_b")
    p.add_argument("--n-pairs", dest="n_pairs", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_loss_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = load_config(args.config)
        resolve(args, config)
        if hasattr(args, "seed") or hasattr(args, "workers"):
            log.info("seed=%s workers=%s", getattr(args, "seed", "-"),
                     getattr(args, "workers", "-"))
        return args.func(args)
    except (MoltiersError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
