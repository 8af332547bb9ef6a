"""Corpus ingestion and the fan-out/fan-in parallel annotation pipeline.

Workers are stateless over an immutable annotator built once per process;
chunks come back through an order-preserving imap, so output is
byte-identical for any worker count or chunk size.
"""

from __future__ import annotations

import csv
import json
import multiprocessing as mp
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .errors import EmptyCorpus, MissingTierField, SmilesError
from .featurizer import ComplexityAnnotator, record_to_dict
from .fgroups import FGLibrary, PrevalenceTable


def detect_format(path: str | Path, fmt: str = "auto") -> str:
    if fmt != "auto":
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix == ".smi":
        return "smi"
    if suffix in (".csv", ".tsv"):
        return "delimited"
    return "smi"


def iter_input(
    path: str | Path,
    fmt: str = "auto",
    smiles_column: str = "smiles",
    delimiter: str | None = None,
) -> Iterator[tuple[int, str]]:
    """Yield (row id, smiles) pairs; blank rows are skipped silently."""
    fmt = detect_format(path, fmt)
    if fmt == "smi":
        with open(path, encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                token = line.split(None, 1)[0] if line.strip() else ""
                if token:
                    yield i, token
        return
    if fmt != "delimited":
        raise ValueError(f"unknown input format {fmt!r}")
    delim = delimiter or ("\t" if str(path).endswith(".tsv") else ",")
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delim)
        header = next(reader, None)
        if header is None:
            return
        lowered = [h.strip().lower() for h in header]
        if smiles_column.lower() not in lowered:
            raise MissingTierField(
                f"no {smiles_column!r} column in {path} (found {header})"
            )
        col = lowered.index(smiles_column.lower())
        for i, row in enumerate(reader):
            if col < len(row) and row[col].strip():
                yield i, row[col].strip()


def chunked(items: Iterable, size: int) -> Iterator[list]:
    chunk: list = []
    for item in items:
        chunk.append(item)
        if len(chunk) >= size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def dumps_record(payload: dict) -> str:
    return json.dumps(payload, separators=(",", ":"))


_WORKER: ComplexityAnnotator | None = None
_WORKER_TRACE = False


def _init_worker(
    prevalence: dict[str, float],
    corpus_size: int,
    params: dict,
    library_path: str | None,
    include_trace: bool,
) -> None:
    global _WORKER, _WORKER_TRACE
    library = FGLibrary.from_json(library_path) if library_path else None
    annotator = ComplexityAnnotator(library=library, **params)
    annotator.set_prevalence(PrevalenceTable(prevalence, corpus_size))
    _WORKER = annotator
    _WORKER_TRACE = include_trace


def annotate_chunk(
    chunk: list[tuple[int, str]],
    annotator: ComplexityAnnotator,
    include_trace: bool,
) -> tuple[list[str], int]:
    """JSON lines for one chunk plus the count of unparseable entries."""
    lines: list[str] = []
    skipped = 0
    for mol_id, smiles in chunk:
        try:
            record, label = annotator.annotate_one(smiles)
        except SmilesError:
            skipped += 1
            continue
        lines.append(
            dumps_record(record_to_dict(mol_id, smiles, record, label, include_trace))
        )
    return lines, skipped


def _worker_chunk(chunk: list[tuple[int, str]]) -> tuple[list[str], int]:
    assert _WORKER is not None
    return annotate_chunk(chunk, _WORKER, _WORKER_TRACE)


@dataclass
class AnnotateStats:
    written: int = 0
    skipped: int = 0


def run_annotate(
    records: Iterable[tuple[int, str]],
    annotator: ComplexityAnnotator,
    out: TextIO,
    workers: int = 1,
    chunk_size: int = 256,
    include_trace: bool = False,
    library_path: str | None = None,
) -> AnnotateStats:
    """Annotate a stream, preserving input order for any worker count."""
    annotator._check_fitted()
    stats = AnnotateStats()
    chunks = chunked(records, chunk_size)
    if workers <= 1:
        for chunk in chunks:
            lines, skipped = annotate_chunk(chunk, annotator, include_trace)
            stats.skipped += skipped
            for line in lines:
                out.write(line + "\n")
                stats.written += 1
        return stats
    if annotator.library is not None and library_path is None:
        raise ValueError(
            "a custom pattern library needs library_path so worker "
            "processes can load it"
        )
    params = {
        k: v for k, v in annotator.get_params().items() if k != "library"
    }
    ctx = mp.get_context()
    with ctx.Pool(
        workers,
        initializer=_init_worker,
        initargs=(
            annotator.prevalence_.prevalence,
            annotator.prevalence_.corpus_size,
            params,
            library_path,
            include_trace,
        ),
    ) as pool:
        for lines, skipped in pool.imap(_worker_chunk, chunks):
            stats.skipped += skipped
            for line in lines:
                out.write(line + "\n")
                stats.written += 1
    return stats


def fit_prevalence_streaming(
    records: Iterable[tuple[int, str]], annotator: ComplexityAnnotator
) -> AnnotateStats:
    """First pass of the two-phase pipeline: learn prevalence from a stream."""
    annotator.fit(smiles for _, smiles in records)
    return AnnotateStats(written=annotator.n_fitted_, skipped=annotator.n_skipped_)


def save_prevalence(table: PrevalenceTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# corpus_size={table.corpus_size}\n")
        for name in sorted(table.prevalence):
            fh.write(f"{name}\t{table.prevalence[name]!r}\n")


def load_prevalence(path: str | Path) -> PrevalenceTable:
    prevalence: dict[str, float] = {}
    corpus_size = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "corpus_size=" in line:
                    corpus_size = int(line.split("corpus_size=")[1])
                continue
            name, value = line.split("\t")
            prevalence[name] = float(value)
    if not prevalence:
        raise EmptyCorpus(f"no prevalence rows in {path}")
    return PrevalenceTable(prevalence, corpus_size)


def read_annotated(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)
