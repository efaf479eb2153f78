"""Trajectory corpus: per-author chronologically ordered concept sequences.

A trajectory concatenates the concept lists of an author's works, works
sorted by (year, work_id) ascending. Authors must have strictly more than
``min_pubs`` works to be retained.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import CorpusError, EmptyCorpusError, ParseError

log = logging.getLogger(__name__)

DEFAULT_YEAR_RANGE = (1800, 2100)


@dataclass(frozen=True)
class WorkRecord:
    work_id: str
    author_id: str
    year: int
    concept_ids: tuple[str, ...]


@dataclass(frozen=True)
class Trajectory:
    author_id: str
    sequence: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.sequence)


@dataclass(frozen=True)
class CorpusStats:
    authors: int
    tokens: int
    vocab_size: int
    seq_len_q5: float
    seq_len_q50: float
    seq_len_q95: float


@dataclass
class TrajectoryCorpus:
    trajectories: list[Trajectory]
    vocabulary: Counter
    min_pubs: int | None = None

    def __len__(self) -> int:
        return len(self.trajectories)

    def save(self, path: str | Path) -> None:
        """One line per author: author_id<TAB>space-separated concept ids."""
        with open(path, "w", encoding="utf-8") as fh:
            for t in self.trajectories:
                fh.write(f"{t.author_id}\t{' '.join(t.sequence)}\n")

    @classmethod
    def load(cls, path: str | Path, min_pubs: int | None = None) -> "TrajectoryCorpus":
        trajectories: list[Trajectory] = []
        vocabulary: Counter = Counter()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                author_id, sep, rest = line.partition("\t")
                if not sep or not rest:
                    raise ParseError(f"{path}:{lineno}: expected author_id<TAB>concepts")
                sequence = tuple(rest.split(" "))
                trajectories.append(Trajectory(author_id=author_id, sequence=sequence))
                vocabulary.update(sequence)
        return cls(trajectories=trajectories, vocabulary=vocabulary, min_pubs=min_pubs)


def _check_token(value: str, what: str, where: str) -> str:
    if not value or " " in value or "\t" in value or "|" in value:
        raise ParseError(f"{where}: invalid {what} {value!r} (empty or contains whitespace/pipe)")
    return value


def iter_work_records(
    works_file: str | Path, year_range: tuple[int, int] = DEFAULT_YEAR_RANGE
) -> Iterator[WorkRecord]:
    """Stream validated work records from the works TSV."""
    works_file = Path(works_file)
    lo, hi = year_range
    with open(works_file, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise ParseError(f"{works_file}: empty file")
        header = header_line.rstrip("\n").rstrip("\r").split("\t")
        required = ("author_id", "work_id", "year", "concept_ids")
        missing = [col for col in required if col not in header]
        if missing:
            raise ParseError(f"{works_file}: missing required columns {missing}")
        idx = {col: header.index(col) for col in required}
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != len(header):
                raise ParseError(f"{works_file}:{lineno}: expected {len(header)} fields")
            where = f"{works_file}:{lineno}"
            author = _check_token(fields[idx["author_id"]], "author_id", where)
            work = _check_token(fields[idx["work_id"]], "work_id", where)
            try:
                year = int(fields[idx["year"]])
            except ValueError:
                raise ParseError(f"{where}: bad year {fields[idx['year']]!r}") from None
            if not lo <= year <= hi:
                raise ParseError(f"{where}: year {year} outside {lo}..{hi}")
            raw = fields[idx["concept_ids"]]
            concept_ids = tuple(c for c in raw.split("|") if c)
            if not concept_ids:
                raise ParseError(f"{where}: empty concept list")
            for c in concept_ids:
                _check_token(c, "concept id", where)
            yield WorkRecord(work_id=work, author_id=author, year=year, concept_ids=concept_ids)


def build_trajectories(
    works_file: str | Path,
    min_pubs: int,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
    presort: bool = False,
) -> TrajectoryCorpus:
    """Build per-author trajectories from the works TSV.

    The input must be grouped by author_id (all of an author's rows
    consecutive) and is streamed with one author buffered at a time; pass
    presort=True to sort ungrouped input first (in-memory sort, intended for
    desk-scale files). Works are ordered by (year, work_id) ascending within
    an author; concept order within a work is preserved from the input.
    """
    if min_pubs < 0:
        raise CorpusError(f"min_pubs must be >= 0, got {min_pubs}")
    works_file = Path(works_file)
    records: Iterator[WorkRecord] = iter_work_records(works_file, year_range)
    if presort:
        records = iter(sorted(records, key=lambda r: r.author_id))

    trajectories: list[Trajectory] = []
    vocabulary: Counter = Counter()

    def flush(author: str, works: list[tuple[int, str, tuple[str, ...]]]) -> None:
        if len(works) <= min_pubs:
            return
        works.sort(key=lambda w: (w[0], w[1]))
        sequence: list[str] = []
        for _, _, concepts in works:
            sequence.extend(concepts)
        trajectories.append(Trajectory(author_id=author, sequence=tuple(sequence)))
        vocabulary.update(sequence)

    done: set[str] = set()
    current: str | None = None
    buffer: list[tuple[int, str, tuple[str, ...]]] = []
    for rec in records:
        if rec.author_id != current:
            if rec.author_id in done:
                raise CorpusError(
                    f"{works_file}: rows for author {rec.author_id!r} are not consecutive; "
                    "group the input by author_id or pass presort"
                )
            if current is not None:
                flush(current, buffer)
                done.add(current)
            current = rec.author_id
            buffer = []
        buffer.append((rec.year, rec.work_id, rec.concept_ids))
    if current is not None:
        flush(current, buffer)

    if not trajectories:
        raise EmptyCorpusError(f"no authors with more than {min_pubs} works in {works_file}")
    corpus = TrajectoryCorpus(trajectories=trajectories, vocabulary=vocabulary, min_pubs=min_pubs)
    log.info(
        "built corpus: %d authors, %d tokens, %d distinct concepts",
        len(trajectories),
        sum(len(t) for t in trajectories),
        len(vocabulary),
    )
    return corpus


def corpus_stats(corpus: TrajectoryCorpus) -> CorpusStats:
    """Author count, token count, vocabulary size, sequence-length quantiles."""
    if not corpus.trajectories:
        return CorpusStats(0, 0, 0, 0.0, 0.0, 0.0)
    lengths = np.array([len(t) for t in corpus.trajectories], dtype=float)
    q5, q50, q95 = np.percentile(lengths, [5, 50, 95])
    return CorpusStats(
        authors=len(corpus.trajectories),
        tokens=int(lengths.sum()),
        vocab_size=len(corpus.vocabulary),
        seq_len_q5=float(q5),
        seq_len_q50=float(q50),
        seq_len_q95=float(q95),
    )
