"""Concept taxonomy: loading, validation, root-path counting, classification.

The taxonomy is a DAG of concepts over six levels. Level-0 concepts are the
discipline roots; every retained concept reaches at least one root through
parent edges. A concept's discipline label is the root with the largest
number of distinct root-to-concept paths; ties are indistinguishable and the
concept is labeled Multi-interdisciplinary.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CycleError, ParseError, UnknownConceptError

log = logging.getLogger(__name__)

UINT64_MAX = int(np.iinfo(np.uint64).max)

MULTI_INTERDISCIPLINARY = "Multi-interdisciplinary"

TAG_SINGLE = "S"
TAG_MULTI = "M"
TAG_CLASSIFIABLE = "S+"
TAG_INDISTINGUISHABLE = "M-"


@dataclass(frozen=True)
class Concept:
    id: str
    name: str
    level: int
    works_count: int


@dataclass(frozen=True)
class LoadReport:
    """What the loader kept, dropped, and deduplicated."""

    total_concepts: int
    retained_concepts: int
    removed_unreachable: tuple[str, ...]
    duplicate_edges_dropped: int
    n_roots: int

    @property
    def removed_count(self) -> int:
        return len(self.removed_unreachable)


@dataclass(frozen=True)
class RootPathCounts:
    """Distinct root-to-concept path counts, one entry per ancestor root."""

    concept_id: str
    counts: dict[str, int]
    saturated: frozenset[str]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class DisciplineAssignment:
    concept_id: str
    ancestor_roots: frozenset[str]
    discipline: str | None  # None <=> Multi-interdisciplinary
    root_multiplicity_tag: str  # TAG_SINGLE | TAG_MULTI
    classifiability_tag: str  # TAG_CLASSIFIABLE | TAG_INDISTINGUISHABLE

    @property
    def label(self) -> str:
        return self.discipline if self.discipline is not None else MULTI_INTERDISCIPLINARY

    @property
    def is_classifiable(self) -> bool:
        return self.classifiability_tag == TAG_CLASSIFIABLE


class ConceptTaxonomy:
    """Validated, topologically ordered concept DAG.

    Immutable after load; safe to share across concurrent readers. Path
    counts are computed lazily once and cached.
    """

    def __init__(
        self,
        concepts: dict[str, Concept],
        parents: dict[str, tuple[str, ...]],
        roots: tuple[str, ...],
        topo_order: tuple[str, ...],
        load_report: LoadReport,
    ):
        self.concepts = concepts
        self.parents = parents
        self.roots = roots
        self.topo_order = topo_order
        self.load_report = load_report
        self._root_index = {r: i for i, r in enumerate(roots)}
        self._row_index = {c: i for i, c in enumerate(topo_order)}
        self._counts: np.ndarray | None = None  # (n_retained, n_roots) uint64
        self._saturated: np.ndarray | None = None  # same shape, bool

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.concepts

    def __len__(self) -> int:
        return len(self.concepts)

    def is_root(self, concept_id: str) -> bool:
        return concept_id in self._root_index

    def root_name(self, root_id: str) -> str:
        return self.concepts[root_id].name

    def children_map(self) -> dict[str, list[str]]:
        children: dict[str, list[str]] = {c: [] for c in self.concepts}
        for child, pars in self.parents.items():
            for p in pars:
                children[p].append(child)
        return children

    def _ensure_counts(self) -> tuple[np.ndarray, np.ndarray]:
        if self._counts is None:
            self._counts, self._saturated = _count_all_root_paths(self)
        return self._counts, self._saturated

    def path_count_row(self, concept_id: str) -> tuple[np.ndarray, np.ndarray]:
        counts, saturated = self._ensure_counts()
        row = self._row_index[concept_id]
        return counts[row], saturated[row]


def _read_tsv(path: Path, required: tuple[str, ...]):
    """Yield (line_number, row_dict) for a header-carrying TSV file."""
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise ParseError(f"{path}: empty file")
        header = header_line.rstrip("\n").rstrip("\r").split("\t")
        missing = [col for col in required if col not in header]
        if missing:
            raise ParseError(f"{path}: missing required columns {missing} in header {header}")
        idx = {col: header.index(col) for col in required}
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != len(header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(fields)}"
                )
            yield lineno, {col: fields[i] for col, i in idx.items()}


def load_taxonomy(concepts_file: str | Path, edges_file: str | Path) -> ConceptTaxonomy:
    """Load and validate the concept DAG from the concepts and edges TSVs.

    Concepts with no ancestor root are removed and reported; a cycle anywhere
    rejects the whole load with one cycle witness.
    """
    concepts_file = Path(concepts_file)
    edges_file = Path(edges_file)

    concepts: dict[str, Concept] = {}
    order: list[str] = []
    for lineno, row in _read_tsv(concepts_file, ("concept_id", "display_name", "level", "works_count")):
        cid = row["concept_id"]
        if not cid:
            raise ParseError(f"{concepts_file}:{lineno}: empty concept_id")
        if cid in concepts:
            raise ParseError(f"{concepts_file}:{lineno}: duplicate concept id {cid!r}")
        try:
            level = int(row["level"])
            works = int(row["works_count"])
        except ValueError as exc:
            raise ParseError(f"{concepts_file}:{lineno}: {exc}") from None
        if not 0 <= level <= 5:
            raise ParseError(f"{concepts_file}:{lineno}: level {level} outside 0..5")
        if works < 0:
            raise ParseError(f"{concepts_file}:{lineno}: negative works_count")
        concepts[cid] = Concept(id=cid, name=row["display_name"], level=level, works_count=works)
        order.append(cid)

    parents: dict[str, list[str]] = {cid: [] for cid in concepts}
    seen_edges: set[tuple[str, str]] = set()
    duplicate_edges = 0
    for lineno, row in _read_tsv(edges_file, ("child_id", "parent_id")):
        child, parent = row["child_id"], row["parent_id"]
        for cid in (child, parent):
            if cid not in concepts:
                raise ParseError(f"{edges_file}:{lineno}: unknown concept id {cid!r}")
        if (child, parent) in seen_edges:
            duplicate_edges += 1
            continue
        seen_edges.add((child, parent))
        parents[child].append(parent)

    roots = tuple(cid for cid in order if concepts[cid].level == 0)
    if not roots:
        raise ParseError(f"{concepts_file}: no level-0 discipline roots present")
    for r in roots:
        if parents[r]:
            raise ParseError(f"{edges_file}: level-0 concept {r!r} has parents {parents[r]}")

    topo = _topological_order(order, parents)

    # Reachability from the roots decides retention.
    children: dict[str, list[str]] = {cid: [] for cid in concepts}
    for child, pars in parents.items():
        for p in pars:
            children[p].append(child)
    reachable: set[str] = set(roots)
    queue = deque(roots)
    while queue:
        node = queue.popleft()
        for ch in children[node]:
            if ch not in reachable:
                reachable.add(ch)
                queue.append(ch)

    removed = tuple(cid for cid in order if cid not in reachable)
    retained_concepts = {cid: c for cid, c in concepts.items() if cid in reachable}
    retained_parents = {
        cid: tuple(p for p in parents[cid] if p in reachable) for cid in retained_concepts
    }
    retained_topo = tuple(cid for cid in topo if cid in reachable)

    report = LoadReport(
        total_concepts=len(concepts),
        retained_concepts=len(retained_concepts),
        removed_unreachable=removed,
        duplicate_edges_dropped=duplicate_edges,
        n_roots=len(roots),
    )
    if removed:
        log.info("removed %d concepts with no ancestor root", len(removed))
    if duplicate_edges:
        log.info("dropped %d duplicate edges", duplicate_edges)

    return ConceptTaxonomy(
        concepts=retained_concepts,
        parents=retained_parents,
        roots=roots,
        topo_order=retained_topo,
        load_report=report,
    )


def _topological_order(order: list[str], parents: dict[str, list[str]]) -> list[str]:
    """Kahn's algorithm over the full graph; raises CycleError on leftovers."""
    indegree = {cid: len(parents[cid]) for cid in order}
    children: dict[str, list[str]] = {cid: [] for cid in order}
    for child, pars in parents.items():
        for p in pars:
            children[p].append(child)

    queue = deque(cid for cid in order if indegree[cid] == 0)
    topo: list[str] = []
    while queue:
        node = queue.popleft()
        topo.append(node)
        for ch in children[node]:
            indegree[ch] -= 1
            if indegree[ch] == 0:
                queue.append(ch)

    if len(topo) < len(order):
        leftover = {cid for cid in order if indegree[cid] > 0}
        raise CycleError(_find_cycle(leftover, parents))
    return topo


def _find_cycle(leftover: set[str], parents: dict[str, list[str]]) -> tuple[str, ...]:
    """Walk unresolved parent edges until a node repeats; return that loop."""
    start = next(iter(sorted(leftover)))
    path: list[str] = []
    seen: dict[str, int] = {}
    node = start
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = next(p for p in parents[node] if p in leftover)
    return tuple(path[seen[node]:]) + (node,)


def _count_all_root_paths(taxonomy: ConceptTaxonomy) -> tuple[np.ndarray, np.ndarray]:
    """Dynamic programming over the topological order.

    counts[c] = sum over parents of counts[parent], with P(d -> d) = 1.
    Additions saturate at the uint64 maximum and carry a saturation flag.
    """
    n = len(taxonomy.topo_order)
    n_roots = len(taxonomy.roots)
    counts = np.zeros((n, n_roots), dtype=np.uint64)
    saturated = np.zeros((n, n_roots), dtype=bool)
    row = taxonomy._row_index
    for root in taxonomy.roots:
        counts[row[root], taxonomy._root_index[root]] = 1
    for cid in taxonomy.topo_order:
        pars = taxonomy.parents[cid]
        if not pars:
            continue
        acc = counts[row[cid]]
        sat = saturated[row[cid]]
        for p in pars:
            total = acc + counts[row[p]]
            wrapped = total < acc
            sat |= wrapped | saturated[row[p]]
            acc = total
        acc[sat] = UINT64_MAX
        counts[row[cid]] = acc
        saturated[row[cid]] = sat
    return counts, saturated


def count_root_paths(taxonomy: ConceptTaxonomy, concept_id: str) -> RootPathCounts:
    """Number of distinct paths from each ancestor root to the concept."""
    if concept_id not in taxonomy.concepts:
        if concept_id in taxonomy.load_report.removed_unreachable:
            raise UnknownConceptError(f"concept {concept_id!r} was removed at load (no ancestor root)")
        raise UnknownConceptError(f"unknown concept id {concept_id!r}")
    row, sat = taxonomy.path_count_row(concept_id)
    counts = {
        root: int(row[i])
        for i, root in enumerate(taxonomy.roots)
        if row[i] > 0
    }
    saturated = frozenset(root for i, root in enumerate(taxonomy.roots) if sat[i])
    return RootPathCounts(concept_id=concept_id, counts=counts, saturated=saturated)


def classify_concept(taxonomy: ConceptTaxonomy, counts: RootPathCounts) -> DisciplineAssignment:
    """Label a concept by the ancestor root with the most root-to-concept paths.

    A unique maximum classifies the concept to that discipline; two or more
    roots sharing the maximum (including ties at the saturation cap) are
    indistinguishable and yield Multi-interdisciplinary.
    """
    if not counts.counts:
        raise UnknownConceptError(
            f"concept {counts.concept_id!r} has no ancestor roots (removed or invalid)"
        )
    ancestor_roots = frozenset(counts.counts)
    if len(ancestor_roots) == 1:
        sole = next(iter(ancestor_roots))
        return DisciplineAssignment(
            concept_id=counts.concept_id,
            ancestor_roots=ancestor_roots,
            discipline=sole,
            root_multiplicity_tag=TAG_SINGLE,
            classifiability_tag=TAG_CLASSIFIABLE,
        )
    best = max(counts.counts.values())
    winners = [d for d, c in counts.counts.items() if c == best]
    if len(winners) == 1:
        return DisciplineAssignment(
            concept_id=counts.concept_id,
            ancestor_roots=ancestor_roots,
            discipline=winners[0],
            root_multiplicity_tag=TAG_MULTI,
            classifiability_tag=TAG_CLASSIFIABLE,
        )
    return DisciplineAssignment(
        concept_id=counts.concept_id,
        ancestor_roots=ancestor_roots,
        discipline=None,
        root_multiplicity_tag=TAG_MULTI,
        classifiability_tag=TAG_INDISTINGUISHABLE,
    )


@dataclass(frozen=True)
class ClassificationResult:
    """Assignments for every retained concept plus the S/M/S+/M- partition.

    The partition covers non-root concepts only; roots classify to themselves
    for display but are excluded from the sets.
    """

    assignments: dict[str, DisciplineAssignment]
    path_counts: dict[str, RootPathCounts]
    s: frozenset[str]
    m: frozenset[str]
    s_plus: frozenset[str]
    m_minus: frozenset[str]
    roots: tuple[str, ...]

    @property
    def summary(self) -> dict[str, int]:
        return {
            "S": len(self.s),
            "M": len(self.m),
            "S+": len(self.s_plus),
            "M-": len(self.m_minus),
        }

    def members_of(self, discipline: str) -> list[str]:
        """Classifiable (S+) concept ids labeled with the given discipline."""
        return [
            cid
            for cid in self.s_plus
            if self.assignments[cid].discipline == discipline
        ]


def partition_concepts(taxonomy: ConceptTaxonomy) -> ClassificationResult:
    """Classify every retained concept and partition the non-root ones."""
    assignments: dict[str, DisciplineAssignment] = {}
    path_counts: dict[str, RootPathCounts] = {}
    s: set[str] = set()
    m: set[str] = set()
    s_plus: set[str] = set()
    m_minus: set[str] = set()
    for cid in taxonomy.topo_order:
        counts = count_root_paths(taxonomy, cid)
        assignment = classify_concept(taxonomy, counts)
        assignments[cid] = assignment
        path_counts[cid] = counts
        if taxonomy.is_root(cid):
            continue
        if assignment.root_multiplicity_tag == TAG_SINGLE:
            s.add(cid)
        else:
            m.add(cid)
        if assignment.classifiability_tag == TAG_CLASSIFIABLE:
            s_plus.add(cid)
        else:
            m_minus.add(cid)
    return ClassificationResult(
        assignments=assignments,
        path_counts=path_counts,
        s=frozenset(s),
        m=frozenset(m),
        s_plus=frozenset(s_plus),
        m_minus=frozenset(m_minus),
        roots=taxonomy.roots,
    )


def write_classification(
    result: ClassificationResult, taxonomy: ConceptTaxonomy, path: str | Path
) -> None:
    """Export one row per retained concept: id, label, roots, counts, tag."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("concept_id\tlabel\tancestor_roots\tpath_counts\ttag\n")
        for cid in taxonomy.topo_order:
            a = result.assignments[cid]
            counts = result.path_counts[cid]
            roots_in_order = [r for r in taxonomy.roots if r in a.ancestor_roots]
            counts_str = "|".join(f"{r}={counts.counts[r]}" for r in roots_in_order)
            fh.write(
                f"{cid}\t{a.label}\t{'|'.join(roots_in_order)}\t{counts_str}\t"
                f"{a.root_multiplicity_tag}\n"
            )


def read_classification(path: str | Path) -> ClassificationResult:
    """Rebuild a ClassificationResult from an exported TSV."""
    path = Path(path)
    assignments: dict[str, DisciplineAssignment] = {}
    path_counts: dict[str, RootPathCounts] = {}
    s: set[str] = set()
    m: set[str] = set()
    s_plus: set[str] = set()
    m_minus: set[str] = set()
    roots: list[str] = []
    for lineno, row in _read_tsv(path, ("concept_id", "label", "ancestor_roots", "path_counts", "tag")):
        cid = row["concept_id"]
        label = row["label"]
        tag = row["tag"]
        if tag not in (TAG_SINGLE, TAG_MULTI):
            raise ParseError(f"{path}:{lineno}: bad tag {tag!r}")
        ancestor_roots = frozenset(p for p in row["ancestor_roots"].split("|") if p)
        counts: dict[str, int] = {}
        for item in row["path_counts"].split("|"):
            if not item:
                continue
            root, _, value = item.partition("=")
            try:
                counts[root] = int(value)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad path count {item!r}") from None
        discipline = None if label == MULTI_INTERDISCIPLINARY else label
        classifiable = discipline is not None
        assignments[cid] = DisciplineAssignment(
            concept_id=cid,
            ancestor_roots=ancestor_roots,
            discipline=discipline,
            root_multiplicity_tag=tag,
            classifiability_tag=TAG_CLASSIFIABLE if classifiable else TAG_INDISTINGUISHABLE,
        )
        path_counts[cid] = RootPathCounts(concept_id=cid, counts=counts, saturated=frozenset())
        if cid == label:
            roots.append(cid)
            continue
        if tag == TAG_SINGLE:
            s.add(cid)
        else:
            m.add(cid)
        if classifiable:
            s_plus.add(cid)
        else:
            m_minus.add(cid)
    return ClassificationResult(
        assignments=assignments,
        path_counts=path_counts,
        s=frozenset(s),
        m=frozenset(m),
        s_plus=frozenset(s_plus),
        m_minus=frozenset(m_minus),
        roots=tuple(roots),
    )
