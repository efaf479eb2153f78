"""Analogy inference, functional axes, and discipline-propensity reports.

All operations are pure reads over a frozen embedding space plus a
classification; they are safe for unlimited concurrent callers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .embed import EmbeddingSpace, nearest_neighbors
from .errors import (
    DegenerateAxisError,
    EmptyGroupError,
    SciConNavError,
    UnknownConceptError,
    VocabularyExhaustedError,
)
from .taxonomy import ClassificationResult

DISCIPLINES = (
    "Art",
    "Biology",
    "Business",
    "Chemistry",
    "Computer science",
    "Economics",
    "Engineering",
    "Environmental science",
    "Geography",
    "Geology",
    "History",
    "Materials science",
    "Mathematics",
    "Medicine",
    "Philosophy",
    "Physics",
    "Political science",
    "Psychology",
    "Sociology",
)

DEFAULT_FUNCTIONAL_GROUPS: dict[str, list[str]] = {
    "Theoretical": ["Mathematics", "Physics"],
    "Applied": ["Computer science", "Engineering"],
    "Chemical": ["Chemistry", "Materials science"],
    "Biomedical": ["Biology", "Medicine"],
    "Societal": ["Sociology", "Political science", "Psychology"],
    "Economic": ["Economics", "Business"],
    "Humanities": ["Philosophy", "History", "Art"],
    "Geographical": ["Geography", "Geology", "Environmental science"],
}

DEFAULT_AXES: tuple[tuple[str, str], ...] = (
    ("Theoretical", "Applied"),
    ("Chemical", "Biomedical"),
    ("Societal", "Economic"),
    ("Humanities", "Geographical"),
)

MODE_CLASSIFIABLE = "S+"
MODE_INDISTINGUISHABLE = "M-"


def load_groups_config(path: str | Path) -> dict[str, list[str]]:
    """Groups config: JSON object mapping group name -> list of discipline ids."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict) or not all(
        isinstance(v, list) and all(isinstance(x, str) for x in v) for v in raw.values()
    ):
        raise SciConNavError(f"{path}: groups config must map group name to a list of discipline ids")
    return {str(k): list(v) for k, v in raw.items()}


@dataclass(frozen=True)
class FunctionalGroup:
    name: str
    discipline_ids: tuple[str, ...]
    member_ids: tuple[str, ...]  # S+ concepts labeled with those disciplines


@dataclass(frozen=True)
class FunctionalAxis:
    from_group: FunctionalGroup
    to_group: FunctionalGroup
    vector: np.ndarray

    @property
    def name(self) -> str:
        return f"{self.from_group.name}_to_{self.to_group.name}"


def _resolve_root_tokens(
    tokens: list[str], assignment: ClassificationResult, root_names: dict[str, str] | None
) -> tuple[str, ...]:
    """Map group-config tokens to root ids, matching ids first, then names."""
    known = set(assignment.roots)
    by_name = {}
    if root_names:
        by_name = {name: rid for rid, name in root_names.items() if rid in known}
    resolved: list[str] = []
    for token in tokens:
        if token in known:
            resolved.append(token)
        elif token in by_name:
            resolved.append(by_name[token])
        else:
            raise UnknownConceptError(f"discipline {token!r} is not a root of this taxonomy")
    return tuple(resolved)


def resolve_group(
    name: str,
    assignment: ClassificationResult,
    groups: dict[str, list[str]] | None = None,
    root_names: dict[str, str] | None = None,
) -> FunctionalGroup:
    """Resolve a functional-group name to its member S+ concepts."""
    groups = groups if groups is not None else DEFAULT_FUNCTIONAL_GROUPS
    if name not in groups:
        raise EmptyGroupError(f"unknown functional group {name!r}; known: {sorted(groups)}")
    discipline_ids = _resolve_root_tokens(groups[name], assignment, root_names)
    members: list[str] = []
    for d in discipline_ids:
        members.extend(assignment.members_of(d))
    if not members:
        raise EmptyGroupError(f"functional group {name!r} has no classifiable member concepts")
    return FunctionalGroup(name=name, discipline_ids=discipline_ids, member_ids=tuple(sorted(members)))


def build_axis(
    space: EmbeddingSpace,
    assignment: ClassificationResult,
    from_group: str,
    to_group: str,
    groups: dict[str, list[str]] | None = None,
    root_names: dict[str, str] | None = None,
) -> FunctionalAxis:
    """Axis vector = mean(to-group vectors) - mean(from-group vectors)."""
    g_from = resolve_group(from_group, assignment, groups, root_names)
    g_to = resolve_group(to_group, assignment, groups, root_names)
    mean_from = _group_mean(space, g_from)
    mean_to = _group_mean(space, g_to)
    vector = mean_to - mean_from
    if np.linalg.norm(vector) <= 1e-9:
        raise DegenerateAxisError(
            f"axis {from_group!r} -> {to_group!r} is degenerate (identical group means)"
        )
    return FunctionalAxis(from_group=g_from, to_group=g_to, vector=vector)


def _group_mean(space: EmbeddingSpace, group: FunctionalGroup) -> np.ndarray:
    rows = [space.row(cid) for cid in group.member_ids if cid in space]
    if not rows:
        raise EmptyGroupError(f"functional group {group.name!r} has no embedded member concepts")
    return space.matrix[rows].mean(axis=0)


@dataclass(frozen=True)
class ProjectionRow:
    discipline: str
    n: int
    mean: float
    q5: float
    q50: float
    q95: float
    values: np.ndarray


@dataclass(frozen=True)
class ProjectionReport:
    axis_name: str
    rows: tuple[ProjectionRow, ...]


def _quantiles(values: np.ndarray) -> tuple[float, float, float]:
    q5, q50, q95 = np.percentile(values, [5, 50, 95])
    return float(q5), float(q50), float(q95)


def axis_projection_report(
    space: EmbeddingSpace, assignment: ClassificationResult, axis: FunctionalAxis
) -> ProjectionReport:
    """Cosine similarity of each discipline's member vectors with the axis."""
    axis_unit = axis.vector / np.linalg.norm(axis.vector)
    rows: list[ProjectionRow] = []
    for d in assignment.roots:
        member_rows = [space.row(cid) for cid in sorted(assignment.members_of(d)) if cid in space]
        if not member_rows:
            rows.append(ProjectionRow(d, 0, float("nan"), float("nan"), float("nan"), float("nan"), np.array([])))
            continue
        values = space.unit_cache[member_rows] @ axis_unit
        q5, q50, q95 = _quantiles(values)
        rows.append(ProjectionRow(d, len(values), float(values.mean()), q5, q50, q95, values))
    return ProjectionReport(axis_name=axis.name, rows=tuple(rows))


def analogy_infer(
    space: EmbeddingSpace,
    a: str,
    c: str,
    d: str,
    direction: str,
    exclude: frozenset[str] | set[str] = frozenset(),
) -> tuple[str, float]:
    """Concept most similar to v_a +/- (v_d - v_c); a, c, d are never returned.

    Ties break by ascending concept id. The returned similarity is between
    the winning concept and the target vector.
    """
    if direction not in ("+", "-"):
        raise SciConNavError(f"direction must be '+' or '-', got {direction!r}")
    sign = 1.0 if direction == "+" else -1.0
    target = space.vector(a) + sign * (space.vector(d) - space.vector(c))
    if np.linalg.norm(target) == 0:
        raise DegenerateAxisError(f"analogy target vector for seed {a!r} is zero")
    full_exclude = set(exclude) | {a, c, d}
    hits = nearest_neighbors(space, target, k=1, exclude=full_exclude)
    if not hits:
        raise VocabularyExhaustedError("every vocabulary concept is excluded from the analogy query")
    return hits[0]


@dataclass
class InferenceGraph:
    """Analogy-inference graph; revisited concepts merge into existing nodes."""

    seed: str
    axis: tuple[str, str]
    depth: int
    nodes: dict[str, int] = field(default_factory=dict)  # concept id -> first depth
    edges: list[tuple[str, str, str]] = field(default_factory=list)  # (from, to, sign)

    @property
    def node_count(self) -> int:
        return len(self.nodes)


def analogy_expand(
    space: EmbeddingSpace, seed: str, c: str, d: str, depth: int
) -> InferenceGraph:
    """Breadth-first expansion applying analogy_infer in both directions."""
    if depth < 0:
        raise SciConNavError(f"depth must be >= 0, got {depth}")
    space.row(seed)  # validate early
    graph = InferenceGraph(seed=seed, axis=(c, d), depth=depth, nodes={seed: 0})
    seen_edges: set[tuple[str, str, str]] = set()
    frontier = [seed]
    for level in range(1, depth + 1):
        next_frontier: list[str] = []
        for node in frontier:
            for sign in ("+", "-"):
                rid, _ = analogy_infer(space, node, c, d, sign)
                if rid not in graph.nodes:
                    graph.nodes[rid] = level
                    next_frontier.append(rid)
                edge = (node, rid, sign)
                if edge not in seen_edges:
                    seen_edges.add(edge)
                    graph.edges.append(edge)
        frontier = next_frontier
    return graph


@dataclass(frozen=True)
class PropensityRow:
    """In-group similarity summary for one discipline root."""

    discipline: str
    n: int
    mean: float
    q5: float
    q50: float
    q95: float


@dataclass(frozen=True)
class PropensityReport:
    mode: str
    rows: tuple[PropensityRow, ...]
    radar: dict[str, dict[str, tuple[float, float, float]]]
    pooled_in: np.ndarray
    pooled_out: np.ndarray
    shift: float
    p_value: float
    skipped_roots: tuple[str, ...]

    @property
    def in_median(self) -> float:
        return float(np.median(self.pooled_in))

    @property
    def out_median(self) -> float:
        return float(np.median(self.pooled_out))


def propensity_report(
    space: EmbeddingSpace,
    assignment: ClassificationResult,
    mode: str,
    levels: set[int] | None = None,
    concept_levels: dict[str, int] | None = None,
) -> PropensityReport:
    """Split concept-to-root similarities into in-group vs out-group pools.

    Mode "S+": in-group is the similarity to the concept's discipline root
    (DR), out-group the other roots (NDR). Mode "M-": in-group covers all
    ancestor roots (AR), out-group the rest (NAR). Roots missing from the
    embedding vocabulary are skipped and reported.
    """
    if mode not in (MODE_CLASSIFIABLE, MODE_INDISTINGUISHABLE):
        raise SciConNavError(f"mode must be {MODE_CLASSIFIABLE!r} or {MODE_INDISTINGUISHABLE!r}")
    if levels is not None and concept_levels is None:
        raise SciConNavError("levels filter requires concept_levels")

    embedded_roots = [r for r in assignment.roots if r in space]
    skipped = tuple(r for r in assignment.roots if r not in space)
    if not embedded_roots:
        raise UnknownConceptError("no discipline root is present in the embedding vocabulary")

    concept_ids = sorted(
        cid
        for cid in (assignment.s_plus if mode == MODE_CLASSIFIABLE else assignment.m_minus)
        if cid in space
        and (levels is None or concept_levels.get(cid) in levels)
    )
    if not concept_ids:
        raise SciConNavError(f"no embedded concepts in the {mode} set")

    concept_rows = np.array([space.row(cid) for cid in concept_ids])
    root_rows = np.array([space.row(r) for r in embedded_roots])
    sims = space.unit_cache[concept_rows] @ space.unit_cache[root_rows].T  # (n_c, n_r)

    root_pos = {r: i for i, r in enumerate(embedded_roots)}
    in_mask = np.zeros_like(sims, dtype=bool)
    for ci, cid in enumerate(concept_ids):
        a = assignment.assignments[cid]
        targets = [a.discipline] if mode == MODE_CLASSIFIABLE else sorted(a.ancestor_roots)
        for r in targets:
            pos = root_pos.get(r)
            if pos is not None:
                in_mask[ci, pos] = True

    pooled_in = sims[in_mask]
    pooled_out = sims[~in_mask]

    rows: list[PropensityRow] = []
    for r in embedded_roots:
        col = root_pos[r]
        values = sims[in_mask[:, col], col]
        if len(values) == 0:
            rows.append(PropensityRow(r, 0, float("nan"), float("nan"), float("nan"), float("nan")))
            continue
        q5, q50, q95 = _quantiles(values)
        rows.append(PropensityRow(r, len(values), float(values.mean()), q5, q50, q95))

    radar: dict[str, dict[str, tuple[float, float, float]]] = {}
    for group_root in embedded_roots:
        col = root_pos[group_root]
        group_rows = in_mask[:, col]
        if not group_rows.any():
            continue
        radar[group_root] = {
            r: _quantiles(sims[group_rows, root_pos[r]]) for r in embedded_roots
        }

    if len(pooled_in) and len(pooled_out):
        shift = float(np.median(pooled_in) - np.median(pooled_out))
        if np.ptp(np.concatenate([pooled_in, pooled_out])) == 0:
            p_value = 0.5
        else:
            p_value = float(stats.mannwhitneyu(pooled_in, pooled_out, alternative="greater").pvalue)
    else:
        shift = float("nan")
        p_value = float("nan")
    return PropensityReport(
        mode=mode,
        rows=tuple(rows),
        radar=radar,
        pooled_in=pooled_in,
        pooled_out=pooled_out,
        shift=shift,
        p_value=p_value,
        skipped_roots=skipped,
    )


def write_report_tsv(
    rows, path: str | Path, names: dict[str, str] | None = None
) -> None:
    """One row per discipline: name, n, mean, q5, q50, q95."""
    names = names or {}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("discipline\tn\tmean\tq5\tq50\tq95\n")
        for row in rows:
            label = names.get(row.discipline, row.discipline)
            fh.write(f"{label}\t{row.n}\t{row.mean:.6g}\t{row.q5:.6g}\t{row.q50:.6g}\t{row.q95:.6g}\n")


def report_to_json(rows, names: dict[str, str] | None = None) -> list[dict]:
    names = names or {}
    return [
        {
            "discipline": names.get(row.discipline, row.discipline),
            "n": row.n,
            "mean": row.mean,
            "q5": row.q5,
            "q50": row.q50,
            "q95": row.q95,
        }
        for row in rows
    ]
