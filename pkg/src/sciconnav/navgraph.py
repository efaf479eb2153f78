"""Navigation graph over the top-n concepts with cosine-distance weights.

The graph is complete and implicit: edge weights w_ij = 1 - s_ij are
evaluated on demand from the unit-norm matrix, never materialized. Dijkstra
runs in dense mode (O(n^2) per source, no heap), which beats heap-based
sparse Dijkstra on complete graphs.

The graph is immutable after build; per-source runs are independent and may
execute concurrently over the shared read-only matrix.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embed import EmbeddingSpace
from .errors import GraphError, UnknownConceptError
from .taxonomy import ClassificationResult, ConceptTaxonomy


class NavigationGraph:
    """Implicit complete graph whose weights come from cosine distances."""

    def __init__(self, space: EmbeddingSpace, node_ids: tuple[str, ...]):
        missing = [cid for cid in node_ids if cid not in space]
        if missing:
            raise GraphError(f"nodes lacking embeddings: {missing[:5]}")
        if len(set(node_ids)) != len(node_ids):
            raise GraphError("duplicate node ids")
        self.node_ids = tuple(node_ids)
        rows = [space.row(cid) for cid in self.node_ids]
        self._unit = np.ascontiguousarray(space.unit_cache[rows])
        self._index = {cid: i for i, cid in enumerate(self.node_ids)}
        by_id = sorted(range(len(self.node_ids)), key=self.node_ids.__getitem__)
        self.id_rank = np.empty(len(self.node_ids), dtype=np.int64)
        self.id_rank[by_id] = np.arange(len(self.node_ids))

    @property
    def n(self) -> int:
        return len(self.node_ids)

    def index(self, concept_id: str) -> int:
        try:
            return self._index[concept_id]
        except KeyError:
            raise UnknownConceptError(f"concept {concept_id!r} is not a graph node") from None

    def weight_row(self, i: int) -> np.ndarray:
        w = 1.0 - self._unit @ self._unit[i]
        if w.min() < -1e-9:
            raise AssertionError("negative cosine-distance weight; corrupt unit cache")
        np.clip(w, 0.0, 2.0, out=w)
        w[i] = 0.0
        return w

    def weight(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        return float(min(max(1.0 - float(np.dot(self._unit[i], self._unit[j])), 0.0), 2.0))


class MatrixGraph:
    """Explicit weight-matrix graph; np.inf marks an absent edge."""

    def __init__(self, node_ids: tuple[str, ...], weights: np.ndarray):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (len(node_ids), len(node_ids)):
            raise GraphError(f"weight matrix shape {weights.shape} does not match {len(node_ids)} nodes")
        finite = weights[np.isfinite(weights)]
        if (finite < 0).any():
            raise GraphError("negative edge weights are not allowed")
        if np.diagonal(weights).any():
            raise GraphError("self-distances must be zero")
        self.node_ids = tuple(node_ids)
        self._weights = weights
        self._index = {cid: i for i, cid in enumerate(self.node_ids)}
        by_id = sorted(range(len(self.node_ids)), key=self.node_ids.__getitem__)
        self.id_rank = np.empty(len(self.node_ids), dtype=np.int64)
        self.id_rank[by_id] = np.arange(len(self.node_ids))

    @property
    def n(self) -> int:
        return len(self.node_ids)

    def index(self, concept_id: str) -> int:
        try:
            return self._index[concept_id]
        except KeyError:
            raise UnknownConceptError(f"concept {concept_id!r} is not a graph node") from None

    def weight_row(self, i: int) -> np.ndarray:
        return self._weights[i].copy()

    def weight(self, i: int, j: int) -> float:
        return float(self._weights[i, j])


def build_graph(
    space: EmbeddingSpace,
    taxonomy: ConceptTaxonomy,
    top_n: int,
    min_works: int | None = None,
) -> NavigationGraph:
    """Select the top-n embedded-and-retained concepts by works_count."""
    if top_n < 1:
        raise GraphError(f"top_n must be >= 1, got {top_n}")
    eligible = [cid for cid in taxonomy.concepts if cid in space]
    if top_n > len(eligible):
        raise GraphError(
            f"top_n={top_n} exceeds the {len(eligible)} embedded-and-retained concepts"
        )
    eligible.sort(key=lambda cid: (-taxonomy.concepts[cid].works_count, cid))
    nodes = tuple(eligible[:top_n])
    if min_works is not None:
        floor = taxonomy.concepts[nodes[-1]].works_count
        if floor < min_works:
            raise GraphError(
                f"selection includes a concept with works_count={floor} < min_works={min_works}"
            )
    return NavigationGraph(space, nodes)


@dataclass(frozen=True)
class PathResult:
    source: str
    target: str
    nodes: tuple[str, ...]
    distance: float

    @property
    def steps(self) -> int:
        return len(self.nodes) - 1


def _argmin_by_rank(values: np.ndarray, id_rank: np.ndarray) -> int:
    best = values.min()
    candidates = np.nonzero(values == best)[0]
    if len(candidates) == 1:
        return int(candidates[0])
    return int(candidates[np.argmin(id_rank[candidates])])


def _sssp(graph, source: int, target: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Dense Dijkstra. Returns (dist, pred); pred is -1 for source/unreached.

    Equal-distance relaxations prefer the predecessor with the
    lexicographically smaller id, so paths are deterministic.
    """
    n = graph.n
    id_rank = graph.id_rank
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    pred = np.full(n, -1, dtype=np.int64)
    visited = np.zeros(n, dtype=bool)
    for _ in range(n):
        pending = np.where(visited, np.inf, dist)
        u = _argmin_by_rank(pending, id_rank)
        if not np.isfinite(pending[u]):
            break
        visited[u] = True
        if target is not None and u == target:
            break
        nd = dist[u] + graph.weight_row(u)
        strict = (nd < dist) & ~visited
        tie = np.isfinite(nd) & ~visited & ~strict & (nd == dist) & (pred >= 0)
        dist[strict] = nd[strict]
        pred[strict] = u
        if tie.any():
            idxs = np.nonzero(tie)[0]
            improve = id_rank[u] < id_rank[pred[idxs]]
            pred[idxs[improve]] = u
    return dist, pred


def shortest_path(graph, source: str, target: str) -> PathResult:
    """Weighted shortest path over the graph; distances are cosine distances."""
    s = graph.index(source)
    t = graph.index(target)
    if s == t:
        return PathResult(source=source, target=target, nodes=(source,), distance=0.0)
    dist, pred = _sssp(graph, s, target=t)
    if not np.isfinite(dist[t]):
        raise GraphError(f"no path from {source!r} to {target!r}")
    chain = [t]
    while chain[-1] != s:
        chain.append(int(pred[chain[-1]]))
    nodes = tuple(graph.node_ids[i] for i in reversed(chain))
    return PathResult(source=source, target=target, nodes=nodes, distance=float(dist[t]))


def _steps_from_pred(pred: np.ndarray, source: int, target: int) -> int:
    steps = 0
    node = target
    while node != source:
        node = int(pred[node])
        steps += 1
    return steps


@dataclass(frozen=True)
class StepHistogram:
    counts: dict[int, int]
    per_discipline: dict[str, dict[int, int]] | None
    n_pairs: int

    def fraction_below(self, threshold: int) -> float:
        below = sum(c for s, c in self.counts.items() if s < threshold)
        return below / self.n_pairs if self.n_pairs else float("nan")


def step_size_histogram(
    graph,
    pairs: list[tuple[str, str]] | None = None,
    samples: int | None = None,
    seed: int | None = None,
    assignment: ClassificationResult | None = None,
) -> StepHistogram:
    """Histogram of shortest-path step counts over explicit or sampled pairs.

    Sampling draws ordered (source, target) pairs with replacement, never
    self-pairs, from a generator seeded with ``seed``.
    """
    n = graph.n
    if pairs is None:
        if samples is None:
            raise GraphError("provide either pairs or a sample count")
        if n < 2:
            raise GraphError("need at least two nodes to sample pairs")
        rng = np.random.default_rng(seed)
        sources = rng.integers(0, n, size=samples)
        offsets = rng.integers(1, n, size=samples)
        targets = (sources + offsets) % n
        index_pairs = list(zip(sources.tolist(), targets.tolist()))
    else:
        index_pairs = [(graph.index(s), graph.index(t)) for s, t in pairs]

    by_source: dict[int, list[int]] = {}
    for s, t in index_pairs:
        by_source.setdefault(s, []).append(t)

    counts: Counter = Counter()
    per_discipline: dict[str, Counter] | None = {} if assignment is not None else None
    for s, ts in sorted(by_source.items()):
        _, pred = _sssp(graph, s)
        label = None
        if assignment is not None:
            a = assignment.assignments.get(graph.node_ids[s])
            label = a.label if a is not None else "unclassified"
            per_discipline.setdefault(label, Counter())
        for t in ts:
            if t == s:
                steps = 0
            else:
                if pred[t] < 0:
                    raise GraphError(f"no path between sampled pair {graph.node_ids[s]!r} -> {graph.node_ids[t]!r}")
                steps = _steps_from_pred(pred, s, t)
            counts[steps] += 1
            if per_discipline is not None:
                per_discipline[label][steps] += 1
    return StepHistogram(
        counts=dict(counts),
        per_discipline={k: dict(v) for k, v in per_discipline.items()} if per_discipline else None,
        n_pairs=len(index_pairs),
    )


@dataclass(frozen=True)
class CentralityReport:
    measure: str  # "closeness" | "betweenness"
    scores: dict[str, float]
    ranking: tuple[str, ...]  # score descending, ties by ascending id
    exactness: str  # "exact" | "pivot-sampled"
    pivots: int | None = None
    seed: int | None = None


def _ranking(scores: dict[str, float]) -> tuple[str, ...]:
    return tuple(sorted(scores, key=lambda cid: (-scores[cid], cid)))


def avg_sd(graph, concept_id: str, reachable: list[str] | set[str] | tuple[str, ...]) -> float:
    """Mean shortest-path distance from the concept to the reachable set."""
    i = graph.index(concept_id)
    targets = [graph.index(r) for r in reachable if r != concept_id]
    if not targets:
        raise GraphError("reachable set is empty")
    dist, _ = _sssp(graph, i)
    return float(dist[targets].mean())


def closeness_centrality(graph, nodes: list[str] | None = None) -> CentralityReport:
    """closeness(i) = 1 / AvgSD(i -> all other nodes)."""
    if graph.n < 2:
        raise GraphError("closeness is undefined for a single-node graph")
    ids = list(graph.node_ids) if nodes is None else list(nodes)
    scores: dict[str, float] = {}
    for cid in ids:
        i = graph.index(cid)
        dist, _ = _sssp(graph, i)
        mask = np.ones(graph.n, dtype=bool)
        mask[i] = False
        mean = float(dist[mask].mean())
        scores[cid] = 0.0 if not np.isfinite(mean) or mean == 0.0 else 1.0 / mean
    return CentralityReport(
        measure="closeness", scores=scores, ranking=_ranking(scores), exactness="exact"
    )


def _sssp_multiplicity(graph, source: int):
    """Dijkstra with shortest-path counts and full predecessor lists."""
    n = graph.n
    id_rank = graph.id_rank
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    sigma = np.zeros(n)
    sigma[source] = 1.0
    preds: list[list[int]] = [[] for _ in range(n)]
    visited = np.zeros(n, dtype=bool)
    order: list[int] = []
    for _ in range(n):
        pending = np.where(visited, np.inf, dist)
        u = _argmin_by_rank(pending, id_rank)
        if not np.isfinite(pending[u]):
            break
        visited[u] = True
        order.append(u)
        nd = dist[u] + graph.weight_row(u)
        strict = (nd < dist) & ~visited
        tie = np.isfinite(nd) & ~visited & ~strict & (nd == dist) & (sigma > 0)
        dist[strict] = nd[strict]
        sigma[strict] = sigma[u]
        for v in np.nonzero(strict)[0]:
            preds[v] = [u]
        if tie.any():
            idxs = np.nonzero(tie)[0]
            sigma[idxs] += sigma[u]
            for v in idxs:
                preds[v].append(u)
    return order, preds, sigma


def betweenness_centrality(
    graph, pivots: int | None = None, seed: int | None = None
) -> CentralityReport:
    """Fraction of ordered s-t shortest paths (s != t != v) through each node.

    Equal-length shortest paths contribute fractionally (standard dependency
    accumulation). Exact mode visits every source; pivot mode averages over
    ``pivots`` uniformly sampled sources and scales up, recording (p, seed).
    """
    n = graph.n
    if pivots is not None and not 1 <= pivots <= n:
        raise GraphError(f"pivots must be in 1..{n}, got {pivots}")
    raw = np.zeros(n)
    if pivots is None:
        sources = range(n)
        scale = 1.0
    else:
        rng = np.random.default_rng(seed)
        sources = sorted(int(s) for s in rng.choice(n, size=pivots, replace=False))
        scale = n / pivots
    for s in sources:
        order, preds, sigma = _sssp_multiplicity(graph, s)
        delta = np.zeros(n)
        for w in reversed(order):
            if preds[w]:
                coeff = (1.0 + delta[w]) / sigma[w]
                for v in preds[w]:
                    delta[v] += sigma[v] * coeff
            if w != s:
                raw[w] += delta[w]
    denom = (n - 1) * (n - 2)
    values = raw * scale / denom if denom > 0 else np.zeros(n)
    scores = {cid: float(values[i]) for i, cid in enumerate(graph.node_ids)}
    return CentralityReport(
        measure="betweenness",
        scores=scores,
        ranking=_ranking(scores),
        exactness="exact" if pivots is None else "pivot-sampled",
        pivots=pivots,
        seed=seed if pivots is not None else None,
    )


@dataclass(frozen=True)
class OddsRow:
    top_k: int
    count_m: int
    count_s: int
    odds: float | None

    @property
    def odds_defined(self) -> bool:
        return self.odds is not None

    @classmethod
    def from_counts(cls, top_k: int, count_m: int, count_s: int) -> "OddsRow":
        odds = count_m / count_s if count_s > 0 else None
        return cls(top_k=top_k, count_m=count_m, count_s=count_s, odds=odds)


def centrality_odds_table(
    scores: dict[str, float] | CentralityReport,
    assignment: ClassificationResult,
    top_ks: list[int],
) -> list[OddsRow]:
    """Counts of M- and S-tagged concepts among the top-k by score.

    Concepts outside S and M (roots, unclassified ids) stay in the ranking
    but are not counted.
    """
    if isinstance(scores, CentralityReport):
        scores = scores.scores
    ranking = _ranking(scores)
    rows: list[OddsRow] = []
    for k in top_ks:
        if not 1 <= k <= len(ranking):
            raise GraphError(f"top_k={k} outside 1..{len(ranking)}")
        count_m = count_s = 0
        for cid in ranking[:k]:
            if cid in assignment.m:
                count_m += 1
            elif cid in assignment.s:
                count_s += 1
        rows.append(OddsRow.from_counts(k, count_m, count_s))
    return rows


@dataclass(frozen=True)
class HLReport:
    k: int
    h_ids: tuple[str, ...]
    l_ids: tuple[str, ...]
    h_to_h: np.ndarray
    h_to_l: np.ndarray
    l_to_l: np.ndarray

    @property
    def means(self) -> dict[str, float]:
        return {
            "H->H": float(self.h_to_h.mean()),
            "H->L": float(self.h_to_l.mean()),
            "L->L": float(self.l_to_l.mean()),
        }


def hl_avgsd_report(graph, scores: dict[str, float] | CentralityReport, k: int) -> HLReport:
    """Per-node AvgSD within and across the top-k (H) and bottom-k (L) sets."""
    if isinstance(scores, CentralityReport):
        scores = scores.scores
    if 2 * k > graph.n:
        raise GraphError(f"2k={2 * k} exceeds the {graph.n} graph nodes")
    ranking = _ranking(scores)
    h_ids = ranking[:k]
    l_ids = ranking[-k:]
    h_idx = np.array([graph.index(c) for c in h_ids])
    l_idx = np.array([graph.index(c) for c in l_ids])
    h_to_h = np.empty(k)
    h_to_l = np.empty(k)
    l_to_l = np.empty(k)
    for pos, i in enumerate(h_idx):
        dist, _ = _sssp(graph, int(i))
        h_to_h[pos] = dist[h_idx[h_idx != i]].mean()
        h_to_l[pos] = dist[l_idx].mean()
    for pos, i in enumerate(l_idx):
        dist, _ = _sssp(graph, int(i))
        l_to_l[pos] = dist[l_idx[l_idx != i]].mean()
    return HLReport(k=k, h_ids=h_ids, l_ids=l_ids, h_to_h=h_to_h, h_to_l=h_to_l, l_to_l=l_to_l)


def write_path_json(result: PathResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "source": result.source,
                "target": result.target,
                "nodes": list(result.nodes),
                "distance": result.distance,
                "steps": result.steps,
            },
            fh,
            indent=2,
        )
        fh.write("\n")


def write_centrality_tsv(report: CentralityReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("concept_id\tscore\trank\n")
        for rank, cid in enumerate(report.ranking, start=1):
            fh.write(f"{cid}\t{report.scores[cid]:.9g}\t{rank}\n")


def write_odds_tsv(rows: list[OddsRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("top_k\tcount_M\tcount_S\todds\n")
        for row in rows:
            odds = f"{row.odds:.2f}" if row.odds is not None else "NA"
            fh.write(f"{row.top_k}\t{row.count_m}\t{row.count_s}\t{odds}\n")


def write_histogram_tsv(hist: StepHistogram, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("steps\tcount\n")
        for steps in sorted(hist.counts):
            fh.write(f"{steps}\t{hist.counts[steps]}\n")
