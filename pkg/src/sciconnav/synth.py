"""Synthetic corpora, spaces, and datasets for tests and demos.

Everything here is seeded and deterministic. ``python -m sciconnav.synth``
writes a small end-to-end demo dataset (concepts, edges, works) that the CLI
pipeline can ingest, classify, train, and serve.
"""

from __future__ import annotations

import argparse
from collections import Counter
from pathlib import Path

import numpy as np

from .corpus import Trajectory, TrajectoryCorpus
from .embed import EmbeddingSpace
from .semantics import DISCIPLINES
from .taxonomy import (
    TAG_CLASSIFIABLE,
    TAG_INDISTINGUISHABLE,
    TAG_MULTI,
    TAG_SINGLE,
    ClassificationResult,
    Concept,
    ConceptTaxonomy,
    DisciplineAssignment,
    LoadReport,
    RootPathCounts,
)


def planted_cluster_corpus(
    n_clusters: int = 2,
    concepts_per_cluster: int = 50,
    n_authors: int = 1000,
    tokens_per_author: int = 30,
    home_prob: float = 0.95,
    seed: int = 0,
) -> tuple[TrajectoryCorpus, dict[str, int]]:
    """Authors draw most tokens from one home cluster of concepts."""
    rng = np.random.default_rng(seed)
    concept_ids = [
        f"k{c}_{i:04d}" for c in range(n_clusters) for i in range(concepts_per_cluster)
    ]
    cluster_of = {cid: int(cid[1 : cid.index("_")]) for cid in concept_ids}
    trajectories: list[Trajectory] = []
    vocabulary: Counter = Counter()
    for a in range(n_authors):
        home = a % n_clusters
        tokens: list[str] = []
        for _ in range(tokens_per_author):
            if rng.random() < home_prob:
                cluster = home
            else:
                cluster = int(rng.integers(0, n_clusters))
            idx = int(rng.integers(0, concepts_per_cluster))
            tokens.append(f"k{cluster}_{idx:04d}")
        trajectories.append(Trajectory(author_id=f"a{a:05d}", sequence=tuple(tokens)))
        vocabulary.update(tokens)
    return TrajectoryCorpus(trajectories=trajectories, vocabulary=vocabulary, min_pubs=0), cluster_of


def clustered_space(
    n_clusters: int = 4,
    per_cluster: int = 500,
    dim: int = 24,
    noise: float = 0.25,
    seed: int = 0,
    root_prefix: str | None = None,
) -> tuple[EmbeddingSpace, dict[str, int]]:
    """Random vectors with planted cluster geometry (center + noise).

    When root_prefix is set, one extra concept per cluster sits near the
    cluster center, playing the role of an embedded discipline root.
    """
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(n_clusters, dim))
    centers /= np.linalg.norm(centers, axis=1)[:, None]
    ids: list[str] = []
    rows: list[np.ndarray] = []
    cluster_of: dict[str, int] = {}
    for c in range(n_clusters):
        if root_prefix is not None:
            rid = f"{root_prefix}{c}"
            ids.append(rid)
            rows.append(centers[c] + 0.01 * rng.normal(size=dim))
            cluster_of[rid] = c
        for i in range(per_cluster):
            cid = f"k{c}_{i:04d}"
            ids.append(cid)
            rows.append(centers[c] + noise * rng.normal(size=dim))
            cluster_of[cid] = c
    return EmbeddingSpace(vocab=tuple(ids), matrix=np.array(rows)), cluster_of


def flat_taxonomy(works_counts: dict[str, int]) -> ConceptTaxonomy:
    """Degenerate all-root taxonomy carrying only works counts (graph tests)."""
    concepts = {
        cid: Concept(id=cid, name=cid, level=0, works_count=wc)
        for cid, wc in works_counts.items()
    }
    ids = tuple(concepts)
    return ConceptTaxonomy(
        concepts=concepts,
        parents={cid: () for cid in ids},
        roots=ids,
        topo_order=ids,
        load_report=LoadReport(
            total_concepts=len(ids),
            retained_concepts=len(ids),
            removed_unreachable=(),
            duplicate_edges_dropped=0,
            n_roots=len(ids),
        ),
    )


def synthetic_classification(
    roots: tuple[str, ...],
    memberships: dict[str, tuple[frozenset[str], str | None]],
) -> ClassificationResult:
    """Build a ClassificationResult directly from (ancestor_roots, label) pairs.

    label None means Multi-interdisciplinary. Roots get self-assignments.
    """
    assignments: dict[str, DisciplineAssignment] = {}
    path_counts: dict[str, RootPathCounts] = {}
    s: set[str] = set()
    m: set[str] = set()
    s_plus: set[str] = set()
    m_minus: set[str] = set()
    for rid in roots:
        assignments[rid] = DisciplineAssignment(
            concept_id=rid,
            ancestor_roots=frozenset({rid}),
            discipline=rid,
            root_multiplicity_tag=TAG_SINGLE,
            classifiability_tag=TAG_CLASSIFIABLE,
        )
        path_counts[rid] = RootPathCounts(concept_id=rid, counts={rid: 1}, saturated=frozenset())
    for cid, (ancestors, label) in memberships.items():
        multiplicity = TAG_SINGLE if len(ancestors) == 1 else TAG_MULTI
        classifiable = label is not None
        assignments[cid] = DisciplineAssignment(
            concept_id=cid,
            ancestor_roots=frozenset(ancestors),
            discipline=label,
            root_multiplicity_tag=multiplicity,
            classifiability_tag=TAG_CLASSIFIABLE if classifiable else TAG_INDISTINGUISHABLE,
        )
        path_counts[cid] = RootPathCounts(
            concept_id=cid, counts={r: 1 for r in ancestors}, saturated=frozenset()
        )
        if multiplicity == TAG_SINGLE:
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
        roots=roots,
    )


def _slug(name: str) -> str:
    return name.lower().replace(" ", "_")


def write_demo_dataset(
    out_dir: str | Path,
    n_authors: int = 120,
    min_pubs: int = 50,
    seed: int = 7,
) -> dict[str, Path]:
    """Write a small concepts/edges/works dataset spanning all 19 disciplines."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    concepts: list[tuple[str, str, int, int]] = []  # id, name, level, works_count
    edges: list[tuple[str, str]] = []
    by_discipline: dict[str, list[str]] = {}

    for name in DISCIPLINES:
        root = _slug(name)
        concepts.append((root, name, 0, int(rng.integers(200_000, 900_000))))
        by_discipline[root] = [root]
        level1 = []
        for i in range(6):
            cid = f"{root}_l1_{i}"
            concepts.append((cid, f"{name} topic {i}", 1, int(rng.integers(5_000, 80_000))))
            edges.append((cid, root))
            by_discipline[root].append(cid)
            level1.append(cid)
        for i in range(12):
            cid = f"{root}_l2_{i}"
            concepts.append((cid, f"{name} subtopic {i}", 2, int(rng.integers(100, 8_000))))
            n_parents = int(rng.integers(1, 4))
            parents = [level1[int(rng.integers(0, len(level1)))]]
            while len(parents) < n_parents:
                other_root = _slug(DISCIPLINES[int(rng.integers(0, len(DISCIPLINES)))])
                pool = by_discipline.get(other_root)
                if not pool or len(pool) < 2:
                    continue
                cand = pool[1 + int(rng.integers(0, min(6, len(pool) - 1)))]
                if cand not in parents:
                    parents.append(cand)
            for p in parents:
                edges.append((cid, p))
            by_discipline[root].append(cid)

    concepts_path = out_dir / "concepts.tsv"
    with open(concepts_path, "w", encoding="utf-8") as fh:
        fh.write("concept_id\tdisplay_name\tlevel\tworks_count\n")
        for cid, name, level, wc in concepts:
            fh.write(f"{cid}\t{name}\t{level}\t{wc}\n")

    edges_path = out_dir / "edges.tsv"
    with open(edges_path, "w", encoding="utf-8") as fh:
        fh.write("child_id\tparent_id\n")
        for child, parent in edges:
            fh.write(f"{child}\t{parent}\n")

    roots = [_slug(name) for name in DISCIPLINES]
    works_path = out_dir / "works.tsv"
    with open(works_path, "w", encoding="utf-8") as fh:
        fh.write("author_id\twork_id\tyear\tconcept_ids\n")
        for a in range(n_authors):
            home = roots[a % len(roots)]
            n_works = min_pubs + 1 + int(rng.integers(0, 20))
            years = np.sort(rng.integers(1990, 2024, size=n_works))
            for w in range(n_works):
                n_concepts = int(rng.integers(2, 6))
                chosen: list[str] = []
                while len(chosen) < n_concepts:
                    if rng.random() < 0.85:
                        pool = by_discipline[home]
                    else:
                        pool = by_discipline[roots[int(rng.integers(0, len(roots)))]]
                    cand = pool[int(rng.integers(0, len(pool)))]
                    if cand not in chosen:
                        chosen.append(cand)
                fh.write(f"author_{a:04d}\tw{a:04d}_{w:03d}\t{int(years[w])}\t{'|'.join(chosen)}\n")

    return {"concepts": concepts_path, "edges": edges_path, "works": works_path}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m sciconnav.synth", description="Write a demo dataset"
    )
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--authors", type=int, default=120)
    parser.add_argument("--min-pubs", type=int, default=50)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    paths = write_demo_dataset(args.out, n_authors=args.authors, min_pubs=args.min_pubs, seed=args.seed)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
