"""Shared fixtures: the engineered classification taxonomy and planted spaces."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from sciconnav.embed import TrainConfig, train_sgns
from sciconnav.synth import planted_cluster_corpus
from sciconnav.taxonomy import ConceptTaxonomy, load_taxonomy

# Engineered path counts: each target concept hangs below per-root bundles of
# mid-level nodes, so P(root -> target) equals the number of mid parents.
TABLE1_COUNTS = {
    "simplicial_manifold": {"Mathematics": 16},
    "ppads": {"Biology": 54, "Chemistry": 32, "Medicine": 37},
    "glycine_cleavage_system": {"Biology": 29, "Chemistry": 22, "Physics": 8},
    "cutter_location": {
        "Computer science": 12,
        "Engineering": 12,
        "Materials science": 12,
        "Mathematics": 4,
    },
}

TABLE1_EXPECTED_LABELS = {
    "simplicial_manifold": "Mathematics",
    "ppads": "Biology",
    "glycine_cleavage_system": "Biology",
    "cutter_location": "Multi-interdisciplinary",
}

TABLE1_ROOTS = (
    "Mathematics",
    "Biology",
    "Chemistry",
    "Medicine",
    "Physics",
    "Computer science",
    "Engineering",
    "Materials science",
)


def write_table1_fixture(dir_path: Path) -> tuple[Path, Path]:
    """Write the concepts/edges TSVs whose path counts match TABLE1_COUNTS."""
    need_mids = {root: 0 for root in TABLE1_ROOTS}
    for counts in TABLE1_COUNTS.values():
        for root, m in counts.items():
            need_mids[root] = max(need_mids[root], m)

    concept_rows: list[tuple[str, str, int, int]] = []
    edge_rows: list[tuple[str, str]] = []
    for root in TABLE1_ROOTS:
        concept_rows.append((root, root, 0, 100000))
        slug = root.lower().replace(" ", "_")
        for i in range(need_mids[root]):
            mid = f"{slug}_mid_{i:02d}"
            concept_rows.append((mid, f"{root} mid {i}", 1, 50))
            edge_rows.append((mid, root))
    for target, counts in TABLE1_COUNTS.items():
        concept_rows.append((target, target.replace("_", " ").capitalize(), 2, 500))
        for root, m in counts.items():
            slug = root.lower().replace(" ", "_")
            for i in range(m):
                edge_rows.append((target, f"{slug}_mid_{i:02d}"))
    # One parentless non-root concept: removed at load and reported.
    concept_rows.append(("orphan_concept", "Orphan concept", 3, 1))

    concepts_path = dir_path / "concepts.tsv"
    with open(concepts_path, "w", encoding="utf-8") as fh:
        fh.write("concept_id\tdisplay_name\tlevel\tworks_count\n")
        for cid, name, level, works in concept_rows:
            fh.write(f"{cid}\t{name}\t{level}\t{works}\n")
    edges_path = dir_path / "edges.tsv"
    with open(edges_path, "w", encoding="utf-8") as fh:
        fh.write("child_id\tparent_id\n")
        for child, parent in edge_rows:
            fh.write(f"{child}\t{parent}\n")
    return concepts_path, edges_path


@pytest.fixture
def table1_files(tmp_path) -> tuple[Path, Path]:
    return write_table1_fixture(tmp_path)


@pytest.fixture
def table1_taxonomy(table1_files) -> ConceptTaxonomy:
    return load_taxonomy(*table1_files)


@pytest.fixture(scope="session")
def planted():
    return planted_cluster_corpus(seed=0)


@pytest.fixture(scope="session")
def planted_space(planted):
    corpus, cluster_of = planted
    config = TrainConfig(
        dim=24, window=5, negatives=5, epochs=5, min_count=1,
        subsample_threshold=0.0, seed=42, workers=1,
    )
    return train_sgns(corpus, config), cluster_of


@pytest.fixture(scope="session")
def random_space_5000():
    from sciconnav.embed import EmbeddingSpace

    rng = np.random.default_rng(123)
    ids = tuple(f"v{i:05d}" for i in range(5000))
    return EmbeddingSpace(vocab=ids, matrix=rng.normal(size=(5000, 24)))
