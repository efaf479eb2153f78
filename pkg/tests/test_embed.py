"""Embedding training, similarity, and neighbor-query tests."""

from __future__ import annotations

from collections import Counter

import numpy as np
import pytest
from scipy import stats

from sciconnav.corpus import Trajectory, TrajectoryCorpus
from sciconnav.embed import (
    EmbeddingSpace,
    TrainConfig,
    _NegativeSampler,
    load_binary,
    load_text,
    nearest_neighbors,
    pair_gradients,
    pair_loss,
    save_binary,
    save_text,
    similarity,
    train_sgns,
)
from sciconnav.errors import (
    EmptyCorpusError,
    SciConNavError,
    TrainingError,
    UnknownConceptError,
)


def tiny_corpus() -> TrajectoryCorpus:
    seqs = [("c1", "c2", "c3", "c1"), ("c2", "c1", "c3", "c2")]
    vocab = Counter()
    for s in seqs:
        vocab.update(s)
    return TrajectoryCorpus(
        trajectories=[Trajectory(f"a{i}", s) for i, s in enumerate(seqs)],
        vocabulary=vocab,
        min_pubs=0,
    )


class TestTrainConfig:
    def test_defaults(self):
        cfg = TrainConfig()
        assert (cfg.dim, cfg.window, cfg.negatives, cfg.epochs) == (24, 5, 5, 5)
        assert cfg.initial_learning_rate == 0.025
        assert cfg.min_count == 5

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"dim": 0},
            {"window": 0},
            {"negatives": 0},
            {"epochs": 0},
            {"initial_learning_rate": 0.0},
            {"workers": 0},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(TrainingError):
            TrainConfig(**kwargs)


class TestTraining:
    def test_matrix_width_is_dim(self):
        space = train_sgns(tiny_corpus(), TrainConfig(dim=24, min_count=1, epochs=1))
        assert space.matrix.shape == (3, 24)

    def test_empty_corpus_rejected(self):
        empty = TrajectoryCorpus(trajectories=[], vocabulary=Counter(), min_pubs=0)
        with pytest.raises(EmptyCorpusError):
            train_sgns(empty, TrainConfig(min_count=1))

    def test_empty_vocabulary_rejected(self):
        with pytest.raises(TrainingError, match="vocabulary empty"):
            train_sgns(tiny_corpus(), TrainConfig(min_count=100))

    def test_seeded_single_worker_is_bit_reproducible(self):
        cfg = TrainConfig(min_count=1, epochs=2, seed=9)
        a = train_sgns(tiny_corpus(), cfg)
        b = train_sgns(tiny_corpus(), cfg)
        assert a.matrix.tobytes() == b.matrix.tobytes()
        assert a.vocab == b.vocab

    def test_planted_clusters_separate(self, planted_space):
        space, cluster_of = planted_space
        unit = space.unit_cache
        clusters = np.array([cluster_of[c] for c in space.vocab])
        sims = unit @ unit.T
        same = clusters[:, None] == clusters[None, :]
        off_diag = ~np.eye(len(unit), dtype=bool)
        intra = sims[same & off_diag].mean()
        inter = sims[~same].mean()
        assert intra - inter >= 0.2

    def test_multi_worker_runs_and_separates(self, planted):
        corpus, cluster_of = planted
        cfg = TrainConfig(
            dim=16, epochs=2, min_count=1, subsample_threshold=0.0, seed=1, workers=3
        )
        space = train_sgns(corpus, cfg)
        clusters = np.array([cluster_of[c] for c in space.vocab])
        sims = space.unit_cache @ space.unit_cache.T
        same = clusters[:, None] == clusters[None, :]
        off_diag = ~np.eye(len(space), dtype=bool)
        assert sims[same & off_diag].mean() > sims[~same].mean()

    def test_subsampling_path_runs(self):
        space = train_sgns(
            tiny_corpus(), TrainConfig(min_count=1, epochs=2, subsample_threshold=0.05)
        )
        assert np.isfinite(space.matrix).all()


class TestGradients:
    def test_analytic_matches_central_differences(self):
        rng = np.random.default_rng(1)
        w_in = rng.normal(size=(20, 8))
        w_out = rng.normal(size=(20, 8))
        eps = 1e-6
        for _ in range(30):
            center = int(rng.integers(0, 20))
            context = int(rng.integers(0, 20))
            negs = [int(x) for x in rng.integers(0, 20, size=5)]
            grad_c, grads_out = pair_gradients(w_in, w_out, center, context, negs)
            fd = np.zeros(8)
            for d in range(8):
                wp, wm = w_in.copy(), w_in.copy()
                wp[center, d] += eps
                wm[center, d] -= eps
                fd[d] = (
                    pair_loss(wp, w_out, center, context, negs)
                    - pair_loss(wm, w_out, center, context, negs)
                ) / (2 * eps)
            rel = np.linalg.norm(fd - grad_c) / max(np.linalg.norm(grad_c), 1e-12)
            assert rel < 1e-5
            for row, grad in grads_out.items():
                fd = np.zeros(8)
                for d in range(8):
                    wp, wm = w_out.copy(), w_out.copy()
                    wp[row, d] += eps
                    wm[row, d] -= eps
                    fd[d] = (
                        pair_loss(w_in, wp, center, context, negs)
                        - pair_loss(w_in, wm, center, context, negs)
                    ) / (2 * eps)
                rel = np.linalg.norm(fd - grad) / max(np.linalg.norm(grad), 1e-12)
                assert rel < 1e-5

    def test_duplicate_negatives_accumulate(self):
        rng = np.random.default_rng(2)
        w_in = rng.normal(size=(5, 4))
        w_out = rng.normal(size=(5, 4))
        _, grads_single = pair_gradients(w_in, w_out, 0, 1, [2])
        _, grads_double = pair_gradients(w_in, w_out, 0, 1, [2, 2])
        assert np.allclose(grads_double[2], 2 * grads_single[2])


class TestNegativeSampling:
    def test_three_quarter_power_distribution(self):
        counts = np.array([1000, 500, 200, 100, 50, 10])
        sampler = _NegativeSampler(counts)
        rng = np.random.default_rng(3)
        draws = sampler.draw(rng, 1_000_000)
        observed = np.bincount(draws, minlength=len(counts))
        expected = sampler.probabilities * len(draws)
        chi2 = stats.chisquare(observed, expected)
        assert chi2.pvalue > 1e-4

    def test_probabilities_match_power_law(self):
        counts = np.array([81, 16, 1])
        sampler = _NegativeSampler(counts)
        raw = counts.astype(float) ** 0.75
        assert np.allclose(sampler.probabilities, raw / raw.sum())


class TestSimilarity:
    def test_self_similarity_is_one(self, planted_space):
        space, _ = planted_space
        assert similarity(space, space.vocab[0], space.vocab[0]) == pytest.approx(1.0)

    def test_orthogonal_vectors(self):
        matrix = np.zeros((2, 4))
        matrix[0, 0] = 1.0
        matrix[1, 1] = 1.0
        space = EmbeddingSpace(vocab=("a", "b"), matrix=matrix)
        assert similarity(space, "a", "b") == 0.0

    def test_matches_raw_formula(self, random_space_5000):
        space = random_space_5000
        rng = np.random.default_rng(4)
        for _ in range(100):
            i, j = rng.integers(0, len(space), size=2)
            a, b = space.vocab[i], space.vocab[j]
            va, vb = space.matrix[i], space.matrix[j]
            direct = float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))
            assert abs(similarity(space, a, b) - direct) < 1e-9

    def test_symmetric_and_bounded(self, random_space_5000):
        space = random_space_5000
        rng = np.random.default_rng(5)
        for _ in range(200):
            i, j = rng.integers(0, len(space), size=2)
            a, b = space.vocab[i], space.vocab[j]
            s = similarity(space, a, b)
            assert s == similarity(space, b, a)
            assert abs(s) <= 1 + 1e-9

    def test_unknown_id(self, random_space_5000):
        with pytest.raises(UnknownConceptError):
            similarity(random_space_5000, "v00000", "nope")


class TestNearestNeighbors:
    def test_k_zero(self, random_space_5000):
        assert nearest_neighbors(random_space_5000, "v00000", k=0) == []

    def test_negative_k(self, random_space_5000):
        with pytest.raises(SciConNavError):
            nearest_neighbors(random_space_5000, "v00000", k=-1)

    def test_exclusions_respected(self, random_space_5000):
        space = random_space_5000
        hits = nearest_neighbors(space, "v00001", k=10, exclude={"v00001"})
        assert "v00001" not in [cid for cid, _ in hits]

    def test_matches_exhaustive_scan(self, random_space_5000):
        space = random_space_5000
        rng = np.random.default_rng(6)
        unit = space.unit_cache
        for _ in range(100):
            q = int(rng.integers(0, len(space)))
            sims = unit @ unit[q]
            expected = sorted(
                ((cid, float(s)) for cid, s in zip(space.vocab, sims)),
                key=lambda item: (-item[1], item[0]),
            )[:5]
            got = nearest_neighbors(space, space.vocab[q], k=5)
            assert got == expected

    def test_tie_break_by_ascending_id(self):
        matrix = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        space = EmbeddingSpace(vocab=("b", "a", "z"), matrix=matrix)
        hits = nearest_neighbors(space, np.array([1.0, 0.0]), k=2)
        assert [cid for cid, _ in hits] == ["a", "b"]

    def test_vector_query_and_zero_vector(self, random_space_5000):
        space = random_space_5000
        hits = nearest_neighbors(space, space.matrix[17], k=1)
        assert hits[0][0] == space.vocab[17]
        with pytest.raises(SciConNavError, match="zero"):
            nearest_neighbors(space, np.zeros(space.dim), k=1)


class TestSpaceValidation:
    def test_non_finite_rejected(self):
        matrix = np.ones((2, 3))
        matrix[1, 1] = np.nan
        with pytest.raises(SciConNavError, match="non-finite"):
            EmbeddingSpace(vocab=("a", "b"), matrix=matrix)

    def test_zero_row_rejected(self):
        matrix = np.zeros((2, 3))
        matrix[0, 0] = 1.0
        with pytest.raises(SciConNavError, match="zero"):
            EmbeddingSpace(vocab=("a", "b"), matrix=matrix)

    def test_duplicate_vocab_rejected(self):
        with pytest.raises(SciConNavError, match="duplicate"):
            EmbeddingSpace(vocab=("a", "a"), matrix=np.ones((2, 3)))

    def test_unit_cache_norms(self, planted_space):
        space, _ = planted_space
        norms = np.linalg.norm(space.unit_cache, axis=1)
        assert np.abs(norms - 1.0).max() < 1e-6


class TestIO:
    def test_text_round_trip_bit_exact(self, tmp_path, planted_space):
        space, _ = planted_space
        path = tmp_path / "emb.txt"
        save_text(space, path)
        loaded = load_text(path)
        assert loaded.vocab == space.vocab
        assert loaded.matrix.tobytes() == space.matrix.tobytes()

    def test_binary_round_trip_bit_exact(self, tmp_path, planted_space):
        space, _ = planted_space
        path = tmp_path / "emb.bin"
        save_binary(space, path)
        loaded = load_binary(path)
        assert loaded.vocab == space.vocab
        assert loaded.matrix.tobytes() == space.matrix.tobytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"not an embedding file")
        from sciconnav.errors import ParseError

        with pytest.raises(ParseError, match="magic"):
            load_binary(path)
