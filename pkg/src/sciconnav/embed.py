"""Skip-gram negative-sampling embeddings over trajectory corpora.

Training is plain SGD on the binary-logistic objective: for each center
token, context tokens within a per-position window radius (sampled uniformly
in 1..window) are positive examples; negatives are drawn from the unigram
distribution raised to the 3/4 power. Only input vectors are kept.

Training with workers=1 and a fixed seed is bit-reproducible. Multiple
workers perform unsynchronized overlapping updates on the shared matrices
(asynchronous SGD): memory-safe, but not reproducible.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import TrajectoryCorpus
from .errors import EmptyCorpusError, ParseError, SciConNavError, TrainingError, UnknownConceptError

EMBEDDING_MAGIC = b"SCICONNAV-EMB\x01\x00\x00"

NEGATIVE_POWER = 0.75


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 24
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_learning_rate: float = 0.025
    final_learning_rate: float = 1e-4
    min_count: int = 5
    subsample_threshold: float = 1e-3
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise TrainingError(f"dim must be >= 1, got {self.dim}")
        if self.window < 1:
            raise TrainingError(f"window must be >= 1, got {self.window}")
        if self.negatives < 1:
            raise TrainingError(f"negatives must be >= 1, got {self.negatives}")
        if self.epochs < 1:
            raise TrainingError(f"epochs must be >= 1, got {self.epochs}")
        if self.initial_learning_rate <= 0 or self.final_learning_rate <= 0:
            raise TrainingError("learning rates must be > 0")
        if self.min_count < 0:
            raise TrainingError(f"min_count must be >= 0, got {self.min_count}")
        if self.subsample_threshold < 0:
            raise TrainingError("subsample_threshold must be >= 0 (0 disables)")
        if self.workers < 1:
            raise TrainingError(f"workers must be >= 1, got {self.workers}")


class EmbeddingSpace:
    """Frozen N x dim vector table with a unit-norm cache for similarity."""

    def __init__(self, vocab: tuple[str, ...], matrix: np.ndarray):
        matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(vocab):
            raise SciConNavError(
                f"matrix shape {matrix.shape} does not match vocabulary of {len(vocab)}"
            )
        if len(set(vocab)) != len(vocab):
            raise SciConNavError("duplicate concept ids in vocabulary")
        if not np.isfinite(matrix).all():
            raise SciConNavError("embedding matrix contains non-finite values")
        norms = np.linalg.norm(matrix, axis=1)
        if (norms == 0).any():
            zero = [vocab[i] for i in np.nonzero(norms == 0)[0][:5]]
            raise SciConNavError(f"zero embedding vectors for {zero}")
        self.vocab = tuple(vocab)
        self.matrix = matrix
        self.unit_cache = matrix / norms[:, None]
        self.matrix.setflags(write=False)
        self.unit_cache.setflags(write=False)
        self._index = {cid: i for i, cid in enumerate(self.vocab)}
        by_id = sorted(range(len(self.vocab)), key=self.vocab.__getitem__)
        self._id_rank = np.empty(len(self.vocab), dtype=np.int64)
        self._id_rank[by_id] = np.arange(len(self.vocab))

    def __len__(self) -> int:
        return len(self.vocab)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self._index

    def row(self, concept_id: str) -> int:
        try:
            return self._index[concept_id]
        except KeyError:
            raise UnknownConceptError(f"concept {concept_id!r} not in embedding vocabulary") from None

    def vector(self, concept_id: str) -> np.ndarray:
        return self.matrix[self.row(concept_id)]

    def unit_vector(self, concept_id: str) -> np.ndarray:
        return self.unit_cache[self.row(concept_id)]


def similarity(space: EmbeddingSpace, i: str, j: str) -> float:
    """Cosine similarity via the unit-norm cache; symmetric by construction."""
    return float(np.dot(space.unit_cache[space.row(i)], space.unit_cache[space.row(j)]))


def nearest_neighbors(
    space: EmbeddingSpace,
    query: str | np.ndarray,
    k: int,
    exclude: frozenset[str] | set[str] = frozenset(),
) -> list[tuple[str, float]]:
    """Top-k concepts by cosine similarity, descending; ties by ascending id."""
    if k < 0:
        raise SciConNavError(f"k must be >= 0, got {k}")
    if k == 0:
        return []
    if isinstance(query, str):
        unit = space.unit_cache[space.row(query)]
    else:
        vec = np.asarray(query, dtype=np.float64)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise SciConNavError("query vector has zero norm")
        unit = vec / norm
    sims = space.unit_cache @ unit
    order = np.lexsort((space._id_rank, -sims))
    out: list[tuple[str, float]] = []
    for idx in order:
        cid = space.vocab[idx]
        if cid in exclude:
            continue
        out.append((cid, float(sims[idx])))
        if len(out) == k:
            break
    return out


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def pair_loss(
    w_in: np.ndarray, w_out: np.ndarray, center: int, context: int, negatives: list[int]
) -> float:
    """Binary-logistic loss of one (center, context, negatives) example."""
    v = w_in[center]
    s_pos = float(np.dot(w_out[context], v))
    loss = -float(np.log(_sigmoid(np.float64(s_pos))))
    for n in negatives:
        s_neg = float(np.dot(w_out[n], v))
        loss -= float(np.log(_sigmoid(np.float64(-s_neg))))
    return loss


def pair_gradients(
    w_in: np.ndarray, w_out: np.ndarray, center: int, context: int, negatives: list[int]
) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    """Analytic gradients of pair_loss wrt the center row and each output row.

    Output gradients accumulate over duplicate negative indices.
    """
    v = w_in[center]
    grad_center = np.zeros_like(v)
    grads_out: dict[int, np.ndarray] = {}

    def add_out(row: int, grad: np.ndarray) -> None:
        if row in grads_out:
            grads_out[row] = grads_out[row] + grad
        else:
            grads_out[row] = grad

    sig_pos = _sigmoid(np.float64(np.dot(w_out[context], v)))
    grad_center += -(1.0 - sig_pos) * w_out[context]
    add_out(context, -(1.0 - sig_pos) * v)
    for n in negatives:
        sig_neg = _sigmoid(np.float64(np.dot(w_out[n], v)))
        grad_center += sig_neg * w_out[n]
        add_out(n, sig_neg * v)
    return grad_center, grads_out


class _NegativeSampler:
    """Draws vocabulary indices from the unigram^(3/4) distribution."""

    def __init__(self, counts: np.ndarray):
        weights = counts.astype(np.float64) ** NEGATIVE_POWER
        self.probabilities = weights / weights.sum()
        self._cdf = np.cumsum(self.probabilities)
        self._cdf[-1] = 1.0

    def draw(self, rng: np.random.Generator, k: int) -> np.ndarray:
        return np.searchsorted(self._cdf, rng.random(k), side="right")


def _train_shard(
    sentences: list[np.ndarray],
    w_in: np.ndarray,
    w_out: np.ndarray,
    config: TrainConfig,
    sampler: _NegativeSampler,
    keep_prob: np.ndarray | None,
    rng: np.random.Generator,
    progress: list[int],
    total_tokens: int,
) -> None:
    lr0 = config.initial_learning_rate
    lr_min = config.final_learning_rate
    window = config.window
    n_neg = config.negatives
    for _ in range(config.epochs):
        for sent in sentences:
            lr = max(lr_min, lr0 * (1.0 - progress[0] / total_tokens))
            progress[0] += len(sent)
            if keep_prob is not None:
                kept = sent[rng.random(len(sent)) < keep_prob[sent]]
            else:
                kept = sent
            m = len(kept)
            if m < 2:
                continue
            # Batch the per-sentence randomness: one radius per position and
            # one flat block of negative draws sliced per pair.
            radii = rng.integers(1, window + 1, size=m)
            los = np.maximum(np.arange(m) - radii, 0)
            his = np.minimum(np.arange(m) + radii + 1, m)
            n_pairs = int((his - los - 1).sum())
            negs_flat = sampler.draw(rng, n_pairs * n_neg)
            pos = 0
            for t in range(m):
                center = kept[t]
                for j in range(los[t], his[t]):
                    if j == t:
                        continue
                    ctx = kept[j]
                    negs = negs_flat[pos : pos + n_neg]
                    pos += n_neg
                    negs = negs[negs != ctx]
                    rows = np.concatenate(([ctx], negs))
                    v = w_in[center]
                    u = w_out[rows]
                    g = -lr * _sigmoid(u @ v)
                    g[0] += lr
                    grad_v = g @ u
                    np.add.at(w_out, rows, g[:, None] * v)
                    v += grad_v


def train_sgns(corpus: TrajectoryCorpus, config: TrainConfig) -> EmbeddingSpace:
    """Train input vectors on the corpus; see the module docstring."""
    if not corpus.trajectories:
        raise EmptyCorpusError("cannot train on an empty corpus")
    vocab_items = [
        (cid, cnt) for cid, cnt in corpus.vocabulary.items() if cnt >= config.min_count
    ]
    if not vocab_items:
        raise TrainingError(
            f"vocabulary empty after min_count={config.min_count} pruning"
        )
    vocab_items.sort(key=lambda item: (-item[1], item[0]))
    vocab = tuple(cid for cid, _ in vocab_items)
    counts = np.array([cnt for _, cnt in vocab_items], dtype=np.int64)
    index = {cid: i for i, cid in enumerate(vocab)}

    sentences: list[np.ndarray] = []
    for traj in corpus.trajectories:
        ids = [index[c] for c in traj.sequence if c in index]
        if ids:
            sentences.append(np.array(ids, dtype=np.int64))
    if not sentences:
        raise TrainingError("no sentences left after vocabulary pruning")

    total_count = int(counts.sum())
    keep_prob: np.ndarray | None = None
    if config.subsample_threshold > 0:
        freq = counts / total_count
        ratio = config.subsample_threshold / freq
        keep_prob = np.minimum(1.0, np.sqrt(ratio) + ratio)

    rng = np.random.default_rng(config.seed)
    w_in = (rng.random((len(vocab), config.dim)) - 0.5) / config.dim
    w_out = np.zeros((len(vocab), config.dim))
    sampler = _NegativeSampler(counts)
    total_tokens = sum(len(s) for s in sentences) * config.epochs
    progress = [0]

    if config.workers == 1:
        _train_shard(sentences, w_in, w_out, config, sampler, keep_prob, rng, progress, total_tokens)
    else:
        threads = []
        for wid in range(config.workers):
            shard = sentences[wid :: config.workers]
            if not shard:
                continue
            worker_rng = np.random.default_rng([config.seed, wid])
            threads.append(
                threading.Thread(
                    target=_train_shard,
                    args=(shard, w_in, w_out, config, sampler, keep_prob, worker_rng, progress, total_tokens),
                )
            )
        for th in threads:
            th.start()
        for th in threads:
            th.join()

    if not np.isfinite(w_in).all() or not np.isfinite(w_out).all():
        raise TrainingError(
            "training diverged: non-finite values in the embedding matrices "
            f"(lr0={config.initial_learning_rate}, dim={config.dim})"
        )
    return EmbeddingSpace(vocab=vocab, matrix=w_in)


def save_text(space: EmbeddingSpace, path: str | Path) -> None:
    """Text format: 'N D' header line, then 'concept_id v1 ... vD' per row.

    Values are written with shortest-roundtrip reprs, so reading the file
    back reproduces the matrix bit-exactly.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(space)} {space.dim}\n")
        for cid, row in zip(space.vocab, space.matrix):
            fh.write(cid + " " + " ".join(repr(float(x)) for x in row) + "\n")


def load_text(path: str | Path) -> EmbeddingSpace:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParseError(f"{path}: expected 'N D' header")
        try:
            n, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError(f"{path}: bad header {header}") from None
        vocab: list[str] = []
        matrix = np.empty((n, dim))
        for i in range(n):
            fields = fh.readline().split()
            if len(fields) != dim + 1:
                raise ParseError(f"{path}: row {i + 2} has {len(fields)} fields, expected {dim + 1}")
            vocab.append(fields[0])
            try:
                matrix[i] = [float(x) for x in fields[1:]]
            except ValueError as exc:
                raise ParseError(f"{path}: row {i + 2}: {exc}") from None
    return EmbeddingSpace(vocab=tuple(vocab), matrix=matrix)


def save_binary(space: EmbeddingSpace, path: str | Path) -> None:
    """Little-endian binary variant of the text layout with a magic header."""
    with open(path, "wb") as fh:
        fh.write(EMBEDDING_MAGIC)
        fh.write(np.array([len(space), space.dim], dtype="<u8").tobytes())
        for cid, row in zip(space.vocab, space.matrix):
            encoded = cid.encode("utf-8")
            fh.write(np.array([len(encoded)], dtype="<u4").tobytes())
            fh.write(encoded)
            fh.write(row.astype("<f8").tobytes())


def load_binary(path: str | Path) -> EmbeddingSpace:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(len(EMBEDDING_MAGIC))
        if magic != EMBEDDING_MAGIC:
            raise ParseError(f"{path}: bad magic header")
        n, dim = np.frombuffer(fh.read(16), dtype="<u8")
        vocab: list[str] = []
        matrix = np.empty((int(n), int(dim)))
        for i in range(int(n)):
            (id_len,) = np.frombuffer(fh.read(4), dtype="<u4")
            vocab.append(fh.read(int(id_len)).decode("utf-8"))
            row = np.frombuffer(fh.read(8 * int(dim)), dtype="<f8")
            if len(row) != int(dim):
                raise ParseError(f"{path}: truncated row {i}")
            matrix[i] = row
    return EmbeddingSpace(vocab=tuple(vocab), matrix=matrix)
