"""Latent semantic spaces: term-document counts, log-entropy weighting,
truncated SVD and cosine nearest-neighbour search over document vectors.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, svds

logger = logging.getLogger(__name__)

DEFAULT_DIMS = 36

#: Similarities within this distance of the row maximum count as tied.
TIE_EPS = 1e-12

# Document vectors shorter than this fraction of the longest are set to zero.
ZERO_RTOL = 1e-10

_URL = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION = re.compile(r"@\w+")
_APOSTROPHE = re.compile(r"['’]")
_NON_WORD = re.compile(r"[^\w\s]|_")


class EmptyCorpus(ValueError):
    """No document has any token."""


class SVDConvergenceError(RuntimeError):
    pass


def tokenize(text: str) -> list[str]:
    """Case-folded word tokens with URLs, @-mentions and punctuation removed.

    Hashtags keep their word (``#excited`` -> ``excited``). Apostrophes are
    dropped in place so contractions stay one token.
    """
    text = _URL.sub(" ", text.casefold())
    text = _MENTION.sub(" ", text)
    text = _APOSTROPHE.sub("", text)
    text = _NON_WORD.sub(" ", text)
    return text.split()


@dataclass
class TermDocMatrix:
    vocab: dict[str, int]
    counts: sparse.csc_matrix  # terms x documents
    doc_ids: list[str] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    @property
    def terms(self) -> list[str]:
        return sorted(self.vocab, key=self.vocab.__getitem__)


def build_term_doc(streams: Sequence[Sequence[str]], doc_ids: Sequence[str] | None = None) -> TermDocMatrix:
    """Raw term frequencies; terms are indexed in order of first appearance."""
    vocab: dict[str, int] = {}
    rows, cols, vals = [], [], []
    for j, tokens in enumerate(streams):
        tf: dict[int, int] = {}
        for tok in tokens:
            i = vocab.setdefault(tok, len(vocab))
            tf[i] = tf.get(i, 0) + 1
        rows.extend(tf)
        cols.extend([j] * len(tf))
        vals.extend(tf.values())
    if not vocab:
        raise EmptyCorpus("all documents are empty after tokenization")
    counts = sparse.csc_matrix(
        (np.asarray(vals, dtype=np.float64), (rows, cols)),
        shape=(len(vocab), len(streams)),
    )
    counts.sort_indices()
    ids = list(doc_ids) if doc_ids is not None else [str(j) for j in range(len(streams))]
    return TermDocMatrix(vocab, counts, ids)


def entropy_weights(counts: sparse.spmatrix) -> np.ndarray:
    r"""Global weight per term, :math:`1 + \sum_j p_{ij}\log_2 p_{ij} / \log_2 n`."""
    counts = sparse.csr_matrix(counts)
    n_terms, n_docs = counts.shape
    if n_docs < 2:
        return np.ones(n_terms)
    gf = np.asarray(counts.sum(axis=1)).ravel()
    row_of = np.repeat(np.arange(n_terms), np.diff(counts.indptr))
    p = counts.data / gf[row_of]
    plogp = np.bincount(row_of, weights=p * np.log2(p), minlength=n_terms)
    g = np.clip(1.0 + plogp / math.log2(n_docs), 0.0, 1.0)
    g[g < 1e-12] = 0.0  # uniform spread: rounding leaves ~1e-16
    return g


def log_entropy(matrix: TermDocMatrix) -> tuple[TermDocMatrix, np.ndarray]:
    """Log-entropy weighted copy of ``matrix`` plus the global term weights.

    Local weight is ``log2(1 + tf)``. Stored zeros (terms with zero global
    weight) are kept out of the result.
    """
    g = entropy_weights(matrix.counts)
    weighted = sparse.csc_matrix(matrix.counts, copy=True)
    weighted.data = np.log2(1.0 + weighted.data) * g[weighted.indices]
    weighted.eliminate_zeros()
    return TermDocMatrix(matrix.vocab, weighted, matrix.doc_ids), g


@dataclass(frozen=True)
class SemanticSpace:
    doc_vectors: np.ndarray  # documents x k
    singular_values: np.ndarray
    global_weights: np.ndarray
    vocab: dict[str, int]
    k: int
    k_requested: int

    @property
    def n_docs(self) -> int:
        return self.doc_vectors.shape[0]

    def unit_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Row-normalized vectors and the mask of all-zero rows."""
        norms = np.linalg.norm(self.doc_vectors, axis=1)
        zero = norms == 0.0
        unit = self.doc_vectors / np.where(zero, 1.0, norms)[:, None]
        return unit, zero

    def debug_dump(self) -> dict:
        terms = sorted(self.vocab, key=self.vocab.__getitem__)
        return {
            "k": self.k,
            "k_requested": self.k_requested,
            "singular_values": self.singular_values.tolist(),
            "vocab": {t: float(self.global_weights[self.vocab[t]]) for t in terms},
        }


def _sign_fix(u: np.ndarray, vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # largest-magnitude entry of each left singular vector made positive
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, vt * signs[:, None]


def truncated_svd(
    matrix: sparse.spmatrix | np.ndarray,
    k: int,
    seed: int = 0,
    method: str = "auto",
    maxiter: int | None = None,
    dense_limit: int = 4_000_000,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top-``k`` singular triplets ``(U, s, Vt)`` with ``s`` descending.

    ``method`` is ``"dense"`` (LAPACK), ``"arpack"`` (implicitly restarted
    Lanczos, started from a seeded vector) or ``"auto"``, which goes dense
    when the matrix has at most ``dense_limit`` entries or ``k`` is too close
    to full rank for ARPACK. ``k`` is clamped to ``min(matrix.shape)``.
    Singular vector signs are fixed so the output is deterministic.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    m, n = matrix.shape
    k = min(k, m, n)
    if method == "auto":
        method = "dense" if m * n <= dense_limit or k >= min(m, n) else "arpack"
    if method == "dense":
        a = matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix, dtype=np.float64)
        u, s, vt = np.linalg.svd(a, full_matrices=False)
        u, s, vt = u[:, :k], s[:k], vt[:k]
    elif method == "arpack":
        if k >= min(m, n):
            raise ValueError("arpack needs k < min(matrix.shape)")
        a = sparse.csr_matrix(matrix, dtype=np.float64)
        v0 = np.random.default_rng(seed).uniform(-1.0, 1.0, size=min(m, n))
        try:
            u, s, vt = svds(a, k=k, v0=v0, maxiter=maxiter, solver="arpack", tol=0)
        except ArpackNoConvergence as exc:
            raise SVDConvergenceError(
                f"ARPACK did not converge for k={k} on a {m}x{n} matrix "
                f"(nnz={a.nnz}, maxiter={maxiter}); "
                f"{len(exc.eigenvalues)} of {k} values converged"
            ) from exc
        order = np.argsort(-s, kind="stable")
        u, s, vt = u[:, order], s[order], vt[order]
    else:
        raise ValueError(f"unknown SVD method {method!r}")
    u, vt = _sign_fix(u, vt)
    return u, np.clip(s, 0.0, None), vt


def build_space(
    streams: Sequence[Sequence[str]],
    k: int = DEFAULT_DIMS,
    seed: int = 0,
    method: str = "auto",
) -> SemanticSpace:
    """Log-entropy LSA space over token streams, one vector per stream.

    Document vectors are the weighted columns projected onto the top-``k``
    left singular vectors, i.e. the rows of ``V @ diag(s)``. Projecting
    (rather than reading ``V``) keeps vectors of empty documents exactly zero.
    """
    tdm = build_term_doc(streams)
    weighted, g = log_entropy(tdm)
    k_eff = min(k, *weighted.shape)
    if k_eff < k:
        logger.warning("clamping dimension %d to %d for a %dx%d matrix", k, k_eff, *weighted.shape)
    u, s, _ = truncated_svd(weighted.counts, k_eff, seed=seed, method=method)
    vectors = np.asarray(weighted.counts.T @ u)
    if not np.all(np.isfinite(vectors)):
        raise SVDConvergenceError("non-finite document vectors")
    norms = np.linalg.norm(vectors, axis=1)
    negligible = norms <= ZERO_RTOL * norms.max()
    if negligible.any():
        logger.debug("%d document(s) have zero vectors", int(negligible.sum()))
        vectors[negligible] = 0.0
    vectors.setflags(write=False)
    return SemanticSpace(vectors, s, g, tdm.vocab, k_eff, k)


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity; 0.0 when either vector is all zeros."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def nearest_neighbours(space: SemanticSpace, queries: Iterable[int] | None = None, block: int = 1024) -> np.ndarray:
    """Index of the most cosine-similar other document for each query.

    Similarities are computed block by block from the k-dimensional vectors
    instead of materializing the full document x document matrix. Scores
    within :data:`TIE_EPS` of the best count as ties and go to the lowest
    index. Zero vectors score 0 against everything.
    """
    n = space.n_docs
    if n < 2:
        raise ValueError("need at least two documents")
    unit, _ = space.unit_vectors()
    q = np.arange(n) if queries is None else np.asarray(list(queries), dtype=np.intp)
    out = np.empty(len(q), dtype=np.intp)
    for lo in range(0, len(q), block):
        rows = q[lo : lo + block]
        sims = unit[rows] @ unit.T
        sims[np.arange(len(rows)), rows] = -np.inf
        best = sims.max(axis=1, keepdims=True)
        out[lo : lo + block] = np.argmax(sims >= best - TIE_EPS, axis=1)
    return out


def nearest_document(query: int, space: SemanticSpace) -> int:
    return int(nearest_neighbours(space, [query])[0])
