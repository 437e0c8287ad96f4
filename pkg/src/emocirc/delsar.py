"""DELSAR: relabel every document with the label of its nearest semantic
neighbour and tally the result as an emotion x emotion matrix.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .corpus import Subcorpus
from .semspace import DEFAULT_DIMS, SemanticSpace, build_space, nearest_neighbours, tokenize

logger = logging.getLogger(__name__)

SpaceBuilder = Callable[[Sequence[Sequence[str]], int, int], SemanticSpace]


@dataclass(frozen=True)
class ClusteringMatrix:
    """``counts[i, j]``: documents labelled ``emotions[i]`` whose nearest
    neighbour is labelled ``emotions[j]``."""

    emotions: tuple[str, ...]
    counts: np.ndarray

    def row(self, emotion: str) -> np.ndarray:
        return self.counts[self.emotions.index(emotion)]

    def diagonal_mass(self) -> np.ndarray:
        return np.diag(self.counts) / self.counts.sum(axis=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["emotion", *self.emotions])
        for emotion, row in zip(self.emotions, self.counts):
            writer.writerow([emotion, *(int(c) for c in row)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ClusteringMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        emotions = tuple(rows[0][1:])
        counts = np.array([[int(c) for c in r[1:]] for r in rows[1:]], dtype=np.int64)
        return cls(emotions, counts)


def strip_label(text: str, emotion: str) -> list[str]:
    """Tokens of ``text`` without whole-token occurrences of ``emotion``."""
    label = emotion.casefold()
    return [tok for tok in tokenize(text) if tok != label]


def stripped_streams(subcorpus: Subcorpus) -> tuple[list[list[str]], np.ndarray]:
    """Token streams with each document's own label removed, plus label indices."""
    emotions = subcorpus.emotions
    streams, labels = [], []
    for i, emotion in enumerate(emotions):
        for doc in subcorpus.per_emotion[emotion]:
            streams.append(strip_label(doc.text, emotion))
            labels.append(i)
    return streams, np.asarray(labels, dtype=np.intp)


def run_delsar(
    subcorpus: Subcorpus,
    space_builder: SpaceBuilder | None = None,
    k: int = DEFAULT_DIMS,
    seed: int = 0,
) -> ClusteringMatrix:
    """Cluster one subcorpus.

    A single LSA space is built over all of the subcorpus's documents after
    label stripping; candidates for each query span every emotion, the query
    itself excluded.
    """
    builder = space_builder or (lambda streams, k, seed: build_space(streams, k=k, seed=seed))
    emotions = tuple(subcorpus.emotions)
    streams, labels = stripped_streams(subcorpus)
    space = builder(streams, k, seed)
    nearest = nearest_neighbours(space)
    m = len(emotions)
    counts = np.bincount(labels * m + labels[nearest], minlength=m * m).reshape(m, m)
    expected = np.array([len(subcorpus.per_emotion[e]) for e in emotions])
    if not np.array_equal(counts.sum(axis=1), expected):
        raise AssertionError(f"row sums {counts.sum(axis=1)} != {expected}")
    logger.info(
        "%s: %d docs, k=%d, mean diagonal mass %.3f",
        subcorpus.name, len(labels), space.k, float(np.mean(np.diag(counts) / expected)),
    )
    return ClusteringMatrix(emotions, counts.astype(np.int64))
