"""Valence/arousal coordinates from clustering matrices, cross-subcorpus
normalization, per-emotion centroids and per-subcorpus aggregates.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import ConfigError
from .delsar import ClusteringMatrix


@dataclass(frozen=True)
class EmotionCategories:
    """Theoretical categories; emotions outside a set are negative / disengaged."""

    positive: frozenset[str]
    engaged: frozenset[str]

    def swapped_valence(self, emotions: Iterable[str]) -> "EmotionCategories":
        return EmotionCategories(frozenset(emotions) - self.positive, self.engaged)


TABLE2 = EmotionCategories(
    positive=frozenset({"calm", "excited", "happy", "interested", "sleepy", "surprised"}),
    engaged=frozenset({"angry", "excited", "interested", "scared", "stressed", "surprised"}),
)


@dataclass(frozen=True)
class CircumplexPoint:
    subcorpus: str
    emotion: str
    valence: float
    arousal: float
    normalized: bool = False


def raw_point(
    matrix: ClusteringMatrix,
    emotion: str,
    categories: EmotionCategories = TABLE2,
    subcorpus: str = "",
) -> CircumplexPoint:
    """Fractions of ``emotion``'s row landing on positive and on engaged emotions."""
    if emotion not in matrix.emotions:
        raise ConfigError(f"emotion {emotion!r} not in clustering matrix")
    row = matrix.row(emotion)
    total = row.sum()
    if total == 0:
        raise ConfigError(f"row for {emotion!r} is empty")
    pos = sum(int(c) for f, c in zip(matrix.emotions, row) if f in categories.positive)
    eng = sum(int(c) for f, c in zip(matrix.emotions, row) if f in categories.engaged)
    return CircumplexPoint(subcorpus, emotion, pos / total, eng / total)


def points_for(
    matrices: Mapping[str, ClusteringMatrix], categories: EmotionCategories = TABLE2
) -> list[CircumplexPoint]:
    """Raw points for every (subcorpus, emotion) pair, subcorpora in mapping order."""
    return [
        raw_point(m, e, categories, name) for name, m in matrices.items() for e in m.emotions
    ]


def normalize(points: Sequence[CircumplexPoint]) -> list[CircumplexPoint]:
    """Subtract the mean valence and mean arousal taken over all ``points``."""
    if not points:
        raise ValueError("nothing to normalize")
    v = np.array([p.valence for p in points])
    a = np.array([p.arousal for p in points])
    v = v - v.mean()
    a = a - a.mean()
    return [
        replace(p, valence=float(dv), arousal=float(da), normalized=True)
        for p, dv, da in zip(points, v, a)
    ]


@dataclass
class CentroidReport:
    centroid: dict[str, tuple[float, float]]
    distance_sum: dict[str, float]

    def ranked(self) -> list[tuple[str, float]]:
        """Emotions by ascending distance sum (tightest cluster first)."""
        return sorted(self.distance_sum.items(), key=lambda item: (item[1], item[0]))


def centroids(points: Iterable[CircumplexPoint]) -> CentroidReport:
    """Per-emotion centroid and summed Euclidean distance to it.

    Running k-means with one cluster per emotion over that emotion's points
    converges at once to their mean, so the mean is used directly.
    """
    groups: dict[str, list[tuple[float, float]]] = defaultdict(list)
    for p in points:
        groups[p.emotion].append((p.valence, p.arousal))
    centre, dist = {}, {}
    for emotion, coords in groups.items():
        xy = np.array(coords)
        c = xy.mean(axis=0)
        centre[emotion] = (float(c[0]), float(c[1]))
        dist[emotion] = float(np.hypot(*(xy - c).T).sum())
    return CentroidReport(centre, dist)


def aggregate_subcorpus(
    points: Sequence[CircumplexPoint], emotions: Sequence[str]
) -> tuple[float, float]:
    """Mean (valence, arousal) of one subcorpus's points, one per emotion."""
    by_emotion = {p.emotion: p for p in points}
    missing = [e for e in emotions if e not in by_emotion]
    if missing:
        raise ConfigError(f"no point for emotion(s): {', '.join(missing)}")
    v = np.mean([by_emotion[e].valence for e in emotions])
    a = np.mean([by_emotion[e].arousal for e in emotions])
    return float(v), float(a)


def aggregates(points: Sequence[CircumplexPoint], emotions: Sequence[str]) -> dict[str, tuple[float, float]]:
    groups: dict[str, list[CircumplexPoint]] = defaultdict(list)
    for p in points:
        groups[p.subcorpus].append(p)
    return {name: aggregate_subcorpus(pts, emotions) for name, pts in groups.items()}
