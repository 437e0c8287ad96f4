"""End-to-end analysis: ingest, sample, cluster, map to the circumplex, report."""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import report
from .circumplex import (
    TABLE2,
    CentroidReport,
    CircumplexPoint,
    EmotionCategories,
    aggregates,
    centroids,
    normalize,
    points_for,
)
from .corpus import (
    EMOTIONS,
    ConfigError,
    LineError,
    Subcorpus,
    build_subcorpus,
    dedupe,
    load_regions,
    make_controls,
    partition_region,
    read_corpus,
)
from .delsar import ClusteringMatrix, run_delsar
from .semspace import DEFAULT_DIMS

logger = logging.getLogger(__name__)


class MalformedInput(ValueError):
    def __init__(self, errors: Sequence[LineError]):
        self.errors = list(errors)
        shown = "; ".join(f"line {e.lineno}: {e.reason}" for e in self.errors[:5])
        more = f" (+{len(self.errors) - 5} more)" if len(self.errors) > 5 else ""
        super().__init__(f"{len(self.errors)} malformed line(s): {shown}{more}")


@dataclass
class RunConfig:
    input: Path
    out: Path
    regions: Path | None = None
    emotions: tuple[str, ...] = EMOTIONS
    per_emotion: int = 1000
    controls: int = 6
    seed: int = 0
    dims: int = DEFAULT_DIMS
    jobs: int = 1
    skip_malformed: bool = False

    def __post_init__(self):
        if self.dims < 1:
            raise ConfigError("dims must be >= 1")
        if self.per_emotion < 1:
            raise ConfigError("per_emotion must be >= 1")
        if self.controls < 0:
            raise ConfigError("controls must be >= 0")
        if not self.emotions:
            raise ConfigError("emotion list is empty")
        self.emotions = tuple(e.casefold() for e in self.emotions)

    def as_record(self) -> dict:
        rec = asdict(self)
        rec["input"] = str(self.input)
        rec["out"] = str(self.out)
        rec["regions"] = None if self.regions is None else str(self.regions)
        rec["emotions"] = list(self.emotions)
        del rec["jobs"]  # does not affect outputs
        return rec


@dataclass
class AnalysisResult:
    subcorpora: list[Subcorpus]
    matrices: dict[str, ClusteringMatrix]
    raw_points: list[CircumplexPoint]
    points: list[CircumplexPoint]
    centroids: CentroidReport
    aggregates: dict[str, tuple[float, float]]
    files: list[Path] = field(default_factory=list)


def load_documents(config: RunConfig):
    parsed = read_corpus(config.input, config.emotions)
    if parsed.errors and not config.skip_malformed:
        raise MalformedInput(parsed.errors)
    return parsed


def build_subcorpora(docs, config: RunConfig) -> list[Subcorpus]:
    subcorpora = [
        build_subcorpus(partition_region(docs, region), region.name, config.per_emotion, config.emotions)
        for region in load_regions(config.regions)
    ]
    if config.controls:
        subcorpora += make_controls(docs, config.controls, config.seed, config.per_emotion, config.emotions)
    return subcorpora


def cluster_all(
    subcorpora: Sequence[Subcorpus], dims: int, seed: int, jobs: int = 1
) -> dict[str, ClusteringMatrix]:
    def work(sc: Subcorpus) -> ClusteringMatrix:
        return run_delsar(sc, k=dims, seed=seed)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(work, subcorpora))
    else:
        results = [work(sc) for sc in subcorpora]
    return {sc.name: m for sc, m in zip(subcorpora, results)}


def _safe_name(name: str) -> str:
    return re.sub(r"[^\w.-]+", "_", name)


def analyze(config: RunConfig, categories: EmotionCategories = TABLE2) -> AnalysisResult:
    parsed = load_documents(config)
    docs = dedupe(parsed.documents)
    logger.info("%d documents after removing %d duplicates", len(docs), len(parsed.documents) - len(docs))
    subcorpora = build_subcorpora(docs, config)
    if not subcorpora:
        raise ConfigError("no subcorpora to analyse")
    matrices = cluster_all(subcorpora, config.dims, config.seed, config.jobs)

    raw = points_for(matrices, categories)
    points = normalize(raw)
    report_ = centroids(points)
    aggs = aggregates(points, config.emotions)
    result = AnalysisResult(subcorpora, matrices, raw, points, report_, aggs)

    out = Path(config.out)
    (out / "clustering").mkdir(parents=True, exist_ok=True)
    outputs = {
        **{f"clustering/{_safe_name(name)}.csv": m.to_csv() for name, m in matrices.items()},
        "points.csv": report.points_csv(raw, points),
        "centroids.csv": report.centroids_csv(report_),
        "aggregates.csv": report.aggregates_csv(aggs),
        "circumplex.svg": report.circumplex_svg(points),
        "aggregates.svg": report.aggregates_svg(aggs),
        "centroids.svg": report.centroids_svg(report_),
    }
    for rel, text in outputs.items():
        path = out / rel
        path.write_text(text, encoding="utf-8", newline="")
        result.files.append(path)
    report.write_manifest(out, config.as_record(), result.files)
    return result


def summary_table(result: AnalysisResult) -> str:
    header = ["Emotion", "Centroid valence", "Centroid arousal", "Distance sum"]
    rows = [
        [e.capitalize(), f"{result.centroids.centroid[e][0]:+.4f}", f"{result.centroids.centroid[e][1]:+.4f}", f"{d:.4f}"]
        for e, d in result.centroids.ranked()
    ]
    agg_rows = [[name, f"{v:+.4f}", f"{a:+.4f}"] for name, (v, a) in result.aggregates.items()]
    return (
        report.format_table(header, rows)
        + "\n\n"
        + report.format_table(["Subcorpus", "Positivity", "Engagement"], agg_rows)
    )
