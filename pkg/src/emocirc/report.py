"""CSV tables, SVG scatter plots and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from collections import Counter
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from .circumplex import CentroidReport, CircumplexPoint
from .corpus import Document, RegionSpec

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def points_csv(raw: Sequence[CircumplexPoint], norm: Sequence[CircumplexPoint]) -> str:
    rows = [
        (r.subcorpus, r.emotion, fmt(r.valence), fmt(r.arousal), fmt(n.valence), fmt(n.arousal))
        for r, n in zip(raw, norm)
    ]
    return _csv(("subcorpus", "emotion", "raw_valence", "raw_arousal", "norm_valence", "norm_arousal"), rows)


def centroids_csv(report: CentroidReport) -> str:
    rows = [
        (e, fmt(report.centroid[e][0]), fmt(report.centroid[e][1]), fmt(d))
        for e, d in report.ranked()
    ]
    return _csv(("emotion", "cv", "ca", "distance_sum"), rows)


def aggregates_csv(aggs: Mapping[str, tuple[float, float]]) -> str:
    return _csv(("subcorpus", "positivity", "engagement"), ((n, fmt(v), fmt(a)) for n, (v, a) in aggs.items()))


# -- census ------------------------------------------------------------------

def census(
    docs: Iterable[Document], regions: Sequence[RegionSpec], emotions: Sequence[str]
) -> tuple[list[str], list[list]]:
    """Emotion x region document counts with an ``All`` column and a total row."""
    zone_region = {tz: r.name for r in regions for tz in r.timezones}
    counts: Counter = Counter()
    for doc in docs:
        counts[doc.emotion, "All"] += 1
        region = zone_region.get(doc.timezone)
        if region is not None:
            counts[doc.emotion, region] += 1
    columns = [r.name for r in regions] + ["All"]
    rows = [[e.capitalize(), *(counts[e, c] for c in columns)] for e in emotions]
    rows.append(["Total", *(sum(r[i + 1] for r in rows) for i in range(len(columns)))])
    return ["Emotion", *columns], rows


def format_table(header: Sequence[str], rows: Sequence[Sequence], total_row: bool = False) -> str:
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = []
    for n, row in enumerate(cells):
        first = row[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join([first, *rest]))
        if n == 0 or (total_row and n == len(cells) - 2):
            lines.append("-" * len(lines[-1]))
    return "\n".join(lines)


# -- SVG ---------------------------------------------------------------------

class _Axes:
    """Affine map from data (valence, arousal) to SVG pixel coordinates."""

    def __init__(self, xs: Sequence[float], ys: Sequence[float], size: int = 640, margin: int = 60):
        extent = max([abs(v) for v in (*xs, *ys)] + [0.0])
        self.extent = 1.1 * extent if extent > 0 else 0.05
        self.size = size
        self.margin = margin
        self.scale = (size - 2 * margin) / (2 * self.extent)

    def x(self, v: float) -> float:
        return self.margin + (v + self.extent) * self.scale

    def y(self, a: float) -> float:
        return self.size - self.margin - (a + self.extent) * self.scale


def scatter_svg(
    title: str,
    markers: Sequence[tuple[str, str, float, float]],
    xlabel: str = "valence",
    ylabel: str = "arousal",
) -> str:
    """Labelled scatter plot. ``markers`` are ``(group, label, x, y)``; each
    group gets its own colour and a legend entry."""
    ax = _Axes([m[2] for m in markers], [m[3] for m in markers])
    groups = list(dict.fromkeys(m[0] for m in markers))
    colour = {g: PALETTE[i % len(PALETTE)] for i, g in enumerate(groups)}
    s, mg = ax.size, ax.margin
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">',
        f'<rect width="{s}" height="{s}" fill="white"/>',
        f'<text x="{s / 2:.3f}" y="24" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<line class="axis" x1="{mg}" y1="{ax.y(0):.3f}" x2="{s - mg}" y2="{ax.y(0):.3f}" stroke="black"/>',
        f'<line class="axis" x1="{ax.x(0):.3f}" y1="{mg}" x2="{ax.x(0):.3f}" y2="{s - mg}" stroke="black"/>',
        f'<text x="{s - mg}" y="{ax.y(0) - 6:.3f}" text-anchor="end" font-size="12">{escape(xlabel)}</text>',
        f'<text x="{ax.x(0) + 6:.3f}" y="{mg - 6}" font-size="12">{escape(ylabel)}</text>',
        f'<text x="{mg}" y="{s - mg + 18}" font-size="10">{fmt(-ax.extent)}</text>',
        f'<text x="{s - mg}" y="{s - mg + 18}" text-anchor="end" font-size="10">{fmt(ax.extent)}</text>',
    ]
    for group, label, x, y in markers:
        cx, cy = ax.x(x), ax.y(y)
        out.append(
            f'<g class="point" data-group={quoteattr(group)} data-label={quoteattr(label)} '
            f'data-x="{fmt(x)}" data-y="{fmt(y)}">'
            f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="4" fill="{colour[group]}"/>'
            f'<text x="{cx + 5:.3f}" y="{cy - 5:.3f}" font-size="9">{escape(label)}</text></g>'
        )
    if len(groups) > 1:
        for i, g in enumerate(groups):
            y = mg + 14 * i
            out.append(
                f'<g class="legend"><circle cx="{s - mg + 8}" cy="{y}" r="4" fill="{colour[g]}"/>'
                f'<text x="{s - mg + 16}" y="{y + 4}" font-size="9">{escape(g)}</text></g>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def circumplex_svg(points: Sequence[CircumplexPoint]) -> str:
    return scatter_svg(
        "Circumplex of all subcorpora",
        [(p.subcorpus, p.emotion, p.valence, p.arousal) for p in points],
    )


def aggregates_svg(aggs: Mapping[str, tuple[float, float]]) -> str:
    return scatter_svg(
        "Aggregate positivity and engagement",
        [(name, name, v, a) for name, (v, a) in aggs.items()],
        xlabel="positivity",
        ylabel="engagement",
    )


def centroids_svg(report: CentroidReport) -> str:
    return scatter_svg(
        "Centroid emotion circumplex",
        [("centroid", e, *report.centroid[e]) for e in sorted(report.centroid)],
    )


# -- manifest ----------------------------------------------------------------

def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: Path, config: Mapping, files: Iterable[Path]) -> Path:
    """Record the run config and a content hash of every output file."""
    out_dir = Path(out_dir)
    manifest = {
        "config": dict(config),
        "files": {p.relative_to(out_dir).as_posix(): sha256_file(p) for p in sorted(files)},
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
