import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from emocirc import report
from emocirc.cli import main
from emocirc.corpus import EMOTIONS, generate_synthetic, make_profiles, write_corpus
from emocirc.report import sha256_file

SVG = "{http://www.w3.org/2000/svg}"


def write_synthetic(path, n, overlap=0.0, seed=0, vocab=50, **kw):
    docs = generate_synthetic(make_profiles(EMOTIONS, vocab, overlap), n, seed=seed, **kw)
    with open(path, "w", encoding="utf-8") as fh:
        write_corpus(docs, fh)
    return docs


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("run")
    corpus = root / "corpus.jsonl"
    write_synthetic(corpus, 300, overlap=0.7, seed=4)
    out = root / "out"
    code = main(["analyze", "--input", str(corpus), "--out", str(out), "--per-emotion", "50", "--seed", "3"])
    assert code == 0
    return out


def test_analyze_writes_all_outputs(small_run):
    names = sorted(p.stem for p in (small_run / "clustering").glob("*.csv"))
    assert names == ["Asia", "Europe", "NA"] + [f"control{i}" for i in range(1, 7)]
    for path in (small_run / "clustering").glob("*.csv"):
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["emotion", *EMOTIONS]
        assert [sum(map(int, r[1:])) for r in rows[1:]] == [50] * 12
    for name in ["points.csv", "centroids.csv", "aggregates.csv", "circumplex.svg", "aggregates.svg", "centroids.svg"]:
        assert (small_run / name).exists()


def test_points_and_centroid_tables(small_run):
    points = read_csv(small_run / "points.csv")
    assert len(points) == 9 * 12
    assert list(points[0]) == ["subcorpus", "emotion", "raw_valence", "raw_arousal", "norm_valence", "norm_arousal"]
    assert abs(sum(float(p["norm_valence"]) for p in points)) < 1e-9
    cents = read_csv(small_run / "centroids.csv")
    dists = [float(c["distance_sum"]) for c in cents]
    assert dists == sorted(dists) and len(cents) == 12
    assert list(cents[0]) == ["emotion", "cv", "ca", "distance_sum"]


def test_manifest_hashes_outputs(small_run):
    manifest = json.loads((small_run / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 3
    assert manifest["config"]["dims"] == 36
    assert len(manifest["files"]) == 9 + 6
    for rel, digest in manifest["files"].items():
        assert sha256_file(small_run / rel) == digest


def svg_markers(path):
    root = ET.parse(path).getroot()
    out = []
    for g in root.iter(f"{SVG}g"):
        if g.get("class") != "point":
            continue
        circle = g.find(f"{SVG}circle")
        out.append((g.get("data-group"), g.get("data-label"), float(circle.get("cx")), float(circle.get("cy"))))
    return out


def test_svg_markers_are_affine_in_csv_values(small_run):
    points = read_csv(small_run / "points.csv")
    markers = svg_markers(small_run / "circumplex.svg")
    assert len(markers) == len(points)
    assert [(m[0], m[1]) for m in markers] == [(p["subcorpus"], p["emotion"]) for p in points]
    v = np.array([float(p["norm_valence"]) for p in points])
    a = np.array([float(p["norm_arousal"]) for p in points])
    cx = np.array([m[2] for m in markers])
    cy = np.array([m[3] for m in markers])
    for data, pix in ((v, cx), (a, cy)):
        slope, icpt = np.polyfit(data, pix, 1)
        assert np.max(np.abs(slope * data + icpt - pix)) < 1e-3
    # arousal grows upward on screen
    assert np.polyfit(a, cy, 1)[0] < 0


def test_aggregate_and_centroid_svgs(small_run):
    aggs = read_csv(small_run / "aggregates.csv")
    markers = svg_markers(small_run / "aggregates.svg")
    assert [m[1] for m in markers] == [r["subcorpus"] for r in aggs]
    assert len(svg_markers(small_run / "centroids.svg")) == 12


def test_scatter_svg_escapes_labels():
    svg = report.scatter_svg("t", [("a&b", "<x>", 0.1, -0.1)])
    root = ET.fromstring(svg)
    (g,) = [g for g in root.iter(f"{SVG}g") if g.get("class") == "point"]
    assert g.get("data-group") == "a&b" and g.get("data-label") == "<x>"


def test_controls_of_mixed_corpus_sit_near_origin(tmp_path):
    corpus = tmp_path / "mixed.jsonl"
    write_synthetic(corpus, 300, overlap=1.0, seed=7)
    out = tmp_path / "out"
    assert main(["analyze", "--input", str(corpus), "--out", str(out), "--per-emotion", "100"]) == 0
    points = read_csv(out / "points.csv")
    spread = np.std([[float(p["norm_valence"]), float(p["norm_arousal"])] for p in points], axis=0)
    # each aggregate averages 12 points; allow four standard errors
    radius = 4 * np.linalg.norm(spread) / np.sqrt(12)
    for row in read_csv(out / "aggregates.csv"):
        if row["subcorpus"].startswith("control"):
            assert np.hypot(float(row["positivity"]), float(row["engagement"])) <= radius


def test_one_region_no_controls(tmp_path):
    corpus = tmp_path / "c.jsonl"
    write_synthetic(corpus, 40, seed=1)
    regions = tmp_path / "regions.json"
    regions.write_text(json.dumps({"Asia": ["Tokyo"]}))
    out = tmp_path / "out"
    code = main(["analyze", "--input", str(corpus), "--regions", str(regions), "--controls", "0",
                 "--per-emotion", "10", "--out", str(out)])
    assert code == 0
    assert [p.name for p in (out / "clustering").iterdir()] == ["Asia.csv"]


def test_insufficient_documents_exit_2(tmp_path, capsys):
    corpus = tmp_path / "c.jsonl"
    write_synthetic(corpus, 30, seed=1)
    code = main(["analyze", "--input", str(corpus), "--per-emotion", "11", "--out", str(tmp_path / "o")])
    assert code == 2
    err = capsys.readouterr().err
    assert "'angry'" in err and "'Asia'" in err


def test_malformed_input_exit_1(tmp_path, capsys):
    corpus = tmp_path / "c.jsonl"
    write_synthetic(corpus, 30, seed=1)
    with corpus.open("a") as fh:
        fh.write("{oops\n")
    assert main(["analyze", "--input", str(corpus), "--per-emotion", "5", "--out", str(tmp_path / "o")]) == 1
    assert "line 361" in capsys.readouterr().err
    assert main(["stats", "--input", str(corpus)]) == 1
    code = main(["analyze", "--input", str(corpus), "--per-emotion", "5", "--controls", "1",
                 "--skip-malformed", "--out", str(tmp_path / "o")])
    assert code == 0


def test_missing_input_exit_1(tmp_path):
    assert main(["stats", "--input", str(tmp_path / "nope.jsonl")]) == 1


def test_stats_empty_file(tmp_path, capsys):
    corpus = tmp_path / "empty.jsonl"
    corpus.write_text("")
    assert main(["stats", "--input", str(corpus)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ["Emotion", "Asia", "Europe", "NA", "All"]
    assert lines[-1].split() == ["Total", "0", "0", "0", "0"]


def test_stats_counts_match_generator(tmp_path, capsys):
    corpus = tmp_path / "c.jsonl"
    zones = ["Tokyo", "London", "Eastern Time (US & Canada)", "Nowhere"]
    write_synthetic(corpus, 8, seed=2, timezones=zones)
    out_csv = tmp_path / "census.csv"
    assert main(["stats", "--input", str(corpus), "--csv", str(out_csv)]) == 0
    rows = read_csv(out_csv)
    # 8 docs per emotion cycling over 4 zones: 2 per zone, "Nowhere" in no region
    assert rows[0] == {"Emotion": "Angry", "Asia": "2", "Europe": "2", "NA": "2", "All": "8"}
    assert rows[-1] == {"Emotion": "Total", "Asia": "24", "Europe": "24", "NA": "24", "All": "96"}


def test_generate_command(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"n_per_emotion": 100, "vocab_size": 50, "overlap": 0.0}))
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["generate", "--spec", str(spec), "--seed", "5", "--out", str(a)]) == 0
    assert main(["generate", "--spec", str(spec), "--seed", "5", "--out", str(b)]) == 0
    assert len(a.read_text().splitlines()) == 1200
    assert a.read_bytes() == b.read_bytes()


def test_generate_invalid_spec(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"n_per_emotion": 0}))
    assert main(["generate", "--spec", str(spec), "--out", str(tmp_path / "x")]) == 1
    spec.write_text("not json")
    assert main(["generate", "--spec", str(spec), "--out", str(tmp_path / "x")]) == 1


def test_parallel_jobs_match_serial(tmp_path):
    corpus = tmp_path / "c.jsonl"
    write_synthetic(corpus, 60, overlap=0.5, seed=3)
    outs = []
    for jobs in ("1", "3"):
        out = tmp_path / f"out{jobs}"
        assert main(["analyze", "--input", str(corpus), "--per-emotion", "20", "--jobs", jobs, "--out", str(out)]) == 0
        outs.append(out)
    a, b = (json.loads((o / "manifest.json").read_text())["files"] for o in outs)
    assert a == b
