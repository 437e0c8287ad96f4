"""Corpus ingestion, deduplication, regional partitioning and balanced sampling.

Input corpora are JSON-lines files, one document per line::

    {"id": "1", "text": "so happy today", "emotion": "happy",
     "timezone": "London", "created_at": "2012-10-19T08:00:00Z"}
"""

from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)

#: The twelve keywords analysed, in table order.
EMOTIONS: tuple[str, ...] = (
    "angry",
    "ashamed",
    "calm",
    "depressed",
    "excited",
    "happy",
    "interested",
    "sad",
    "scared",
    "sleepy",
    "stressed",
    "surprised",
)

REQUIRED_FIELDS = ("id", "text", "emotion", "timezone", "created_at")


class ConfigError(ValueError):
    """Invalid region config, generator spec or run parameters."""


class InsufficientDocuments(ValueError):
    """Raised when an emotion has fewer documents than a sample needs."""

    def __init__(self, emotion: str | None, available: int, required: int, subcorpus: str | None = None):
        self.emotion = emotion
        self.available = available
        self.required = required
        self.subcorpus = subcorpus
        where = f" in subcorpus {subcorpus!r}" if subcorpus else ""
        super().__init__(
            f"emotion {emotion!r}{where} has {available} documents, {required} required"
        )


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    emotion: str
    timezone: str
    created_at: datetime

    def sort_key(self) -> tuple[datetime, str]:
        return (self.created_at, self.id)

    def to_record(self) -> dict:
        ts = self.created_at.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        return {
            "id": self.id,
            "text": self.text,
            "emotion": self.emotion,
            "timezone": self.timezone,
            "created_at": ts,
        }


@dataclass(frozen=True)
class RegionSpec:
    name: str
    timezones: frozenset[str]


@dataclass
class Subcorpus:
    name: str
    per_emotion: dict[str, list[Document]]
    n_per_emotion: int = 1000

    @property
    def emotions(self) -> list[str]:
        return list(self.per_emotion)

    def documents(self) -> list[Document]:
        """All documents, emotion by emotion, in sampled order."""
        return [doc for docs in self.per_emotion.values() for doc in docs]

    def __len__(self) -> int:
        return sum(len(docs) for docs in self.per_emotion.values())


@dataclass(frozen=True)
class LineError:
    lineno: int
    reason: str


@dataclass
class ParseResult:
    documents: list[Document]
    errors: list[LineError] = field(default_factory=list)
    unknown_labels: Counter = field(default_factory=Counter)

    @property
    def skipped(self) -> int:
        return len(self.errors) + sum(self.unknown_labels.values())


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_corpus(stream: Iterable[str], emotions: Sequence[str] = EMOTIONS) -> ParseResult:
    """Parse a JSON-lines record stream into documents.

    Malformed lines are recorded in ``errors`` with their 1-based line
    number; records whose label is outside ``emotions`` are tallied in
    ``unknown_labels``. Both are skipped. I/O errors on the stream propagate.
    """
    keyset = {e.casefold() for e in emotions}
    result = ParseResult(documents=[])
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            result.errors.append(LineError(lineno, f"invalid JSON: {exc.msg}"))
            continue
        if not isinstance(record, dict):
            result.errors.append(LineError(lineno, "record is not an object"))
            continue
        missing = [f for f in REQUIRED_FIELDS if f not in record]
        if missing:
            result.errors.append(LineError(lineno, f"missing field(s): {', '.join(missing)}"))
            continue
        text = record["text"]
        if not isinstance(text, str) or not text.strip():
            result.errors.append(LineError(lineno, "empty text"))
            continue
        try:
            created_at = parse_timestamp(str(record["created_at"]))
        except ValueError:
            result.errors.append(LineError(lineno, f"bad created_at: {record['created_at']!r}"))
            continue
        label = str(record["emotion"]).casefold()
        if label not in keyset:
            result.unknown_labels[label] += 1
            continue
        result.documents.append(
            Document(
                id=str(record["id"]),
                text=text,
                emotion=label,
                timezone=str(record["timezone"]),
                created_at=created_at,
            )
        )
    if result.errors:
        logger.warning("skipped %d malformed line(s)", len(result.errors))
    if result.unknown_labels:
        logger.info("skipped %d record(s) with unknown labels", sum(result.unknown_labels.values()))
    return result


def read_corpus(path: str | Path, emotions: Sequence[str] = EMOTIONS) -> ParseResult:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh, emotions)


def write_corpus(docs: Iterable[Document], fh: IO[str]) -> None:
    for doc in docs:
        fh.write(json.dumps(doc.to_record(), ensure_ascii=False, sort_keys=True))
        fh.write("\n")


def normalize_text(text: str) -> str:
    """Duplicate-detection key: case-folded, whitespace collapsed."""
    return " ".join(text.casefold().split())


def dedupe(docs: Iterable[Document]) -> list[Document]:
    """Drop exact duplicates of normalized text, keeping first occurrences."""
    seen: set[str] = set()
    out = []
    for doc in docs:
        key = normalize_text(doc.text)
        if key in seen:
            continue
        seen.add(key)
        out.append(doc)
    return out


def load_regions(path: str | Path | None = None) -> list[RegionSpec]:
    """Load a region config mapping region name to a list of timezone names.

    With no path, the bundled Asia / Europe / NA definitions are used.
    """
    if path is None:
        raw = resources.files("emocirc").joinpath("data/regions.json").read_text(encoding="utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    try:
        mapping = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"region config is not valid JSON: {exc}") from exc
    if not isinstance(mapping, dict) or not mapping:
        raise ConfigError("region config must be a non-empty object")
    regions = []
    owner: dict[str, str] = {}
    for name, zones in mapping.items():
        if not isinstance(zones, list) or not zones:
            raise ConfigError(f"region {name!r} needs a non-empty timezone list")
        for tz in zones:
            if tz in owner:
                raise ConfigError(f"timezone {tz!r} is in both {owner[tz]!r} and {name!r}")
            owner[tz] = name
        regions.append(RegionSpec(name, frozenset(zones)))
    return regions


def partition_region(docs: Iterable[Document], region: RegionSpec) -> list[Document]:
    if not region.timezones:
        raise ConfigError(f"region {region.name!r} has no timezones")
    return [doc for doc in docs if doc.timezone in region.timezones]


def modulus_sample(docs: Sequence, n: int, start: int = 0, emotion: str | None = None) -> list:
    """Take ``n`` equally spaced items at stride ``len(docs) // n`` from ``start``."""
    if n < 1:
        raise ValueError("n must be positive")
    if len(docs) < n:
        raise InsufficientDocuments(emotion, len(docs), n)
    stride = len(docs) // n
    if not 0 <= start < stride:
        raise ValueError(f"start {start} outside [0, {stride})")
    return list(docs[start : start + stride * n : stride])


def _group(docs: Iterable[Document], emotions: Sequence[str]) -> dict[str, list[Document]]:
    groups: dict[str, list[Document]] = defaultdict(list)
    for doc in docs:
        groups[doc.emotion].append(doc)
    return {e: sorted(groups.get(e, []), key=Document.sort_key) for e in emotions}


def build_subcorpus(
    docs: Iterable[Document],
    name: str,
    n_per_emotion: int = 1000,
    emotions: Sequence[str] = EMOTIONS,
) -> Subcorpus:
    per_emotion = {}
    for emotion, group in _group(docs, emotions).items():
        try:
            per_emotion[emotion] = modulus_sample(group, n_per_emotion, 0, emotion)
        except InsufficientDocuments as exc:
            raise InsufficientDocuments(emotion, exc.available, exc.required, name) from None
    return Subcorpus(name, per_emotion, n_per_emotion)


def control_starts(strides: Sequence[int], seed: int, count: int) -> list[list[int]]:
    """Start offsets for each control (outer) and emotion (inner).

    Each control gets its own child stream of ``SeedSequence(seed)``.
    """
    streams = np.random.SeedSequence(seed).spawn(count)
    starts = []
    for ss in streams:
        rng = np.random.default_rng(ss)
        starts.append([int(rng.integers(0, s)) for s in strides])
    return starts


def make_controls(
    docs: Iterable[Document],
    count: int = 6,
    seed: int = 0,
    n_per_emotion: int = 1000,
    emotions: Sequence[str] = EMOTIONS,
) -> list[Subcorpus]:
    """Region-agnostic subcorpora named ``control1`` .. ``control{count}``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    groups = _group(docs, emotions)
    for emotion, group in groups.items():
        if len(group) < n_per_emotion:
            raise InsufficientDocuments(emotion, len(group), n_per_emotion, "control")
    strides = [len(groups[e]) // n_per_emotion for e in emotions]
    controls = []
    for i, starts in enumerate(control_starts(strides, seed, count), start=1):
        per_emotion = {
            e: modulus_sample(groups[e], n_per_emotion, start, e)
            for e, start in zip(emotions, starts)
        }
        controls.append(Subcorpus(f"control{i}", per_emotion, n_per_emotion))
    return controls


# -- synthetic corpora -------------------------------------------------------

SYNTHETIC_EPOCH = datetime(2012, 10, 19, tzinfo=timezone.utc)


def make_profiles(
    emotions: Sequence[str] = EMOTIONS, vocab_size: int = 50, overlap: float = 0.0
) -> dict[str, list[str]]:
    """Per-emotion vocabularies sharing ``round(overlap * vocab_size)`` words."""
    if vocab_size < 1:
        raise ConfigError("vocab_size must be >= 1")
    if not 0.0 <= overlap <= 1.0:
        raise ConfigError("overlap must lie in [0, 1]")
    shared = [f"common{i}" for i in range(round(overlap * vocab_size))]
    return {
        e: shared + [f"{e}{i}" for i in range(vocab_size - len(shared))] for e in emotions
    }


def generate_synthetic(
    profiles: Mapping[str, Sequence[str]],
    n_per_emotion: int,
    seed: int = 0,
    doc_length: tuple[int, int] = (8, 15),
    timezones: Sequence[str] = ("Tokyo", "London", "Eastern Time (US & Canada)"),
) -> list[Document]:
    """Seeded corpus whose documents draw words only from their emotion's profile.

    Every document also contains its label keyword once. Emotions are
    interleaved and the i-th document of each emotion gets
    ``timezones[i % len(timezones)]``, so regions stay balanced.
    """
    if not profiles:
        raise ConfigError("no profiles given")
    for emotion, words in profiles.items():
        if not words:
            raise ConfigError(f"empty vocabulary profile for {emotion!r}")
    lo, hi = doc_length
    if not 1 <= lo <= hi:
        raise ConfigError("doc_length must satisfy 1 <= min <= max")
    if not timezones:
        raise ConfigError("at least one timezone required")
    rng = np.random.default_rng(seed)
    vocab = {e: list(words) for e, words in profiles.items()}
    docs = []
    serial = 0
    for i in range(n_per_emotion):
        for emotion, words in vocab.items():
            length = int(rng.integers(lo, hi + 1))
            tokens = [words[j] for j in rng.integers(0, len(words), size=length)]
            tokens.insert(int(rng.integers(0, length + 1)), emotion)
            docs.append(
                Document(
                    id=f"syn{serial:08d}",
                    text=" ".join(tokens),
                    emotion=emotion,
                    timezone=timezones[i % len(timezones)],
                    created_at=SYNTHETIC_EPOCH + timedelta(seconds=serial),
                )
            )
            serial += 1
    return docs


def load_generator_spec(path: str | Path) -> dict:
    """Read a synthetic-corpus spec and return keyword arguments for
    :func:`generate_synthetic` (``profiles`` already expanded).

    Recognised keys: ``emotions``, ``n_per_emotion``, ``vocab_size``,
    ``overlap``, ``profiles`` (explicit word lists, overrides the previous
    two), ``doc_length`` ([min, max]) and ``timezones``.
    """
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"generator spec is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise ConfigError("generator spec must be an object")
    known = {"emotions", "n_per_emotion", "vocab_size", "overlap", "profiles", "doc_length", "timezones"}
    unknown = set(spec) - known
    if unknown:
        raise ConfigError(f"unknown generator spec key(s): {sorted(unknown)}")
    if "profiles" in spec:
        profiles = spec["profiles"]
        if not isinstance(profiles, dict):
            raise ConfigError("profiles must map emotion to a word list")
    else:
        profiles = make_profiles(
            spec.get("emotions", EMOTIONS),
            int(spec.get("vocab_size", 50)),
            float(spec.get("overlap", 0.0)),
        )
    n = spec.get("n_per_emotion", 100)
    if not isinstance(n, int) or n < 1:
        raise ConfigError("n_per_emotion must be a positive integer")
    kwargs = {"profiles": profiles, "n_per_emotion": n}
    if "doc_length" in spec:
        kwargs["doc_length"] = tuple(spec["doc_length"])
    if "timezones" in spec:
        kwargs["timezones"] = list(spec["timezones"])
    return kwargs
