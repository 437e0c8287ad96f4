"""Command line interface: ``emocirc analyze | stats | generate``.

Exit codes: 0 success, 1 bad input or configuration, 2 too few documents.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import report
from .corpus import (
    EMOTIONS,
    ConfigError,
    InsufficientDocuments,
    dedupe,
    generate_synthetic,
    load_generator_spec,
    load_regions,
    write_corpus,
)
from .pipeline import MalformedInput, RunConfig, analyze, load_documents, summary_table
from .semspace import DEFAULT_DIMS

logger = logging.getLogger("emocirc")


def _emotions(value: str) -> tuple[str, ...]:
    return tuple(e.strip() for e in value.split(",") if e.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emocirc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="cmd", required=True)

    an = sub.add_parser("analyze", help="cluster subcorpora and build circumplex reports")
    an.add_argument("--input", required=True, type=Path)
    an.add_argument("--regions", type=Path, help="JSON region -> timezone list (default: Asia/Europe/NA)")
    an.add_argument("--emotions", type=_emotions, default=EMOTIONS, help="comma-separated keyword set")
    an.add_argument("--per-emotion", type=int, default=1000)
    an.add_argument("--controls", type=int, default=6)
    an.add_argument("--seed", type=int, default=0)
    an.add_argument("--dims", type=int, default=DEFAULT_DIMS)
    an.add_argument("--jobs", type=int, default=1, help="subcorpora clustered concurrently")
    an.add_argument("--out", required=True, type=Path)
    an.add_argument("--skip-malformed", action="store_true", help="skip bad lines instead of failing")

    st = sub.add_parser("stats", help="emotion x region document counts")
    st.add_argument("--input", required=True, type=Path)
    st.add_argument("--regions", type=Path)
    st.add_argument("--emotions", type=_emotions, default=EMOTIONS)
    st.add_argument("--dedupe", action="store_true", help="count after duplicate removal")
    st.add_argument("--csv", type=Path, help="also write the table as CSV")
    st.add_argument("--skip-malformed", action="store_true")

    gen = sub.add_parser("generate", help="write a synthetic labelled corpus")
    gen.add_argument("--spec", required=True, type=Path, help="JSON generator spec")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, type=Path)
    return parser


def cmd_analyze(args) -> int:
    config = RunConfig(
        input=args.input,
        out=args.out,
        regions=args.regions,
        emotions=args.emotions,
        per_emotion=args.per_emotion,
        controls=args.controls,
        seed=args.seed,
        dims=args.dims,
        jobs=args.jobs,
        skip_malformed=args.skip_malformed,
    )
    result = analyze(config)
    print(summary_table(result))
    print(f"\nwrote {len(result.files) + 1} files to {config.out}")
    return 0


def cmd_stats(args) -> int:
    config = RunConfig(
        input=args.input, out=Path("."), regions=args.regions,
        emotions=args.emotions, skip_malformed=args.skip_malformed,
    )
    docs = load_documents(config).documents
    if args.dedupe:
        docs = dedupe(docs)
    header, rows = report.census(docs, load_regions(args.regions), config.emotions)
    print(report.format_table(header, rows, total_row=True))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    return 0


def cmd_generate(args) -> int:
    kwargs = load_generator_spec(args.spec)
    docs = generate_synthetic(seed=args.seed, **kwargs)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        write_corpus(docs, fh)
    print(f"wrote {len(docs)} documents to {args.out}")
    return 0


COMMANDS = {"analyze": cmd_analyze, "stats": cmd_stats, "generate": cmd_generate}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.cmd](args)
    except InsufficientDocuments as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MalformedInput, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
