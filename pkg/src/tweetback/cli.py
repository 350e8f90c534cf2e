"""Command-line interface.

Subcommands: ``verify`` (full pipeline, JSON report), ``extract``
(field extraction only), ``decode-id`` (Snowflake decode), ``evaluate``
(metrics over a labeled corpus). The exit code of ``verify`` encodes the
verdict so shell pipelines can branch without parsing JSON:
0 archived, 1 not found, 2 non-replayable; anything above 2 is an error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .evaluation import run_evaluation
from .extraction import extract_fields
from .matching import VerdictKind
from .ocr import OcrServiceConfig, load_text_document, ocr_image
from .pipeline import ConfigError, PipelineConfig, TransportMode, run_pipeline
from .snowflake import PreSnowflakeIdError, id_to_time
from .transport import TransportError

EXIT_ARCHIVED = 0
EXIT_NOT_FOUND = 1
EXIT_NON_REPLAYABLE = 2
EXIT_ERROR = 3
EXIT_USAGE = 64

OCR_TOKEN_ENV = "TWEETBACK_OCR_TOKEN"

_VERDICT_EXIT_CODES = {
    VerdictKind.ARCHIVED: EXIT_ARCHIVED,
    VerdictKind.NOT_FOUND: EXIT_NOT_FOUND,
    VerdictKind.NON_REPLAYABLE: EXIT_NON_REPLAYABLE,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="tweetback", description=__doc__)
    parser.add_argument("--version", action="version", version=f"tweetback {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="verify a screenshot against the Wayback Machine")
    _add_input_flags(verify)
    verify.add_argument("--threshold", type=float, default=0.80,
                        help="text-overlap score required for a match (default 0.80)")
    verify.add_argument("--window-hours", type=int, default=26,
                        help="half-width of the archival search window (default 26)")
    verify.add_argument("--fixtures", metavar="DIR", help="replay recorded HTTP fixtures")
    verify.add_argument("--record", metavar="DIR", help="hit the live web, recording fixtures")
    verify.add_argument("--json", metavar="PATH", help="also write the JSON report here")
    verify.add_argument("--top", type=int, default=5, metavar="N",
                        help="candidate scores to include in the report (default 5)")

    extract = commands.add_parser("extract", help="run field extraction only, print JSON")
    _add_input_flags(extract)

    decode = commands.add_parser("decode-id", help="decode a Snowflake tweet ID")
    decode.add_argument("tweet_id", type=int)

    evaluate = commands.add_parser("evaluate", help="score the pipeline over a labeled corpus")
    evaluate.add_argument("--corpus", required=True, metavar="DIR",
                          help="directory with ocr/, ground_truth.csv, and fixtures/")
    evaluate.add_argument("--json", metavar="PATH", help="also write the JSON report here")
    return parser


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--image", metavar="PATH", help="screenshot image to OCR")
    source.add_argument("--ocr-text", metavar="PATH", help="pre-extracted OCR text file")
    parser.add_argument("--ocr-endpoint", metavar="URL",
                        help=f"OCR service endpoint (token via ${OCR_TOKEN_ENV})")


def _load_document(args: argparse.Namespace):
    if args.ocr_text:
        return load_text_document(args.ocr_text)
    if not args.ocr_endpoint:
        raise UsageError("--image requires --ocr-endpoint")
    config = OcrServiceConfig(
        endpoint=args.ocr_endpoint, auth_token=os.environ.get(OCR_TOKEN_ENV)
    )
    return ocr_image(Path(args.image).read_bytes(), config)


def _transport_mode(args: argparse.Namespace) -> TransportMode:
    if args.fixtures and args.record:
        raise UsageError("--fixtures and --record are mutually exclusive")
    if args.fixtures:
        return TransportMode.fixture(args.fixtures)
    if args.record:
        return TransportMode.record(args.record)
    return TransportMode.live()


def _cmd_verify(args: argparse.Namespace) -> int:
    doc = _load_document(args)
    config = PipelineConfig(
        threshold=args.threshold,
        window_hours=args.window_hours,
        transport_mode=_transport_mode(args),
        top_scores=args.top,
    )
    report = run_pipeline(doc, config)
    payload = report.to_json()
    print(payload)
    if args.json:
        Path(args.json).write_text(payload + "\n", encoding="utf-8")
    return _VERDICT_EXIT_CODES[report.verdict.kind]


def _cmd_extract(args: argparse.Namespace) -> int:
    doc = _load_document(args)
    fields = extract_fields(doc)
    print(json.dumps({
        "source_id": doc.source_id,
        "handle": fields.handle.handle if fields.handle else None,
        "handle_complete": fields.handle.complete if fields.handle else None,
        "timestamp": fields.timestamp.as_datetime().isoformat() if fields.timestamp else None,
        "timestamp_has_time_of_day": (
            fields.timestamp.has_time_of_day if fields.timestamp else None
        ),
        "tweet_text": fields.tweet_text,
        "text_is_fallback": fields.text_is_fallback,
    }, indent=2, sort_keys=True, ensure_ascii=False))
    return 0


def _cmd_decode_id(args: argparse.Namespace) -> int:
    created = id_to_time(args.tweet_id)
    print(f"{args.tweet_id} -> {created.isoformat()}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    report = run_evaluation(args.corpus)
    print(report.to_text_table())
    if args.json:
        Path(args.json).write_text(report.to_json() + "\n", encoding="utf-8")
    return 0


_COMMANDS = {
    "verify": _cmd_verify,
    "extract": _cmd_extract,
    "decode-id": _cmd_decode_id,
    "evaluate": _cmd_evaluate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        parser.print_help(sys.stderr)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, PreSnowflakeIdError, TransportError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
