"""Command-line surface for evaluator workflows.

Files on disk are the system of record; every command is deterministic given
its inputs. Exit codes: 0 ok, 1 validation failure, 2 I/O failure, 3 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import socket
import sys
from dataclasses import dataclass
from pathlib import Path

from . import analysis, gridmodel, render, scoring, taxonomy
from .errors import (
    AnameterError,
    IncompatibleError,
    NoScoreError,
    NotApplicableError,
    ParseError,
    TaxonomyMismatchError,
    UnknownIdError,
    ValidationError,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_USAGE = 3

DATA_DIR_ENV = "ANAMETER_DATA_DIR"
TAXONOMY_FILE_SUFFIX = ".taxonomy.json"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage problems as exit code 3."""

    def error(self, message):
        raise _UsageError(message)


def _slug(text: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    return slug or "unnamed"


def evaluation_filename(system: str, evaluator: str, mode: gridmodel.Mode) -> str:
    return f"{_slug(system)}--{_slug(evaluator)}--{mode.value}.json"


@dataclass(frozen=True)
class CliConfig:
    """Resolved common options shared by every command."""

    data_dir: Path
    taxonomy_ref: str | None
    format: str  # markdown | json | csv
    decimals: int

    def __post_init__(self):
        if self.decimals < 0:
            raise _UsageError("--decimals must be >= 0")


def _config(args) -> CliConfig:
    raw = args.data_dir or os.environ.get(DATA_DIR_ENV) or "."
    return CliConfig(
        data_dir=Path(raw),
        taxonomy_ref=getattr(args, "taxonomy", None),
        format=getattr(args, "format", "markdown"),
        decimals=getattr(args, "decimals", 2),
    )


def load_registry(data_dir: Path) -> dict[tuple[str, str], taxonomy.Taxonomy]:
    """Bundled default plus any *.taxonomy.json files in the data directory."""
    registry = taxonomy.registry_from(taxonomy.default_taxonomy())
    if data_dir.is_dir():
        for path in sorted(data_dir.glob(f"*{TAXONOMY_FILE_SUFFIX}")):
            t = taxonomy.load_taxonomy(path.read_bytes())
            registry[(t.id, t.version)] = t
    return registry


def _resolve_taxonomy(config: CliConfig) -> taxonomy.Taxonomy:
    """--taxonomy accepts a taxonomy id or a path to a taxonomy document."""
    ref = config.taxonomy_ref
    if ref is None:
        return taxonomy.default_taxonomy()
    path = Path(ref)
    if path.is_file():
        return taxonomy.load_taxonomy(path.read_bytes())
    registry = load_registry(config.data_dir)
    matches = [t for (tid, _), t in sorted(registry.items()) if tid == ref]
    if not matches:
        known = ", ".join(sorted({tid for tid, _ in registry})) or "none"
        raise TaxonomyMismatchError(f"unknown taxonomy {ref!r} (known: {known})")
    return matches[-1]


def _read_evaluation(path: Path, data_dir: Path) -> tuple[gridmodel.Evaluation, taxonomy.Taxonomy]:
    raw = path.read_bytes()
    registry = load_registry(data_dir)
    e = gridmodel.load_evaluation(raw, registry.values())
    return e, registry[(e.taxonomy_id, e.taxonomy_version)]


def _emit(config: CliConfig, markdown: str, csv_text: str, doc: dict) -> None:
    if config.format == "json":
        sys.stdout.write(render.to_json(doc))
    elif config.format == "csv":
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(markdown)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_init(args) -> int:
    config = _config(args)
    mode = gridmodel.Mode(args.mode)
    t = _resolve_taxonomy(config)
    target = Path(args.out) if args.out else config.data_dir / evaluation_filename(
        args.system, args.evaluator, mode
    )
    if target.exists():
        raise FileExistsError(f"refusing to overwrite existing file: {target}")
    e = gridmodel.new_evaluation(t, args.system, args.evaluator, mode)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(gridmodel.save_evaluation(e))
    print(target)
    return EXIT_OK


def cmd_score(args) -> int:
    config = _config(args)
    e, t = _read_evaluation(Path(args.file), config.data_dir)
    report = scoring.score(e, t)
    _emit(
        config,
        render.render_score_markdown(report, config.decimals),
        render.render_score_csv(report, config.decimals),
        render.score_report_to_dict(report, config.decimals),
    )
    return EXIT_OK


def cmd_validate(args) -> int:
    path = Path(args.file)
    raw = path.read_bytes()
    try:
        head = json.loads(raw.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if isinstance(head, dict) and "factors" in head:
        taxonomy.load_taxonomy(raw)
        print(f"{path}: valid taxonomy document")
    else:
        _read_evaluation(path, _config(args).data_dir)
        print(f"{path}: valid evaluation document")
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _config(args)
    left, left_t = _read_evaluation(Path(args.left), config.data_dir)
    right, right_t = _read_evaluation(Path(args.right), config.data_dir)
    report = analysis.compare(scoring.score(left, left_t), scoring.score(right, right_t))
    _emit(
        config,
        render.render_comparison_markdown(report, config.decimals),
        render.render_comparison_csv(report, config.decimals),
        render.comparison_to_dict(report, config.decimals),
    )
    return EXIT_OK


def cmd_merge(args) -> int:
    config = _config(args)
    loaded = [_read_evaluation(Path(f), config.data_dir) for f in args.files]
    evals = [e for e, _ in loaded]
    t = loaded[0][1]
    merged = analysis.merge(evals, t)
    _emit(
        config,
        render.render_merged_markdown(merged, config.decimals),
        render.render_merged_csv(merged, config.decimals),
        render.merged_to_dict(merged, config.decimals),
    )
    return EXIT_OK


def cmd_export(args) -> int:
    config = _config(args)
    e, t = _read_evaluation(Path(args.file), config.data_dir)
    report = scoring.score(e, t)
    if config.format == "json":
        text = render.to_json(render.score_report_to_dict(report, config.decimals))
    elif config.format == "csv":
        text = render.render_score_csv(report, config.decimals)
    else:
        text = render.render_score_markdown(report, config.decimals)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    config = _config(args)
    config.data_dir.mkdir(parents=True, exist_ok=True)
    # Fail fast with a clean message instead of uvicorn's traceback.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        probe.close()

    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    app = create_app(config.data_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--data-dir",
        help=f"evaluation/taxonomy directory (default: ${DATA_DIR_ENV} or .)",
    )
    common.add_argument(
        "--format", choices=("markdown", "json", "csv"), default="markdown",
        help="output format for reports",
    )
    common.add_argument(
        "--decimals", type=int, default=2,
        help="decimal places for rendered percentages",
    )

    parser = _Parser(prog="anameter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", parents=[common], help="create an empty evaluation file")
    p.add_argument("system")
    p.add_argument("evaluator")
    p.add_argument("mode", choices=[m.value for m in gridmodel.Mode])
    p.add_argument("--taxonomy", help="taxonomy id or path (default: bundled v1.0)")
    p.add_argument("--out", help="explicit output path")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("score", parents=[common], help="score an evaluation file")
    p.add_argument("file")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("validate", parents=[common],
                       help="validate a taxonomy or evaluation document")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare", parents=[common], help="diff two evaluations")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("merge", parents=[common],
                       help="mean-combine several evaluators' files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("export", parents=[common], help="write a report to a file")
    p.add_argument("file")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP API and web UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui-dir", help="built web UI directory to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, TaxonomyMismatchError, UnknownIdError,
            NotApplicableError, IncompatibleError, NoScoreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileExistsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except AnameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
