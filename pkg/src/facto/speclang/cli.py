"""Command-line entry point ``facto``."""

from __future__ import annotations

import sys
from pathlib import Path

from ..errors import FactoError, LoadError, SpecSyntaxError
from .commands import COMMANDS, UsageError, build_parser, read_document, run_namespace
from .corpus import DOCUMENTS, corpus_listing, replay, run_check, run_corpus
from .generate import generate
from .report import emit_report, to_json


def _write(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _dispatch(ns) -> int:
    if ns.command in COMMANDS:
        r = run_namespace(ns)
        _write(emit_report(r, ns.format), ns.out)
        return r.exit_code
    if ns.command == "corpus":
        if ns.list:
            _write(to_json(corpus_listing()).encode("utf-8"), ns.out)
            return 0
        if ns.show:
            if ns.show not in DOCUMENTS:
                raise UsageError(f"no corpus document {ns.show!r}")
            _write(read_document("corpus:" + ns.show).encode("utf-8"), ns.out)
            return 0
        if ns.run:
            r = run_check(ns.run)
            _write(emit_report(r, ns.format), ns.out)
            return r.exit_code
        reports = run_corpus()
        _write(emit_report(reports, ns.format), ns.out)
        return reports[0].exit_code
    if ns.command == "replay":
        r = replay(ns.report)
        _write(emit_report(r, ns.format), ns.out)
        return r.exit_code
    if ns.command == "generate-compose":
        try:
            text = generate(ns.poset, ns.finset, ns.builtin, ns.name)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _write(text.encode("utf-8"), ns.out)
        return 0
    raise UsageError(f"unknown command {ns.command}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 3
    try:
        return _dispatch(ns)
    except SpecSyntaxError as exc:
        print(f"facto: syntax error: {exc}", file=sys.stderr)
    except (LoadError, UsageError) as exc:
        print(f"facto: {exc}", file=sys.stderr)
    except FactoError as exc:
        print(f"facto: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"facto: {exc}", file=sys.stderr)
    return 3


if __name__ == "__main__":
    sys.exit(main())
