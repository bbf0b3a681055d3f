import argparse
import logging
import sys
from typing import List, Optional

from src.config import CACHE_DIR, CORPUS_DIR, JOBS, LOG_LEVEL, MAX_COSETS, ORACLE_MAX_ORDER
from src.errors import PGroupError, VerificationFailure
from src.graph import run_analysis
from src.group_core import format_table
from src.ingest import GroupDatabase, StructureCache, load_group
from src.oracle import run_oracle
from src.presentation import load_presentation, resolve_presentation
from src.report import MACHINE, TEXT, render, write_report
from src.theorem import scan_database

logger = logging.getLogger("pgroups")


def _progress(args) -> bool:
    return not args.quiet and sys.stderr.isatty()


# -----------------------------
# Subcommands
# -----------------------------

def cmd_analyze(args) -> int:
    entry = load_group(args.path, fmt=args.format, max_cosets=args.max_cosets)
    report = run_analysis(
        entry.table,
        jobs=args.jobs,
        with_conjugators=args.witness,
        cache=StructureCache(args.cache),
    )
    write_report(render(report, args.report), args.out)
    return 0


def cmd_verify_theorem(args) -> int:
    db = GroupDatabase.from_directory(args.directory, fmt=args.format, max_cosets=args.max_cosets)
    if args.order:
        db = db.with_order(args.order)
    cache = StructureCache(args.cache)
    if cache.enabled:
        # only the seeded conjugacy classes carry over into the scan
        hits = sum(cache.warm(t) for _, t in db.tables())
        logger.info("structure cache: %d of %d groups warm", hits, len(db))
    report = scan_database(db.tables(), jobs=args.jobs, progress=_progress(args), with_conjugators=args.witness)
    write_report(render(report, args.report), args.out)
    # scan_database raises on any disagreement, so reaching here means agreement
    return 0 if report.all_agree else VerificationFailure.exit_code


def cmd_oracle(args) -> int:
    db = GroupDatabase.from_directory(args.corpus, max_cosets=args.max_cosets)
    report = run_oracle(db.tables(), max_order=args.max_order, progress=_progress(args))
    write_report(render(report, args.report), args.out)
    return 0 if report.passed else VerificationFailure.exit_code


def cmd_resolve(args) -> int:
    t = resolve_presentation(load_presentation(args.path), max_cosets=args.max_cosets)
    write_report(format_table(t), args.out)
    return 0


# -----------------------------
# Argument parsing
# -----------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgroups",
        description="Class-preserving automorphisms of finite p-groups.",
    )
    parser.add_argument("--log-level", default=LOG_LEVEL, help="logging level (default: %(default)s)")
    parser.add_argument("--quiet", action="store_true", help="no progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, reports: bool = True) -> None:
        p.add_argument("--max-cosets", type=int, default=MAX_COSETS, help="coset enumeration limit")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        if reports:
            p.add_argument("--report", choices=[TEXT, MACHINE], default=TEXT)

    def search(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=["table", "presentation", "auto"], default="auto")
        p.add_argument("--jobs", type=int, default=JOBS, help="worker processes")
        p.add_argument("--cache", default=CACHE_DIR, help="structure cache directory (empty = off)")
        p.add_argument("--witness", action="store_true", help="include conjugator tables in witnesses")

    p = sub.add_parser("analyze", help="structure, automorphism orders and Out_c of one group")
    p.add_argument("path")
    common(p)
    search(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify-theorem", help="check the order-p^5 criterion on a directory of groups")
    p.add_argument("directory")
    p.add_argument("--order", type=int, default=0, help="only groups of this order (default: all)")
    common(p)
    search(p)
    p.set_defaults(func=cmd_verify_theorem)

    p = sub.add_parser("oracle", help="compare backtracking Aut_c with filtered brute-force Aut(G)")
    p.add_argument("--max-order", type=int, default=ORACLE_MAX_ORDER)
    p.add_argument("--corpus", default=CORPUS_DIR, help="group directory (default: bundled corpus)")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("resolve", help="print the multiplication table of a presentation")
    p.add_argument("path")
    common(p, reports=False)
    p.set_defaults(func=cmd_resolve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except PGroupError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
