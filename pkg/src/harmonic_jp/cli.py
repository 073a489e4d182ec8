"""Command line: enumerate, census, stats, verify.

Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .census import census, default_workers, density_table, is_prime
from .checkpoint import CheckpointError
from .enumerator import ConsistencyError, EnumConfig, enumerate_jp
from .oracle import ORACLE_BOUND, naive_jp
from .reporting import (
    load_summaries,
    write_census,
    write_density,
    write_elements,
    write_stats,
    write_summary,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("harmonic_jp")


class UsageError(Exception):
    pass


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_manifest(path: Path, command: str, params: dict, started: str, outputs: list, checkpoint=None) -> None:
    manifest = {
        "command": command,
        "parameters": params,
        "version": __version__,
        "started": started,
        "finished": _now(),
        "input_checkpoint": str(checkpoint) if checkpoint else None,
        "outputs": [str(p) for p in outputs],
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def cmd_enumerate(args) -> int:
    p = args.prime
    if p < 3 or not is_prime(p):
        raise UsageError(f"{p} is not an odd prime")
    started = _now()
    config = EnumConfig(
        target_depth=args.target_depth,
        max_depth=args.max_depth,
        max_seconds=args.max_seconds,
        checkpoint=args.checkpoint,
        resume=args.resume,
        keep_elements=args.elements is not None,
    )
    if args.resume and (args.checkpoint is None or not args.checkpoint.exists()):
        raise UsageError("--resume needs an existing --checkpoint file")
    summary = enumerate_jp(p, config)
    state = "complete" if summary.complete else "incomplete (lower bounds)"
    print(f"p = {p}: {state}")
    print(f"|J_p| = {summary.cardinality}")
    print(f"M_p = {summary.extinction_time}")
    print("valuations: " + ", ".join(f"{k}: {v}" for k, v in summary.valuation_histogram.items()))
    if summary.valuation3_blocks:
        print("valuation-3 blocks: " + ", ".join(map(str, summary.valuation3_blocks)))
    outputs = []
    if args.out:
        write_summary(summary, args.out)
        outputs.append(args.out)
    if args.elements:
        write_elements(summary, args.elements)
        outputs.append(args.elements)
    if outputs:
        params = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}
        write_manifest(_manifest_path(outputs[0]), "enumerate", params, started, outputs, args.checkpoint if args.resume else None)
    return EXIT_OK


def cmd_census(args) -> int:
    if not (5 <= args.lo < args.hi):
        raise UsageError("need 5 <= --from < --to")
    started = _now()
    t0 = time.monotonic()
    records = census(args.lo, args.hi, workers=args.workers)
    table = density_table(records, args.lo, args.hi, args.interval_size)
    outputs = []
    if args.out:
        out = args.out
        write_census(records, out)
        density = out.with_name(out.stem + ".density.csv")
        write_density(table, density)
        outputs = [out, density]
        params = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}
        write_manifest(_manifest_path(out), "census", params, started, outputs)
    print(f"primes in [{args.lo}, {args.hi}]: {table.primes}")
    print(f"harmonic: {table.harmonic}  ratio {table.ratio:.5f}  (1/e = 0.36788)")
    if len(table.rows) > 1:
        for r in table.rows:
            print(f"  [{r.start}, {r.end}]  {r.harmonic}/{r.primes}  {r.ratio:.5f}")
    log.info("census took %.1fs", time.monotonic() - t0)
    return EXIT_OK


def cmd_stats(args) -> int:
    if not args.summaries.is_dir():
        raise OSError(f"{args.summaries} is not a directory")
    started = _now()
    stats = load_summaries(args.summaries)
    for err in stats.errors:
        print(f"error: {err}", file=sys.stderr)
    if not stats.summaries:
        print("warning: no summaries found", file=sys.stderr)
    written = write_stats(stats, args.out)
    params = {"summaries": str(args.summaries), "out": str(args.out)}
    write_manifest(Path(args.out) / "manifest.json", "stats", params, started, written)
    print(f"{len(stats.summaries)} summaries -> {args.out}")
    for c, n, pct in stats.distribution()[:16]:
        print(f"  |J_p| = {c}: {n} ({pct}%)")
    consecutive = stats.consecutive_valuation3()
    print(f"valuation-3 parent/child pairs: {len(consecutive)}")
    return EXIT_MISMATCH if stats.errors else EXIT_OK


def verify(p: int, xmax: int) -> tuple[bool, list[tuple[int, int]], list[str]]:
    """Compare the enumerator against the exact oracle on [1, xmax]."""
    oracle = naive_jp(p, xmax)
    levels = 1
    while p**levels <= xmax:
        levels += 1
    problems = []
    try:
        summary = enumerate_jp(p, EnumConfig(target_depth=levels, max_depth=levels, keep_elements=True))
    except ConsistencyError as e:
        return False, oracle, [f"enumerator consistency failure: {e}"]
    fast = [(n, v) for n, v in summary.elements if n <= xmax]
    want = {n: v for n, v in oracle}
    got = {n: v for n, v in fast}
    for n in sorted(set(want) | set(got)):
        if n not in got:
            problems.append(f"n={n} missing from enumerator (oracle valuation {want[n]})")
        elif n not in want:
            problems.append(f"n={n} reported by enumerator but not by oracle")
        elif str(want[n]) != got[n]:
            problems.append(f"n={n}: valuation {got[n]} vs oracle {want[n]}")
    return not problems, oracle, problems


def cmd_verify(args) -> int:
    p = args.prime
    if p < 3 or not is_prime(p):
        raise UsageError(f"{p} is not an odd prime")
    if args.xmax > ORACLE_BOUND:
        raise UsageError(f"--xmax above the oracle bound {ORACLE_BOUND}")
    ok, oracle, problems = verify(p, args.xmax)
    print(f"oracle J_{p} cap [1, {args.xmax}]: " + ", ".join(f"{n} (v={v})" for n, v in oracle))
    for line in problems:
        print("MISMATCH " + line)
    print("pass" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="harmonic-jp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="enumerate J_p for one prime")
    e.add_argument("--prime", type=int, required=True)
    e.add_argument("--target-depth", type=int, default=16)
    e.add_argument("--max-depth", type=int)
    e.add_argument("--max-seconds", type=float)
    e.add_argument("--checkpoint", type=Path)
    e.add_argument("--resume", action="store_true")
    e.add_argument("--out", type=Path, help="summary file")
    e.add_argument("--elements", type=Path, help="also write every element as a digit path")
    e.set_defaults(func=cmd_enumerate)

    c = sub.add_parser("census", help="count harmonic primes in a range")
    c.add_argument("--from", dest="lo", type=int, required=True)
    c.add_argument("--to", dest="hi", type=int, required=True)
    c.add_argument("--workers", type=int, default=None)
    c.add_argument("--interval-size", type=int, default=0)
    c.add_argument("--out", type=Path)
    c.set_defaults(func=cmd_census)

    s = sub.add_parser("stats", help="aggregate a directory of summaries")
    s.add_argument("--summaries", type=Path, required=True)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_stats)

    v = sub.add_parser("verify", help="check the enumerator against exact rationals")
    v.add_argument("--prime", type=int, required=True)
    v.add_argument("--xmax", type=int, default=10**4)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "workers", 1) is None:
        args.workers = default_workers()
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, CheckpointError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
