"""Summary/element/census file formats and aggregate statistics over many primes."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .census import INV_E, CensusRecord, DensityTable
from .enumerator import JpSummary, digits_of

SUMMARY_FORMAT = "#harmonic-jp-summary v1"
ELEMENTS_FORMAT = "#harmonic-jp-elements v1"
CENSUS_FORMAT = "#harmonic-jp-census v1"
DENSITY_FORMAT = "#harmonic-jp-density v1"
STATS_FORMAT = "#harmonic-jp-stats v1"


class FormatError(ValueError):
    pass


def _join(xs) -> str:
    return ",".join(str(x) for x in xs)


def _split_ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x]


def summary_text(s: JpSummary) -> str:
    hist = ",".join(f"{k}:{v}" for k, v in s.valuation_histogram.items())
    v3 = ",".join(f"{m}:{n}" for m, n in zip(s.valuation3_blocks, s.valuation3_elements))
    high = ",".join(f"{m}:{n}:{v}" for m, n, v in s.high_valuation)
    rows = [
        ("prime", s.prime),
        ("complete", int(s.complete)),
        ("cardinality", s.cardinality),
        ("extinction_time", s.extinction_time),
        ("deepest_block", s.deepest_block),
        ("target_depth", s.target_depth),
        ("series_N", s.series_N),
        ("restarts", s.restarts),
        ("block_sizes", _join(s.block_sizes)),
        ("valuation_histogram", hist),
        ("valuation3", v3),
        ("high_valuation", high),
    ]
    return SUMMARY_FORMAT + "\n" + "".join(f"{k}\t{v}\n" for k, v in rows)


def write_summary(s: JpSummary, path) -> None:
    Path(path).write_text(summary_text(s))


def read_summary(path) -> JpSummary:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != SUMMARY_FORMAT:
        raise FormatError(f"{path}: not a summary file")
    kv = {}
    for line in lines[1:]:
        if not line:
            continue
        key, _, value = line.partition("\t")
        kv[key] = value
    try:
        v3 = [tuple(int(x) for x in item.split(":")) for item in kv["valuation3"].split(",") if item]
        high = []
        for item in kv.get("high_valuation", "").split(","):
            if item:
                m, n, v = item.split(":", 2)
                high.append((int(m), int(n), v))
        hist = {}
        for item in kv["valuation_histogram"].split(","):
            k, v = item.rsplit(":", 1)
            hist[k] = int(v)
        s = JpSummary(
            prime=int(kv["prime"]),
            complete=bool(int(kv["complete"])),
            cardinality=int(kv["cardinality"]),
            extinction_time=int(kv["extinction_time"]),
            block_sizes=_split_ints(kv["block_sizes"]),
            valuation_histogram=hist,
            valuation3_blocks=[m for m, _ in v3],
            valuation3_elements=[n for _, n in v3],
            high_valuation=high,
            target_depth=int(kv["target_depth"]),
            series_N=int(kv["series_N"]),
            restarts=int(kv["restarts"]),
        )
    except (KeyError, ValueError) as e:
        raise FormatError(f"{path}: corrupt summary ({e!r})") from e
    if sum(s.block_sizes) != s.cardinality:
        raise FormatError(f"{path}: block sizes do not add up to the cardinality")
    return s


def write_elements(s: JpSummary, path) -> None:
    if s.elements is None:
        raise ValueError("summary carries no element list")
    p = s.prime
    with open(path, "w") as f:
        f.write(ELEMENTS_FORMAT + "\n")
        f.write(f"prime\t{p}\n")
        for n, v in s.elements:
            digits = digits_of(n, p)
            f.write(f"{len(digits)}\t{_join(digits)}\t{v}\n")


def write_census(records: list[CensusRecord], path) -> None:
    with open(path, "w") as f:
        f.write(CENSUS_FORMAT + "\n")
        for r in records:
            f.write(f"{r.prime},{int(r.harmonic)}\n")


def read_census(path) -> list[tuple[int, bool]]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CENSUS_FORMAT:
        raise FormatError(f"{path}: not a census file")
    out = []
    for line in lines[1:]:
        p, h = line.split(",")
        out.append((int(p), h == "1"))
    return out


def density_lines(table: DensityTable) -> list[str]:
    out = [DENSITY_FORMAT, "interval_start,interval_end,primes,harmonic,ratio,ratio_minus_inv_e"]
    for r in table.rows:
        out.append(f"{r.start},{r.end},{r.primes},{r.harmonic},{r.ratio:.5f},{r.ratio - INV_E:+.5f}")
    out.append(
        f"total,,{table.primes},{table.harmonic},{table.ratio:.5f},{table.ratio - INV_E:+.5f}"
    )
    return out


def write_density(table: DensityTable, path) -> None:
    Path(path).write_text("\n".join(density_lines(table)) + "\n")


# -- aggregate statistics over a directory of summaries ------------------------

def truncated_percent(count: int, total: int) -> str:
    """Percentage with two decimals, last digit rounded down."""
    if total == 0:
        return "0.00"
    hundredths = count * 10000 // total
    return f"{hundredths // 100}.{hundredths % 100:02d}"


@dataclass
class Stats:
    summaries: list[JpSummary]
    errors: list[str] = field(default_factory=list)

    def distribution(self) -> list[tuple[int, int, str]]:
        counts = Counter(s.cardinality for s in self.summaries if s.complete)
        total = sum(counts.values())
        return [(c, n, truncated_percent(n, total)) for c, n in sorted(counts.items())]

    def log_ratio(self) -> list[tuple[int, int, float, bool]]:
        return [
            (s.prime, s.cardinality, math.log(s.cardinality) / math.log(s.prime), s.complete)
            for s in self.summaries
            if s.cardinality
        ]

    def extinction(self) -> list[tuple[int, int, float, bool]]:
        return [
            (s.prime, s.extinction_time, math.log(s.extinction_time) / math.log(s.prime), s.complete)
            for s in self.summaries
        ]

    def valuation3(self) -> list[tuple[int, int]]:
        return [(s.prime, m) for s in self.summaries for m in s.valuation3_blocks]

    def parity(self) -> list[tuple[int, int, int]]:
        """Per level m: number of primes with |J_{p,m}| odd / even and nonzero."""
        depth = max((len(s.block_sizes) for s in self.summaries), default=0)
        rows = []
        for m in range(depth):
            sizes = [s.block_sizes[m] for s in self.summaries if m < len(s.block_sizes) and s.block_sizes[m]]
            odd = sum(1 for x in sizes if x % 2)
            rows.append((m + 1, odd, len(sizes) - odd))
        return rows

    def consecutive_valuation3(self) -> list[tuple[int, int, int]]:
        """(p, m, n): valuation-3 elements n = p * n' at block m with v_p(H_n') = 3 as well.

        Only the chain n', pn', p^2 n', ... is checked; other children of a
        valuation-3 element may well have valuation 3 (p = 11: 848 -> 9338).
        """
        out = []
        for s in self.summaries:
            v3 = set(s.valuation3_elements)
            out.extend(
                (s.prime, m, n)
                for m, n in zip(s.valuation3_blocks, s.valuation3_elements)
                if n % s.prime == 0 and n // s.prime in v3
            )
        return out


def load_summaries(directory) -> Stats:
    directory = Path(directory)
    summaries, errors = [], []
    for path in sorted(directory.glob("*.summary")):
        try:
            summaries.append(read_summary(path))
        except (OSError, FormatError) as e:
            errors.append(f"{path}: {e}")
    summaries.sort(key=lambda s: s.prime)
    return Stats(summaries, errors)


def write_stats(stats: Stats, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {
        "distribution.csv": ["cardinality,primes,percent"]
        + [f"{c},{n},{pct}" for c, n, pct in stats.distribution()],
        "cardinality_log.csv": ["p,cardinality,log_ratio,complete"]
        + [f"{p},{c},{r:.6f},{int(ok)}" for p, c, r, ok in stats.log_ratio()],
        "extinction.csv": ["p,extinction_time,log_ratio,complete"]
        + [f"{p},{m},{r:.6f},{int(ok)}" for p, m, r, ok in stats.extinction()],
        "valuation3.csv": ["p,block"] + [f"{p},{m}" for p, m in stats.valuation3()],
        "parity.csv": ["block,odd,even"] + [f"{m},{o},{e}" for m, o, e in stats.parity()],
        "valuation3_consecutive.csv": ["p,block,n"] + [f"{p},{m},{n}" for p, m, n in stats.consecutive_valuation3()],
    }
    written = []
    for name, lines in files.items():
        path = out_dir / name
        path.write_text("\n".join([STATS_FORMAT] + lines) + "\n")
        written.append(path)
    return written
