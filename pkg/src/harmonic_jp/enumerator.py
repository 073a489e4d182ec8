"""Level-by-level enumeration of J_p = {n >= 1 : p divides the numerator of H_n}.

Nodes at level m are the members of J_p in [p^(m-1), p^m - 1].  A member n at
precision r produces its children pn + k at precision r - 1 by lifting H_n to
H_{pn} through the fitted series and walking the block.  When the precision
horizon is reached with a nonempty frontier the run restarts with a deeper
series and recomputes only the ancestors of that frontier.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .kernel import PrefixTable, prefix_table, walk_residues
from .padic import PadicInt, PrecisionExhausted, Valuation, residue_valuation
from .series import SeriesApprox, fit_for_target

log = logging.getLogger(__name__)

# Digits of precision kept at the deepest level so that valuations 1..3 are
# exact and 4 shows up as saturated (and is then re-verified).
VALUATION_MARGIN = 3


class ConsistencyError(AssertionError):
    """A computed residue contradicts the mod-p membership criterion."""


def digits_of(n: int, p: int) -> list[int]:
    """Base-p digits of n, most significant first."""
    out = []
    while n:
        n, d = divmod(n, p)
        out.append(d)
    return out[::-1]


def from_digits(digits, p: int) -> int:
    n = 0
    for d in digits:
        n = n * p + d
    return n


@dataclass(frozen=True)
class JpNode:
    n: int
    block: int
    h_value: PadicInt
    val: Valuation

    @property
    def prime(self) -> int:
        return self.h_value.prime

    @property
    def path(self) -> list[int]:
        return digits_of(self.n, self.prime)


def _node(p: int, n: int, block: int, precision: int, residue: int) -> JpNode:
    return JpNode(n, block, PadicInt(p, precision, residue), residue_valuation(residue, p, precision))


def initial_block(p: int, prefix: PrefixTable) -> list[JpNode]:
    if prefix.precision < 2:
        raise PrecisionExhausted("initial block needs table precision >= 2")
    return [
        _node(p, k, 1, prefix.precision, prefix[k].residue)
        for k in range(1, p)
        if prefix[k].residue % p == 0
    ]


def _lift_base(node: JpNode, series: SeriesApprox) -> tuple[int, int]:
    """(H_{pn} mod p^(r-1), r-1) for a member node at precision r."""
    p = node.prime
    r = node.h_value.precision
    if r < 2:
        raise PrecisionExhausted(f"node {node.n} at precision {r} cannot be lifted")
    s = r - 1
    m = p ** s
    q = node.h_value.residue // p
    return (q + series.evaluate(node.n % m, s)) % m, s


def expand(node: JpNode, series: SeriesApprox, prefix: PrefixTable) -> list[JpNode]:
    """Children of ``node`` (members pn + k of J_p), ascending."""
    p = prefix.prime
    r = node.h_value.precision
    if r < 2:
        raise PrecisionExhausted(f"node {node.n} at precision {r} cannot be expanded")
    u = node.h_value.residue // p % p
    ks = prefix.digits_with_residue(-u % p)
    if not ks:
        return []
    base, s = _lift_base(node, series)
    raw = walk_residues(p, s, base, p * node.n, ks[-1])
    # H_{pn+k} = H_n/p + H_k (mod p) for every k walked
    for k, h in enumerate(raw):
        if (h - u - prefix[k].residue) % p:
            raise ConsistencyError(f"p={p} n={node.n} k={k}: residue contradicts H_n/p + H_k mod p")
    return [_node(p, p * node.n + k, node.block + 1, s, raw[k]) for k in ks]


def replay_spine(
    p: int, targets: list[int], level: int, prefix: PrefixTable, series: SeriesApprox
) -> list[JpNode]:
    """Recompute the nodes ``targets`` (all at ``level``) along their ancestor paths only."""
    targets = sorted(set(targets))
    if not targets:
        return []
    spine = [sorted({n // p ** (level - m) for n in targets}) for m in range(1, level + 1)]
    current = []
    for k in spine[0]:
        if prefix[k].residue % p:
            raise ConsistencyError(f"spine node {k} is not a member of J_{p}")
        current.append(_node(p, k, 1, prefix.precision, prefix[k].residue))
    for m in range(1, level):
        wanted: dict[int, list[int]] = {}
        for c in spine[m]:
            wanted.setdefault(c // p, []).append(c % p)
        nxt = []
        for node in current:
            ks = wanted.get(node.n)
            if not ks:
                continue
            base, s = _lift_base(node, series)
            raw = walk_residues(p, s, base, p * node.n, ks[-1])
            for k in ks:
                if raw[k] % p:
                    raise ConsistencyError(f"spine node {p * node.n + k} is not a member of J_{p}")
                nxt.append(_node(p, p * node.n + k, m + 1, s, raw[k]))
        current = nxt
    return current


def verify_valuation(p: int, n: int, level: int, precision: int, extra: int = 8, tries: int = 4) -> Valuation:
    """Valuation of H_n recomputed at higher precision along the path of n."""
    val = Valuation(precision, True)
    for _ in range(tries):
        precision += extra
        s0 = precision + level - 1
        prefix = prefix_table(p, s0)
        series = fit_for_target(p, s0)
        (node,) = replay_spine(p, [n], level, prefix, series)
        val = node.val
        if not val.saturated and val.value < precision - 1:
            return val
        extra *= 2
    return val


@dataclass
class EnumConfig:
    target_depth: int = 16
    max_depth: int | None = None
    max_seconds: float | None = None
    checkpoint: Path | None = None
    checkpoint_interval: float = 30.0
    resume: bool = False
    keep_elements: bool = False


@dataclass
class EnumState:
    prime: int
    target_depth: int
    table_precision: int
    series: SeriesApprox
    level: int
    frontier: list[JpNode]
    block_sizes: list[int] = field(default_factory=list)
    histogram: dict[str, int] = field(default_factory=lambda: {"1": 0, "2": 0, "3": 0, "4+": 0})
    valuation3: list[tuple[int, int]] = field(default_factory=list)
    high_valuation: list[tuple[int, int, str]] = field(default_factory=list)
    elements: list[tuple[int, str]] | None = None
    complete: bool = False
    restarts: int = 0


@dataclass
class JpSummary:
    prime: int
    complete: bool
    cardinality: int
    extinction_time: int  # first empty block, i.e. the precision needed
    block_sizes: list[int]
    valuation_histogram: dict[str, int]
    valuation3_blocks: list[int]
    valuation3_elements: list[int] = field(default_factory=list)
    high_valuation: list[tuple[int, int, str]] = field(default_factory=list)
    target_depth: int = 0
    series_N: int = 0
    restarts: int = 0
    elements: list[tuple[int, str]] | None = None

    @property
    def deepest_block(self) -> int:
        return len(self.block_sizes)

    def growth_bound_violations(self) -> list[int]:
        """Levels m where |J_p cap [1, p^m]| exceeds 3 x^(2/3 + 1/(25 ln p))."""
        p = self.prime
        expo = 2 / 3 + 1 / (25 * math.log(p))
        bad, total = [], 0
        for m, size in enumerate(self.block_sizes, start=1):
            total += size
            # compare logs; p^m overflows floats for deep levels
            if math.log(total or 1) > math.log(3) + expo * m * math.log(p):
                bad.append(m)
        return bad


def _record_level(state: EnumState, nodes: list[JpNode], level: int) -> None:
    state.block_sizes.append(len(nodes))
    p = state.prime
    for node in nodes:
        val = node.val
        if val.value >= 4:
            val = verify_valuation(p, node.n, level, node.h_value.precision)
            state.high_valuation.append((level, node.n, str(val)))
            log.warning("p=%d n at level %d has valuation %s", p, level, val)
        v = val.value
        if v >= 4:
            state.histogram["4+"] += 1
        else:
            state.histogram[str(v)] += 1
        if v == 3 and not val.saturated:
            state.valuation3.append((level, node.n))
        if state.elements is not None:
            state.elements.append((node.n, str(val)))


def _fresh_state(p: int, depth: int, keep_elements: bool) -> tuple[EnumState, PrefixTable]:
    s0 = depth + VALUATION_MARGIN
    prefix = prefix_table(p, s0)
    series = fit_for_target(p, s0)
    state = EnumState(
        prime=p,
        target_depth=depth,
        table_precision=s0,
        series=series,
        level=0,
        frontier=[],
        elements=[] if keep_elements else None,
    )
    nodes = initial_block(p, prefix)
    _record_level(state, nodes, 1)
    state.level = 1
    state.frontier = nodes
    if not nodes:
        state.complete = True
    return state, prefix


def _restart(state: EnumState, depth: int) -> PrefixTable:
    p = state.prime
    s0 = depth + VALUATION_MARGIN
    log.info("p=%d: restarting at depth %d (frontier %d nodes at level %d)", p, depth, len(state.frontier), state.level)
    prefix = prefix_table(p, s0)
    series = fit_for_target(p, s0)
    frontier = replay_spine(p, [x.n for x in state.frontier], state.level, prefix, series)
    state.target_depth = depth
    state.table_precision = s0
    state.series = series
    state.frontier = frontier
    state.restarts += 1
    return prefix


def summarize(state: EnumState) -> JpSummary:
    sizes = list(state.block_sizes)
    nonempty = [m for m, size in enumerate(sizes, start=1) if size]
    return JpSummary(
        prime=state.prime,
        complete=state.complete,
        cardinality=sum(sizes),
        extinction_time=(nonempty[-1] if nonempty else 0) + 1,
        block_sizes=sizes[: nonempty[-1]] if nonempty else [],
        valuation_histogram=dict(state.histogram),
        valuation3_blocks=[m for m, _ in state.valuation3],
        valuation3_elements=[n for _, n in state.valuation3],
        high_valuation=list(state.high_valuation),
        target_depth=state.target_depth,
        series_N=state.series.N,
        restarts=state.restarts,
        elements=sorted(state.elements) if state.elements is not None else None,
    )


def enumerate_jp(
    p: int,
    config: EnumConfig | None = None,
    on_level: Callable[[EnumState], None] | None = None,
) -> JpSummary:
    """Enumerate J_p.  Returns a summary; ``complete`` is False when a budget ran out.

    ``on_level`` is called after every completed level (after checkpointing).
    """
    from .checkpoint import checkpoint_load, checkpoint_save

    if p < 3:
        raise ValueError("p must be an odd prime")
    config = config or EnumConfig()
    max_depth = config.max_depth
    depth = config.target_depth if max_depth is None else min(config.target_depth, max_depth)
    if depth < 1:
        raise ValueError("target depth must be >= 1")
    started = time.monotonic()
    ckpt = Path(config.checkpoint) if config.checkpoint else None

    if config.resume and ckpt is not None and ckpt.exists():
        state = checkpoint_load(ckpt, expected_prime=p)
        prefix = prefix_table(p, state.table_precision)
        log.info("p=%d: resumed at level %d", p, state.level)
    else:
        state, prefix = _fresh_state(p, depth, config.keep_elements)

    last_save = time.monotonic()

    def save(force=False):
        nonlocal last_save
        if ckpt is None:
            return
        if force or time.monotonic() - last_save >= config.checkpoint_interval:
            checkpoint_save(state, ckpt)
            last_save = time.monotonic()

    while not state.complete:
        while state.level < state.target_depth and not state.complete:
            children = []
            for node in state.frontier:
                children.extend(expand(node, state.series, prefix))
            level = state.level + 1
            _record_level(state, children, level)
            state.level = level
            state.frontier = children
            if not children:
                state.complete = True
            save(force=state.complete)
            if on_level is not None:
                on_level(state)
            if config.max_seconds is not None and time.monotonic() - started > config.max_seconds:
                save(force=True)
                return summarize(state)
        if state.complete:
            break
        if max_depth is not None and state.target_depth >= max_depth:
            break
        new_depth = 2 * state.target_depth
        if max_depth is not None:
            new_depth = min(new_depth, max_depth)
        prefix = _restart(state, new_depth)
        save(force=True)
    save(force=True)
    return summarize(state)
