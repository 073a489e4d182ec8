"""Checkpoint files: one JSON record per line, written at level boundaries.

Layout: a header record, a series record, one record per gamma, a stats
record, one record per frontier node, optional element records, and a
trailer carrying the record count so truncated files are rejected.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .enumerator import EnumState, JpNode, digits_of, from_digits
from .padic import PadicInt, Valuation
from .series import SeriesApprox

FORMAT = "harmonic-jp-checkpoint"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


def _dump(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def checkpoint_lines(state: EnumState) -> list[str]:
    p = state.prime
    series = state.series
    recs = [
        {
            "record": "header",
            "format": FORMAT,
            "version": VERSION,
            "prime": p,
            "N": series.N,
            "effective_precision": series.effective_precision,
            "completed_blocks": state.level,
            "target_depth": state.target_depth,
            "table_precision": state.table_precision,
            "complete": state.complete,
            "restarts": state.restarts,
        },
        {
            "record": "series",
            "N": series.N,
            "loss": series.loss,
            "effective_precision": series.effective_precision,
            "gamma_precision": series.gammas[0].precision,
        },
    ]
    recs += [{"record": "gamma", "k": k, "residue": format(g.residue, "x")} for k, g in enumerate(series.gammas, start=1)]
    recs.append(
        {
            "record": "stats",
            "block_sizes": state.block_sizes,
            "histogram": state.histogram,
            "valuation3": [[m, str(n)] for m, n in state.valuation3],
            "high_valuation": [[m, str(n), v] for m, n, v in state.high_valuation],
            "keep_elements": state.elements is not None,
        }
    )
    for node in state.frontier:
        recs.append(
            {
                "record": "node",
                "digits": digits_of(node.n, p),
                "residue": format(node.h_value.residue, "x"),
                "precision": node.h_value.precision,
                "valuation": node.val.value,
                "saturated": node.val.saturated,
            }
        )
    for n, v in state.elements or ():
        recs.append({"record": "element", "n": str(n), "valuation": v})
    recs.append({"record": "end", "count": len(recs) + 1})
    return [_dump(r) for r in recs]


def checkpoint_save(state: EnumState, path) -> None:
    """Atomic write: temp file then rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as f:
        f.write("\n".join(checkpoint_lines(state)) + "\n")
    os.replace(tmp, path)


def checkpoint_load(path, expected_prime: int | None = None) -> EnumState:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    try:
        recs = [json.loads(line) for line in text.splitlines() if line.strip()]
    except json.JSONDecodeError as e:
        raise CheckpointError(f"corrupt checkpoint {path}: {e}") from e
    if not recs or recs[0].get("record") != "header" or recs[0].get("format") != FORMAT:
        raise CheckpointError(f"{path} is not a checkpoint file")
    head = recs[0]
    if head.get("version") != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {head.get('version')}")
    if recs[-1].get("record") != "end" or recs[-1].get("count") != len(recs):
        raise CheckpointError(f"truncated checkpoint {path}")
    p = int(head["prime"])
    if expected_prime is not None and p != expected_prime:
        raise CheckpointError(f"checkpoint is for p={p}, not p={expected_prime}")

    try:
        sr = next(r for r in recs if r["record"] == "series")
        gp = int(sr["gamma_precision"])
        gammas = [r for r in recs if r["record"] == "gamma"]
        if [r["k"] for r in gammas] != list(range(1, int(sr["N"]) + 1)):
            raise CheckpointError("gamma records out of order or missing")
        series = SeriesApprox(
            prime=p,
            N=int(sr["N"]),
            gammas=tuple(PadicInt(p, gp, int(r["residue"], 16)) for r in gammas),
            effective_precision=int(sr["effective_precision"]),
            loss=int(sr["loss"]),
        )
        stats = next(r for r in recs if r["record"] == "stats")
        level = int(head["completed_blocks"])
        frontier = []
        for r in recs:
            if r["record"] != "node":
                continue
            res = PadicInt(p, int(r["precision"]), int(r["residue"], 16))
            frontier.append(JpNode(from_digits(r["digits"], p), level, res, Valuation(int(r["valuation"]), bool(r["saturated"]))))
        elements = None
        if stats["keep_elements"]:
            elements = [(int(r["n"]), r["valuation"]) for r in recs if r["record"] == "element"]
        return EnumState(
            prime=p,
            target_depth=int(head["target_depth"]),
            table_precision=int(head["table_precision"]),
            series=series,
            level=level,
            frontier=frontier,
            block_sizes=[int(x) for x in stats["block_sizes"]],
            histogram={k: int(v) for k, v in stats["histogram"].items()},
            valuation3=[(int(m), int(n)) for m, n in stats["valuation3"]],
            high_valuation=[(int(m), int(n), v) for m, n, v in stats["high_valuation"]],
            elements=elements,
            complete=bool(head["complete"]),
            restarts=int(head["restarts"]),
        )
    except (KeyError, ValueError, StopIteration, TypeError) as e:
        raise CheckpointError(f"corrupt checkpoint {path}: {e!r}") from e
