"""Harmonic-number residues: prefix tables, restricted block sums, block walks."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

from .padic import PadicInt, batch_inverse_raw


@dataclass(frozen=True)
class PrefixTable:
    """H_0..H_{p-1} modulo p^s and the residue set R = {H_k mod p}."""

    prime: int
    precision: int
    table: tuple[PadicInt, ...]
    residue_set: tuple[int, ...]  # sorted
    _digits_by_residue: dict = field(repr=False, compare=False, default_factory=dict)

    def contains_residue(self, r: int) -> bool:
        i = bisect.bisect_left(self.residue_set, r)
        return i < len(self.residue_set) and self.residue_set[i] == r

    def digits_with_residue(self, r: int) -> tuple[int, ...]:
        """All k in [0, p-1] with H_k = r mod p, ascending."""
        return self._digits_by_residue.get(r, ())

    def __getitem__(self, k: int) -> PadicInt:
        return self.table[k]


def prefix_table(p: int, s: int) -> PrefixTable:
    if p < 3 or s < 1:
        raise ValueError("need p >= 3 and s >= 1")
    m = p ** s
    invs = batch_inverse_raw(range(1, p), p, s)
    acc = 0
    raw = [0]
    for x in invs:
        acc = (acc + x) % m
        raw.append(acc)
    by_res: dict[int, list[int]] = {}
    for k, h in enumerate(raw):
        by_res.setdefault(h % p, []).append(k)
    return PrefixTable(
        prime=p,
        precision=s,
        table=tuple(PadicInt(p, s, h) for h in raw),
        residue_set=tuple(sorted(by_res)),
        _digits_by_residue={r: tuple(ks) for r, ks in by_res.items()},
    )


def block_inverse_sum(p: int, s: int, start: int, count: int) -> int:
    """Sum of 1/(start + j) for j = 1..count modulo p^s.  Terms must be units."""
    m = p ** s
    invs = batch_inverse_raw([(start + j) % m for j in range(1, count + 1)], p, s)
    return sum(invs) % m


def restricted_sums(p: int, s: int, N: int) -> list[PadicInt]:
    """b_n = sum of 1/j over j <= pn with p not dividing j, for n = 1..N.

    This equals H_{pn} - H_n/p.  Each block of p-1 consecutive units is
    inverted with one batch inversion.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    m = p ** s
    out = []
    acc = 0
    for n in range(1, N + 1):
        acc = (acc + block_inverse_sum(p, s, p * (n - 1), p - 1)) % m
        out.append(PadicInt(p, s, acc))
    return out


def walk_residues(p: int, r: int, base: int, pn: int, kmax: int) -> list[int]:
    """Raw residues H_{pn+k} mod p^r for k = 0..kmax, starting from H_{pn}."""
    m = p ** r
    pn %= m
    out = [base % m]
    if kmax == 0:
        return out
    invs = batch_inverse_raw([(pn + k) % m for k in range(1, kmax + 1)], p, r)
    acc = out[0]
    for x in invs:
        acc = (acc + x) % m
        out.append(acc)
    return out


def block_walk(p: int, base_residue: PadicInt, n: int) -> list[PadicInt]:
    """H_{pn+k} for k = 0..p-1 given H_{pn} at precision r.

    ``n`` only matters modulo p^r, so it may be passed reduced.
    """
    r = base_residue.precision
    raw = walk_residues(p, r, base_residue.residue, p * n, p - 1)
    return [PadicInt(p, r, h) for h in raw]
