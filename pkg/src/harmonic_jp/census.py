"""Harmonic-prime census: is |J_p| = 3, i.e. J_p = {p-1, p^2-p, p^2-1}?

For p >= 5 the test needs H_k mod p (k < p), H_{p-1}/p mod p^2 and one block
walk at precision 2.  The production path does this with numpy on whole
residue vectors, with products kept below 2^63 by splitting mod-p^2 residues
into two base-p digits; a slower reference path runs the same four steps
through :mod:`harmonic_jp.kernel`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

import numpy as np

from .kernel import block_walk, prefix_table
from .padic import div_exact_p

INV_E = math.exp(-1)
DEFAULT_WORKERS_ENV = "HARMONIC_JP_WORKERS"


class Reason(str, Enum):
    EXTRA_LEVEL1 = "extra_level1_element"
    LEVEL2_CHILD = "level2_child_found"
    HARMONIC = "harmonic"


@dataclass(frozen=True)
class CensusRecord:
    prime: int
    harmonic: bool
    reason: Reason


class WolstenholmeViolation(AssertionError):
    pass


# -- primes -------------------------------------------------------------------

def small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primes_between(lo: int, hi: int, segment: int = 1 << 20) -> Iterator[int]:
    """Primes in [lo, hi] by a segmented sieve."""
    lo = max(lo, 2)
    if hi < lo:
        return
    base = small_primes(math.isqrt(hi) + 1)
    start = lo
    while start <= hi:
        stop = min(start + segment, hi + 1)
        mask = np.ones(stop - start, dtype=bool)
        for q in base:
            q = int(q)
            if q * q >= stop:
                break
            first = max(q * q, -(-start // q) * q)
            mask[first - start :: q] = False
        yield from (int(x) + start for x in np.flatnonzero(mask))
        start = stop


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# -- vectorised residue arithmetic ----------------------------------------------

def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def primitive_root(p: int) -> int:
    factors = _prime_factors(p - 1)
    g = 2
    while any(pow(g, (p - 1) // q, p) == 1 for q in factors):
        g += 1
    return g


def inverses_mod_p(p: int) -> np.ndarray:
    """inv[j-1] = 1/j mod p for j = 1..p-1 (needs p^2 < 2^63)."""
    g = primitive_root(p)
    pw = np.empty(p - 1, dtype=np.int64)
    pw[0] = 1
    filled = 1
    while filled < p - 1:
        take = min(filled, p - 1 - filled)
        pw[filled : filled + take] = pw[:take] * pow(g, filled, p) % p
        filled += take
    # pw[e] = g^e, and 1/g^e = g^(p-1-e)
    inv = np.empty(p - 1, dtype=np.int64)
    inv[pw - 1] = np.concatenate((pw[:1], pw[:0:-1]))
    return inv


class _ResidueMask:
    """Membership in R = {H_k mod p} through a boolean table indexed by residue."""

    def __init__(self, h: np.ndarray, p: int):
        self.mask = np.zeros(p, dtype=bool)
        self.mask[h] = True
        self.mask[0] = True

    def __contains__(self, r: int) -> bool:
        return bool(self.mask[r])


def _verdict(p: int, level1_extra: bool, u_values: Iterable[int], residues) -> CensusRecord:
    """Children of p^2-p and p^2-1 exist iff -(H_n/p) mod p lies in R."""
    if level1_extra:
        return CensusRecord(p, False, Reason.EXTRA_LEVEL1)
    for u in u_values:
        if (-u) % p in residues:
            return CensusRecord(p, False, Reason.LEVEL2_CHILD)
    return CensusRecord(p, True, Reason.HARMONIC)


def wolstenholme_quotient(p: int, inv: np.ndarray | None = None) -> int:
    """H_{p-1}/p modulo p^2, so v_p(H_{p-1}) = 1 + v_p(result) when that is below 3."""
    if inv is None:
        inv = inverses_mod_p(p)
    # Below, I_j = 1/j mod p^2 = i + p*d with i = 1/j mod p, since j*i = 1 + c*p.
    p2 = p * p
    half = (p - 1) // 2
    j = np.arange(1, half + 1, dtype=np.int64)
    i = inv[:half]
    c = j * i // p
    d = (-(c * i % p)) % p
    sq = i * i
    sq_lo = sq % p
    sq_hi = (sq // p + 2 * i * d % p) % p  # I_j^2 = sq_lo + p*sq_hi (mod p^2)
    cube = sq_lo * i % p
    # H_{p-1}/p = sum_{j <= (p-1)/2} 1/(j(p-j)), and 1/(pj - j^2) = -I_j^2 - p/j^3 (mod p^2)
    total = (int(sq_lo.sum()) + p * ((int(sq_hi.sum()) + int(cube.sum())) % p)) % p2
    return -total % p2


def is_harmonic(p: int) -> CensusRecord:
    """Fast harmonicity test for a prime p >= 5."""
    if p < 5:
        raise ValueError("harmonicity test needs p >= 5")
    inv = inverses_mod_p(p)
    h = np.cumsum(inv) % p  # H_1..H_{p-1} mod p
    if h[-1] != 0:
        raise WolstenholmeViolation(f"H_(p-1) not divisible by p for p={p}")
    # H_k = 0 (mod p) for some k < p-1 puts k into J_p as well
    level1_extra = bool(np.any(h[:-1] == 0))

    p2 = p * p
    w = wolstenholme_quotient(p, inv)
    if w % p:
        raise WolstenholmeViolation(f"v_p(H_(p-1)) < 2 for p={p}")
    # H_{p^2-p} = H_{p-1}/p + sum gamma_k (p-1)^(2k), and every gamma_k is 0 mod p^2
    h_a = w
    # Walk the block: 1/(p^2-p+j) = I_j + p/j^2 (mod p^2), so the block sums to
    # H_{p-1} + p*sum 1/j^2, with H_{p-1} = p*(w mod p) (mod p^2).
    inv_sq = int((inv * inv % p).sum()) % p
    h_b = (h_a + p * ((w % p + inv_sq) % p)) % p2
    if h_b % p:
        raise AssertionError(f"p^2-1 not in J_p for p={p}")
    residues = _ResidueMask(h, p)
    return _verdict(p, level1_extra, (h_a // p, h_b // p), residues)


def is_harmonic_reference(p: int) -> CensusRecord:
    """The same four steps on PadicInt values (prefix table at precision 3)."""
    if p < 5:
        raise ValueError("harmonicity test needs p >= 5")
    table = prefix_table(p, 3)
    if any(table[k].residue % p == 0 for k in range(1, p - 1)):
        return CensusRecord(p, False, Reason.EXTRA_LEVEL1)
    if table[p - 1].residue % (p * p):
        raise WolstenholmeViolation(f"v_p(H_(p-1)) < 2 for p={p}")
    h_a = div_exact_p(table[p - 1], 1)  # H_{p^2-p} mod p^2
    walk = block_walk(p, h_a, p - 1)
    h_b = walk[p - 1]
    us = [h_a.residue // p, h_b.residue // p]
    return _verdict(p, False, us, set(table.residue_set))


# -- census ---------------------------------------------------------------------

def _chunk_worker(primes: list[int]) -> list[tuple[int, bool, str]]:
    out = []
    for p in primes:
        rec = is_harmonic(p)
        out.append((rec.prime, rec.harmonic, rec.reason.value))
    return out


def _chunks(primes: list[int], size: int) -> list[list[int]]:
    return [primes[i : i + size] for i in range(0, len(primes), size)]


def default_workers() -> int:
    env = os.environ.get(DEFAULT_WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def census(lo: int, hi: int, workers: int = 1, chunk_size: int = 64) -> list[CensusRecord]:
    """is_harmonic on every prime in [lo, hi], sorted by p whatever the worker count."""
    if lo < 5 or hi <= lo:
        raise ValueError("need 5 <= lo < hi")
    primes = list(primes_between(lo, hi))
    # chunks hold equal prime counts; per-prime cost grows with p but slowly within a chunk
    chunks = _chunks(primes, chunk_size)
    if workers <= 1 or len(chunks) <= 1:
        results = [_chunk_worker(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk_worker, chunks))
    return [CensusRecord(p, h, Reason(r)) for chunk in results for p, h, r in chunk]


@dataclass(frozen=True)
class DensityRow:
    start: int
    end: int
    primes: int
    harmonic: int

    @property
    def ratio(self) -> float:
        return self.harmonic / self.primes if self.primes else 0.0


@dataclass(frozen=True)
class DensityTable:
    interval_size: int
    rows: tuple[DensityRow, ...]

    @property
    def primes(self) -> int:
        return sum(r.primes for r in self.rows)

    @property
    def harmonic(self) -> int:
        return sum(r.harmonic for r in self.rows)

    @property
    def ratio(self) -> float:
        return self.harmonic / self.primes if self.primes else 0.0


def density_table(records: list[CensusRecord], lo: int, hi: int, interval_size: int | None = None) -> DensityTable:
    """Bucket records into intervals [a, a + size - 1] aligned to multiples of size.

    The first and last interval are clipped to [lo, hi].
    """
    if interval_size is None or interval_size <= 0:
        interval_size = hi - lo + 1
        edges = [(lo, hi)]
    else:
        first = lo // interval_size * interval_size
        edges = []
        a = first
        while a <= hi:
            edges.append((max(a, lo), min(a + interval_size - 1, hi)))
            a += interval_size
    rows = []
    i = 0
    for a, b in edges:
        n = h = 0
        while i < len(records) and records[i].prime <= b:
            if records[i].prime >= a:
                n += 1
                h += records[i].harmonic
            i += 1
        rows.append(DensityRow(a, b, n, h))
    return DensityTable(interval_size, tuple(rows))
