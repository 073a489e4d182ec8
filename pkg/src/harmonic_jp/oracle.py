"""Exact-rational reference for small n: H_n as a fraction, valuations read off directly."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .padic import int_valuation

ORACLE_BOUND = 10**5
_REDUCE_EVERY = 64


class OracleBoundExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ExactHarmonic:
    n: int
    numerator: int
    denominator: int


def _check(n: int, bound: int) -> None:
    if n > bound:
        raise OracleBoundExceeded(f"oracle refuses n={n} > {bound}")


def _reduced(a: int, b: int) -> tuple[int, int]:
    g = math.gcd(a, b)
    return a // g, b // g


def harmonic(n: int, bound: int = ORACLE_BOUND) -> ExactHarmonic:
    if n < 0:
        raise ValueError("n must be >= 0")
    _check(n, bound)
    a, b = 0, 1
    for j in range(1, n + 1):
        a, b = a * j + b, b * j
        if j % _REDUCE_EVERY == 0:
            a, b = _reduced(a, b)
    a, b = _reduced(a, b)
    return ExactHarmonic(n, a, b)


def fraction_valuation(a: int, b: int, p: int) -> int:
    return int_valuation(a, p) - int_valuation(b, p)


def exact_valuation(p: int, n: int, bound: int = ORACLE_BOUND) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    h = harmonic(n, bound)
    return fraction_valuation(h.numerator, h.denominator, p)


def naive_jp(p: int, xmax: int, bound: int = ORACLE_BOUND) -> list[tuple[int, int]]:
    """All (n, v_p(H_n)) with n <= xmax and v_p(H_n) >= 1, by the running-fraction recursion.

    The fraction stays unreduced between checks; only its p-parts are examined
    at each step, which needs the numerator's and denominator's valuations
    rather than a full gcd.
    """
    _check(xmax, bound)
    out = []
    a, b = 0, 1
    vb = 0  # v_p(b), maintained incrementally
    for n in range(1, xmax + 1):
        a, b = a * n + b, b * n
        vb += int_valuation(n, p) if n % p == 0 else 0
        if n % _REDUCE_EVERY == 0:
            a, b = _reduced(a, b)
            vb = int_valuation(b, p)
        # v_p(a) > v_p(b) is necessary; test divisibility by p^(vb+1) cheaply first
        if a % p ** (vb + 1) == 0:
            out.append((n, int_valuation(a, p) - vb))
    return out
