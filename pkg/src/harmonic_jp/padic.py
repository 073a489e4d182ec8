"""Fixed-precision p-adic integers.

A :class:`PadicInt` is a residue modulo ``p**s`` together with the precision
``s``: it stands for every p-adic integer congruent to the residue modulo
``p**s``.  Results of arithmetic carry the smaller of the operand precisions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class PadicError(ArithmeticError):
    pass


class NonUnit(PadicError):
    """Inversion was requested for a value divisible by p."""

    def __init__(self, msg: str, index: int | None = None):
        super().__init__(msg)
        self.index = index


class NotDivisible(PadicError):
    pass


class PrecisionExhausted(PadicError):
    pass


@dataclass(frozen=True, slots=True)
class Valuation:
    value: int
    saturated: bool

    def __str__(self):
        return f">={self.value}" if self.saturated else str(self.value)


@dataclass(frozen=True, slots=True)
class PadicInt:
    prime: int
    precision: int
    residue: int

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError(f"precision must be >= 1, got {self.precision}")
        if not 0 <= self.residue < self.prime ** self.precision:
            raise ValueError("residue out of range [0, p^s)")

    @classmethod
    def of(cls, value: int, prime: int, precision: int) -> PadicInt:
        """Reduce an arbitrary integer into a PadicInt."""
        return cls(prime, precision, value % prime ** precision)

    @property
    def modulus(self) -> int:
        return self.prime ** self.precision

    def __add__(self, other: PadicInt) -> PadicInt:
        return add(self, other)

    def __sub__(self, other: PadicInt) -> PadicInt:
        return sub(self, other)

    def __mul__(self, other: PadicInt) -> PadicInt:
        return mul(self, other)

    def __neg__(self) -> PadicInt:
        return PadicInt(self.prime, self.precision, -self.residue % self.modulus)

    def reduce(self, precision: int) -> PadicInt:
        """Drop to a lower precision."""
        if precision > self.precision:
            raise PrecisionExhausted(f"cannot raise precision {self.precision} to {precision}")
        return PadicInt(self.prime, precision, self.residue % self.prime ** precision)

    def to_record(self) -> dict:
        return {"prime": self.prime, "precision": self.precision, "residue": format(self.residue, "x")}

    @classmethod
    def from_record(cls, rec: dict) -> PadicInt:
        return cls(int(rec["prime"]), int(rec["precision"]), int(rec["residue"], 16))


def _common(a: PadicInt, b: PadicInt) -> tuple[int, int]:
    if a.prime != b.prime:
        raise ValueError(f"mismatched primes {a.prime} and {b.prime}")
    s = min(a.precision, b.precision)
    return s, a.prime ** s


def add(a: PadicInt, b: PadicInt) -> PadicInt:
    s, m = _common(a, b)
    return PadicInt(a.prime, s, (a.residue + b.residue) % m)


def sub(a: PadicInt, b: PadicInt) -> PadicInt:
    s, m = _common(a, b)
    return PadicInt(a.prime, s, (a.residue - b.residue) % m)


def mul(a: PadicInt, b: PadicInt) -> PadicInt:
    s, m = _common(a, b)
    return PadicInt(a.prime, s, a.residue * b.residue % m)


def _precision_ladder(s: int) -> list[int]:
    ladder = []
    while s > 1:
        ladder.append(s)
        s = (s + 1) // 2
    return ladder[::-1]


def inv_mod_prime_power(a: int, p: int, s: int) -> int:
    """Inverse of a unit ``a`` modulo ``p**s`` by Newton lifting from mod p."""
    x = pow(a % p, -1, p)
    for t in _precision_ladder(s):
        m = p ** t
        x = x * (2 - a * x) % m
    return x


def inv_unit(a: PadicInt) -> PadicInt:
    if a.residue % a.prime == 0:
        raise NonUnit(f"{a.residue} is divisible by {a.prime}")
    return PadicInt(a.prime, a.precision, inv_mod_prime_power(a.residue, a.prime, a.precision))


def div_exact_p(a: PadicInt, t: int) -> PadicInt:
    """Divide by ``p**t``; the result loses ``t`` digits of precision."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return a
    if t >= a.precision:
        raise PrecisionExhausted(f"cannot divide by p^{t} at precision {a.precision}")
    q, r = divmod(a.residue, a.prime ** t)
    if r:
        raise NotDivisible(f"residue not divisible by {a.prime}^{t}")
    return PadicInt(a.prime, a.precision - t, q)


def mul_by_p(a: PadicInt, t: int) -> PadicInt:
    """Multiply by ``p**t``.  The result is known to precision ``s + t``."""
    return PadicInt(a.prime, a.precision + t, a.residue * a.prime ** t)


def int_valuation(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("valuation of 0")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def residue_valuation(residue: int, p: int, precision: int) -> Valuation:
    if residue == 0:
        return Valuation(precision, True)
    return Valuation(int_valuation(residue, p), False)


def valuation(a: PadicInt) -> Valuation:
    return residue_valuation(a.residue, a.prime, a.precision)


def batch_inverse_raw(values: Sequence[int], p: int, s: int) -> list[int]:
    """Montgomery's trick over plain residues mod p^s.

    One inversion plus 3(n-1) multiplications.
    """
    n = len(values)
    if n == 0:
        return []
    m = p ** s
    prefix = [0] * n
    acc = 1
    for i, v in enumerate(values):
        if v % p == 0:
            raise NonUnit(f"value at index {i} is divisible by {p}", index=i)
        acc = acc * v % m
        prefix[i] = acc
    inv = inv_mod_prime_power(acc, p, s)
    out = [0] * n
    for i in range(n - 1, 0, -1):
        out[i] = inv * prefix[i - 1] % m
        inv = inv * values[i] % m
    out[0] = inv
    return out


def batch_inverse(values: Iterable[PadicInt]) -> list[PadicInt]:
    values = list(values)
    if not values:
        return []
    p, s = values[0].prime, values[0].precision
    for v in values:
        if v.prime != p or v.precision != s:
            raise ValueError("batch_inverse needs a common prime and precision")
    raw = batch_inverse_raw([v.residue for v in values], p, s)
    return [PadicInt(p, s, r) for r in raw]
