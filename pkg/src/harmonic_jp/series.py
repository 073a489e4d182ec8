"""Fitting and evaluating the series H_{pn} - H_n/p = sum_k gamma_k n^(2k).

The coefficients gamma_k = c_k p^(2k) are recovered from b_1..b_N by
interpolating Q(x) = sum_{k=1..N} gamma_k x^k through the nodes x = n^2
(and Q(0) = 0) with Newton divided differences.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import restricted_sums
from .padic import (
    NotDivisible,
    PadicInt,
    PrecisionExhausted,
    div_exact_p,
    int_valuation,
    inv_mod_prime_power,
    residue_valuation,
)


def ilog(x: int, p: int) -> int:
    """floor(log_p(x)) for x >= 1, in exact integer arithmetic."""
    k, q = 0, p
    while q <= x:
        q *= p
        k += 1
    return k


def tail_precision(p: int, N: int) -> int:
    if N < 1:
        raise ValueError("N must be >= 1")
    return 2 * N + 2 - ilog(N + 1, p)


def safe_tail_precision(p: int, N: int) -> int:
    """Tail precision one digit below the quoted bound.

    When (p-1) | 2k the coefficient gamma_k picks up a Bernoulli denominator
    and v_p(gamma_k) = 2k - 1 - v_p(k) is attained (p = 11, k = 5 gives 9),
    so min_{k>N} v_p(gamma_k) >= 2N + 1 - floor(log_p(N+1)) is what holds.
    """
    return tail_precision(p, N) - 1


def loss_budget(p: int, N: int) -> int:
    """ceil(2N/(p-1)): worst-case digits lost in the Vandermonde solve."""
    return -(-2 * N // (p - 1))


def factorial_valuation(m: int, p: int) -> int:
    v, q = 0, p
    while q <= m:
        v += m // q
        q *= p
    return v


def vandermonde_loss(p: int, N: int) -> int:
    """Digits of precision lost solving the N x N system on nodes n^2.

    Bounds -v_p of every entry of the inverse matrix: the Lagrange basis
    polynomial of node i has denominator prod_{l != i, 0 <= l <= N} (i^2 - l^2),
    whose valuation is v((N-i)!) + v((N+i)!) < 2N/(p-1).
    """
    return max(
        factorial_valuation(N - i, p) + factorial_valuation(N + i, p)
        for i in range(1, N + 1)
    )


def choose_N(p: int, target: int) -> int:
    """Smallest N whose fit guarantees precision target + 1 after the worst-case loss."""
    N = 1
    while safe_tail_precision(p, N) - loss_budget(p, N) < target + 1:
        N += 1
    return N


@dataclass(frozen=True)
class SeriesApprox:
    prime: int
    N: int
    gammas: tuple[PadicInt, ...]  # gammas[k-1] is gamma_k
    effective_precision: int
    loss: int = 0

    def __post_init__(self):
        object.__setattr__(
            self,
            "_vals",
            tuple(residue_valuation(g.residue, g.prime, g.precision).value for g in self.gammas),
        )

    @property
    def gamma_valuations(self) -> tuple[int, ...]:
        return self._vals

    def to_record(self) -> dict:
        return {
            "prime": self.prime,
            "N": self.N,
            "effective_precision": self.effective_precision,
            "loss": self.loss,
            "gammas": [format(g.residue, "x") for g in self.gammas],
            "gamma_precision": self.gammas[0].precision if self.gammas else 0,
        }

    @classmethod
    def from_record(cls, rec: dict) -> SeriesApprox:
        p, gp = int(rec["prime"]), int(rec["gamma_precision"])
        return cls(
            prime=p,
            N=int(rec["N"]),
            gammas=tuple(PadicInt(p, gp, int(h, 16)) for h in rec["gammas"]),
            effective_precision=int(rec["effective_precision"]),
            loss=int(rec.get("loss", 0)),
        )

    def evaluate(self, n: int, precision: int) -> int:
        """Raw residue of sum_k gamma_k n^(2k) modulo p^precision.

        Terms with v_p(gamma_k) >= precision are skipped.
        """
        if precision > self.effective_precision:
            raise PrecisionExhausted(
                f"series known to precision {self.effective_precision}, asked for {precision}"
            )
        p = self.prime
        m = p ** precision
        x = n * n % m
        kmax = 0
        for k, v in enumerate(self._vals, start=1):
            if v < precision:
                kmax = k
        if kmax == 0:
            return 0
        # Horner on gamma_kmax..gamma_1, then one more factor of x.
        acc = 0
        for k in range(kmax, 0, -1):
            g = self.gammas[k - 1].residue if self._vals[k - 1] < precision else 0
            acc = (acc * x + g) % m
        return acc * x % m


def _divided_differences(xs: list[int], ys: list[int], p: int, precs: list[int]):
    """Newton coefficients of the interpolant through (xs, ys) over Z_p.

    ``precs[i]`` is the precision of ys[i]; each entry of the table carries its
    own precision (min of its parents minus the valuation of the divisor).
    Returns (coefficients, precisions).
    """
    n = len(xs)
    col = list(ys)
    cprec = list(precs)
    coef = [col[0]]
    cpr = [cprec[0]]
    for j in range(1, n):
        new, newp = [], []
        for i in range(n - j):
            d = xs[i + j] - xs[i]
            v = int_valuation(d, p)
            s = min(cprec[i], cprec[i + 1])
            if s <= v:
                raise PrecisionExhausted("precision exhausted in divided differences")
            num = (col[i + 1] - col[i]) % p ** s
            pv = p ** v
            q, rem = divmod(num, pv)
            if rem:
                raise NotDivisible("divided difference numerator not divisible; inconsistent data")
            s -= v
            m = p ** s
            unit = d // pv
            new.append(q * inv_mod_prime_power(unit % m, p, s) % m)
            newp.append(s)
        col, cprec = new, newp
        coef.append(col[0])
        cpr.append(cprec[0])
    return coef, cpr


def _tracked_loss(xs: list[int], p: int) -> int:
    """Worst precision drop of the divided-difference recursion (valuations only)."""
    n = len(xs)
    col = [0] * n
    worst = 0
    for j in range(1, n):
        col = [max(col[i], col[i + 1]) + int_valuation(xs[i + j] - xs[i], p) for i in range(n - j)]
        worst = max(worst, col[0])
    return worst


def _newton_to_monomial(coef: list[int], xs: list[int], m: int) -> list[int]:
    """Monomial coefficients (low to high) of sum_j coef[j] prod_{i<j}(x - xs[i])."""
    n = len(coef)
    poly = [coef[-1] % m]
    for j in range(n - 2, -1, -1):
        # poly <- poly * (x - xs[j]) + coef[j]
        shifted = [0] + poly
        for i, c in enumerate(poly):
            shifted[i] = (shifted[i] - xs[j] * c) % m
        shifted[0] = (shifted[0] + coef[j]) % m
        poly = shifted
    return poly


def fit_coefficients(p: int, N: int, s: int | None = None) -> SeriesApprox:
    """Solve sum_{k=1..N} gamma_k n^(2k) = b_n (n = 1..N) over Z/p^s."""
    if N < 1:
        raise ValueError("N must be >= 1")
    budget = loss_budget(p, N)
    tail = safe_tail_precision(p, N)
    if s is None:
        s = tail + budget
    if s <= budget + 1:
        raise PrecisionExhausted(f"input precision {s} too small for N={N} (need > {budget + 1})")
    loss = vandermonde_loss(p, N)
    assert loss < 2 * N / (p - 1), (p, N, loss)
    if loss >= s:
        raise PrecisionExhausted("valuation loss reaches the input precision")

    bs = restricted_sums(p, s, N)
    xs = [0] + [n * n for n in range(1, N + 1)]
    # Node 0 carries Q(0) = 0 exactly.  The b_n residues are treated as exact
    # at a raised working precision so that the recursion's own (pessimistic)
    # bookkeeping never drops below the true guarantee s - loss.
    extra = max(0, _tracked_loss(xs, p) - loss)
    w = s + extra
    ys = [0] + [b.residue for b in bs]
    coef, cpr = _divided_differences(xs, ys, p, [w] * (N + 1))
    gp = min(min(cpr), s - loss)
    m = p ** gp
    mono = _newton_to_monomial(coef, xs, m)
    if mono[0] % m:
        raise AssertionError("interpolant does not vanish at 0")
    gammas = tuple(PadicInt(p, gp, c % m) for c in mono[1:])
    eff = min(tail, s - loss)
    return SeriesApprox(prime=p, N=N, gammas=gammas, effective_precision=eff, loss=loss)


def fit_for_target(p: int, target: int) -> SeriesApprox:
    """Fit a series usable for lifts to precision ``target`` (and one more)."""
    return fit_coefficients(p, choose_N(p, target))


def eval_lift(series: SeriesApprox, n: int, h_n: PadicInt) -> PadicInt:
    """H_{pn} modulo p^(r-1) from H_n modulo p^r."""
    r = h_n.precision
    if r < 2:
        raise PrecisionExhausted("need precision >= 2 to lift")
    half = div_exact_p(h_n, 1)
    m = half.modulus
    return PadicInt(series.prime, r - 1, (half.residue + series.evaluate(n % m, r - 1)) % m)
