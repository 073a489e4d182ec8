"""Acceptance criteria 1-8; each test records one PASS/FAIL line (see conftest)."""

import math
import random
import time

import pytest

from harmonic_jp import enumerator
from harmonic_jp.census import census, density_table, is_harmonic, primes_between, wolstenholme_quotient
from harmonic_jp.enumerator import EnumConfig, enumerate_jp
from harmonic_jp.kernel import prefix_table, restricted_sums
from harmonic_jp.oracle import naive_jp
from harmonic_jp.padic import valuation
from harmonic_jp.series import fit_coefficients

from conftest import ACCEPTANCE, ACCEPTANCE_TITLES


def record(num, checks, detail=""):
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    text = detail if ok else "failed: " + ", ".join(failed)
    ACCEPTANCE[num] = (ACCEPTANCE_TITLES[num], ok, text)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} {text}")
    assert ok, failed


@pytest.fixture(scope="module")
def runs():
    return {}


def summary_for(runs, p, **kw):
    if p not in runs:
        t0 = time.monotonic()
        s = enumerate_jp(p, EnumConfig(**kw))
        runs[p] = (s, time.monotonic() - t0)
    return runs[p]


def test_criterion_1_p11(runs):
    s, dt = summary_for(runs, 11)
    record(1, {
        "complete": s.complete,
        "|J_11| = 638": s.cardinality == 638,
        "M_11 = 30": s.extinction_time == 30,
        "valuation-3 blocks {3,4,4,18}": s.valuation3_blocks == [3, 4, 4, 18],
        "848 has valuation 3": 848 in s.valuation3_elements,
    }, f"|J|={s.cardinality} M={s.extinction_time} v3 blocks={s.valuation3_blocks} in {dt:.2f}s")


def test_criterion_2_p127(runs):
    s, dt = summary_for(runs, 127)
    record(2, {
        "complete": s.complete,
        "|J_127| = 3515": s.cardinality == 3515,
        "M_127 = 146": s.extinction_time == 146,
    }, f"|J|={s.cardinality} M={s.extinction_time} in {dt:.1f}s")


def test_criterion_3_p83(runs):
    s, dt = summary_for(runs, 83)
    want = [63, 108, 108, 131, 161, 207, 213, 243, 246, 291, 294]
    record(3, {
        "complete": s.complete,
        "|J_83| = 43038": s.cardinality == 43038,
        "M_83 = 339": s.extinction_time == 339,
        "eleven valuation-3 blocks": s.valuation3_blocks == want,
    }, f"|J|={s.cardinality} M={s.extinction_time} v3 blocks={s.valuation3_blocks} in {dt:.1f}s")


def test_criterion_4_census():
    window = census(490_000, 500_000)
    first = density_table(census(5, 10_000), 5, 10_000)
    h = sum(r.harmonic for r in window)
    record(4, {
        "772 primes in window": len(window) == 772,
        "284 harmonic in window": h == 284,
        "[5, 10^4] ratio 0.36430": abs(first.ratio - 0.36430) <= 1e-5,
    }, f"window {h}/{len(window)}, first bar {first.harmonic}/{first.primes} = {first.ratio:.5f}")


def test_criterion_5_range():
    recs = census(5, 16843)
    h = sum(r.harmonic for r in recs)
    record(5, {"1942 primes": len(recs) == 1942, "706 harmonic": h == 706}, f"{h}/{len(recs)}")


def test_criterion_6_wolstenholme():
    checks = {}
    primes = list(primes_between(5, 16843))
    # fast route: H_{p-1}/p mod p^2 for every prime
    quotients = {p: wolstenholme_quotient(p) for p in primes}
    checks["v >= 2 (fast) for p <= 10^4"] = all(quotients[p] % p == 0 for p in primes if p <= 10_000)
    cubed = [p for p in primes if quotients[p] % p == 0 and quotients[p] // p % p == 0]
    checks["v >= 3 only at 16843 (fast)"] = cubed == [16843]
    # plain route: prefix tables at precision 3
    checks["v >= 2 (prefix tables) for p <= 10^4"] = all(
        valuation(prefix_table(p, 3)[p - 1]).value >= 2 for p in primes if p <= 10_000
    )
    v16843 = valuation(prefix_table(16843, 5)[16842])
    checks["v_16843(H_16842) >= 3 (prefix table)"] = v16843.value >= 3
    record(6, checks, f"{sum(p <= 10_000 for p in primes)} primes <= 10^4, v_16843 = {v16843}, v>=3 set {cubed}")


def test_criterion_7_oracle_and_series():
    checks = {}
    for p in (3, 5, 7, 11, 13):
        levels = math.ceil(math.log(10**4 + 1, p)) + 1
        s = enumerate_jp(p, EnumConfig(target_depth=levels, max_depth=levels, keep_elements=True))
        got = [(n, v) for n, v in s.elements if n <= 10**4]
        want = [(n, str(v)) for n, v in naive_jp(p, 10**4)]
        checks[f"p={p} matches oracle on [1, 10^4]"] = got == want

    rng = random.Random(7)
    primes = [int(q) for q in primes_between(3, 200)]
    extrapolated = loss_ok = 0
    for _ in range(50):
        p, N = rng.choice(primes), rng.randint(1, 30)
        fit = fit_coefficients(p, N)
        prec = fit.effective_precision
        bs = restricted_sums(p, prec, N + 5)
        extrapolated += all(fit.evaluate(n, prec) == bs[n - 1].residue for n in range(N + 1, N + 6))
        loss_ok += fit.loss < 2 * N / (p - 1)
    checks["50 extrapolations"] = extrapolated == 50
    checks["Vandermonde loss < 2N/(p-1)"] = loss_ok == 50
    record(7, checks, f"{extrapolated}/50 extrapolations, {loss_ok}/50 loss bounds")


def test_criterion_8_structure(runs, monkeypatch):
    checks = {}
    # {p-1, p^2-p, p^2-1} in J_p, from the enumerator for small p and the census path beyond
    small = [int(q) for q in primes_between(5, 400)]
    missing = []
    for p in small:
        s = enumerate_jp(p, EnumConfig(target_depth=2, max_depth=2, keep_elements=True))
        members = {n for n, _ in s.elements}
        if not {p - 1, p * p - p, p * p - 1} <= members:
            missing.append(p)
    checks["forced triple (enumerator, p < 400)"] = not missing
    # is_harmonic raises unless p-1, p^2-p and p^2-1 are all members
    for p in primes_between(400, 16843):
        is_harmonic(p)

    # H_{pn+k} = H_n/p + H_k (mod p) checked independently on every expanded node of a full p=11 run
    real_expand = enumerator.expand
    expanded = bad = 0

    def checked(node, series, prefix):
        nonlocal expanded, bad
        kids = real_expand(node, series, prefix)
        expanded += 1
        p = prefix.prime
        u = node.h_value.residue // p % p
        for child in kids:
            k = child.n - p * node.n
            bad += (child.h_value.residue - u - prefix[k].residue) % p != 0
        return kids

    monkeypatch.setattr(enumerator, "expand", checked)
    enumerate_jp(11)
    monkeypatch.undo()
    checks["mod-p lifting identity on every expanded node"] = expanded > 0 and bad == 0

    done = [summary_for(runs, p)[0] for p in (11, 127, 83)]
    done += [enumerate_jp(p) for p in (3, 5, 7, 13, 17, 19, 23, 29, 31)]
    checks["growth bound"] = all(s.complete and not s.growth_bound_violations() for s in done)

    restarted = enumerate_jp(11, EnumConfig(target_depth=16))
    fresh = enumerate_jp(11, EnumConfig(target_depth=32))
    checks["restart determinism p=11"] = restarted.restarts == 1 and (
        restarted.block_sizes, restarted.valuation_histogram, restarted.valuation3_elements
    ) == (fresh.block_sizes, fresh.valuation_histogram, fresh.valuation3_elements)
    record(8, checks, f"{len(small)} enumerated triples, {expanded} nodes checked, {len(done)} growth-bound summaries")


TOP_BARS = [
    0.36430, 0.36205, 0.39674, 0.37161, 0.37742, 0.37338, 0.40319, 0.37916, 0.38813, 0.36746,
    0.36469, 0.39151, 0.36364, 0.35840, 0.37709, 0.36527, 0.36978, 0.36568, 0.38768, 0.39312,
    0.34508, 0.38964, 0.40659, 0.34184, 0.32685, 0.35183, 0.38385, 0.38734, 0.36742, 0.37904,
    0.37484, 0.40842, 0.35678, 0.33933, 0.37484, 0.35256, 0.32810, 0.35476, 0.38462, 0.34174,
    0.36605, 0.38918, 0.37047, 0.36329, 0.39608, 0.36835, 0.36601, 0.35038, 0.36794, 0.36788,
]


@pytest.mark.extended
def test_density_top_bars():
    from harmonic_jp.census import default_workers

    recs = census(5, 500_000, workers=default_workers())
    table = density_table(recs, 5, 500_000, 10_000)
    assert len(table.rows) == 51 and table.rows[-1].primes == 0  # [500000, 500000]
    got = [round(r.ratio, 5) for r in table.rows[:50]]
    off = [(i, g, w) for i, (g, w) in enumerate(zip(got, TOP_BARS)) if abs(g - w) > 1e-5]
    assert not off, off
