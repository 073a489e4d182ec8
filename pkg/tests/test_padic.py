import json

import pytest
from hypothesis import given, strategies as st

from harmonic_jp.padic import (
    NonUnit,
    NotDivisible,
    PadicInt,
    PrecisionExhausted,
    Valuation,
    add,
    batch_inverse,
    div_exact_p,
    inv_unit,
    mul,
    mul_by_p,
    valuation,
)

from conftest import frac_residue
from fractions import Fraction

PRIMES = [3, 5, 7, 11, 13, 127, 16843]


def P(p, s, r):
    return PadicInt(p, s, r)


def test_add_examples():
    assert add(P(5, 2, 24), P(5, 2, 1)) == P(5, 2, 0)
    x = P(7, 2, 30)
    assert add(P(7, 3, 0), x) == x
    assert add(P(5, 3, 50), P(5, 2, 10)) == P(5, 2, 10)


def test_mul_examples():
    assert mul(P(5, 2, 7), P(5, 2, 18)) == P(5, 2, 1)
    x = P(11, 4, 1234)
    assert mul(x, P(11, 4, 1)) == x
    assert mul(P(3, 2, 3), P(3, 2, 3)) == P(3, 2, 0)


def test_mismatched_primes():
    with pytest.raises(ValueError):
        add(P(5, 2, 1), P(7, 2, 1))
    with pytest.raises(ValueError):
        mul(P(5, 2, 1), P(7, 2, 1))


def test_inv_unit_examples():
    assert inv_unit(P(5, 2, 7)) == P(5, 2, 18)
    assert inv_unit(P(7, 1, 6)) == P(7, 1, 6)
    with pytest.raises(NonUnit):
        inv_unit(P(5, 2, 10))


def test_div_exact_p_examples():
    assert div_exact_p(P(5, 3, 50), 1) == P(5, 2, 10)
    assert div_exact_p(P(5, 3, 0), 2) == P(5, 1, 0)
    with pytest.raises(NotDivisible):
        div_exact_p(P(5, 3, 7), 1)
    with pytest.raises(PrecisionExhausted):
        div_exact_p(P(5, 3, 0), 3)


def test_valuation_examples():
    assert valuation(P(5, 3, 50)) == Valuation(2, False)
    assert valuation(P(5, 3, 0)) == Valuation(3, True)
    # H_6 = 49/20
    r = frac_residue(Fraction(49, 20), 7, 3)
    assert r == 49 * pow(20, -1, 343) % 343
    assert valuation(P(7, 3, r)) == Valuation(2, False)


def test_batch_inverse_examples():
    assert batch_inverse([P(5, 2, 1)]) == [P(5, 2, 1)]
    assert batch_inverse([P(5, 2, 7), P(5, 2, 18)]) == [P(5, 2, 18), P(5, 2, 7)]
    assert batch_inverse([]) == []


def test_batch_inverse_reports_index():
    with pytest.raises(NonUnit) as err:
        batch_inverse([P(11, 5, 1), P(11, 5, 2), P(11, 5, 22)])
    assert err.value.index == 2


def test_batch_inverse_100_random_units():
    import random

    rng = random.Random(11)
    m = 11**5
    vals = []
    while len(vals) < 100:
        r = rng.randrange(m)
        if r % 11:
            vals.append(P(11, 5, r))
    assert batch_inverse(vals) == [inv_unit(v) for v in vals]


def test_invariants_enforced():
    with pytest.raises(ValueError):
        PadicInt(5, 0, 0)
    with pytest.raises(ValueError):
        PadicInt(5, 2, 25)


def test_serialization_round_trip():
    x = P(127, 9, 127**8 + 12345)
    rec = json.loads(json.dumps(x.to_record()))
    assert rec["residue"] == format(x.residue, "x")
    assert PadicInt.from_record(rec) == x


@st.composite
def padics(draw, unit=False):
    p = draw(st.sampled_from(PRIMES))
    s = draw(st.integers(1, 12))
    r = draw(st.integers(0, p**s - 1))
    if unit and r % p == 0:
        r += 1
    return PadicInt(p, s, r)


@st.composite
def same_prime_pair(draw):
    a = draw(padics())
    s = draw(st.integers(1, 12))
    b = PadicInt(a.prime, s, draw(st.integers(0, a.prime**s - 1)))
    return a, b


@given(padics(unit=True))
def test_inverse_property(a):
    assert mul(a, inv_unit(a)).residue == 1 % a.modulus


@given(padics(), st.integers(1, 5))
def test_div_mul_round_trip(a, t):
    assert div_exact_p(mul_by_p(a, t), t) == a


@given(same_prime_pair())
def test_valuation_additive(pair):
    a, b = pair
    va, vb = valuation(a), valuation(b)
    if va.saturated or vb.saturated or va.value + vb.value >= min(a.precision, b.precision):
        return
    assert valuation(mul(a, b)).value == va.value + vb.value


@given(st.sampled_from(PRIMES), st.integers(1, 8), st.lists(st.integers(1, 10**30), min_size=1, max_size=40))
def test_batch_inverse_matches_map(p, s, raw):
    vals = [PadicInt.of(r if r % p else r + 1, p, s) for r in raw]
    assert batch_inverse(vals) == [inv_unit(v) for v in vals]


@given(same_prime_pair())
def test_precision_is_min(pair):
    a, b = pair
    assert add(a, b).precision == min(a.precision, b.precision)
    assert mul(a, b).precision == min(a.precision, b.precision)
