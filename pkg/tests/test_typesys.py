import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfab.arith import INF
from tfab.typesys import (
    EQ,
    GE,
    INCOMPARABLE,
    LE,
    Characteristic,
    TypeClass,
    char_compare,
    char_inf,
    char_to_text,
    parse_characteristic,
    type_le,
    type_of_char,
)

PRIMES = [2, 3, 5, 7]


def chars(max_entry=3):
    entry = st.one_of(st.integers(min_value=0, max_value=max_entry), st.just(INF))
    return st.fixed_dictionaries({}, optional={p: entry for p in PRIMES}).map(
        Characteristic
    )


def test_compare_examples():
    assert char_compare(Characteristic({2: INF}), Characteristic()) == GE
    assert char_compare(Characteristic({2: 1}), Characteristic({3: 1})) == INCOMPARABLE
    a = Characteristic({2: INF, 3: 2})
    assert char_compare(a, a) == EQ


def test_inf_examples():
    a = Characteristic({2: INF, 3: 2})
    b = Characteristic({2: 1, 3: INF})
    assert char_inf(a, b) == Characteristic({2: 1, 3: 2})
    assert char_inf(a, a) == a
    assert char_inf(Characteristic({2: INF}), Characteristic()) == Characteristic()


def test_type_of_char_examples():
    assert type_of_char(Characteristic({2: INF, 3: 5})) == TypeClass({2})
    assert type_of_char(Characteristic()) == TypeClass()
    assert type_of_char(Characteristic({2: INF, 5: INF})) == TypeClass({2, 5})


def test_type_le():
    assert type_le(TypeClass(), TypeClass({2}))
    assert not type_le(TypeClass({2}), TypeClass({3}))
    t = TypeClass({2, 7})
    assert type_le(t, t)


def test_zero_entries_not_stored():
    assert Characteristic({2: 0, 3: 1}).entries == {3: 1}


@given(chars())
@settings(max_examples=60)
def test_finite_perturbation_preserves_type(c):
    perturbed = dict(c.entries)
    for p in PRIMES:
        e = c.value_at(p)
        if e is not INF:
            perturbed[p] = e + 2
    assert type_of_char(Characteristic(perturbed)) == type_of_char(c)


@given(chars(), chars())
@settings(max_examples=80)
def test_compare_le_implies_type_le(a, b):
    if char_compare(a, b) in (LE, EQ):
        assert type_le(type_of_char(a), type_of_char(b))


@given(chars(max_entry=2), chars(max_entry=2), chars(max_entry=2))
@settings(max_examples=60)
def test_char_inf_is_glb(a, b, c):
    m = char_inf(a, b)
    assert char_compare(m, a) in (LE, EQ)
    assert char_compare(m, b) in (LE, EQ)
    if char_compare(c, a) in (LE, EQ) and char_compare(c, b) in (LE, EQ):
        assert char_compare(c, m) in (LE, EQ)


def test_text_round_trip():
    for c in [
        Characteristic(),
        Characteristic({2: INF}),
        Characteristic({2: INF, 3: 2, 7: 1}),
    ]:
        assert parse_characteristic(char_to_text(c)) == c
    assert char_to_text(Characteristic({3: 2, 2: INF})) == "2^inf * 3^2"
    assert char_to_text(Characteristic()) == "Z"


def test_bad_prime_rejected():
    from tfab.typesys import NonPrimeInUniverse

    with pytest.raises(NonPrimeInUniverse):
        Characteristic({4: 1})
