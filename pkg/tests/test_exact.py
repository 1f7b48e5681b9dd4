from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from samelson_lab.exact import (
    ExactScalar,
    exact,
    exact_i,
    sqrt_rational,
    squarefree_split,
)

frac = st.fractions(min_value=-50, max_value=50, max_denominator=12)
surd = st.sampled_from([1, 2, 3, 5])


@st.composite
def scalars(draw, d=None):
    if d is None:
        d = draw(surd)
    return ExactScalar(draw(frac), draw(frac), draw(frac), draw(frac), d)


def test_normalization():
    # (1) sqrt parts fold into rational parts when d == 1
    x = ExactScalar(1, 2, 3, 4, 1)
    assert (x.ra, x.rb, x.ia, x.ib, x.d) == (3, 0, 7, 0, 1)
    # (2) vanishing sqrt parts drop d back to 1
    y = ExactScalar(1, 0, 2, 0, 3)
    assert y.d == 1
    # (3) non-squarefree d rejected
    with pytest.raises(ValueError):
        ExactScalar(1, 1, 0, 0, 4)


def test_squarefree_split():
    assert squarefree_split(1) == (1, 1)
    assert squarefree_split(12) == (2, 3)
    assert squarefree_split(49) == (7, 1)
    assert squarefree_split(90) == (3, 10)


def test_sqrt_rational():
    r = sqrt_rational(Fraction(9, 4))
    assert r == ExactScalar(Fraction(3, 2))
    s = sqrt_rational(12)
    assert (s.rb, s.d) == (2, 3)
    assert s * s == exact(12)
    t = sqrt_rational(Fraction(1, 2))
    assert t * t == ExactScalar(Fraction(1, 2))
    with pytest.raises(ValueError):
        sqrt_rational(-1)


def test_mixed_surds_rejected():
    a = ExactScalar(0, 1, 0, 0, 2)
    b = ExactScalar(0, 1, 0, 0, 3)
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        a * b
    # rational scalars join either side
    assert (a + exact(1)).d == 2
    assert (exact(2) * b).rb == 2


@given(scalars(), scalars(d=1), scalars(d=1))
def test_field_axioms_shared_surd(x, y, z):
    d = x.d
    y = ExactScalar(y.ra, y.rb, y.ia, y.ib, 1)
    z = ExactScalar(z.ra, z.rb, z.ia, z.ib, 1)
    # (1) commutativity and associativity
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    # (2) distributivity
    assert x * (y + z) == x * y + x * z
    # (3) additive inverse
    assert (x - x).is_zero()


@given(scalars())
def test_multiplicative_inverse(x):
    if x.is_zero():
        with pytest.raises(ZeroDivisionError):
            x.inverse()
    else:
        assert x * x.inverse() == exact(1)
        assert (exact(1) / x) * x == exact(1)


@given(scalars())
def test_conjugation(x):
    assert x.conjugate().conjugate() == x
    n = x * x.conjugate()
    assert n.is_real()
    if not x.is_zero():
        assert n.sign() == 1


@given(scalars())
@settings(max_examples=60)
def test_float_agrees(x):
    got = complex(x)
    import math

    rd = math.sqrt(x.d)
    want = complex(float(x.ra) + float(x.rb) * rd, float(x.ia) + float(x.ib) * rd)
    assert abs(got - want) < 1e-12


@given(scalars())
def test_token_round_trip(x):
    assert ExactScalar.from_token(x.to_token()) == x


def test_token_forms():
    assert ExactScalar.from_token("2/3") == exact(Fraction(2, 3))
    assert ExactScalar.from_token("-1i") == -exact_i()
    assert ExactScalar.from_token("1+1/2r3") == ExactScalar(1, Fraction(1, 2), 0, 0, 3)
    assert ExactScalar.from_token("r2+ir2") == ExactScalar(0, 1, 0, 1, 2)
    assert ExactScalar.from_token("0") == exact(0)
    with pytest.raises(ValueError):
        ExactScalar.from_token("r2+r3")


@given(scalars(d=3), scalars(d=3))
def test_order_real(x, y):
    x, y = x.real_part(), y.real_part()
    # trichotomy against the float embedding
    fx, fy = float(x), float(y)
    if abs(fx - fy) > 1e-9:
        assert (x < y) == (fx < fy)
    assert (x <= y) or (y <= x)
    assert (x < y) == (not y <= x)


def test_sign_borderline():
    # 7 - 4*sqrt(3) > 0 but barely (float value ~ 0.0718)
    x = ExactScalar(7, -4, 0, 0, 3)
    assert x.sign() == 1
    # 1 - sqrt(3)/1.73... : 26 - 15*sqrt(3) > 0, 25 - 15*sqrt(3) < 0
    assert ExactScalar(26, -15, 0, 0, 3).sign() == 1
    assert ExactScalar(25, -15, 0, 0, 3).sign() == -1
    with pytest.raises(ValueError):
        exact_i().sign()


def test_no_float_coercion():
    with pytest.raises(TypeError):
        exact(1) + 0.5
    with pytest.raises(TypeError):
        0.5 * exact(1)
    with pytest.raises(ValueError):
        float(exact_i())


def test_powers():
    i = exact_i()
    assert i ** 2 == exact(-1)
    assert i ** -1 == -i
    r3 = sqrt_rational(3)
    assert r3 ** 4 == exact(9)
    assert (r3 + i) ** 0 == exact(1)


def test_hash_matches_rational():
    assert hash(exact(Fraction(3, 2))) == hash(Fraction(3, 2))
    assert exact(2) == 2
    assert 2 == exact(2)
    s = {exact(1), 1, Fraction(1)}
    assert len(s) == 1
