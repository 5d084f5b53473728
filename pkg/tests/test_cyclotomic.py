import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2glue.cyclotomic import Cyclotomic, cyclotomic_polynomial

levels = st.sampled_from([1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 24])
coef = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def elements(draw, level=None):
    n = level or draw(levels)
    d = Cyclotomic.degree(n)
    return Cyclotomic(n, draw(st.lists(coef, min_size=d, max_size=d)))


def close(a, b):
    return abs(complex(a) - complex(b)) < 1e-9


@pytest.mark.parametrize("n", range(1, 31))
def test_cyclotomic_polynomial_roots(n):
    p = cyclotomic_polynomial(n)
    # coefficients low -> high; roots are the primitive n-th roots of unity
    roots = np.roots(list(reversed(p)))
    assert len(roots) == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
    for r in roots:
        assert abs(abs(r) - 1) < 1e-8
        assert abs(r**n - 1) < 1e-6


def test_zeta_power_cycles():
    for n in (3, 5, 8, 12):
        z = Cyclotomic.zeta(n)
        assert z**n == 1
        assert all(z**k != 1 for k in range(1, n))
        tot = Cyclotomic.rational(n, 0)
        for k in range(n):
            tot = tot + z**k
        assert tot.is_zero()


@pytest.mark.parametrize("n", [5, 7, 8, 12])
def test_cos2pi_numeric(n):
    for k in range(n):
        assert close(Cyclotomic.cos2pi(n, k), math.cos(2 * math.pi * k / n))


def test_known_values():
    # 2 cos(2 pi / 5) = (sqrt 5 - 1)/2 satisfies x^2 + x - 1 = 0
    x = Cyclotomic.cos2pi(5, 1) * 2
    assert (x * x + x - 1).is_zero()
    assert Cyclotomic.cos2pi(6, 1) == Cyclotomic.rational(6, "1/2")


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_field_axioms_and_embedding(data):
    n = data.draw(levels)
    a, b, c = (data.draw(elements(n)) for _ in range(3))
    assert (a + b) * c == a * c + b * c
    assert close(a * b, complex(a) * complex(b))
    if not a.is_zero():
        assert a * a.inverse() == 1
        assert close(b / a, complex(b) / complex(a))


@settings(max_examples=60, deadline=None)
@given(st.data(), st.sampled_from([2, 3, 4]))
def test_lift_is_a_ring_map(data, mult):
    n = data.draw(levels)
    a, b = data.draw(elements(n)), data.draw(elements(n))
    big = n * mult
    assert close(a.lift(big), a)
    assert (a * b).lift(big) == a.lift(big) * b.lift(big)
    assert (a + b).lift(big) == a.lift(big) + b.lift(big)


@settings(max_examples=60, deadline=None)
@given(elements())
def test_conjugate(a):
    assert close(a.conjugate(), complex(a).conjugate())
    assert (a * a.conjugate() - (a * a.conjugate()).conjugate()).is_zero()


def test_galois_action():
    z = Cyclotomic.zeta(7)
    assert z.galois(3) == Cyclotomic.zeta(7, 3)
    assert close(z.galois(3), cmath.exp(2j * math.pi * 3 / 7))


def test_rationality():
    assert Cyclotomic.rational(8, 3).is_rational()
    assert not Cyclotomic.zeta(8).is_rational()
    with pytest.raises(ValueError):
        Cyclotomic.zeta(8).to_fraction()
