from __future__ import annotations

import cmath
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rosa.cyclotomic import CyclotomicField, cyclotomic_polynomial


def test_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(5) == (1, 1, 1, 1, 1)
    assert cyclotomic_polynomial(9) == (1, 0, 0, 1, 0, 0, 1)
    assert cyclotomic_polynomial(15) == (1, -1, 0, 1, -1, 1, 0, -1, 1)
    with pytest.raises(ValueError):
        cyclotomic_polynomial(0)


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 15])
def test_phi_vanishes_at_primitive_root(n):
    z = cmath.exp(2j * cmath.pi / n)
    assert abs(sum(c * z**k for k, c in enumerate(cyclotomic_polynomial(n)))) < 1e-9


fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def elements(n):
    d = len(cyclotomic_polynomial(n)) - 1
    return st.lists(fractions, min_size=d, max_size=d)


@pytest.mark.parametrize("n", [5, 7, 9])
def test_field_arithmetic(n):
    F = CyclotomicField(n)

    @given(elements(n), elements(n))
    def check(a, b):
        a, b = F.element(a), F.element(b)
        za, zb = F.to_complex(a), F.to_complex(b)
        assert abs(F.to_complex(F.mul(a, b)) - za * zb) < 1e-6 * (1 + abs(za * zb))
        assert abs(F.to_complex(F.add(a, b)) - (za + zb)) < 1e-9
        assert abs(F.to_complex(F.conj(a)) - za.conjugate()) < 1e-9
        if any(a):
            assert F.mul(a, F.inv(a)) == F.rational(1)

    check()


def test_roots_and_predicates():
    F = CyclotomicField(5)
    assert F.mul(F.zeta(2), F.zeta(3)) == F.rational(1)
    assert F.zeta(5) == F.rational(1)
    total = F.rational(0)
    for k in range(5):
        total = F.add(total, F.zeta(k))
    assert F.is_integer(total) and total == F.rational(0)
    # zeta + zeta^-1 = 2 cos(2 pi / 5) is irrational
    assert not F.is_rational(F.add(F.zeta(1), F.zeta(-1)))
    assert F.is_rational(F.rational(Fraction(1, 3)))
    assert not F.is_integer(F.rational(Fraction(1, 3)))
    with pytest.raises(ZeroDivisionError):
        F.inv(F.rational(0))
