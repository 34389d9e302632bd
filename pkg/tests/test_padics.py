import pytest

from padic_dga.errors import PrecisionError
from padic_dga.padics import (
    PAdicInt,
    int_valuation,
    nu_max_for_window,
    padic_reduce,
    require_precision,
    valuation,
)


def test_reduce_zero_case():
    a = padic_reduce(0, 3, 2)
    assert a.residue == 0
    assert valuation(a) == 2  # "at least N"


def test_reduce_prime_valuation():
    a = padic_reduce(3, 3, 4)
    assert a.residue == 3
    assert valuation(a) == 1


def test_reduce_negative_wraps_to_unit():
    a = padic_reduce(-1, 3, 2)
    assert a.residue == 8
    assert valuation(a) == 0
    assert a.is_unit()


def test_reduce_rejects_bad_prime_and_precision():
    with pytest.raises(ValueError):
        padic_reduce(1, 4, 2)
    with pytest.raises(ValueError):
        padic_reduce(1, 2, 2)
    with pytest.raises(ValueError):
        padic_reduce(1, 3, 0)


def test_valuation_examples():
    assert valuation(padic_reduce(9, 3, 3)) == 2
    assert valuation(padic_reduce(1, 3, 3)) == 0
    assert valuation(padic_reduce(0, 3, 4)) == 4


def test_valuation_matches_integer_nu():
    # padic_reduce(m, p, N) has valuation min(nu(m), N) for m != 0
    for m in range(1, 200):
        for p, N in [(3, 3), (5, 2)]:
            assert valuation(padic_reduce(m, p, N)) == min(int_valuation(m, p), N)


def test_valuation_of_product_is_capped_sum():
    q = 3 ** 4
    for a in range(0, q, 7):
        for b in range(0, q, 11):
            x, y = padic_reduce(a, 3, 4), padic_reduce(b, 3, 4)
            assert valuation(x * y) == min(valuation(x) + valuation(y), 4)


def test_arithmetic_and_inverse():
    a = padic_reduce(5, 3, 3)
    assert (a * a.inverse()).residue == 1
    assert (a - a).is_zero()
    assert (-a + a).is_zero()
    with pytest.raises(ZeroDivisionError):
        padic_reduce(3, 3, 3).inverse()


def test_mixed_rings_rejected():
    a = padic_reduce(1, 3, 3)
    b = padic_reduce(1, 5, 3)
    with pytest.raises(ValueError):
        a + b


def test_unit_part():
    a = padic_reduce(18, 3, 4)  # 2 * 3^2
    assert a.valuation() == 2
    assert a.unit_part().residue == 2


def test_precision_rule_window_40():
    # nu_max = 2 at m = +-9 for p = 3 on [-40, 40]
    assert nu_max_for_window(3, -40, 40) == 2
    require_precision(3, 4, -40, 40)
    with pytest.raises(PrecisionError, match="precision must be >= 4"):
        require_precision(3, 2, -40, 40)


def test_precision_rule_p5():
    require_precision(5, 3, -40, 40)
