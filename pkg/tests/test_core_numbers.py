import math

import gmpy2
import pytest
from gmpy2 import mpc, mpfr

from quintsext.core.numbers import (DEFAULT_CONFIG, PrecisionError, ToleranceConfig, eval_expression,
                                    format_complex, format_real, omega3, parse_complex,
                                    parse_complex_list, root_of_unity, sqrt_m15, workprec)


@pytest.mark.parametrize("text,expect", [
    ("3", (3, 0)), ("-2.5", (-2.5, 0)), ("1+2i", (1, 2)), ("1-2j", (1, -2)),
    ("-i", (0, -1)), ("2.5i", (0, 2.5)), ("i", (0, 1)), ("1e-3+4e2i", (1e-3, 400)),
])
def test_parse_complex(text, expect):
    z = parse_complex(text)
    assert z == mpc(mpfr(str(expect[0])), mpfr(str(expect[1])))


@pytest.mark.parametrize("bad", ["", "x", "1+", "1++2i", "1,2", "2i3"])
def test_parse_complex_rejects(bad):
    with pytest.raises(ValueError):
        parse_complex(bad)


def test_parse_list_rejects_empty_items():
    with pytest.raises(ValueError):
        parse_complex_list("1,,2")
    assert len(parse_complex_list("1, 2+i ,3")) == 3


def test_decimal_literal_rounds_once_at_working_precision():
    with workprec(512):
        z = parse_complex("0.1")
        assert z.real.precision == 512
        assert abs(z.real - mpfr("0.1")) == 0


def test_format_round_trips_every_bit():
    with workprec(256):
        x = gmpy2.const_pi() * mpc(1, -1) / 7
        s = format_complex(x)
        back = parse_complex(s.strip("()").replace(", ", "+").replace("+-", "-") + "i")
        assert back == x


def test_format_real_zero_and_sign():
    assert format_real(mpfr(0)) == "0"
    assert format_real(mpfr(-2)).startswith("-2e+0")


def test_roots_of_unity():
    assert abs(omega3() ** 3 - 1) < DEFAULT_CONFIG.tol
    assert abs(sum(root_of_unity(5, k) for k in range(5))) < DEFAULT_CONFIG.tol
    assert abs(sqrt_m15() ** 2 + 15) < DEFAULT_CONFIG.tol and sqrt_m15().imag > 0


def test_expression_evaluator():
    assert abs(eval_expression("(tau - 1) * tau") - 1) < DEFAULT_CONFIG.tol
    assert abs(eval_expression("j**3") - 1) < DEFAULT_CONFIG.tol
    assert eval_expression("1/2") == mpc(0.5)
    for bad in ("__import__('os')", "tau ** 0.5", "foo", "[1]"):
        with pytest.raises(ValueError):
            eval_expression(bad)


def test_tolerance_config_headroom():
    ToleranceConfig(256, 2.0 ** -128)
    with pytest.raises(PrecisionError):
        ToleranceConfig(128, 2.0 ** -120)
    with pytest.raises(PrecisionError):
        ToleranceConfig(32)
    esc = ToleranceConfig.escalated()
    assert esc.precision_bits == 1024 and math.log2(esc.eq_tolerance) == -512
