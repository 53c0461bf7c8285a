"""Arbitrary-precision complex scalars, the tolerance configuration and exact constants.

All big-complex values are ``gmpy2.mpc`` instances.  Precision is taken from the
active gmpy2 context; use :func:`workprec` or :meth:`ToleranceConfig.context` to
set it.  Constants are recomputed (and cached) per precision level, never read
from decimal literals.
"""

from __future__ import annotations

import ast
import math
import re
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

BigComplex = mpc
_MPQ = type(gmpy2.mpq(0))

DEFAULT_PRECISION = 256
ESCALATED_PRECISION = 1024


class PrecisionError(ValueError):
    """Raised when a tolerance is too tight for the working precision."""


@dataclass(frozen=True)
class ToleranceConfig:
    precision_bits: int = DEFAULT_PRECISION
    eq_tolerance: float = 2.0 ** -128
    root_polish_iterations: int = 400

    def __post_init__(self):
        if self.precision_bits < 64:
            raise PrecisionError("precision_bits must be at least 64")
        if not self.eq_tolerance > 0:
            raise PrecisionError("eq_tolerance must be positive")
        # headroom of at least 2^32 between rounding level and comparison tolerance
        if math.log2(self.eq_tolerance) < 32 - self.precision_bits:
            raise PrecisionError(
                f"eq_tolerance {self.eq_tolerance!r} leaves less than 2^32 headroom "
                f"at {self.precision_bits} bits")

    @classmethod
    def escalated(cls, bits: int = ESCALATED_PRECISION) -> "ToleranceConfig":
        return cls(precision_bits=bits, eq_tolerance=2.0 ** -(bits // 2),
                   root_polish_iterations=600)

    def context(self):
        return workprec(self.precision_bits)

    @property
    def tol(self) -> mpfr:
        return mpfr(self.eq_tolerance)


DEFAULT_CONFIG = ToleranceConfig()


@contextmanager
def workprec(bits: int):
    """Run the enclosed block with ``bits`` of mantissa for mpfr and mpc."""
    with gmpy2.context(gmpy2.get_context(), precision=bits,
                       real_prec=bits, imag_prec=bits) as ctx:
        yield ctx


def current_precision() -> int:
    return gmpy2.get_context().precision


def to_mpc(x) -> mpc:
    """Convert ints, Fractions, floats, complex, mpfr or mpc to mpc at the working precision."""
    if isinstance(x, mpc):
        return mpc(x)
    if isinstance(x, Fraction):
        return mpc(mpfr(x.numerator) / x.denominator)
    if isinstance(x, complex):
        return mpc(mpfr(x.real), mpfr(x.imag))
    if isinstance(x, _MPQ):
        return mpc(mpfr(x))
    return mpc(mpfr(x))


# --------------------------------------------------------------------------
# constants


@lru_cache(maxsize=None)
def _root_of_unity(n: int, k: int, bits: int) -> mpc:
    with workprec(bits):
        return gmpy2.root_of_unity(n, k % n)


def root_of_unity(n: int, k: int = 1) -> mpc:
    """exp(2 pi i k / n) at the working precision."""
    return _root_of_unity(n, k % n, current_precision())


def eps5(k: int = 1) -> mpc:
    """Powers of the primitive fifth root of unity e^{2 pi i / 5}."""
    return root_of_unity(5, k)


def omega3(k: int = 1) -> mpc:
    """Powers of the primitive cube root of unity j = e^{2 pi i / 3}."""
    return root_of_unity(3, k)


@lru_cache(maxsize=None)
def _sqrt(n: int, bits: int) -> mpc:
    with workprec(bits):
        return gmpy2.sqrt(mpc(n))


def sqrt_int(n: int) -> mpc:
    """Principal square root of an integer (sqrt(-15) = i sqrt(15))."""
    return _sqrt(n, current_precision())


def sqrt5() -> mpc:
    return sqrt_int(5)


def sqrt_m15() -> mpc:
    return sqrt_int(-15)


def golden() -> mpc:
    return (1 + sqrt5()) / 2


# --------------------------------------------------------------------------
# small algebraic-expression evaluator used by the shipped generator data

_NAMES = {
    "i": lambda: mpc(0, 1),
    "j": omega3,
    "tau": golden,
    "sqrt5": sqrt5,
    "sqrt_m15": sqrt_m15,
}


def eval_expression(text: str) -> mpc:
    """Evaluate an arithmetic expression over the rationals and a few named constants.

    Supports ``+ - * / **`` with integer exponents, integer and rational literals and
    the names ``i``, ``j``, ``tau``, ``sqrt5``, ``sqrt_m15``.  Anything else raises
    ``ValueError``; the input is never passed to ``eval``.
    """
    tree = ast.parse(text, mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return mpc(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]()
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise ValueError(f"only integer exponents allowed in {text!r}")
                return ev(node.left) ** node.right.value
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
        raise ValueError(f"unsupported expression element in {text!r}: {ast.dump(node)}")

    return ev(tree)


# --------------------------------------------------------------------------
# parsing and formatting

_COMPLEX_RE = re.compile(
    r"""^\s*
    (?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?
    (?:(?P<im>[+-]\s*(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)\s*[ij])?
    \s*$""",
    re.VERBOSE,
)


def parse_complex(text: str) -> mpc:
    """Parse ``a``, ``a+bi``, ``-bi`` or ``bi`` into an mpc at the working precision.

    Decimal digits are rounded once, at the working precision.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    m = _COMPLEX_RE.match(s)
    if m is None or (m.group("re") is None and m.group("im") is None):
        # a pure imaginary literal without sign, e.g. "2.5i"
        m2 = re.fullmatch(r"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?[ij]", s)
        if m2 is None:
            raise ValueError(f"malformed complex literal {text!r}")
        return mpc(0, mpfr(m2.group(1) or "1"))
    re_part = mpfr(m.group("re")) if m.group("re") else mpfr(0)
    im_txt = m.group("im")
    if im_txt is None:
        return mpc(re_part, 0)
    if im_txt in ("+", "-"):
        im_txt += "1"
    return mpc(re_part, mpfr(im_txt))


def parse_complex_list(text: str) -> list[mpc]:
    parts = [p for p in text.split(",")]
    if not parts or any(not p.strip() for p in parts):
        raise ValueError(f"malformed complex list {text!r}")
    return [parse_complex(p) for p in parts]


def decimal_digits(bits: int | None = None) -> int:
    bits = current_precision() if bits is None else bits
    return int(math.ceil(bits * math.log10(2))) + 1


def format_real(x: mpfr, digits: int | None = None) -> str:
    """Scientific decimal string carrying the full working precision."""
    digits = decimal_digits() if digits is None else digits
    x = mpfr(x)
    if gmpy2.is_zero(x):
        return "0"
    if not gmpy2.is_finite(x):
        return str(x)
    mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    mant = mant.rstrip("0") or "0"
    head, tail = mant[0], mant[1:]
    e = exp - 1
    body = head + ("." + tail if tail else "")
    return f"{sign}{body}e{e:+d}"


def format_complex(z, digits: int | None = None) -> str:
    z = mpc(z)
    return f"({format_real(z.real, digits)}, {format_real(z.imag, digits)})"


def cabs(z) -> mpfr:
    return abs(mpc(z))


class DegeneracyError(ArithmeticError):
    """An input sits on a special locus where a pipeline stage is undefined."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
