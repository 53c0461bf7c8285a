"""Dense homogeneous polynomials in two or three variables over mpc.

Coefficients are stored densely in lexicographically descending monomial order
(``x1^d`` first).  Forms are immutable; arithmetic returns new forms.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Sequence

from gmpy2 import mpc, mpfr

from .numbers import to_mpc


class DimensionError(ValueError):
    """Mismatched number of variables, degree or point length."""


@lru_cache(maxsize=None)
def monomials(num_vars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of the given degree, lexicographically descending."""
    if num_vars == 1:
        return ((degree,),)
    out = []
    for a in range(degree, -1, -1):
        for rest in monomials(num_vars - 1, degree - a):
            out.append((a,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(num_vars: int, degree: int) -> dict:
    return {m: k for k, m in enumerate(monomials(num_vars, degree))}


@lru_cache(maxsize=64)
def _product_table(num_vars: int, d1: int, d2: int) -> tuple[tuple[int, ...], ...]:
    idx = monomial_index(num_vars, d1 + d2)
    m2 = monomials(num_vars, d2)
    return tuple(
        tuple(idx[tuple(a + b for a, b in zip(e1, e2))] for e2 in m2)
        for e1 in monomials(num_vars, d1))


def multinomial(exps: Sequence[int]) -> int:
    out = factorial(sum(exps))
    for e in exps:
        out //= factorial(e)
    return out


class HomogeneousForm:
    """A form of fixed degree in ``num_vars`` variables with dense mpc coefficients."""

    __slots__ = ("num_vars", "degree", "coeffs")

    def __init__(self, num_vars: int, degree: int, coeffs: Iterable | None = None):
        if num_vars < 1 or degree < 0:
            raise DimensionError("need num_vars >= 1 and degree >= 0")
        size = len(monomials(num_vars, degree))
        if coeffs is None:
            coeffs = (mpc(0),) * size
        else:
            coeffs = tuple(to_mpc(c) for c in coeffs)
            if len(coeffs) != size:
                raise DimensionError(f"expected {size} coefficients, got {len(coeffs)}")
        self.num_vars = num_vars
        self.degree = degree
        self.coeffs = coeffs

    # construction ----------------------------------------------------------

    @classmethod
    def from_dict(cls, num_vars: int, degree: int, terms: dict) -> "HomogeneousForm":
        idx = monomial_index(num_vars, degree)
        coeffs = [mpc(0)] * len(idx)
        for exps, c in terms.items():
            exps = tuple(exps)
            if len(exps) != num_vars or sum(exps) != degree:
                raise DimensionError(f"monomial {exps} is not of degree {degree} in {num_vars} vars")
            coeffs[idx[exps]] += to_mpc(c)
        return cls(num_vars, degree, coeffs)

    @classmethod
    def variable(cls, num_vars: int, i: int) -> "HomogeneousForm":
        exps = [0] * num_vars
        exps[i] = 1
        return cls.from_dict(num_vars, 1, {tuple(exps): 1})

    @classmethod
    def linear(cls, coefficients: Sequence) -> "HomogeneousForm":
        n = len(coefficients)
        return cls.from_dict(n, 1, {tuple(int(k == i) for k in range(n)): c
                                    for i, c in enumerate(coefficients)})

    @classmethod
    def constant(cls, num_vars: int, value) -> "HomogeneousForm":
        return cls(num_vars, 0, [value])

    # access ----------------------------------------------------------------

    @property
    def monomials(self) -> tuple[tuple[int, ...], ...]:
        return monomials(self.num_vars, self.degree)

    def coefficient(self, exps: Sequence[int]) -> mpc:
        return self.coeffs[monomial_index(self.num_vars, self.degree)[tuple(exps)]]

    def terms(self):
        """Yield (exponents, coefficient) for the nonzero coefficients."""
        for m, c in zip(self.monomials, self.coeffs):
            if c != 0:
                yield m, c

    def norm(self) -> mpfr:
        """Largest coefficient modulus."""
        return max((abs(c) for c in self.coeffs), default=mpfr(0))

    def is_zero(self, tol=0) -> bool:
        return self.norm() <= tol

    def __repr__(self):
        return f"HomogeneousForm(num_vars={self.num_vars}, degree={self.degree}, terms={sum(1 for _ in self.terms())})"

    # arithmetic ------------------------------------------------------------

    def _check_same(self, other: "HomogeneousForm"):
        if self.num_vars != other.num_vars or self.degree != other.degree:
            raise DimensionError("forms differ in variables or degree")

    def __add__(self, other):
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        self._check_same(other)
        return HomogeneousForm(self.num_vars, self.degree,
                               [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        self._check_same(other)
        return HomogeneousForm(self.num_vars, self.degree,
                               [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return HomogeneousForm(self.num_vars, self.degree, [-a for a in self.coeffs])

    def scale(self, s) -> "HomogeneousForm":
        s = to_mpc(s)
        return HomogeneousForm(self.num_vars, self.degree, [s * a for a in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, HomogeneousForm):
            return self.scale(other)
        if self.num_vars != other.num_vars:
            raise DimensionError("forms differ in number of variables")
        table = _product_table(self.num_vars, self.degree, other.degree)
        out = [mpc(0)] * len(monomials(self.num_vars, self.degree + other.degree))
        nz = [(k, c) for k, c in enumerate(other.coeffs) if c != 0]
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            row = table[i]
            for k, b in nz:
                out[row[k]] += a * b
        return HomogeneousForm(self.num_vars, self.degree + other.degree, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, s):
        return self.scale(1 / to_mpc(s))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a form")
        result = HomogeneousForm.constant(self.num_vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def normalized(self, tol) -> "HomogeneousForm":
        """Scale so the first coefficient (lex order) above ``tol * norm`` equals 1."""
        cut = self.norm() * tol
        for c in self.coeffs:
            if abs(c) > cut:
                return self.scale(1 / c)
        raise ValueError("cannot normalize the zero form")

    # calculus --------------------------------------------------------------

    def diff(self, i: int) -> "HomogeneousForm":
        if self.degree == 0:
            return HomogeneousForm(self.num_vars, 0)
        terms = {}
        for m, c in self.terms():
            if m[i]:
                e = list(m)
                e[i] -= 1
                terms[tuple(e)] = c * m[i]
        return HomogeneousForm.from_dict(self.num_vars, self.degree - 1, terms)

    # evaluation ------------------------------------------------------------

    def __call__(self, point: Sequence) -> mpc:
        return evaluate_form(self, point)

    def act(self, sub) -> "HomogeneousForm":
        return act_on_form(sub, self)

    def slice(self, values: dict, free: int) -> list:
        """Coefficients (descending) of the univariate polynomial in variable ``free``.

        Every other variable ``k`` is set to ``values[k]``.
        """
        out = [mpc(0)] * (self.degree + 1)
        powers = {k: _powers(to_mpc(v), self.degree) for k, v in values.items()}
        for m, c in self.terms():
            t = c
            for k, e in enumerate(m):
                if k != free and e:
                    t *= powers[k][e]
            out[self.degree - m[free]] += t
        return out


def _powers(x, n):
    p = [mpc(1)]
    for _ in range(n):
        p.append(p[-1] * x)
    return p


def evaluate_form(form: HomogeneousForm, point: Sequence) -> mpc:
    """Sum of coefficient times monomial at ``point``."""
    if len(point) != form.num_vars:
        raise DimensionError(f"point has {len(point)} coordinates, form has {form.num_vars} variables")
    pw = [_powers(to_mpc(x), form.degree) for x in point]
    total = mpc(0)
    if form.num_vars == 3:
        p0, p1, p2 = pw
        for (a, b, c), k in zip(form.monomials, form.coeffs):
            if k != 0:
                total += k * p0[a] * p1[b] * p2[c]
        return total
    for m, k in zip(form.monomials, form.coeffs):
        if k != 0:
            t = k
            for v, e in enumerate(m):
                if e:
                    t *= pw[v][e]
            total += t
    return total


# --------------------------------------------------------------------------
# linear substitution via elementary factors


def _lu_factors(matrix):
    """Factor a square matrix as P^T L D U1 and return the elementary steps.

    Steps are ('perm', p), ('shear', row, col, a) and ('diag', d) to be applied
    in order, first to last, as substitutions.
    """
    n = len(matrix)
    a = [[to_mpc(x) for x in row] for row in matrix]
    perm = list(range(n))
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(a[r][c]))
        if a[piv][c] == 0:
            raise ZeroDivisionError("singular substitution")
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            perm[c], perm[piv] = perm[piv], perm[c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r][c] = f
            for k in range(c + 1, n):
                a[r][k] -= f * a[c][k]
    steps = [("perm", tuple(perm))]
    for c in range(n - 1):
        for r in range(c + 1, n):
            if a[r][c] != 0:
                steps.append(("shear", r, c, a[r][c]))
    d = [a[i][i] for i in range(n)]
    steps.append(("diag", d))
    for r in range(n - 2, -1, -1):
        for c in range(r + 1, n):
            u = a[r][c] / d[r]
            if u != 0:
                steps.append(("shear", r, c, u))
    return steps


def _apply_step(terms: dict, step, degree: int) -> dict:
    kind = step[0]
    if kind == "perm":
        p = step[1]
        return {tuple(m[p[i]] for i in range(len(m))): c for m, c in terms.items()}
    if kind == "diag":
        pw = [_powers(x, degree) for x in step[1]]
        out = {}
        for m, c in terms.items():
            for v, e in enumerate(m):
                if e:
                    c = c * pw[v][e]
            out[m] = c
        return out
    _, r, col, a = step
    pa = _powers(a, degree)
    out = {}
    for m, c in terms.items():
        er = m[r]
        if er == 0:
            out[m] = out.get(m, 0) + c
            continue
        base = list(m)
        for l in range(er + 1):
            base[r] = l
            base[col] = m[col] + er - l
            key = tuple(base)
            out[key] = out.get(key, 0) + c * (comb(er, l) * pa[er - l])
    return out


def act_on_form(sub, form: HomogeneousForm) -> HomogeneousForm:
    """Compose ``form`` with a linear substitution: the result maps p to form(S p).

    ``sub`` is a LinearSubstitution or a square matrix (rows of entries).  This is
    a right action: act(S T, f) == act(T, act(S, f)).  Singular substitutions fall
    back to the direct expansion.
    """
    matrix = getattr(sub, "entries", sub)
    if len(matrix) != form.num_vars:
        raise DimensionError("substitution and form dimensions differ")
    try:
        steps = _lu_factors(matrix)
    except ZeroDivisionError:
        return act_on_form_direct(sub, form)
    terms = {m: c for m, c in form.terms()}
    for step in steps:
        terms = _apply_step(terms, step, form.degree)
    return HomogeneousForm.from_dict(form.num_vars, form.degree, terms)


def act_on_form_direct(sub, form: HomogeneousForm) -> HomogeneousForm:
    """Reference implementation of act_on_form by full multinomial expansion."""
    matrix = getattr(sub, "entries", sub)
    n = form.num_vars
    rows = [HomogeneousForm.linear(row) for row in matrix]
    out = HomogeneousForm(n, form.degree)
    for m, c in form.terms():
        t = HomogeneousForm.constant(n, c)
        for v, e in enumerate(m):
            if e:
                t = t * rows[v] ** e
        out = out + t
    return out


def power_of_linear(coefficients: Sequence, degree: int) -> HomogeneousForm:
    """(c1 x1 + ... + cn xn)^degree by the multinomial theorem."""
    n = len(coefficients)
    pw = [_powers(to_mpc(c), degree) for c in coefficients]
    out = []
    for m in monomials(n, degree):
        t = mpc(multinomial(m))
        for v, e in enumerate(m):
            if e:
                t *= pw[v][e]
        out.append(t)
    return HomogeneousForm(n, degree, out)


# --------------------------------------------------------------------------
# covariants


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def hessian_form(cubic: HomogeneousForm) -> HomogeneousForm:
    """Determinant of the matrix of second partials of a ternary cubic."""
    if cubic.num_vars != 3 or cubic.degree != 3:
        raise DimensionError("hessian_form expects a ternary cubic")
    first = [cubic.diff(i) for i in range(3)]
    second = [[first[i].diff(k) for k in range(3)] for i in range(3)]
    return _det3(second)


def jacobian_det(f1: HomogeneousForm, f2: HomogeneousForm, f3: HomogeneousForm) -> HomogeneousForm:
    """Functional determinant of three ternary quadratics (a cubic form)."""
    for f in (f1, f2, f3):
        if f.num_vars != 3 or f.degree != 2:
            raise DimensionError("jacobian_det expects three ternary quadratics")
    return _det3([[f.diff(k) for k in range(3)] for f in (f1, f2, f3)])


def quadratic_form_matrix(q: HomogeneousForm) -> list[list[mpc]]:
    """Symmetric matrix M with q(x) = x^T M x."""
    if q.degree != 2:
        raise DimensionError("not a quadratic form")
    n = q.num_vars
    m = [[mpc(0)] * n for _ in range(n)]
    for exps, c in q.terms():
        idx = [v for v, e in enumerate(exps) for _ in range(e)]
        a, b = idx
        if a == b:
            m[a][a] += c
        else:
            m[a][b] += c / 2
            m[b][a] += c / 2
    return m


def quadratic_from_matrix(m) -> HomogeneousForm:
    n = len(m)
    terms = {}
    for a in range(n):
        for b in range(a, n):
            e = [0] * n
            e[a] += 1
            e[b] += 1
            terms[tuple(e)] = to_mpc(m[a][b]) * (1 if a == b else 2)
    return HomogeneousForm.from_dict(n, 2, terms)
