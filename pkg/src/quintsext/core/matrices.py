"""Unimodular linear substitutions and the finite groups they generate."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from .numbers import DEFAULT_CONFIG, ToleranceConfig, to_mpc


class GroupClosureError(RuntimeError):
    """Closure exceeded its order bound or hit an ambiguous near-duplicate."""


class ProjectivizationError(RuntimeError):
    """Two elements agree up to a scalar that is not a root of unity."""


def det(m) -> mpc:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    return lu_det([list(r) for r in m])


def lu_det(a) -> mpc:
    """Determinant by Gaussian elimination with partial pivoting (destroys ``a``)."""
    n = len(a)
    d = mpc(1)
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(a[r][c]))
        if a[piv][c] == 0:
            return mpc(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        p = a[c][c]
        d *= p
        rowc = a[c]
        for r in range(c + 1, n):
            f = a[r][c] / p
            if f != 0:
                row = a[r]
                for k in range(c + 1, n):
                    row[k] -= f * rowc[k]
    return d


def matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(1, m)), a[i][0] * b[0][j])
                       for j in range(p)) for i in range(n))


class LinearSubstitution:
    """An n x n complex matrix acting on column vectors, with cached determinant."""

    __slots__ = ("entries", "determinant", "_inv")

    def __init__(self, entries: Sequence[Sequence]):
        rows = tuple(tuple(to_mpc(x) for x in row) for row in entries)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("substitution matrix must be square")
        self.entries = rows
        self.determinant = det(rows)
        self._inv = None

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, n: int) -> "LinearSubstitution":
        return cls([[int(i == k) for k in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, n: int, s) -> "LinearSubstitution":
        return cls([[s if i == k else 0 for k in range(n)] for i in range(n)])

    def __matmul__(self, other: "LinearSubstitution") -> "LinearSubstitution":
        return LinearSubstitution(matmul(self.entries, other.entries))

    def __call__(self, point: Sequence) -> tuple:
        return tuple(sum((r[k] * to_mpc(point[k]) for k in range(1, len(r))), r[0] * to_mpc(point[0]))
                     for r in self.entries)

    def scaled(self, s) -> "LinearSubstitution":
        s = to_mpc(s)
        return LinearSubstitution([[s * x for x in r] for r in self.entries])

    def unimodular(self) -> "LinearSubstitution":
        """Rescale by the principal n-th root of 1/det so the determinant is 1."""
        n = self.dimension
        root = gmpy2.exp(gmpy2.log(self.determinant) / n)
        return self.scaled(1 / root)

    def inverse(self) -> "LinearSubstitution":
        if self._inv is None:
            m, d = self.entries, self.determinant
            n = self.dimension
            if n == 2:
                inv = [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
            elif n == 3:
                cof = [[(m[(i + 1) % 3][(k + 1) % 3] * m[(i + 2) % 3][(k + 2) % 3]
                         - m[(i + 1) % 3][(k + 2) % 3] * m[(i + 2) % 3][(k + 1) % 3])
                        for k in range(3)] for i in range(3)]
                inv = [[cof[k][i] / d for k in range(3)] for i in range(3)]
            else:
                raise NotImplementedError("inverse only for 2x2 and 3x3")
            self._inv = LinearSubstitution(inv)
        return self._inv

    def transpose(self) -> "LinearSubstitution":
        return LinearSubstitution(list(zip(*self.entries)))

    def max_diff(self, other: "LinearSubstitution") -> mpfr:
        return max(abs(a - b) for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    def phase_normalized(self, tol) -> "LinearSubstitution":
        """Divide by the first entry (row-major) whose modulus is maximal up to ``tol``."""
        flat = [x for r in self.entries for x in r]
        top = max(abs(x) for x in flat)
        for x in flat:
            if abs(x) >= top * (1 - tol):
                return self.scaled(1 / x)
        raise AssertionError("unreachable")

    def is_scalar(self, tol) -> bool:
        n = self.dimension
        s = self.entries[0][0]
        return all(abs(self.entries[i][k] - (s if i == k else 0)) <= tol
                   for i in range(n) for k in range(n))

    def apply_projective(self, x):
        """Möbius action of a 2x2 matrix on x (mpc) or a homogeneous pair."""
        (a, b), (c, d) = self.entries
        if isinstance(x, tuple):
            return (a * x[0] + b * x[1], c * x[0] + d * x[1])
        return (a * x + b) / (c * x + d)

    def __repr__(self):
        return f"LinearSubstitution(dim={self.dimension})"


# --------------------------------------------------------------------------
# hashing with tolerance

_PROBE = (mpc(0.7548776662466927, 0.1), mpc(0.5698402909980532, -0.3), mpc(0.3211, 0.6180339887),
          mpc(-0.2491, 0.41), mpc(0.9123, -0.77), mpc(-0.6123, -0.2), mpc(0.135, 0.863),
          mpc(0.48, -0.952), mpc(-0.829, 0.0347))
_GRID = 2 ** 20


def _signature(entries) -> tuple[int, int]:
    s = sum(p * x for p, x in zip(_PROBE, (x for r in entries for x in r)))
    return int(round(float(s.real) * _GRID)), int(round(float(s.imag) * _GRID))


class ToleranceIndex:
    """Lookup of matrices by a coarse linear signature plus an exact tolerance check.

    Equal matrices differ by rounding noise only, so they fall into the same or an
    adjacent grid cell; all nine neighbours are probed.
    """

    def __init__(self, tol):
        self.tol = tol
        self.buckets: dict = {}
        self.items: list = []

    def find(self, sub: LinearSubstitution):
        a, b = _signature(sub.entries)
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                for k in self.buckets.get((a + da, b + db), ()):
                    diff = self.items[k].max_diff(sub)
                    if diff <= self.tol:
                        return k
                    if diff < 1e-9:
                        raise GroupClosureError(
                            f"near-duplicate at distance {float(diff):.3e}: precision too low "
                            "or tolerance too tight")
        return None

    def add(self, sub: LinearSubstitution) -> int:
        k = len(self.items)
        self.items.append(sub)
        self.buckets.setdefault(_signature(sub.entries), []).append(k)
        return k


# --------------------------------------------------------------------------
# groups


@dataclass
class MatrixGroup:
    elements: list
    generators: list
    projective_classes: list = field(default_factory=list)
    labels: dict | None = None
    config: ToleranceConfig = DEFAULT_CONFIG

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def dimension(self) -> int:
        return self.elements[0].dimension

    def index_of(self, sub: LinearSubstitution) -> int | None:
        if not hasattr(self, "_index"):
            self._index = ToleranceIndex(self.config.tol)
            for g in self.elements:
                self._index.add(g)
        return self._index.find(sub)

    def class_of(self, k: int) -> int:
        if not hasattr(self, "_class_of"):
            self._class_of = {}
            for c, members in enumerate(self.projective_classes):
                for m in members:
                    self._class_of[m] = c
        return self._class_of[k]

    def representatives(self) -> list:
        return [self.elements[members[0]] for members in self.projective_classes]


def close_group(generators: Sequence[LinearSubstitution], order_bound: int,
                config: ToleranceConfig = DEFAULT_CONFIG) -> MatrixGroup:
    """Breadth-first closure of ``generators`` under right multiplication."""
    if order_bound < 1:
        raise ValueError("order_bound must be positive")
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    n = gens[0].dimension
    tol = config.tol
    for g in gens:
        if abs(g.determinant - 1) > tol:
            raise GroupClosureError("generators must be unimodular")
    index = ToleranceIndex(tol)
    ident = LinearSubstitution.identity(n)
    index.add(ident)
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = a @ g
                if index.find(b) is None:
                    index.add(b)
                    nxt.append(b)
                    if len(index.items) > order_bound:
                        raise GroupClosureError(
                            f"closure exceeds order bound {order_bound}")
        frontier = nxt
    group = MatrixGroup(elements=index.items, generators=gens, config=config)
    group._index = index
    return group


def projectivize(group: MatrixGroup) -> tuple[int, list]:
    """Partition elements into scalar-multiple classes.

    Fills ``group.projective_classes`` and returns (number of classes, scalar kernel).
    """
    tol = group.config.tol
    n = group.dimension
    index = ToleranceIndex(tol)
    classes: list[list[int]] = []
    for k, g in enumerate(group.elements):
        p = g.phase_normalized(tol)
        c = index.find(p)
        if c is None:
            index.add(p)
            classes.append([k])
        else:
            h = group.elements[classes[c][0]]
            # ratio g / h must be an n-th root of unity
            i0 = max(range(n * n), key=lambda t: abs(h.entries[t // n][t % n]))
            ratio = g.entries[i0 // n][i0 % n] / h.entries[i0 // n][i0 % n]
            if abs(ratio ** n - 1) > tol * 16:
                raise ProjectivizationError("scalar ratio is not a root of unity")
            classes[c].append(k)
    group.projective_classes = classes
    if hasattr(group, "_class_of"):
        del group._class_of
    kernel = [group.elements[k] for k in range(group.order) if group.elements[k].is_scalar(tol)]
    return len(classes), kernel
