"""Polynomial instances given by their roots: the input type of both pipelines."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import ClassVar, Sequence

from gmpy2 import mpc

from .core import perms
from .core.numbers import DEFAULT_CONFIG, DegeneracyError, ToleranceConfig, to_mpc
from .core.roots import find_roots, poly_from_roots


def difference_product(z: Sequence) -> mpc:
    """prod_{i<j} (z_i - z_j)."""
    out = mpc(1)
    for i in range(len(z)):
        for k in range(i + 1, len(z)):
            out *= z[i] - z[k]
    return out


def require_distinct(z: Sequence, tol, stage: str):
    scale = max(abs(x) for x in z) + 1
    for a, b in itertools.combinations(z, 2):
        if abs(a - b) <= tol * scale:
            raise DegeneracyError(stage, "repeated roots")


@dataclass(frozen=True)
class RootInstance:
    """Roots, the monic coefficient list (descending) and the difference product."""

    roots: tuple
    coefficients: tuple
    sqrt_discriminant: mpc
    degree: ClassVar[int] = 0

    @classmethod
    def from_roots(cls, roots: Sequence):
        z = tuple(to_mpc(r) for r in roots)
        if len(z) != cls.degree:
            raise ValueError(f"expected {cls.degree} roots, got {len(z)}")
        return cls(z, tuple(poly_from_roots(z)), difference_product(z))

    @classmethod
    def from_coefficients(cls, coeffs: Sequence, config: ToleranceConfig = DEFAULT_CONFIG,
                          seed: int = 0):
        """Roots found numerically and ordered by (re, im); that order fixes the sign
        of the difference product."""
        c = [to_mpc(x) for x in coeffs]
        if len(c) != cls.degree + 1:
            raise ValueError(f"expected {cls.degree + 1} coefficients, got {len(c)}")
        if c[0] == 0:
            raise ValueError("leading coefficient is zero")
        return cls.from_roots(find_roots(c, config, seed))

    @property
    def elementary(self) -> tuple:
        """e_1 .. e_n, read off the monic coefficients."""
        return tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coefficients[1:], start=1))

    def permuted(self, sigma: Sequence[int]):
        return type(self).from_roots(perms.act(sigma, self.roots))

    def discriminant(self) -> mpc:
        return self.sqrt_discriminant ** 2


class QuinticInstance(RootInstance):
    degree = 5


class SexticInstance(RootInstance):
    degree = 6
