"""Univariate polynomials over mpc: simultaneous root finding and elimination helpers.

Polynomials are coefficient lists in descending order, ``p[0] * x**n + ... + p[n]``.
"""

from __future__ import annotations

import math
import random
from typing import Callable, Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from .matrices import lu_det
from .numbers import DEFAULT_CONFIG, ToleranceConfig, current_precision, root_of_unity, to_mpc


class RootFindingError(RuntimeError):
    """The simultaneous iteration did not converge within the iteration budget."""


def polyval(p: Sequence, x) -> mpc:
    acc = mpc(0)
    for c in p:
        acc = acc * x + c
    return acc


def polymul(a: Sequence, b: Sequence) -> list:
    out = [mpc(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for k, y in enumerate(b):
            out[i + k] += x * y
    return out


def poly_from_roots(roots: Sequence) -> list:
    """Monic polynomial with the given roots."""
    p = [mpc(1)]
    for r in roots:
        p = polymul(p, [mpc(1), -to_mpc(r)])
    return p


def strip_leading(p: Sequence, tol) -> list:
    """Drop leading coefficients that are negligible relative to the largest one."""
    scale = max(abs(c) for c in p)
    k = 0
    while k < len(p) - 1 and abs(p[k]) <= tol * scale:
        k += 1
    return list(p[k:])


def _initial_radii(moduli: list[float], n: int) -> list[tuple[int, float]]:
    """Radii from the upper convex hull of (k, log|a_k|), coefficients ascending.

    Returns (count, radius) pairs; counts sum to n.
    """
    pts = [(k, m) for k, m in enumerate(moduli) if m > -math.inf]
    hull: list[tuple[int, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    out = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        out.append((x2 - x1, math.exp((y1 - y2) / (x2 - x1))))
    return out


def _log_abs(c) -> float:
    if c == 0:
        return -math.inf
    return float(gmpy2.log(abs(c)))


def find_roots(poly: Sequence, config: ToleranceConfig = DEFAULT_CONFIG, seed: int = 0,
               max_iterations: int | None = None) -> list:
    """All roots (with multiplicity) of a univariate polynomial.

    Aberth-Ehrlich simultaneous iteration in Gauss-Seidel form, started on circles
    read off the Newton polygon with seeded angular jitter.  A root is frozen once
    its residual is at the level of the rounding error bound of Horner's rule.
    """
    p = [to_mpc(c) for c in poly]
    tol = config.tol
    scale = max(abs(c) for c in p)
    if scale == 0:
        raise ValueError("zero polynomial")
    if abs(p[0]) <= tol * scale:
        raise ValueError("leading coefficient vanishes at tolerance")
    n = len(p) - 1
    zeros = 0
    while n > 0 and p[n] == 0:
        p.pop()
        n -= 1
        zeros += 1
    if n == 0:
        return [mpc(0)] * zeros
    lead = p[0]
    p = [c / lead for c in p]
    dp = [c * (n - k) for k, c in enumerate(p[:-1])]
    absp = [abs(c) for c in p]
    eps = mpfr(2) ** (8 - current_precision())
    max_iterations = max_iterations or config.root_polish_iterations

    rng = random.Random(seed)
    moduli = [_log_abs(c) for c in reversed(p)]
    z = []
    offset = 0
    for count, radius in _initial_radii(moduli, n):
        for k in range(count):
            ang = 2 * math.pi * (k + rng.random() * 0.5) / count + 0.4 + offset
            z.append(mpc(radius * math.cos(ang), radius * math.sin(ang)))
        offset += 0.7
    assert len(z) == n

    active = set(range(n))
    for _ in range(max_iterations):
        if not active:
            break
        for i in sorted(active):
            zi = z[i]
            pv = mpc(0)
            dv = mpc(0)
            for c, d in zip(p, dp):
                pv = pv * zi + c
                dv = dv * zi + d
            pv = pv * zi + p[-1]
            # rounding-level stopping rule
            az = abs(zi)
            bound = mpfr(0)
            for c in absp:
                bound = bound * az + c
            if abs(pv) <= eps * n * bound:
                active.discard(i)
                continue
            if dv == 0:
                z[i] = zi + mpc(rng.random(), rng.random()) * (az + 1) * mpfr(2) ** -20
                continue
            ratio = pv / dv
            s = mpc(0)
            for k in range(n):
                if k != i:
                    diff = zi - z[k]
                    if diff != 0:
                        s += 1 / diff
            denom = 1 - ratio * s
            z[i] = zi - (ratio / denom if denom != 0 else ratio)
    if active:
        raise RootFindingError(
            f"{len(active)} of {n} roots did not converge in {max_iterations} iterations")
    roots = z + [mpc(0)] * zeros
    return sorted(roots, key=lambda r: (float(r.real), float(r.imag)))


def residual_scale(poly: Sequence, x) -> mpfr:
    """Sum of |a_k| |x|^k, the natural scale for |poly(x)|."""
    ax = abs(to_mpc(x))
    acc = mpfr(0)
    for c in poly:
        acc = acc * ax + abs(c)
    return acc


def cluster(values: Sequence, tol) -> list[tuple[mpc, int]]:
    """Group nearby complex values; returns (mean, multiplicity) pairs."""
    groups: list[list] = []
    for v in values:
        for g in groups:
            if abs(g[0] - v) <= tol * (1 + abs(v)):
                g.append(v)
                break
        else:
            groups.append([v])
    return [(sum(g[1:], g[0]) / len(g), len(g)) for g in groups]


# --------------------------------------------------------------------------
# elimination helpers


def sylvester_matrix(a: Sequence, b: Sequence) -> list[list]:
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([mpc(0)] * i + list(a) + [mpc(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([mpc(0)] * i + list(b) + [mpc(0)] * (size - n - 1 - i))
    return rows


def resultant(a: Sequence, b: Sequence) -> mpc:
    """Resultant of two univariate polynomials via the Sylvester determinant."""
    return lu_det(sylvester_matrix([to_mpc(c) for c in a], [to_mpc(c) for c in b]))


def interpolate_on_circle(func: Callable, degree_bound: int, nodes: int | None = None,
                          radius=1, center=0) -> tuple[list, mpfr]:
    """Recover polynomial coefficients from samples on a circle by inverse DFT.

    With ``center`` c and ``radius`` r the coefficients are those of t -> func(c + r t).

    Returns (descending coefficients up to ``degree_bound``, aliasing residual), the
    residual being the largest coefficient found above ``degree_bound`` relative to
    the largest one below it.
    """
    nodes = nodes or degree_bound + 1
    if nodes <= degree_bound:
        raise ValueError("need more nodes than the degree bound")
    center = to_mpc(center)
    samples = [func(center + radius * root_of_unity(nodes, k)) for k in range(nodes)]
    coeffs = []
    for m in range(nodes):
        acc = mpc(0)
        for k, s in enumerate(samples):
            acc += s * root_of_unity(nodes, -m * k)
        coeffs.append(acc / nodes)
    low = coeffs[:degree_bound + 1]
    high = coeffs[degree_bound + 1:]
    top = max(abs(c) for c in low)
    alias = max((abs(c) for c in high), default=mpfr(0)) / top if top != 0 else mpfr(0)
    return list(reversed(low)), alias
