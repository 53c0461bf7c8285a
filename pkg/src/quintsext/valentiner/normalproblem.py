"""Absolute invariants of the Valentiner group and the Normalproblem in both directions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpc, mpfr

from ..core.forms import evaluate_form
from ..core.numbers import DegeneracyError, ToleranceConfig, to_mpc
from ..core.roots import find_roots, interpolate_on_circle, poly_from_roots
from ..instances import SexticInstance
from .inflection import (InflectionSet, common_zeros, inflection_points, normalize_point,
                         point_distance, relative_value, sort_key)
from .omega import CubicCovariant, omega_cubic


class OnInvariantCurve(DegeneracyError):
    """The point lies on F = 0, where v and w are undefined."""

    def __init__(self, message: str = "F vanishes at the point"):
        super().__init__("absolute_invariants", message)


def absolute_invariants(context, point: Sequence) -> tuple[mpc, mpc]:
    """(v, w) = (Phi / F^5, H6 / F^2) at a point of the plane.

    Both ratios have degree 0, so they depend only on the projective point.
    """
    with context.config.context():
        p = tuple(to_mpc(x) for x in point)
        m = max(abs(x) for x in p)
        if m == 0:
            raise ValueError("the zero vector is not a point")
        p = tuple(x / m for x in p)
        if relative_value(context.F, p) <= context.config.tol:
            raise OnInvariantCurve()
        f = evaluate_form(context.F, p)
        return evaluate_form(context.Phi, p) / f ** 5, evaluate_form(context.H6, p) / f ** 2


@dataclass
class NormalproblemInstance:
    v: mpc
    w: mpc
    inflection_point: tuple
    cubic: CubicCovariant
    branch_log: dict
    flexes: InflectionSet
    pairs: list = field(default_factory=list)     # (v, w) at each of the nine flexes


def normalproblem_forward(instance: SexticInstance, context, seed: int = 0) -> NormalproblemInstance:
    """Omega, its chosen flex, and (v, w) there."""
    with context.config.context():
        cubic = omega_cubic(instance, context)
        flexes = inflection_points(cubic, context.config, seed)
        pairs = [absolute_invariants(context, p) for p in flexes.points]
        v, w = pairs[0]
        log = dict(flexes.branch_log)
        log["chosen"] = "first flex in (re, im) order of normalized coordinates"
        return NormalproblemInstance(v, w, flexes.chosen, cubic, log, flexes, pairs)


def ninth_degree_from_points(context, points: Sequence) -> list:
    """Monic polynomial whose roots are v at the given points."""
    with context.config.context():
        return poly_from_roots([absolute_invariants(context, p)[0] for p in points])


def nu_ninth_degree(instance: SexticInstance, context, seed: int = 0) -> list:
    """The degree-9 equation satisfied by v at the nine flexes of Omega."""
    fwd = normalproblem_forward(instance, context, seed)
    with context.config.context():
        return poly_from_roots([p[0] for p in fwd.pairs])


# --------------------------------------------------------------------------
# inverse direction


@dataclass
class NormalproblemSolution:
    points: list
    residuals: dict
    log: dict


def escalated_context(context, config: ToleranceConfig | None = None):
    """The same context rebuilt at higher precision (cached on the original)."""
    config = config or ToleranceConfig.escalated()
    if context.config == config:
        return context
    cache = context.__dict__.setdefault("_escalated", {})
    if config not in cache:
        cache[config] = context.with_precision(config)
    return cache[config]


def solve_normalproblem(context, v, w, config: ToleranceConfig | None = None,
                        seed: int = 0) -> NormalproblemSolution:
    """All points with Phi = v F^5 and H6 = w F^2, by elimination to degree 360.

    Runs at escalated precision (1024 bits unless ``config`` says otherwise).
    """
    ctx = escalated_context(context, config)
    cfg = ctx.config
    with cfg.context():
        v, w = to_mpc(v), to_mpc(w)
        f = ctx.F
        f2 = f * f
        g30 = ctx.Phi - (f2 * f2 * f).scale(v)
        g12 = ctx.H6 - f2.scale(w)
        pts, log = common_zeros(g30, g12, 360, cfg, seed, nodes=368)
        res30 = max(relative_value(g30, p) for p in pts)
        res12 = max(relative_value(g12, p) for p in pts)
        sep = min(point_distance(p, q) for i, p in enumerate(pts) for q in pts[i + 1:])
        pts = sorted(pts, key=sort_key)
        return NormalproblemSolution(pts, {"degree30": res30, "degree12": res12,
                                           "separation": sep}, log)


# --------------------------------------------------------------------------
# the degree-six obstruction on a covariant line


@dataclass
class LineDemo:
    polynomial: list        # F(P + t gP), descending, degree 6
    points: list            # the six intersections with F = 0
    element: int            # index of the class used for the chord
    residual: mpfr


def covariant_line_demo(context, point: Sequence) -> LineDemo:
    """Restrict F to the chord from ``point`` to its image under the first class
    representative that moves it."""
    with context.config.context():
        tol = context.config.tol
        p = normalize_point(tuple(to_mpc(x) for x in point))
        if relative_value(context.F, p) <= tol:
            raise OnInvariantCurve()
        for k, g in enumerate(context.class_reps):
            q = g(p)
            if point_distance(p, q) > mpfr(2) ** -32:
                break
        else:
            raise DegeneracyError("covariant_line_demo", "point fixed by every substitution")

        def restricted(t):
            return evaluate_form(context.F, tuple(a + t * b for a, b in zip(p, q)))

        poly, alias = interpolate_on_circle(restricted, 6, 12)
        if alias > tol:
            raise AssertionError(f"restriction of F exceeds degree 6 (alias {float(alias):.2e})")
        ts = find_roots(poly, context.config)
        points = [normalize_point(tuple(a + t * b for a, b in zip(p, q))) for t in ts]
        res = max(relative_value(context.F, x) for x in points)
        return LineDemo(poly, points, k, res)
