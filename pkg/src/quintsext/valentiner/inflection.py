"""Inflection points of a plane cubic: common zeros of the cubic and its Hessian.

Elimination runs in a randomly shifted unimodular frame so that no intersection
point lies on the line at infinity and the leading coefficients in x2 do not
vanish.  The shifted resultant in x2 is a degree-9 polynomial in x1 recovered by
interpolation, first on the unit circle and then on a circle centred on the
mean root with the geometric-mean radius; each root is completed by the common root of the two
cubics in x2 and polished by two-dimensional Newton steps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from ..core.forms import HomogeneousForm, act_on_form, evaluate_form, hessian_form
from ..core.matrices import LinearSubstitution
from ..core.numbers import DEFAULT_CONFIG, DegeneracyError, ToleranceConfig
from ..core.roots import find_roots, interpolate_on_circle, resultant


def random_frame(seed: int) -> LinearSubstitution:
    """A deterministic pseudo-random unimodular 3x3 matrix."""
    rng = random.Random(seed)
    while True:
        m = LinearSubstitution([[complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(3)]
                                for _ in range(3)])
        if abs(m.determinant) > 0.1:
            return m.unimodular()


def normalize_point(p: Sequence, tol=mpfr(2) ** -64) -> tuple:
    """Divide by the first coordinate whose modulus is maximal up to ``tol``."""
    top = max(abs(x) for x in p)
    for x in p:
        if abs(x) >= top * (1 - tol):
            return tuple(y / x for y in p)
    raise AssertionError("unreachable")


def point_distance(p: Sequence, q: Sequence) -> mpfr:
    """Sine of the angle between two points of the projective plane."""
    cross = (p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0])
    num = gmpy2.sqrt(sum((abs(c) ** 2 for c in cross), mpfr(0)))
    return num / gmpy2.sqrt(sum((abs(c) ** 2 for c in p), mpfr(0))
                            * sum((abs(c) ** 2 for c in q), mpfr(0)))


def set_distance(ps: Sequence, qs: Sequence) -> mpfr:
    """Hausdorff distance between finite point sets of the projective plane."""
    d1 = max(min(point_distance(p, q) for q in qs) for p in ps)
    d2 = max(min(point_distance(p, q) for p in ps) for q in qs)
    return max(d1, d2)


def relative_value(form: HomogeneousForm, p: Sequence) -> mpfr:
    """|form(p)| over the sum of |coefficient| with p scaled to unit max norm."""
    m = max(abs(x) for x in p)
    q = tuple(x / m for x in p)
    return abs(evaluate_form(form, q)) / sum((abs(c) for c in form.coeffs), mpfr(0))


def sort_key(p: Sequence) -> tuple:
    """(re, im) of each coordinate, with rounding-level parts snapped to zero."""
    def snap(v):
        return 0.0 if abs(v) < 1e-30 else float(v)
    return tuple(snap(v) for x in p for v in (x.real, x.imag))


# --------------------------------------------------------------------------
# two curves, common zeros


def _newton2(f1, f2, d1, d2, y1, y2, iterations: int, tol):
    """Newton on (f1, f2) in the chart x3 = 1 with partials d1 = (f1_x1, f1_x2), ...

    Stops once the step is below ``tol`` relative to the point.
    """
    for _ in range(iterations):
        p = (y1, y2, mpc(1))
        a, b = f1(p), f2(p)
        j11, j12 = d1[0](p), d1[1](p)
        j21, j22 = d2[0](p), d2[1](p)
        dt = j11 * j22 - j12 * j21
        if dt == 0:
            break
        s1 = (a * j22 - b * j12) / dt
        s2 = (j11 * b - j21 * a) / dt
        y1, y2 = y1 - s1, y2 - s2
        if abs(s1) + abs(s2) <= tol * (1 + abs(y1) + abs(y2)):
            break
    return y1, y2


def common_zeros(g1: HomogeneousForm, g2: HomogeneousForm, expected: int,
                 config: ToleranceConfig = DEFAULT_CONFIG, seed: int = 0, attempts: int = 4,
                 nodes: int | None = None) -> tuple[list, dict]:
    """Intersection points of two plane curves by resultant elimination.

    Returns (points, log).  Points are normalized; ``g2`` should be the curve of
    lower degree, its roots in x2 complete each eliminated x1 value.
    """
    tol = config.tol
    log = {"attempts": []}
    for attempt in range(attempts):
        frame = random_frame(seed * 7919 + attempt)
        h1, h2 = act_on_form(frame, g1), act_on_form(frame, g2)
        d1, d2 = (h1.diff(0), h1.diff(1)), (h2.diff(0), h2.diff(1))

        def res(y1):
            a = h1.slice({0: y1, 2: 1}, 1)
            b = h2.slice({0: y1, 2: 1}, 1)
            return resultant(a, b)

        n = nodes or expected + 8
        coeffs, alias = interpolate_on_circle(res, expected, n)
        scale = max(abs(c) for c in coeffs)
        entry = {"frame_seed": seed * 7919 + attempt, "alias": alias,
                 "leading": abs(coeffs[0]) / scale if scale else mpfr(0)}
        log["attempts"].append(entry)
        if scale == 0 or alias > mpfr(2) ** -32 or abs(coeffs[0]) <= tol * scale:
            entry["rejected"] = "degenerate elimination"
            continue
        # Recentre on the root cloud: in the plain monomial basis the roots sit off
        # the origin and the coefficients cancel to far below working precision.
        center = -coeffs[1] / (expected * coeffs[0])
        radius = (abs(res(center)) / abs(coeffs[0])) ** (mpfr(1) / expected)
        if radius > 0:
            shifted, alias2 = interpolate_on_circle(res, expected, n, radius, center)
            if alias2 <= mpfr(2) ** -32 and abs(shifted[0]) > tol * max(abs(c) for c in shifted):
                coeffs = shifted
                entry.update(center=center, radius=radius, alias_recentred=alias2)
            else:
                center, radius = mpc(0), mpfr(1)
        else:
            center, radius = mpc(0), mpfr(1)
        xs = [center + radius * t for t in find_roots(coeffs, config, seed)]
        points, branches = [], []
        for y1 in xs:
            cands = find_roots(h2.slice({0: y1, 2: 1}, 1), config, seed)
            vals = [abs(h1((y1, c, mpc(1)))) for c in cands]
            k = min(range(len(cands)), key=lambda i: vals[i])
            branches.append(k)
            y1p, y2p = _newton2(h1, h2, d1, d2, y1, cands[k], 20, mpfr(2) ** (16 - config.precision_bits))
            points.append(normalize_point(frame((y1p, y2p, mpc(1)))))
        entry["branches"] = branches
        return points, log
    raise DegeneracyError("common_zeros", "elimination degenerate in every frame tried")


# --------------------------------------------------------------------------


@dataclass
class InflectionSet:
    points: list                  # nine normalized points, in canonical order
    chosen: tuple                 # points[0]
    residuals: dict
    branch_log: dict = field(default_factory=dict)


def inflection_points(cubic, config: ToleranceConfig = DEFAULT_CONFIG,
                      seed: int = 0) -> InflectionSet:
    """The nine flexes of a nonsingular plane cubic.

    ``cubic`` is a CubicCovariant or a ternary cubic HomogeneousForm.  The chosen
    flex is the first point under the (re, im) order of its normalized coordinates.
    """
    form = cubic.form() if hasattr(cubic, "phi") else cubic
    if form.num_vars != 3 or form.degree != 3:
        raise ValueError("inflection_points expects a ternary cubic")
    tol = config.tol
    with config.context():
        if form.is_zero(tol):
            raise DegeneracyError("inflection_points", "zero cubic")
        hess = hessian_form(form)
        if hess.is_zero(tol * form.norm() ** 3):
            raise DegeneracyError("inflection_points", "Hessian vanishes identically")
        pts, log = common_zeros(form, hess, 9, config, seed)
        res_c = max(relative_value(form, p) for p in pts)
        res_h = max(relative_value(hess, p) for p in pts)
        sep = min(point_distance(p, q) for i, p in enumerate(pts) for q in pts[i + 1:])
        # a singular cubic meets its Hessian with multiplicity, so the flexes coalesce
        if sep <= mpfr(2) ** -40 or res_c > tol or res_h > tol:
            raise DegeneracyError("inflection_points",
                                  f"cubic is singular (separation {float(sep):.2e})")
        pts = sorted(pts, key=sort_key)
        return InflectionSet(points=pts, chosen=pts[0],
                             residuals={"cubic": res_c, "hessian": res_h, "separation": sep},
                             branch_log=log)
