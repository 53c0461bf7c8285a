"""Command-line front end.

    quintsext run --pipeline quintic --roots 0,1,2,3,4
    quintsext run --pipeline sextic --coeffs 1,0,0,0,0,-1,1
    quintsext run --pipeline icosa-solve --parameter 0.3+0.7i
    quintsext run --pipeline normalproblem-solve --vw=-2.65+1.01i,0.53-0.55i
    quintsext run --pipeline verify

The report goes to stdout as ``key = value`` lines; timings and cache messages go
to stderr so that stdout is byte-identical across runs with the same request.
Exit status: 0 all checks pass, 1 some residual check failed, 2 malformed input,
3 degenerate instance, 4 precision exhausted.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from gmpy2 import mpc, mpfr

from . import cache as group_cache
from .core import perms
from .core.forms import act_on_form
from .core.matrices import GroupClosureError
from .core.numbers import (DegeneracyError, PrecisionError, ToleranceConfig, format_real,
                           parse_complex, parse_complex_list)
from .core.roots import RootFindingError
from .icosahedron import (INFINITY, InfiniteParameter, build_icosahedral_context,
                          covariant_quadratic, fiber_multiplicities, hausdorff,
                          icosa_parameter, icosahedral_point_branch, is_infinite,
                          jacobi_resolvent, four_group_obstruction, metacyclic_u, mobius,
                          projective_distance, quadratic_discriminant, reduce_quintic,
                          solve_icosahedral, syzygy_residual)
from .instances import QuinticInstance, SexticInstance
from .report import Report

PIPELINES = ("quintic", "sextic", "icosa-solve", "normalproblem-solve", "verify")

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_DEGENERATE, EXIT_PRECISION = 0, 1, 2, 3, 4


class RequestError(ValueError):
    """Malformed or inconsistent request; maps to exit status 2."""


@dataclass
class RunRequest:
    pipeline: str
    roots: list | None = None
    coeffs: list | None = None
    config: ToleranceConfig = field(default_factory=ToleranceConfig)
    seed: int = 0
    parameter: object = None          # icosa-solve: complex or INFINITY
    vw: tuple | None = None           # normalproblem-solve
    cache_dir: Path | None = None

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise RequestError(f"unknown pipeline {self.pipeline!r}")
        if self.roots is not None and self.coeffs is not None:
            raise RequestError("give either roots or coefficients, not both")
        if self.pipeline in ("quintic", "sextic") and self.roots is None and self.coeffs is None:
            raise RequestError(f"pipeline {self.pipeline} needs --roots or --coeffs")
        if self.pipeline == "icosa-solve" and self.parameter is None:
            raise RequestError("icosa-solve needs --parameter")
        if self.pipeline == "normalproblem-solve":
            if self.vw is None and self.roots is None and self.coeffs is None:
                raise RequestError("normalproblem-solve needs --vw, --roots or --coeffs")
            if self.vw is not None and (self.roots is not None or self.coeffs is not None):
                raise RequestError("give either --vw or an instance, not both")


def _note(msg: str):
    print(msg, file=sys.stderr)


class _Timer:
    def __init__(self):
        self.t0 = time.perf_counter()

    def lap(self, stage: str):
        t = time.perf_counter()
        _note(f"timing {stage} {t - self.t0:.3f}s")
        self.t0 = t


# --------------------------------------------------------------------------
# contexts, through the cache when one is configured


def _context(kind: str, config: ToleranceConfig, cache_dir):
    if kind == "icosahedral":
        build, order = build_icosahedral_context, 120
    else:
        from .valentiner.group import build_valentiner_context
        build, order = (lambda config, group=None: build_valentiner_context(
            config=config, group=group)), 1080
    if cache_dir is None:
        return build(config=config)
    path = group_cache.cache_path(cache_dir, kind, config)
    if path.exists():
        try:
            group = group_cache.load_group(path, kind, config, expected_order=order)
            _note(f"cache hit {path}")
            return build(config=config, group=group)
        except group_cache.CacheError as exc:
            _note(f"cache rejected {path}: {exc}; rebuilding")
    ctx = build(config=config)
    group = ctx.binary_group if kind == "icosahedral" else ctx.ternary_group
    try:
        group_cache.cache_group(path, group, kind, config)
        _note(f"cache written {path}")
    except OSError as exc:
        _note(f"cache not written: {exc}")
    return ctx


def _instance(cls, request: RunRequest):
    try:
        if request.roots is not None:
            return cls.from_roots(request.roots)
        return cls.from_coefficients(request.coeffs, request.config, request.seed)
    except ValueError as exc:
        raise RequestError(str(exc)) from exc


def _even_sweep(rng, n: int, count: int) -> list:
    return [perms.random_even(rng, n) for _ in range(count)]


def _rel(a, b) -> mpfr:
    """max |a_k - b_k| relative to max |b_k| (absolute when b vanishes)."""
    num = max(abs(x - y) for x, y in zip(a, b))
    den = max(abs(y) for y in b)
    return num / den if den else num


def _coefficient_check(report: Report, instance, request: RunRequest):
    if request.coeffs is None:
        return
    lead = request.coeffs[0]
    given = [c / lead for c in request.coeffs]
    report.check("input.coefficients_reconstructed", _rel(instance.coefficients, given),
                 request.config.tol)


def _echo_instance(report: Report, instance):
    report.put("input.roots", list(instance.roots))
    report.put("input.coefficients", list(instance.coefficients))
    report.put("input.sqrt_discriminant", instance.sqrt_discriminant)


# --------------------------------------------------------------------------
# pipelines


def _run_quintic(request: RunRequest, report: Report, timer: _Timer):
    cfg = request.config
    tol = cfg.tol
    ctx = _context("icosahedral", cfg, request.cache_dir)
    timer.lap("icosahedral_context")
    inst = _instance(QuinticInstance, request)
    _echo_instance(report, inst)
    _coefficient_check(report, inst, request)

    u = metacyclic_u(inst, ctx)
    report.put("u.infinity", u.u_infinity)
    report.put("u.nu", list(u.u))
    q = covariant_quadratic(u)
    report.put("A0", q.A0)
    report.put("A1", q.A1)
    report.put("A2", q.A2)
    disc = quadratic_discriminant(q)
    report.put("A", disc)
    x, form = icosahedral_point_branch(q, cfg)
    try:
        big_x = INFINITY if is_infinite(x) else icosa_parameter(ctx, x)
    except InfiniteParameter:
        big_x = INFINITY
    report.put("x", "inf" if is_infinite(x) else x)
    report.put("X", "inf" if is_infinite(big_x) else big_x)
    report.put("branch_log.u_signs", " ".join("+" if s > 0 else "-" for s in u.sign_pattern))
    report.put("branch_log.sqrtA", "principal")
    report.put("branch_log.root_form", form)
    report.put("branch_log.coset_reps", " ".join("".join(map(str, t)) for t in ctx.coset_reps))
    jac = jacobi_resolvent(inst, ctx)
    report.put("jacobi", jac)
    timer.lap("reduction")

    # the root satisfies its quadratic
    if is_infinite(x):
        rq = abs(q.A1) / max(abs(q.A0), abs(q.A1), abs(q.A2))
    else:
        num = q.A1 * x * x + 2 * q.A0 * x - q.A2
        rq = abs(num) / (abs(q.A1) * abs(x) ** 2 + 2 * abs(q.A0 * x) + abs(q.A2))
    report.check("quadratic_root", rq, tol)

    for name, sigma in zip(("cycle", "reflection", "third"), ctx.a5_generators):
        x2, _ = reduce_quintic(inst.permuted(sigma), ctx)
        image = mobius(ctx.substitution(sigma), x)
        report.check(f"equivariance.{name}", projective_distance(x2, image), tol)

    rng = random.Random(request.seed)
    sweep = _even_sweep(rng, 5, 20)
    worst_x, worst_a = mpfr(0), mpfr(0)
    scale_a = abs(q.A0) ** 2 + abs(q.A1 * q.A2)
    for sigma in sweep:
        moved = inst.permuted(sigma)
        qs = covariant_quadratic(metacyclic_u(moved, ctx))
        _, xs = reduce_quintic(moved, ctx)
        worst_x = max(worst_x, projective_distance(xs, big_x))
        worst_a = max(worst_a, abs(quadratic_discriminant(qs) - disc) / scale_a
                      if scale_a else abs(quadratic_discriminant(qs)))
    report.check("sweep.X", worst_x, tol)
    report.check("sweep.A", worst_a, tol)

    worst_j = max(_rel(jacobi_resolvent(inst.permuted(s), ctx), jac) for s in sweep[:10])
    report.check("sweep.jacobi", worst_j, tol)

    _, xt = reduce_quintic(inst.permuted((1, 0, 2, 3, 4)), ctx)
    report.put("transposition.X", "inf" if is_infinite(xt) else xt)
    report.put("transposition.distance", projective_distance(xt, big_x))
    timer.lap("checks")


def _run_sextic(request: RunRequest, report: Report, timer: _Timer):
    from .valentiner.inflection import point_distance
    from .valentiner.normalproblem import absolute_invariants, normalproblem_forward
    from .valentiner.omega import CubicCovariant

    cfg = request.config
    tol = cfg.tol
    ctx = _context("valentiner", cfg, request.cache_dir)
    timer.lap("valentiner_context")
    with cfg.context():
        inst = _instance(SexticInstance, request)
        _echo_instance(report, inst)
        _coefficient_check(report, inst, request)
        fwd = normalproblem_forward(inst, ctx, request.seed)
        timer.lap("forward")
        for label, phi in zip(CubicCovariant.labels(), fwd.cubic.phi):
            report.put(f"omega.phi_{label}", phi)
        report.put("flex.count", len(fwd.flexes.points))
        for k, p in enumerate(fwd.flexes.points):
            report.put(f"flex[{k}]", list(p))
        report.put("chosen", list(fwd.inflection_point))
        report.put("v", fwd.v)
        report.put("w", fwd.w)
        report.put("pairs", [f"{format_real(a.real)},{format_real(a.imag)};"
                             f"{format_real(b.real)},{format_real(b.imag)}" for a, b in fwd.pairs])
        attempt = fwd.branch_log["attempts"][-1]
        report.put("branch_log.frame_seed", attempt["frame_seed"])
        report.put("branch_log.frames_tried", len(fwd.branch_log["attempts"]))
        report.put("branch_log.completion_branches", " ".join(map(str, attempt["branches"])))
        report.put("branch_log.chosen", fwd.branch_log["chosen"])
        nu = [c for c in _nu(fwd)]
        report.put("nu", nu)

        report.flag("flex.count_is_9", len(fwd.flexes.points) == 9, str(len(fwd.flexes.points)))
        report.check("flex.cubic", fwd.flexes.residuals["cubic"], tol)
        report.check("flex.hessian", fwd.flexes.residuals["hessian"], tol)
        report.put("flex.separation", fwd.flexes.residuals["separation"])

        base = fwd.cubic.form()
        group = ctx.ternary_group
        for k, g in enumerate(ctx.generators):
            sigma = ctx.label(group.class_of(group.index_of(g)))
            moved = normalproblem_forward(inst.permuted(sigma), ctx, request.seed)
            res = (act_on_form(g, moved.cubic.form()) - base).norm() / base.norm()
            report.check(f"omega.equivariance.g{k + 1}", res, tol)
            image = g(fwd.inflection_point)
            va, wa = absolute_invariants(ctx, image)
            report.check(f"vw.orbit.g{k + 1}",
                         max(abs(va - fwd.v) / max(1, abs(fwd.v)),
                             abs(wa - fwd.w) / max(1, abs(fwd.w))), tol)
            report.check(f"flex.covariance.g{k + 1}",
                         max(min(point_distance(g(p), q) for q in moved.flexes.points)
                             for p in fwd.flexes.points), tol)

        rng = random.Random(request.seed)
        worst = mpfr(0)
        for sigma in _even_sweep(rng, 6, 3):
            other = normalproblem_forward(inst.permuted(sigma), ctx, request.seed)
            worst = max(worst, _rel(_nu(other), nu))
        report.check("sweep.nu", worst, tol)
        timer.lap("checks")


def _nu(fwd) -> list:
    from .core.roots import poly_from_roots
    return poly_from_roots([p[0] for p in fwd.pairs])


def _run_icosa_solve(request: RunRequest, report: Report, timer: _Timer):
    cfg = request.config
    tol = cfg.tol
    ctx = _context("icosahedral", cfg, request.cache_dir)
    timer.lap("icosahedral_context")
    with cfg.context():
        big_x = request.parameter
        report.put("input.X", "inf" if is_infinite(big_x) else big_x)
        roots = solve_icosahedral(ctx, big_x, request.seed)
        timer.lap("solve")
        report.put("roots", ["inf" if is_infinite(r) else r for r in roots])
        fibers = fiber_multiplicities(roots, mpfr(2) ** (-cfg.precision_bits // 8))
        report.put("fiber", " ".join(f"{m}x{c}" for m, c in fibers))
        report.flag("root_count", len(roots) == 60, str(len(roots)))
        anchor = next(r for r in roots if not is_infinite(r))
        report.check("orbit", hausdorff(ctx.orbit(anchor), roots), tol)
        if not is_infinite(big_x):
            worst = mpfr(0)
            for r in roots:
                try:
                    worst = max(worst, projective_distance(icosa_parameter(ctx, r), big_x))
                except InfiniteParameter:
                    worst = max(worst, projective_distance(INFINITY, big_x))
            report.check("parameter", worst, tol)
        timer.lap("checks")


def _run_normalproblem(request: RunRequest, report: Report, timer: _Timer):
    from .valentiner.inflection import point_distance, set_distance
    from .valentiner.normalproblem import (absolute_invariants, escalated_context,
                                           normalproblem_forward, solve_normalproblem)

    cfg = request.config
    ctx = _context("valentiner", cfg, request.cache_dir)
    timer.lap("valentiner_context")
    target = None
    with cfg.context():
        if request.vw is not None:
            v, w = request.vw
        else:
            inst = _instance(SexticInstance, request)
            _echo_instance(report, inst)
            fwd = normalproblem_forward(inst, ctx, request.seed)
            v, w, target = fwd.v, fwd.w, fwd.inflection_point
            report.put("chosen", list(target))
            timer.lap("forward")
    report.put("v", v)
    report.put("w", w)

    high = ToleranceConfig.escalated(max(1024, cfg.precision_bits))
    ectx = escalated_context(ctx, high) if cfg != high else ctx
    timer.lap("escalated_context")
    sol = solve_normalproblem(ctx, v, w, high, request.seed)
    timer.lap("solve")
    with high.context():
        tol = high.tol
        report.put("precision.solve_bits", high.precision_bits)
        report.put("count", len(sol.points))
        for k, p in enumerate(sol.points):
            report.put(f"point[{k}]", list(p))
        attempt = sol.log["attempts"][-1]
        report.put("branch_log.frame_seed", attempt["frame_seed"])
        report.put("branch_log.frames_tried", len(sol.log["attempts"]))
        report.put("branch_log.alias", attempt["alias"])
        report.flag("count_is_360", len(sol.points) == 360, str(len(sol.points)))
        report.check("residual.degree30", sol.residuals["degree30"], tol)
        report.check("residual.degree12", sol.residuals["degree12"], tol)
        report.put("separation", sol.residuals["separation"])
        report.check("separation", 1 / sol.residuals["separation"] if sol.residuals["separation"]
                     else None, mpfr(2) ** 64)
        for k, g in enumerate(ectx.generators):
            report.check(f"orbit.g{k + 1}",
                         set_distance([g(p) for p in sol.points], sol.points), tol)
        worst = mpfr(0)
        for p in sol.points:
            va, wa = absolute_invariants(ectx, p)
            worst = max(worst, abs(va - v) / max(1, abs(v)), abs(wa - w) / max(1, abs(w)))
        # (v, w) carry the base precision when they were typed in or computed there
        report.check("vw", worst, max(tol, cfg.tol))
        if target is not None:
            d = min(point_distance(target, p) for p in sol.points)
            report.put("contains.distance", d)
            report.check("contains_chosen_flex", d, mpfr("1e-10"))
    timer.lap("checks")


def _run_verify(request: RunRequest, report: Report, timer: _Timer):
    from .valentiner.group import pointwise_invariance, scalar_kernel

    cfg = request.config
    tol = cfg.tol
    ico = _context("icosahedral", cfg, request.cache_dir)
    timer.lap("icosahedral_context")
    with cfg.context():
        report.put("icosahedral.order", ico.binary_group.order)
        report.put("icosahedral.projective_order", ico.projective_order)
        report.flag("icosahedral.orders", (ico.binary_group.order, ico.projective_order)
                    == (120, 60), f"{ico.binary_group.order}/{ico.projective_order}")
        report.check("icosahedral.syzygy", syzygy_residual(ico.f, ico.H_form, ico.T),
                     min(tol, mpfr(2) ** -100))
        for name, form in (("f", ico.f), ("H", ico.H_form), ("T", ico.T)):
            res = max((act_on_form(g, form) - form).norm() / form.norm()
                      for g in ico.binary_group.elements)
            report.check(f"icosahedral.invariance.{name}", res, tol)
        cert = four_group_obstruction(ico)
        report.put("obstruction", cert.summary())
        report.flag("icosahedral.lifting_obstruction", cert.holds)
        fibers = {}
        for label, big_x in (("0", mpc(0)), ("1", mpc(1)), ("inf", INFINITY)):
            roots = solve_icosahedral(ico, big_x, request.seed)
            fibers[label] = " ".join(f"{m}x{c}" for m, c in
                                     fiber_multiplicities(roots, mpfr(2) ** -32))
        report.put("icosahedral.fiber", fibers)
        report.flag("icosahedral.fibers", (fibers["0"], fibers["1"], fibers["inf"]) ==
                    ("3x20", "2x30", "5x12"))
        timer.lap("icosahedral_checks")

    val = _context("valentiner", cfg, request.cache_dir)
    timer.lap("valentiner_context")
    with cfg.context():
        grp = val.ternary_group
        report.put("valentiner.order", grp.order)
        report.put("valentiner.projective_order", val.projective_order)
        report.put("valentiner.kernel", scalar_kernel(val))
        report.flag("valentiner.orders", (grp.order, val.projective_order) == (1080, 360),
                    f"{grp.order}/{val.projective_order}")
        report.check("valentiner.conic_determinants", val.checks["conic_determinants"], tol)
        n = val.checks["elements_permuting_conics"]
        report.flag("valentiner.conic_action", n == 1080, f"{n}/1080")
        report.flag("valentiner.correspondence", len(val.correspondence) == 360,
                    str(len(val.correspondence)))
        report.put("valentiner.degrees", f"{val.F.degree} {val.H6.degree} {val.Phi.degree}")
        report.put("valentiner.reynolds_seeds", val.checks["reynolds_seeds"])
        report.check("valentiner.invariance.generators", val.checks["generator_invariance"], tol)
        rng = random.Random(request.seed)
        points = [tuple(mpc(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(3)) for _ in range(2)]
        for name, form in (("F", val.F), ("H6", val.H6), ("Phi", val.Phi)):
            report.check(f"valentiner.invariance.all_elements.{name}",
                         pointwise_invariance(val, form, points), tol)
        timer.lap("valentiner_checks")


RUNNERS = {
    "quintic": _run_quintic,
    "sextic": _run_sextic,
    "icosa-solve": _run_icosa_solve,
    "normalproblem-solve": _run_normalproblem,
    "verify": _run_verify,
}


def run(request: RunRequest) -> tuple[Report, int]:
    """Execute a request; returns the report and the exit status.

    Degeneracy and precision failures still return the report built so far, with
    the failing stage named.  RequestError propagates to the caller.
    """
    report = Report(request.pipeline)
    cfg = request.config
    report.put("config.precision_bits", cfg.precision_bits)
    report.put("config.tolerance", format_real(cfg.tol, 17))
    report.put("config.seed", request.seed)
    timer = _Timer()
    try:
        with cfg.context():
            RUNNERS[request.pipeline](request, report, timer)
    except DegeneracyError as exc:
        report.halt("degenerate", degenerate_stage=exc.stage, detail=str(exc))
        return report, EXIT_DEGENERATE
    except (RootFindingError, GroupClosureError, PrecisionError) as exc:
        report.halt("precision_exhausted", detail=f"{type(exc).__name__}: {exc}")
        return report, EXIT_PRECISION
    return report, EXIT_OK if report.ok else EXIT_FAILED


# --------------------------------------------------------------------------
# argument handling


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quintsext", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a pipeline and print its report")
    r.add_argument("--pipeline", required=True, choices=PIPELINES)
    src = r.add_mutually_exclusive_group()
    src.add_argument("--roots", help="comma-separated complex roots, e.g. 0,1,2+i,-3.5i,4")
    src.add_argument("--coeffs", help="comma-separated coefficients, highest degree first")
    r.add_argument("--parameter", help="X for icosa-solve (complex or 'inf')")
    r.add_argument("--vw", help="v,w for normalproblem-solve")
    r.add_argument("--precision", type=int, default=256, help="working precision in bits")
    r.add_argument("--tolerance", type=float, default=None,
                   help="comparison tolerance (default 2^-(precision/2))")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--cache-dir", default=None,
                   help=f"verified group cache (default: ${group_cache.ENV_VAR}, else none)")
    return p


def request_from_args(args) -> RunRequest:
    try:
        tol = args.tolerance if args.tolerance is not None else 2.0 ** -(args.precision // 2)
        config = ToleranceConfig(precision_bits=args.precision, eq_tolerance=tol)
    except PrecisionError:
        raise
    except (TypeError, ValueError) as exc:
        raise RequestError(str(exc)) from exc
    cache_dir = args.cache_dir or os.environ.get(group_cache.ENV_VAR) or None
    try:
        with config.context():
            roots = parse_complex_list(args.roots) if args.roots is not None else None
            coeffs = parse_complex_list(args.coeffs) if args.coeffs is not None else None
            parameter = None
            if args.parameter is not None:
                text = args.parameter.strip().lower()
                parameter = INFINITY if text in ("inf", "infinity") else parse_complex(text)
            vw = None
            if args.vw is not None:
                vw = tuple(parse_complex_list(args.vw))
                if len(vw) != 2:
                    raise RequestError("--vw takes exactly two values")
    except RequestError:
        raise
    except ValueError as exc:
        raise RequestError(str(exc)) from exc
    degree = {"quintic": 5, "sextic": 6, "normalproblem-solve": 6}.get(args.pipeline)
    if degree is not None:
        if roots is not None and len(roots) != degree:
            raise RequestError(f"{args.pipeline} needs {degree} roots, got {len(roots)}")
        if coeffs is not None and len(coeffs) != degree + 1:
            raise RequestError(f"{args.pipeline} needs {degree + 1} coefficients, got {len(coeffs)}")
    return RunRequest(pipeline=args.pipeline, roots=roots, coeffs=coeffs, config=config,
                      seed=args.seed, parameter=parameter, vw=vw,
                      cache_dir=Path(cache_dir) if cache_dir else None)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        request = request_from_args(args)
    except RequestError as exc:
        _note(f"quintsext: error: {exc}")
        return EXIT_PARSE
    except PrecisionError as exc:
        _note(f"quintsext: precision: {exc}")
        return EXIT_PRECISION
    report, status = run(request)
    sys.stdout.write(report.render())
    return status


if __name__ == "__main__":
    sys.exit(main())
