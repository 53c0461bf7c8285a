import json
import random
from pathlib import Path

import pytest
from gmpy2 import mpc, mpfr

from quintsext.core import perms
from quintsext.core.forms import HomogeneousForm, act_on_form, evaluate_form
from quintsext.core.numbers import DEFAULT_CONFIG, DegeneracyError, omega3, sqrt_m15
from quintsext.core.roots import find_roots, polyval
from quintsext.instances import SexticInstance
from quintsext.valentiner.conics import conic_constants, gerbaldi_conics, mixed_discriminant
from quintsext.valentiner.group import ConicActionError, conic_action, j_power, scalar_kernel
from quintsext.valentiner.inflection import (inflection_points, point_distance, random_frame,
                                             set_distance)
from quintsext.valentiner.normalproblem import (OnInvariantCurve, absolute_invariants,
                                                covariant_line_demo, ninth_degree_from_points,
                                                normalproblem_forward, nu_ninth_degree)
from quintsext.valentiner.omega import (TRIPLES,
                                        combinatorial_sign_action, difference_sign_action,
                                        difference_triple, generalized_omega, omega_cubic,
                                        quotient_sign_action, quotients, triple_invariants)

from .conftest import random_roots

TOL = DEFAULT_CONFIG.tol
FIXTURES = json.loads((Path(__file__).parent / "fixtures" / "valentiner.json").read_text())
FERMAT = HomogeneousForm.from_dict(3, 3, {(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1})


def _c(pair):
    return mpc(mpfr(pair[0]), mpfr(pair[1]))


def _class_of(val, g):
    group = val.ternary_group
    return group.class_of(group.index_of(g))


def _rel(a: HomogeneousForm, b: HomogeneousForm):
    return (a - b).norm() / b.norm()


def _random_point(rng):
    return tuple(mpc(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(3))


def _close_multisets(xs, ys, tol):
    ys = list(ys)
    for x in xs:
        k = min(range(len(ys)), key=lambda i: abs(ys[i] - x))
        if abs(ys[k] - x) > tol * (1 + abs(x)):
            return False
        ys.pop(k)
    return not ys


# --------------------------------------------------------------------------
# conics


def test_conic_determinants_are_one(val):
    dets = val.conics.determinants()
    assert len(dets) == 6
    assert max(abs(d - 1) for d in dets) < TOL
    # k1 = diag(1, j, j^2)
    assert abs(val.conics.matrices[0][1][1] * val.conics.matrices[0][2][2] - 1) < TOL


def test_flipped_alpha_breaks_normalization(val):
    r = sqrt_m15()
    alpha, _ = conic_constants(flipped=True)
    assert abs(alpha - (1 - r) / 8) < TOL
    flipped = gerbaldi_conics(flipped_alpha=True)
    assert abs(flipped.determinants()[2] - (115 + 9 * r) / 128) < TOL
    # the quarter turn keeps any alpha, the second generator does not
    with pytest.raises(ConicActionError):
        conic_action(val.generators[1], flipped, TOL)
    kept = 0
    for g in val.ternary_group.elements:
        try:
            conic_action(g, flipped, TOL)
            kept += 1
        except ConicActionError:
            pass
    assert kept == 72


def test_conics_mutually_apolar(val):
    for a in range(6):
        assert abs(val.conics.apolarity(a, a) - 3) < TOL
        for b in range(6):
            if a != b:
                assert abs(val.conics.apolarity(a, b)) < TOL


def test_mixed_discriminant_of_identity():
    eye = [[1 if r == c else 0 for c in range(3)] for r in range(3)]
    assert mixed_discriminant(eye, eye, eye) == 6


# --------------------------------------------------------------------------
# group


def test_group_orders_and_kernel(val):
    assert val.ternary_group.order == 1080
    assert val.projective_order == 360
    ks = sorted(j_power(x, TOL) for x in scalar_kernel(val))
    assert ks == [0, 1, 2]


def test_conic_action_on_classes(val):
    assert val.checks["elements_permuting_conics"] == 1080
    assert len(val.correspondence) == 360
    assert all(perms.is_even(s) for s in val.correspondence)
    for pi, factors in val.conic_action:
        assert all(j_power(w, TOL) is not None for w in factors)


def test_correspondence_is_homomorphism(val):
    rng = random.Random(7)
    keys = sorted(val.correspondence)
    for _ in range(20):
        a, b = rng.choice(keys), rng.choice(keys)
        prod = val.substitution(a) @ val.substitution(b)
        assert _class_of(val, prod) == val.correspondence[perms.compose(a, b)]


def test_invariant_degrees_and_generator_invariance(val):
    assert (val.F.degree, val.H6.degree, val.Phi.degree) == (6, 12, 30)
    for g in val.generators:
        for form in (val.F, val.H6, val.Phi):
            assert _rel(act_on_form(g, form), form) < TOL


# --------------------------------------------------------------------------
# triple invariants and Omega


def test_triple_invariant_antisymmetry(val):
    j012, c012 = triple_invariants(val, 0, 1, 2)
    j102, c102 = triple_invariants(val, 1, 0, 2)
    assert _rel(j102, -j012) < TOL
    assert abs(c102 - c012) < TOL * abs(c012)
    with pytest.raises(ValueError):
        triple_invariants(val, 0, 0, 2)


def test_all_mixed_discriminants_nonzero(val):
    for t in TRIPLES:
        _, c = triple_invariants(val, *t)
        assert abs(c) > mpfr(2) ** -20


def test_sign_tables_agree(val):
    rng = random.Random(11)
    z = random_roots(rng, 6)
    classes = [_class_of(val, g) for g in val.generators]
    classes += rng.sample(range(360), 10)
    for cls in classes:
        sigma = val.label(cls)
        from_forms = quotient_sign_action(val, val.class_reps[cls])
        assert from_forms == combinatorial_sign_action(sigma)
        assert from_forms == difference_sign_action(sigma, z)


def test_cubic_covariant_matches_defining_sum(val):
    rng = random.Random(3)
    inst = SexticInstance.from_roots(random_roots(rng, 6))
    cubic = omega_cubic(inst, val)
    q = quotients(val)
    for _ in range(10):
        p = _random_point(rng)
        direct = sum((difference_triple(inst.roots, t) * q[t](p) for t in TRIPLES), mpc(0))
        assert abs(cubic(p) - direct) < TOL * (1 + abs(direct))


def test_omega_equivariance(val):
    rng = random.Random(5)
    inst = SexticInstance.from_roots(random_roots(rng, 6))
    base = omega_cubic(inst, val).form()
    sigmas = [val.label(_class_of(val, g)) for g in val.generators]
    sigmas += [perms.random_even(rng, 6) for _ in range(5)]
    for s in sigmas:
        moved = omega_cubic(inst.permuted(s), val).form()
        assert _rel(act_on_form(val.substitution(s), moved), base) < TOL


def test_odd_swap_permutes_signed_quotients(val):
    rng = random.Random(6)
    inst = SexticInstance.from_roots(random_roots(rng, 6))
    tau = perms.from_cycles(6, (0, 3))
    assert not perms.is_even(tau)
    table = combinatorial_sign_action(tau)
    q = quotients(val)
    expected = HomogeneousForm(3, 3)
    for t, (t2, s) in table.items():
        expected = expected + q[t].scale(s * difference_triple(inst.roots, t2))
    swapped = omega_cubic(inst.permuted(tau), val).form()
    assert _rel(swapped, expected) < TOL


def test_omega_translation_and_scaling(val):
    rng = random.Random(8)
    z = random_roots(rng, 6)
    base = omega_cubic(SexticInstance.from_roots(z), val).form()
    shifted = omega_cubic(SexticInstance.from_roots([x + mpc(2, -1) for x in z]), val).form()
    assert _rel(shifted, base) < TOL
    lam = mpc(0.5, 1.5)
    scaled = omega_cubic(SexticInstance.from_roots([lam * x for x in z]), val).form()
    assert _rel(scaled, base.scale(lam ** 3)) < TOL


def test_omega_repeated_roots(val):
    with pytest.raises(DegeneracyError) as exc:
        omega_cubic(SexticInstance.from_roots([1, 2, 3, 4, 5, 1]), val)
    assert exc.value.stage == "omega_cubic"


def test_generalized_omega(val):
    rng = random.Random(9)
    inst = SexticInstance.from_roots(random_roots(rng, 6))
    assert _rel(generalized_omega(inst, val, (0, 1, 2)).form(), omega_cubic(inst, val).form()) < TOL
    base = generalized_omega(inst, val, (0, 1, 3)).form()
    for _ in range(3):
        s = perms.random_even(rng, 6)
        moved = generalized_omega(inst.permuted(s), val, (0, 1, 3)).form()
        assert _rel(act_on_form(val.substitution(s), moved), base) < TOL
    with pytest.raises(ValueError):
        generalized_omega(inst, val, (0, 1, 1))


def test_omega_regression_fixture(val):
    inst = SexticInstance.from_roots(range(1, 7))
    phi = omega_cubic(inst, val).phi
    frozen = [_c(x) for x in FIXTURES["omega_1_to_6"]]
    assert max(abs(a - b) for a, b in zip(phi, frozen)) < mpfr(10) ** -30
    gen = generalized_omega(inst, val, (0, 1, 2)).phi
    assert max(abs(a - b) for a, b in zip(gen, frozen)) < mpfr(10) ** -30


# --------------------------------------------------------------------------
# inflection points


def test_fermat_flexes():
    flexes = inflection_points(FERMAT)
    assert len(flexes.points) == 9
    for expected in [(1, -1, 0), (0, 1, -1), (1, 0, -1)]:
        assert min(point_distance(expected, p) for p in flexes.points) < TOL
    assert flexes.residuals["cubic"] < TOL and flexes.residuals["hessian"] < TOL


def test_random_cubic_has_nine_flexes():
    rng = random.Random(12)
    cubic = HomogeneousForm(3, 3, [mpc(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(10)])
    flexes = inflection_points(cubic)
    assert len(flexes.points) == 9
    assert flexes.residuals["separation"] > mpfr(2) ** -20
    assert flexes.chosen == flexes.points[0]


def test_flex_covariance():
    rng = random.Random(13)
    cubic = HomogeneousForm(3, 3, [mpc(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(10)])
    base = inflection_points(cubic).points
    for seed in range(3):
        s = random_frame(100 + seed)
        moved = inflection_points(act_on_form(s, cubic)).points
        assert set_distance([s(p) for p in moved], base) < TOL * 2 ** 16


def test_singular_cubic_is_degenerate():
    cusp = HomogeneousForm.from_dict(3, 3, {(0, 2, 1): 1, (3, 0, 0): -1})
    with pytest.raises(DegeneracyError):
        inflection_points(cusp)


# --------------------------------------------------------------------------
# absolute invariants and the Normalproblem


def test_absolute_invariants_constant_on_orbit(val):
    p = _random_point(random.Random(14))
    v, w = absolute_invariants(val, p)
    for g in val.class_reps:
        v2, w2 = absolute_invariants(val, g(p))
        assert abs(v2 - v) < TOL * abs(v) and abs(w2 - w) < TOL * abs(w)
    vj, wj = absolute_invariants(val, tuple(omega3() * x for x in p))
    assert abs(vj - v) < TOL * abs(v) and abs(wj - w) < TOL * abs(w)


def test_absolute_invariants_on_curve(val):
    # a point of F = 0 on the line x3 = 0
    t = find_roots(val.F.slice({0: 1, 2: 0}, 1))[0]
    with pytest.raises(OnInvariantCurve) as exc:
        absolute_invariants(val, (mpc(1), t, mpc(0)))
    assert exc.value.stage == "absolute_invariants"


def test_forward_multiset_invariance(val):
    rng = random.Random(15)
    inst = SexticInstance.from_roots(random_roots(rng, 6))
    fwd = normalproblem_forward(inst, val)
    assert len(fwd.pairs) == 9
    assert any(abs(v - fwd.v) < TOL and abs(w - fwd.w) < TOL for v, w in fwd.pairs)
    vs, ws = [p[0] for p in fwd.pairs], [p[1] for p in fwd.pairs]
    for _ in range(5):
        other = normalproblem_forward(inst.permuted(perms.random_even(rng, 6)), val)
        assert _close_multisets([p[0] for p in other.pairs], vs, mpfr(2) ** -100)
        assert _close_multisets([p[1] for p in other.pairs], ws, mpfr(2) ** -100)


def test_forward_scaling_invariance(val):
    rng = random.Random(16)
    z = random_roots(rng, 6)
    fwd = normalproblem_forward(SexticInstance.from_roots(z), val)
    lam = mpc(-0.7, 0.4)
    scaled = normalproblem_forward(SexticInstance.from_roots([lam * x for x in z]), val)
    assert abs(scaled.v - fwd.v) < mpfr(2) ** -100 * abs(fwd.v)
    assert abs(scaled.w - fwd.w) < mpfr(2) ** -100 * abs(fwd.w)


def test_forward_regression_fixture(val):
    fwd = normalproblem_forward(SexticInstance.from_roots(range(1, 7)), val)
    frozen = [(_c(v), _c(w)) for v, w in FIXTURES["vw_1_to_6"]]
    tol = mpfr(10) ** -30
    assert _close_multisets([p[0] for p in fwd.pairs], [p[0] for p in frozen], tol)
    assert _close_multisets([p[1] for p in fwd.pairs], [p[1] for p in frozen], tol)


def test_nu_ninth_degree(val):
    rng = random.Random(17)
    inst = SexticInstance.from_roots(random_roots(rng, 6))
    nu = nu_ninth_degree(inst, val)
    assert len(nu) == 10 and nu[0] == 1
    fwd = normalproblem_forward(inst, val)
    scale = sum(abs(c) * abs(fwd.v) ** k for k, c in enumerate(reversed(nu)))
    assert abs(polyval(nu, fwd.v)) < TOL * scale
    for _ in range(10):
        other = nu_ninth_degree(inst.permuted(perms.random_even(rng, 6)), val)
        worst = max(abs(a - b) / (1 + abs(b)) for a, b in zip(other, nu))
        assert worst < mpfr(2) ** -100


def test_nu_from_fermat_flexes(val):
    pts = inflection_points(FERMAT).points
    nu = ninth_degree_from_points(val, pts)
    for p in pts:
        v, _ = absolute_invariants(val, p)
        scale = sum(abs(c) * abs(v) ** k for k, c in enumerate(reversed(nu)))
        assert abs(polyval(nu, v)) < TOL * scale


def test_covariant_line_demo(val):
    demo = covariant_line_demo(val, (mpc(1), mpc(0.5, 0.25), mpc(-0.3, 0.8)))
    assert len(demo.polynomial) == 7 and abs(demo.polynomial[0]) > TOL
    assert len(demo.points) == 6
    assert demo.residual < TOL
    frozen = [tuple(_c(x) for x in p) for p in FIXTURES["line_demo"]]
    assert set_distance(demo.points, frozen) < mpfr(10) ** -30


def test_line_demo_on_curve(val):
    t = find_roots(val.F.slice({0: 1, 2: 0}, 1))[0]
    with pytest.raises(OnInvariantCurve):
        covariant_line_demo(val, (mpc(1), t, mpc(0)))


def test_pointwise_invariance_all_elements(val):
    p = _random_point(random.Random(18))
    m = max(abs(x) for x in p)
    p = tuple(x / m for x in p)
    for form in (val.F, val.H6, val.Phi):
        base = evaluate_form(form, p)
        scale = sum((abs(c) for c in form.coeffs), mpfr(0))
        worst = max(abs(evaluate_form(form, g(p)) - base) for g in val.ternary_group.elements)
        assert worst < TOL * scale
