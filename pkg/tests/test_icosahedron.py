import random

import gmpy2
import pytest
from gmpy2 import mpc, mpfr

from quintsext.core import perms
from quintsext.core.forms import act_on_form
from quintsext.core.numbers import DEFAULT_CONFIG, DegeneracyError, eps5, sqrt5
from quintsext.core.roots import find_roots, interpolate_on_circle
from quintsext.icosahedron import (INFINITY, CovariantQuadratic, InfiniteParameter,
                                   MetacyclicVector, covariant_quadratic, fiber_multiplicities,
                                   four_group_obstruction, hausdorff, icosa_parameter,
                                   icosahedral_point, icosahedral_point_branch, is_infinite,
                                   jacobi_resolvent, metacyclic_u, mobius, projective_distance,
                                   quadratic_discriminant, reduce_quintic, solve_icosahedral,
                                   syzygy_residual, u_infinity)
from quintsext.instances import QuinticInstance

from .conftest import random_roots

TOL = DEFAULT_CONFIG.tol


def test_orders_and_syzygy(ico):
    assert ico.binary_group.order == 120
    assert ico.projective_order == 60
    assert syzygy_residual(ico.f, ico.H_form, ico.T) < mpfr(2) ** -100
    assert (ico.f.degree, ico.H_form.degree, ico.T.degree) == (12, 20, 30)


def test_forms_invariant_under_all_120(ico):
    for form in (ico.f, ico.H_form, ico.T):
        worst = max((act_on_form(g, form) - form).norm() for g in ico.binary_group.elements)
        assert worst < TOL * form.norm()


def test_parameter_special_values(ico):
    one = {1: 1}
    for r in find_roots(ico.H_form.slice(one, 0))[:3]:
        assert abs(icosa_parameter(ico, r)) < TOL
    for r in find_roots(ico.T.slice(one, 0))[:3]:
        assert abs(icosa_parameter(ico, r) - 1) < TOL * 1e3
    with pytest.raises(InfiniteParameter):
        icosa_parameter(ico, INFINITY)


def test_parameter_constant_on_orbit(ico):
    x = mpc(0.3, 0.7)
    big = icosa_parameter(ico, x)
    assert max(abs(icosa_parameter(ico, y) - big) for y in ico.orbit(x)) < TOL * abs(big)


def test_four_group_certificate(ico):
    cert = four_group_obstruction(ico)
    assert cert.holds
    by_family = {}
    for label, signs, failed, _ in cert.four_group_cases:
        by_family.setdefault(label, []).append(failed)
    # determinant minus one: squares are fine, the product relation never is
    assert all(f == ["II.III.IV"] for f in by_family["det -1"])
    # determinant one: every square is -1, so no choice is a homomorphism
    assert all({"II^2", "III^2", "IV^2"} <= set(f) for f in by_family["det +1"])
    assert all("II.III.IV" in f for f in by_family["involutive"])
    assert len(cert.four_group_cases) == 24
    assert [o for _, o in cert.order_60_candidates] == [120] * 4
    assert cert.involutions_in_binary_group == 2


# --------------------------------------------------------------------------
# u-vector and quadratic


def test_u_infinity_fixtures():
    # with v = sum z_i^2 z_{i+1}: 0*1 + 1*2 + 4*3 + 9*4 + 16*0 = 50, reversed 70
    assert u_infinity([0, 1, 2, 3, 4]) == -20
    z = [eps5(k) for k in range(5)]
    direct = sum(z[i] ** 2 * z[(i + 1) % 5] for i in range(5)) \
        - sum(z[(i + 1) % 5] ** 2 * z[i] for i in range(5))
    assert abs(u_infinity(z) - direct) < TOL
    # degree 3 is not divisible by 5, so the cyclic quintic kills u_inf
    assert abs(u_infinity(z)) < TOL


def test_u_vector_fixture(ico):
    u = metacyclic_u(QuinticInstance.from_roots(range(5)), ico)
    assert [int(x.real) for x in u.values] == [-20, 2, 12, 2, 2, 12]


def test_u_infinity_symmetry():
    z = [mpc(1, 2), 3, -1, mpc(0, 1), 5]
    shift = z[1:] + z[:1]
    assert abs(u_infinity(shift) - u_infinity(z)) < TOL
    assert abs(u_infinity(z[::-1]) + u_infinity(z)) < TOL
    moved = [x + mpc(2, -1) for x in z]
    assert abs(u_infinity(moved) - u_infinity(z)) < TOL * 100


def test_quadratic_transforms_like_the_six_quadratics(ico):
    rng = random.Random(3)
    inst = QuinticInstance.from_roots(random_roots(rng, 5))
    base = covariant_quadratic(metacyclic_u(inst, ico)).form()
    for sigma in ico.a5_generators:
        moved = covariant_quadratic(metacyclic_u(inst.permuted(sigma), ico)).form()
        back = act_on_form(ico.substitution(sigma), moved)
        assert (back - base).norm() < TOL * base.norm()


def test_covariant_quadratic_examples():
    zero = [mpc(0)] * 5
    with pytest.raises(DegeneracyError):
        covariant_quadratic(MetacyclicVector(mpc(0), tuple(zero), (1,) * 6))
    q = covariant_quadratic(MetacyclicVector(mpc(1), tuple(zero), (1,) * 6))
    assert abs(q.A0 - sqrt5() / 2) < TOL and q.A1 == 0 and q.A2 == 0
    u = tuple(eps5(-nu) for nu in range(5))
    q = covariant_quadratic(MetacyclicVector(mpc(0), u, (1,) * 6))
    assert abs(q.A1 - 5) < TOL and abs(q.A0) < TOL and abs(q.A2) < TOL


def test_discriminant_examples():
    assert quadratic_discriminant(CovariantQuadratic(mpc(0), mpc(0), mpc(0))) == 0
    q = CovariantQuadratic(sqrt5() / 2, mpc(0), mpc(0))
    assert abs(quadratic_discriminant(q) - mpfr(5) / 4) < TOL


def test_icosahedral_point_examples():
    assert icosahedral_point(CovariantQuadratic(mpc(0), mpc(1), mpc(1))) == 1
    # near A1 = 0 the alternate expression is used and both agree
    q = CovariantQuadratic(mpc(1), mpc("1e-10"), mpc(mpfr(3) / 7))
    x, form = icosahedral_point_branch(q)
    assert form == "A2/(A0+sqrtA)"
    root = gmpy2.sqrt(quadratic_discriminant(q))
    assert abs(x - (-q.A0 + root) / q.A1) < mpfr("1e-50")
    assert abs(q.A1 * x * x + 2 * q.A0 * x - q.A2) < TOL
    assert is_infinite(icosahedral_point(CovariantQuadratic(mpc(-1), mpc(0), mpc(0))))


def test_negative_discriminant_branch_is_stable():
    # A real and negative: rounding-level imaginary parts must not flip sqrt A
    base = CovariantQuadratic(mpc(1), mpc(2), mpc(-3))
    assert quadratic_discriminant(base) == -5
    xs = [icosahedral_point(CovariantQuadratic(base.A0, base.A1, base.A2 + mpc(0, s * 1e-70)))
          for s in (-1, 0, 1)]
    assert max(abs(a - xs[1]) for a in xs) < mpfr("1e-60")


def test_double_root_for_bring_jerrard_quintic(ico):
    # x^5 - x + 1: the first three power sums vanish and so does A
    inst = QuinticInstance.from_coefficients([1, 0, 0, 0, -1, 1])
    q = covariant_quadratic(metacyclic_u(inst, ico))
    assert abs(quadratic_discriminant(q)) < TOL * abs(q.A0) ** 2
    x, form = icosahedral_point_branch(q)
    assert "A=0" in form


# --------------------------------------------------------------------------
# reduction


def test_equivariance_over_a5(ico):
    rng = random.Random(8)
    inst = QuinticInstance.from_roots(random_roots(rng, 5))
    x, _ = reduce_quintic(inst, ico)
    for sigma in ico.a5:
        y, _ = reduce_quintic(inst.permuted(sigma), ico)
        assert projective_distance(y, mobius(ico.substitution(sigma), x)) < TOL


def test_x_sweep_on_fixture(ico):
    inst = QuinticInstance.from_roots(range(5))
    _, big = reduce_quintic(inst, ico)
    rng = random.Random(0)
    for _ in range(20):
        _, other = reduce_quintic(inst.permuted(perms.random_even(rng, 5)), ico)
        assert projective_distance(other, big) < TOL
    _, odd = reduce_quintic(inst.permuted((1, 0, 2, 3, 4)), ico)
    assert projective_distance(odd, big) > mpfr("0.1")


def test_a_invariant_sweep(ico):
    inst = QuinticInstance.from_roots(range(5))
    a = quadratic_discriminant(covariant_quadratic(metacyclic_u(inst, ico)))
    rng = random.Random(1)
    for _ in range(10):
        other = inst.permuted(perms.random_even(rng, 5))
        b = quadratic_discriminant(covariant_quadratic(metacyclic_u(other, ico)))
        assert abs(a - b) < TOL * abs(a)


def test_cyclic_quintic_is_degenerate(ico):
    natural = QuinticInstance.from_roots([eps5(k) for k in range(5)])
    with pytest.raises(DegeneracyError) as err:
        reduce_quintic(natural, ico)
    assert err.value.stage == "covariant_quadratic"
    # an odd ordering of the same roots reduces fine
    x, big = reduce_quintic(natural.permuted((1, 0, 2, 3, 4)), ico)
    assert is_infinite(big) or abs(big) < 1 / TOL


def test_repeated_roots_rejected(ico):
    with pytest.raises(DegeneracyError):
        reduce_quintic(QuinticInstance.from_roots([0, 1, 1, 2, 3]), ico)


def test_affine_changes_leave_x_alone(ico):
    rng = random.Random(4)
    z = random_roots(rng, 5)
    inst = QuinticInstance.from_roots(z)
    x, _ = reduce_quintic(inst, ico)
    for lam, shift in ((mpc(1), mpc(2, 5)), (mpc(2.5), mpc(0)), (mpc(0.7), mpc(-1, 1))):
        y, _ = reduce_quintic(QuinticInstance.from_roots([lam * r + shift for r in z]), ico)
        assert projective_distance(x, y) < TOL * 1e3
    # a complex scale multiplies sqrt A by lambda^3, which may select the other root
    y, _ = reduce_quintic(QuinticInstance.from_roots([mpc(0.7, -1.3) * r for r in z]), ico)
    q = covariant_quadratic(metacyclic_u(inst, ico))
    assert abs(q.A1 * y * y + 2 * q.A0 * y - q.A2) < TOL * 1e3 * (1 + abs(y)) ** 2


# --------------------------------------------------------------------------
# the icosahedral equation


def test_fibers_at_special_values(ico):
    assert fiber_multiplicities(solve_icosahedral(ico, 0), mpfr(2) ** -32) == [(3, 20)]
    assert fiber_multiplicities(solve_icosahedral(ico, 1), mpfr(2) ** -32) == [(2, 30)]
    assert fiber_multiplicities(solve_icosahedral(ico, INFINITY), mpfr(2) ** -32) == [(5, 12)]


def test_x_zero_fiber_is_h(ico):
    roots = solve_icosahedral(ico, 0)
    for r in roots:
        assert abs(ico.H_form((r, 1))) < TOL * ico.H_form.norm() * (1 + abs(r)) ** 20


@pytest.mark.parametrize("seed", [0, 1])
def test_random_fiber_is_one_orbit(ico, seed):
    rng = random.Random(seed)
    big = mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))
    roots = solve_icosahedral(ico, big, seed)
    assert fiber_multiplicities(roots, mpfr(2) ** -32) == [(1, 60)]
    assert hausdorff(ico.orbit(roots[7]), roots) < TOL


# --------------------------------------------------------------------------
# resolvent


def _instance_with_vanishing_u_infinity():
    """Roots 0, 1, 2, 3 and a fifth root chosen so that u_inf = 0."""
    base = [mpc(0), mpc(1), mpc(2), mpc(3)]
    poly, _ = interpolate_on_circle(lambda t: u_infinity(base + [t]), 2, 6)
    t = next(r for r in find_roots(poly) if min(abs(r - b) for b in base) > 0.1)
    return QuinticInstance.from_roots(base + [t])


def test_jacobi_resolvent(ico):
    inst = QuinticInstance.from_roots([mpc(0.3, 1), 2, mpc(-1, -1), 4, mpc(0, 0.5)])
    jac = jacobi_resolvent(inst, ico)
    assert len(jac) == 7 and jac[0] == 1
    rng = random.Random(2)
    for _ in range(10):
        other = jacobi_resolvent(inst.permuted(perms.random_even(rng, 5)), ico)
        assert max(abs(a - b) for a, b in zip(jac, other)) < TOL * max(abs(c) for c in jac)
    a0 = covariant_quadratic(metacyclic_u(inst, ico)).A0
    roots = find_roots(jac)
    assert min(abs(r - 5 * a0 ** 2) for r in roots) < TOL * 1e6


def test_jacobi_root_when_u_infinity_vanishes(ico):
    inst = _instance_with_vanishing_u_infinity()
    u = metacyclic_u(inst, ico)
    assert abs(u.u_infinity) < TOL
    expected = 5 * (sum(u.u, mpc(0)) / 2) ** 2
    roots = find_roots(jacobi_resolvent(inst, ico))
    assert min(abs(r - expected) for r in roots) < TOL * 1e6 * abs(expected)
