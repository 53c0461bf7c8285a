"""The quintic pipeline: binary icosahedral group, its forms, and the covariant quadratic.

Conventions
-----------
* Binary substitutions act on forms on the right, ``act(S, phi)(p) = phi(S p)``,
  and on the affine coordinate ``x = x1/x2`` by the Möbius map of ``S``.
* A permutation ``s`` of the five roots acts by ``(s.z)[s[i]] = z[i]``.
* The six quadratics are indexed 0..5 with index 0 the symbol infinity and index
  ``1 + nu`` the quadratic ``q_nu``.
* The correspondence ``rho`` sends an even permutation to a projective class with
  ``Q_{s.z}(rho(s) p) = Q_z(p)``, where ``Q_z = sum_i u_i(z) q_i`` is the covariant
  quadratic.  Consequently ``x(s.z) = rho(s) . x(z)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from .core import perms
from .core.forms import HomogeneousForm, act_on_form
from .core.matrices import (GroupClosureError, LinearSubstitution, MatrixGroup, close_group,
                            projectivize)
from .core.numbers import (DEFAULT_CONFIG, DegeneracyError, ToleranceConfig, current_precision, eps5, sqrt5,
                           to_mpc)
from .core.roots import cluster, find_roots, poly_from_roots, polymul
from .instances import QuinticInstance, require_distinct

INFINITY = mpc("inf")
SYMBOLS = ("inf", 0, 1, 2, 3, 4)


class InfiniteParameter(ArithmeticError):
    """The point is a zero of f, so the icosahedral parameter is infinite."""


class CorrespondenceError(RuntimeError):
    """No homomorphism from A5 onto the projective classes extends the fixed images."""


def is_infinite(x) -> bool:
    return isinstance(x, mpc) and not gmpy2.is_finite(x)


# --------------------------------------------------------------------------
# forms


def _binary(terms: dict, degree: int) -> HomogeneousForm:
    return HomogeneousForm.from_dict(2, degree, {(a, degree - a): c for a, c in terms.items()})


def icosahedral_forms() -> tuple[HomogeneousForm, HomogeneousForm, HomogeneousForm]:
    """The vertex form f (12), the face form H (20) and the edge form T (30)."""
    f = _binary({11: 1, 6: 11, 1: -1}, 12)
    h = _binary({20: -1, 15: 228, 10: -494, 5: -228, 0: -1}, 20)
    t = _binary({30: 1, 25: 522, 20: -10005, 10: -10005, 5: -522, 0: 1}, 30)
    return f, h, t


def six_quadratics() -> list[HomogeneousForm]:
    """q_inf = sqrt5 x1 x2 and q_nu = eps^nu x1^2 + x1 x2 - eps^{4 nu} x2^2."""
    out = [_binary({1: sqrt5()}, 2)]
    for nu in range(5):
        out.append(_binary({2: eps5(nu), 1: 1, 0: -eps5(4 * nu)}, 2))
    return out


def syzygy_residual(f, h, t) -> mpfr:
    """Largest coefficient of T^2 + H^3 - 1728 f^5."""
    return (t * t + h ** 3 - (f ** 5).scale(1728)).norm()


# --------------------------------------------------------------------------
# context


@dataclass
class IcosaContext:
    binary_group: MatrixGroup
    projective_order: int
    f: HomogeneousForm
    H_form: HomogeneousForm
    T: HomogeneousForm
    quadratics: list
    class_reps: list                 # one LinearSubstitution per projective class
    class_mul: list                  # class_mul[a][b] = class of rep_a @ rep_b
    quad_perm: list                  # quad_perm[c][i] = j with act(rep_c, q_i) = s q_j
    quad_sign: list                  # the s above, +1 or -1
    a5: list                         # even permutations of 5, breadth-first order
    a5_generators: tuple             # (cycle, reflection, third generator)
    correspondence: dict             # even permutation -> class index
    coset_reps: tuple                # coset_reps[i] has rho-image moving q_inf to q_i
    config: ToleranceConfig = DEFAULT_CONFIG
    checks: dict = field(default_factory=dict)

    def substitution(self, sigma: Sequence[int]) -> LinearSubstitution:
        return self.class_reps[self.correspondence[tuple(sigma)]]

    def orbit(self, x) -> list:
        """Images of x under the 60 projective substitutions."""
        return [mobius(g, x) for g in self.class_reps]


def mobius(g: LinearSubstitution, x):
    (a, b), (c, d) = g.entries
    if is_infinite(x):
        return INFINITY if c == 0 else a / c
    den = c * x + d
    if den == 0:
        return INFINITY
    return (a * x + b) / den


def _generators():
    s = LinearSubstitution([[eps5(3), 0], [0, eps5(2)]])
    r5 = sqrt5()
    e14, e23 = eps5(1) - eps5(4), eps5(2) - eps5(3)
    t = LinearSubstitution([[-e14 / r5, e23 / r5], [e23 / r5, e14 / r5]])
    return s, t


def _match_quadratic(form: HomogeneousForm, quads: list, tol) -> tuple[int, int]:
    for j, q in enumerate(quads):
        k = max(range(3), key=lambda i: abs(q.coeffs[i]))
        ratio = form.coeffs[k] / q.coeffs[k]
        if (form - q.scale(ratio)).norm() <= tol * 16:
            for s in (1, -1):
                if abs(ratio - s) <= tol * 16:
                    return j, s
    raise GroupClosureError("substitution does not permute the six quadratics up to sign")


def _search_correspondence(a5_gens, fixed: dict, class_mul: list, n_classes: int):
    """Images for a5_gens extending ``fixed`` to an isomorphism A5 -> classes."""
    free = [g for g in a5_gens if g not in fixed]
    for images in itertools.product(range(n_classes), repeat=len(free)):
        images_of = dict(fixed)
        images_of.update(zip(free, images))
        rho = {perms.identity(5): 0}
        queue = [perms.identity(5)]
        ok = True
        while queue and ok:
            a = queue.pop(0)
            for g in a5_gens:
                b = perms.compose(a, g)
                img = class_mul[rho[a]][images_of[g]]
                if b in rho:
                    if rho[b] != img:
                        ok = False
                        break
                else:
                    rho[b] = img
                    queue.append(b)
        if not ok or len(rho) != n_classes or len(set(rho.values())) != n_classes:
            continue
        # full multiplication table check
        if all(rho[perms.compose(a, b)] == class_mul[rho[a]][rho[b]] for a in rho for b in rho):
            return rho
    raise CorrespondenceError("no isomorphism extends the prescribed generator images")


def build_icosahedral_context(config: ToleranceConfig = DEFAULT_CONFIG,
                              group: MatrixGroup | None = None) -> IcosaContext:
    """Close the binary group, build its forms and fix the correspondence with A5.

    A previously verified ``group`` (for instance from the cache) skips the closure.
    """
    with config.context():
        tol = config.tol
        s, t = _generators()
        if group is None:
            group = close_group([s, t], 120, config)
        if group.order != 120:
            raise GroupClosureError(f"binary icosahedral closure has order {group.order}")
        n_classes, kernel = projectivize(group)
        if n_classes != 60 or len(kernel) != 2:
            raise GroupClosureError(f"projective quotient {n_classes}, kernel {len(kernel)}")

        f, h, tf = icosahedral_forms()
        syz = syzygy_residual(f, h, tf)
        if syz > tol:
            raise ArithmeticError(f"syzygy residual {float(syz):.3e}")
        inv_res = max((act_on_form(g, phi) - phi).norm() for g in (s, t) for phi in (f, h, tf))
        if inv_res > tol:
            raise ArithmeticError(f"forms not invariant under generators: {float(inv_res):.3e}")

        reps = group.representatives()
        class_mul = [[group.class_of(group.index_of(a @ b)) for b in reps] for a in reps]

        quads = six_quadratics()
        quad_perm, quad_sign = [], []
        for g in reps:
            row_p, row_s = [], []
            for q in quads:
                j, sgn = _match_quadratic(act_on_form(g, q), quads, tol)
                row_p.append(j)
                row_s.append(sgn)
            quad_perm.append(tuple(row_p))
            quad_sign.append(tuple(row_s))

        u_mat = LinearSubstitution([[0, -1], [1, 0]])
        k_u = group.index_of(u_mat)
        if k_u is None:
            raise GroupClosureError("the reflection x -> -1/x is missing from the group")
        cyc = perms.from_cycles(5, (0, 1, 2, 3, 4))
        refl = perms.from_cycles(5, (0, 4), (1, 3))
        third = perms.from_cycles(5, (0, 1), (2, 3))
        fixed = {cyc: group.class_of(group.index_of(s)), refl: group.class_of(k_u)}
        rho = _search_correspondence((cyc, refl, third), fixed, class_mul, n_classes)

        a5 = perms.generate([cyc, third])
        coset = [None] * 6
        for sigma in a5:
            k = quad_perm[rho[sigma]][0]
            if coset[k] is None:
                coset[k] = sigma
        if any(c is None for c in coset):
            raise CorrespondenceError("A5 does not move q_inf to every quadratic")

        return IcosaContext(
            binary_group=group, projective_order=n_classes, f=f, H_form=h, T=tf,
            quadratics=quads, class_reps=reps, class_mul=class_mul, quad_perm=quad_perm,
            quad_sign=quad_sign, a5=a5, a5_generators=(cyc, refl, third), correspondence=rho,
            coset_reps=tuple(coset), config=config,
            checks={"syzygy": syz, "generator_invariance": inv_res},
        )


# --------------------------------------------------------------------------
# metacyclic vector and covariant quadratic


@dataclass(frozen=True)
class MetacyclicVector:
    u_infinity: mpc
    u: tuple                 # u_0 .. u_4
    sign_pattern: tuple      # u_i = sign_i * principal sqrt(u_i^2), infinity first

    @property
    def values(self) -> tuple:
        return (self.u_infinity,) + tuple(self.u)


@dataclass(frozen=True)
class CovariantQuadratic:
    A0: mpc
    A1: mpc
    A2: mpc

    def form(self) -> HomogeneousForm:
        """A1 x1^2 + 2 A0 x1 x2 - A2 x2^2."""
        return _binary({2: self.A1, 1: 2 * self.A0, 0: -self.A2}, 2)


def _cyclic_cubic(z) -> mpc:
    return sum((z[i] ** 2 * z[(i + 1) % 5] for i in range(1, 5)), z[0] ** 2 * z[1])


def u_infinity(z: Sequence) -> mpc:
    """v(z) - v(reversed z) with v = sum z_i^2 z_{i+1}.

    Invariant under the cyclic shift and odd under reversal, so its stabilizer in
    A5 is the dihedral group of order 10.
    """
    return _cyclic_cubic(z) - _cyclic_cubic(tuple(reversed(z)))


def _principal_sign(u) -> int:
    if u == 0:
        return 1
    root = gmpy2.sqrt(u * u)
    return 1 if abs(root - u) <= abs(root + u) else -1


def metacyclic_u(instance: QuinticInstance, context: IcosaContext) -> MetacyclicVector:
    """The six metacyclic square roots, with signs fixed by the correspondence.

    u_i(z) = s * u_inf(tau_i . z), where tau_i is the fixed coset representative
    whose class moves q_inf to s * q_i.
    """
    with context.config.context():
        z = instance.roots
        require_distinct(z, context.config.tol, "metacyclic_u")
        vals = []
        for k, tau in enumerate(context.coset_reps):
            c = context.correspondence[tau]
            vals.append(context.quad_sign[c][0] * u_infinity(perms.act(tau, z)))
        signs = tuple(_principal_sign(u) for u in vals)
        return MetacyclicVector(vals[0], tuple(vals[1:]), signs)


def covariant_quadratic(u: MetacyclicVector) -> CovariantQuadratic:
    """2 A0 = sqrt5 u_inf + sum u_nu, A1 = sum eps^nu u_nu, A2 = sum eps^{4 nu} u_nu."""
    a0 = (sqrt5() * u.u_infinity + sum(u.u, mpc(0))) / 2
    a1 = sum((eps5(nu) * x for nu, x in enumerate(u.u)), mpc(0))
    a2 = sum((eps5(4 * nu) * x for nu, x in enumerate(u.u)), mpc(0))
    size = max(abs(x) for x in u.values)
    if max(abs(a0), abs(a1), abs(a2)) <= mpfr(2) ** (32 - current_precision()) * size:
        # e.g. the cyclic quintic: the u-vector lies in the kernel of the map to (A0, A1, A2)
        raise DegeneracyError("covariant_quadratic", "the covariant quadratic vanishes identically")
    return CovariantQuadratic(a0, a1, a2)


def quadratic_discriminant(q: CovariantQuadratic) -> mpc:
    return q.A0 ** 2 + q.A1 * q.A2


def icosahedral_point(q: CovariantQuadratic, config: ToleranceConfig = DEFAULT_CONFIG):
    """The root (-A0 + sqrt A) / A1 of the covariant quadratic, principal branch.

    Uses the equivalent A2 / (A0 + sqrt A) when that denominator is the larger one,
    which avoids cancellation as A1 -> 0.  Returns INFINITY when the root sits at
    infinity and raises DegeneracyError when the quadratic vanishes identically.
    """
    return icosahedral_point_branch(q, config)[0]


def icosahedral_point_branch(q: CovariantQuadratic, config: ToleranceConfig = DEFAULT_CONFIG):
    """(x, form) where form names the expression used for x."""
    with config.context():
        tol = config.tol
        scale = max(abs(q.A0), abs(q.A1), abs(q.A2))
        if scale == 0:
            raise DegeneracyError("icosahedral_point", "covariant quadratic vanishes")
        disc = quadratic_discriminant(q)
        noise = mpfr(2) ** (32 - config.precision_bits)
        if abs(disc) <= noise * scale ** 2:
            # double root, e.g. every principal quintic; sqrt of rounding noise would
            # cost half the digits
            num, den, form = -q.A0, q.A1, "-A0/A1 (A=0)"
            if abs(q.A0) > abs(q.A1):
                num, den, form = q.A2, q.A0, "A2/A0 (A=0)"
        else:
            if disc.real < 0 and abs(disc.imag) <= noise * abs(disc):
                # on the cut: a rounding-level imaginary part must not pick the branch
                disc = mpc(disc.real, 0)
            root = gmpy2.sqrt(disc)
            num, den, form = -q.A0 + root, q.A1, "(-A0+sqrtA)/A1"
            alt_num, alt_den = q.A2, q.A0 + root
            if abs(alt_den) > abs(num):
                num, den, form = alt_num, alt_den, "A2/(A0+sqrtA)"
        if abs(den) <= tol * scale:
            if abs(num) <= tol * scale:
                raise DegeneracyError("icosahedral_point", "both forms of the root degenerate")
            return INFINITY, form
        return num / den, form


def _dehomogenize(x):
    if is_infinite(x):
        return (mpc(1), mpc(0))
    if isinstance(x, tuple):
        a, b = to_mpc(x[0]), to_mpc(x[1])
    else:
        a, b = to_mpc(x), mpc(1)
    m = max(abs(a), abs(b))
    return (a / m, b / m)


def icosa_parameter(context: IcosaContext, x) -> mpc:
    """X = H^3 / (1728 f^5) at x (a number, INFINITY or a homogeneous pair)."""
    with context.config.context():
        p = _dehomogenize(x)
        fv = context.f(p)
        if abs(fv) <= context.config.tol:
            raise InfiniteParameter("x is a zero of f")
        return context.H_form(p) ** 3 / (1728 * fv ** 5)


def reduce_quintic(instance: QuinticInstance, context: IcosaContext) -> tuple:
    """(x, X) for the quintic; X is INFINITY when x is a vertex of the icosahedron."""
    with context.config.context():
        q = covariant_quadratic(metacyclic_u(instance, context))
        x = icosahedral_point(q, context.config)
        try:
            big_x = icosa_parameter(context, x)
        except InfiniteParameter:
            big_x = INFINITY
        return x, big_x


# --------------------------------------------------------------------------
# the icosahedral equation


def _sorted(values):
    return sorted(values, key=lambda r: (float(r.real), float(r.imag)))


def solve_icosahedral(context: IcosaContext, X, seed: int = 0) -> list:
    """The 60 roots (with multiplicity) of H(x)^3 - 1728 X f(x)^5 = 0.

    At X = 0, 1, INFINITY the roots are read off H, T and f directly, repeated
    3, 2 and 5 times; f has a root at infinity.
    """
    cfg = context.config
    with cfg.context():
        tol = cfg.tol
        one = {1: 1}
        hpoly = context.H_form.slice(one, 0)
        fpoly = context.f.slice(one, 0)
        if is_infinite(X) or (isinstance(X, str) and X.lower() in ("inf", "infinity")):
            finite = find_roots(fpoly[1:], cfg, seed)   # leading x^12 coefficient is zero
            return _sorted(finite * 5) + [INFINITY] * 5
        X = to_mpc(X)
        if abs(X) <= tol:
            return _sorted(find_roots(hpoly, cfg, seed) * 3)
        if abs(X - 1) <= tol:
            return _sorted(find_roots(context.T.slice(one, 0), cfg, seed) * 2)
        h3 = polymul(polymul(hpoly, hpoly), hpoly)
        f2 = polymul(fpoly, fpoly)
        f5 = polymul(polymul(f2, f2), fpoly)
        f5 = [mpc(0)] * (len(h3) - len(f5)) + f5
        poly = [a - 1728 * X * b for a, b in zip(h3, f5)]
        return find_roots(poly, cfg, seed)


def fiber_multiplicities(roots: Sequence, tol) -> list[tuple[int, int]]:
    """Sorted (multiplicity, count) pairs after clustering; infinite roots form one cluster."""
    finite = [r for r in roots if not is_infinite(r)]
    n_inf = len(roots) - len(finite)
    mults = [m for _, m in cluster(finite, tol)]
    if n_inf:
        mults.append(n_inf)
    counts: dict = {}
    for m in mults:
        counts[m] = counts.get(m, 0) + 1
    return sorted(counts.items())


def projective_distance(a, b) -> mpfr:
    """Chordal distance on the Riemann sphere."""
    if is_infinite(a) and is_infinite(b):
        return mpfr(0)
    if is_infinite(a):
        a, b = b, a
    if is_infinite(b):
        return 1 / gmpy2.sqrt(1 + abs(a) ** 2)
    return abs(a - b) / gmpy2.sqrt((1 + abs(a) ** 2) * (1 + abs(b) ** 2))


def hausdorff(xs: Sequence, ys: Sequence, dist=projective_distance) -> mpfr:
    d1 = max(min(dist(x, y) for y in ys) for x in xs)
    d2 = max(min(dist(x, y) for x in xs) for y in ys)
    return max(d1, d2)


# --------------------------------------------------------------------------
# resolvent


def jacobi_resolvent(instance: QuinticInstance, context: IcosaContext) -> list:
    """Monic sextic whose roots are 5 A0^2 over the six cosets of the dihedral group."""
    with context.config.context():
        require_distinct(instance.roots, context.config.tol, "jacobi_resolvent")
        values = []
        for tau in context.coset_reps:
            q = covariant_quadratic(metacyclic_u(instance.permuted(tau), context))
            values.append(5 * q.A0 ** 2)
        return poly_from_roots(values)


# --------------------------------------------------------------------------
# lifting obstruction


@dataclass
class ObstructionCertificate:
    """Outcome of the exhaustive search; ``holds`` is True when no lift exists."""

    four_group_cases: list           # (normalization, signs, failed relations, product)
    order_60_candidates: list        # (generator sign choices, order of closure)
    involutions_in_binary_group: int
    holds: bool

    def summary(self) -> str:
        n = len(self.four_group_cases)
        bad = sum(1 for c in self.four_group_cases if not c[2])
        return (f"four-group lifts tested {n}, homomorphic {bad}; order-60 candidates "
                f"{len(self.order_60_candidates)}, closures "
                f"{sorted(set(o for _, o in self.order_60_candidates))}; involutions "
                f"{self.involutions_in_binary_group}")


def _four_group_relations(ii, iii, iv, tol) -> list[str]:
    ident = LinearSubstitution.identity(2)
    failed = []
    for name, m in (("II^2", ii @ ii), ("III^2", iii @ iii), ("IV^2", iv @ iv),
                    ("II.III.IV", ii @ iii @ iv)):
        if m.max_diff(ident) > tol:
            failed.append(name)
    return failed


def four_group_obstruction(context: IcosaContext) -> ObstructionCertificate:
    """Exhaustive certificate that the projective group does not lift to GL2.

    Part one enumerates every lift lambda * B of the substitutions xi -> -xi,
    xi -> 1/xi, xi -> -1/xi with the scalar normalized to determinant -1, to
    determinant +1, and to the involutive scalars (lambda^2 B^2 = 1), and records
    which defining relations of the four-group fail.  Part two closes every sign
    choice of lifts of the two group generators and records the orders.
    """
    cfg = context.config
    with cfg.context():
        tol = cfg.tol
        base = {
            "II": LinearSubstitution([[1, 0], [0, -1]]),
            "III": LinearSubstitution([[0, 1], [1, 0]]),
            "IV": LinearSubstitution([[0, -1], [1, 0]]),
        }
        # scalars lambda with det(lambda B) = d, up to sign
        def scaled(name, d):
            lam = gmpy2.sqrt(to_mpc(d) / base[name].determinant)
            return base[name].scaled(lam)

        def involutive(name):
            b2 = (base[name] @ base[name]).entries[0][0]
            return base[name].scaled(gmpy2.sqrt(1 / b2))

        families = {
            "det -1": {n: scaled(n, -1) for n in base},
            "det +1": {n: scaled(n, 1) for n in base},
            "involutive": {n: involutive(n) for n in base},
        }
        cases = []
        for label, lifts in families.items():
            for signs in itertools.product((1, -1), repeat=3):
                ii, iii, iv = (lifts[n].scaled(sg) for n, sg in zip(("II", "III", "IV"), signs))
                failed = _four_group_relations(ii, iii, iv, tol)
                prod = (ii @ iii @ iv).entries
                cases.append((label, signs, failed, prod[0][0]))

        order_60 = []
        for signs in itertools.product((1, -1), repeat=2):
            gens = [g.scaled(sg) for g, sg in zip(context.binary_group.generators, signs)]
            try:
                order = close_group(gens, 120, cfg).order
            except GroupClosureError:
                order = -1
            order_60.append((signs, order))

        ident = LinearSubstitution.identity(2)
        involutions = sum(1 for g in context.binary_group.elements
                          if (g @ g).max_diff(ident) <= tol)

        holds = (all(c[2] for c in cases) and all(o != 60 for _, o in order_60)
                 and involutions == 2)
        return ObstructionCertificate(cases, order_60, involutions, holds)
