"""The 1080 unimodular ternary substitutions, their action on the conics, and the
invariants of degrees 6, 12 and 30.

Conventions follow the icosahedral module: substitutions act on forms on the
right, ``act(g, k)(p) = k(g p)``, and a permutation ``s`` of the six roots acts by
``(s.z)[s[i]] = z[i]``.  If ``act(g, k_i) = w_i k_{pi_g(i)}`` then ``pi`` reverses
products, and the correspondence sends ``s`` to the class ``g`` with ``pi_g = s^-1``;
this is a homomorphism and makes ``Omega(s.z | g p) = Omega(z | p)``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from gmpy2 import mpc, mpfr

from ..core import perms
from ..core.forms import HomogeneousForm, act_on_form, evaluate_form, monomials, multinomial
from ..core.matrices import (GroupClosureError, LinearSubstitution, MatrixGroup, close_group,
                             matmul, projectivize)
from ..core.numbers import DEFAULT_CONFIG, ToleranceConfig, eval_expression, omega3
from .conics import ConicSystem, gerbaldi_conics


class ConicActionError(GroupClosureError):
    """A substitution fails to permute the conics up to cube roots of unity."""


def load_generator_data(path=None) -> dict:
    """The shipped generator file, or a user-supplied one in the same format."""
    if path is None:
        text = resources.files("quintsext.data").joinpath("valentiner_generators.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return json.loads(text)


def generators_from_data(data: dict) -> list[LinearSubstitution]:
    """Evaluate the generator entries at the working precision."""
    return [LinearSubstitution([[eval_expression(x) for x in row] for row in g["entries"]])
            for g in data["generators"]]


# --------------------------------------------------------------------------
# conic action


def transform_matrix(g: LinearSubstitution, k) -> tuple:
    """Matrix of act(g, k) for a quadratic with symmetric matrix k: g^T k g."""
    gt = tuple(zip(*g.entries))
    return matmul(matmul(gt, k), g.entries)


def conic_action(g: LinearSubstitution, conics: ConicSystem, tol) -> tuple[tuple, tuple]:
    """(pi, w) with act(g, k_i) = w_i k_{pi(i)} and w_i^3 = 1."""
    perm, factors = [], []
    for k in conics.matrices:
        m = transform_matrix(g, k)
        for idx, target in enumerate(conics.matrices):
            r, c = max(((r, c) for r in range(3) for c in range(3)),
                       key=lambda rc: abs(target[rc[0]][rc[1]]))
            w = m[r][c] / target[r][c]
            if all(abs(m[a][b] - w * target[a][b]) <= tol * 16 for a in range(3) for b in range(3)):
                if abs(w ** 3 - 1) > tol * 64:
                    raise ConicActionError(f"conic factor {complex(w)} is not a cube root of unity")
                perm.append(idx)
                factors.append(w)
                break
        else:
            raise ConicActionError("image of a conic is not a multiple of a conic")
    if len(set(perm)) != 6:
        raise ConicActionError("conic images are not a permutation")
    return tuple(perm), tuple(factors)


# --------------------------------------------------------------------------
# invariants by averaging


@lru_cache(maxsize=None)
def _multinomials(degree: int) -> tuple:
    return tuple(multinomial(m) for m in monomials(3, degree))


def reynolds_power(reps: list, seed, degree: int) -> HomogeneousForm:
    """Average over ``reps`` of act(g, L^degree) for the linear form L = seed . x."""
    mons = monomials(3, degree)
    mult = _multinomials(degree)
    acc = [mpc(0)] * len(mons)
    for g in reps:
        row = [sum((seed[i] * g.entries[i][k] for i in range(3)), mpc(0)) for k in range(3)]
        pw = []
        for c in row:
            p = [mpc(1)]
            for _ in range(degree):
                p.append(p[-1] * c)
            pw.append(p)
        for n, (a, b, c) in enumerate(mons):
            acc[n] += pw[0][a] * pw[1][b] * pw[2][c]
    return HomogeneousForm(3, degree, [m * a / len(reps) for m, a in zip(mult, acc)])


def _inner(a: HomogeneousForm, b: HomogeneousForm) -> mpc:
    return sum((x * y.conjugate() for x, y in zip(a.coeffs, b.coeffs)), mpc(0))


def orthogonal_complement(form: HomogeneousForm, basis: list) -> HomogeneousForm:
    """Remove the span of ``basis`` from ``form`` (Gram-Schmidt, Hermitian coefficient product)."""
    ortho = []
    for b in basis:
        for o in ortho:
            b = b - o.scale(_inner(b, o) / _inner(o, o))
        ortho.append(b)
    for o in ortho:
        form = form - o.scale(_inner(form, o) / _inner(o, o))
    return form


def _seeds():
    s = 0
    while True:
        yield (mpc(1), mpc(s), mpc(s * s))
        s += 1


def invariant_forms(reps: list, config: ToleranceConfig, max_seeds: int = 8) -> tuple:
    """F, H6, Phi of degrees 6, 12, 30 and the seeds used for each."""
    tol = config.tol
    cut = mpfr(2) ** -64

    def fresh(degree, basis):
        for n, seed in zip(range(max_seeds), _seeds()):
            avg = reynolds_power(reps, seed, degree)
            rest = orthogonal_complement(avg, basis) if basis else avg
            if rest.norm() > cut * avg.norm():
                rest = rest.normalized(tol)
                # rounding-level coefficients are exact zeros of the invariant
                cut_abs = tol * rest.norm()
                rest = HomogeneousForm(3, degree, [c if abs(c) > cut_abs else mpc(0)
                                                   for c in rest.coeffs])
                return rest, int(seed[1].real)
        raise ArithmeticError(f"no seed produced a new invariant of degree {degree}")

    f, s6 = fresh(6, [])
    f2 = f * f
    h, s12 = fresh(12, [f2])
    f3 = f2 * f
    phi, s30 = fresh(30, [f3 * f2, f3 * h, f * h * h])
    return f, h, phi, {"F": s6, "H6": s12, "Phi": s30}


# --------------------------------------------------------------------------
# context


@dataclass
class ValentinerContext:
    ternary_group: MatrixGroup
    projective_order: int
    conics: ConicSystem
    class_reps: list
    conic_action: list            # per class: (pi, factors) for its representative
    correspondence: dict          # even permutation of 6 -> class index
    F: HomogeneousForm
    H6: HomogeneousForm
    Phi: HomogeneousForm
    generator_data: dict
    config: ToleranceConfig = DEFAULT_CONFIG
    checks: dict = field(default_factory=dict)

    def substitution(self, sigma) -> LinearSubstitution:
        return self.class_reps[self.correspondence[tuple(sigma)]]

    def label(self, cls: int) -> tuple:
        """The even permutation of the roots attached to a projective class."""
        return perms.inverse(self.conic_action[cls][0])

    def with_precision(self, config: ToleranceConfig) -> "ValentinerContext":
        return build_valentiner_context(self.generator_data, config)

    @property
    def generators(self) -> list:
        return self.ternary_group.generators


def build_valentiner_context(generator_data: dict | None = None,
                             config: ToleranceConfig = DEFAULT_CONFIG,
                             group: MatrixGroup | None = None) -> ValentinerContext:
    """Close the generators, verify the conic action and build F, H6, Phi.

    Nothing in ``generator_data`` is trusted: order, determinants and the conic
    permutation property are checked for every element.  A previously verified
    ``group`` skips the closure but not the checks.
    """
    data = generator_data if generator_data is not None else load_generator_data()
    with config.context():
        tol = config.tol
        if group is None:
            group = close_group(generators_from_data(data), 1080, config)
        gens = group.generators
        if group.order != 1080:
            raise GroupClosureError(f"ternary closure has order {group.order}, expected 1080")
        n_classes, kernel = projectivize(group)
        if n_classes != 360 or len(kernel) != 3:
            raise GroupClosureError(f"projective quotient {n_classes}, kernel {len(kernel)}")

        conics = gerbaldi_conics()
        det_res = max(abs(d - 1) for d in conics.determinants())
        if det_res > tol:
            raise ConicActionError(f"conic determinants off by {float(det_res):.3e}")

        # every one of the 1080 elements, not only the class representatives
        actions = [conic_action(g, conics, tol) for g in group.elements]
        reps = group.representatives()
        rep_actions = [actions[members[0]] for members in group.projective_classes]
        for members in group.projective_classes:
            if len({actions[m][0] for m in members}) != 1:
                raise ConicActionError("scalar multiples induce different permutations")

        correspondence = {}
        for c, (pi, _) in enumerate(rep_actions):
            sigma = perms.inverse(pi)
            if not perms.is_even(sigma):
                raise ConicActionError("a substitution induces an odd permutation of the conics")
            if sigma in correspondence:
                raise ConicActionError("conic action is not faithful on projective classes")
            correspondence[sigma] = c

        rng = random.Random(1080)
        keys = list(correspondence)
        hom_failures = 0
        for _ in range(50):
            a, b = rng.choice(keys), rng.choice(keys)
            prod = reps[correspondence[a]] @ reps[correspondence[b]]
            if group.class_of(group.index_of(prod)) != correspondence[perms.compose(a, b)]:
                hom_failures += 1
        if hom_failures:
            raise ConicActionError(f"correspondence fails {hom_failures} of 50 product checks")

        f, h, phi, seeds = invariant_forms(reps, config)
        inv_res = max((act_on_form(g, form) - form).norm() / form.norm()
                      for g in gens for form in (f, h, phi))
        if inv_res > tol:
            raise ArithmeticError(f"invariants move under a generator by {float(inv_res):.3e}")

        return ValentinerContext(
            ternary_group=group, projective_order=n_classes, conics=conics, class_reps=reps,
            conic_action=rep_actions, correspondence=correspondence, F=f, H6=h, Phi=phi,
            generator_data=data, config=config,
            checks={"conic_determinants": det_res, "generator_invariance": inv_res,
                    "elements_permuting_conics": len(actions), "reynolds_seeds": seeds},
        )


def pointwise_invariance(context: ValentinerContext, form: HomogeneousForm, points) -> mpfr:
    """max over all group elements g and points p of |form(g p) - form(p)|, relative
    to the sum of |coefficient * monomial| at p."""
    worst = mpfr(0)
    for p in points:
        m = max(abs(x) for x in p)
        p = tuple(x / m for x in p)
        base = evaluate_form(form, p)
        scale = sum((abs(c) for c in form.coeffs), mpfr(0))
        for g in context.ternary_group.elements:
            worst = max(worst, abs(evaluate_form(form, g(p)) - base) / scale)
    return worst


def scalar_kernel(context: ValentinerContext) -> list:
    """The scalars of the kernel, for display: 1, j, j^2 up to rounding."""
    _, kernel = projectivize(context.ternary_group)
    return [k.entries[0][0] for k in kernel]


def j_power(x: mpc, tol) -> int | None:
    """k with x = j^k, or None."""
    for k in range(3):
        if abs(x - omega3(k)) <= tol:
            return k
    return None
