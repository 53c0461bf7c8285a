"""Triple invariants of the conics and the cubic covariant Omega of six roots."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpc, mpfr

from ..core import perms
from ..core.forms import HomogeneousForm, act_on_form, jacobian_det, monomials, multinomial
from ..core.matrices import LinearSubstitution, det
from ..core.numbers import DegeneracyError
from ..instances import SexticInstance, require_distinct
from .conics import mixed_discriminant

TRIPLES = tuple(itertools.combinations(range(6), 3))


def triple_invariants(context, i: int, j: int, k: int) -> tuple[HomogeneousForm, mpc]:
    """(J, c): the functional determinant of k_i, k_j, k_k and the mixed
    discriminant of their matrices."""
    if len({i, j, k}) != 3:
        raise ValueError("triple indices must be distinct")
    with context.config.context():
        forms, mats = context.conics.forms, context.conics.matrices
        jac = jacobian_det(forms[i], forms[j], forms[k])
        c = mixed_discriminant(mats[i], mats[j], mats[k])
        scale = max(abs(x) for m in (mats[i], mats[j], mats[k]) for r in m for x in r) ** 3
        if abs(c) <= context.config.tol * scale:
            raise AssertionError(f"mixed discriminant of conics {(i, j, k)} vanishes")
        return jac, c


def quotients(context) -> dict:
    """Q_T = J_T / c_T for the 20 ascending triples, cached on the context."""
    cache = context.__dict__.setdefault("_quotients", {})
    if not cache:
        with context.config.context():
            for t in TRIPLES:
                jac, c = triple_invariants(context, *t)
                cache[t] = jac / c
    return cache


def _sorted_triple(t) -> tuple[tuple, int]:
    """Ascending triple and the sign of the sorting permutation."""
    t = list(t)
    sign = 1
    for a in range(3):
        for b in range(2 - a):
            if t[b] > t[b + 1]:
                t[b], t[b + 1] = t[b + 1], t[b]
                sign = -sign
    return tuple(t), sign


def difference_triple(z: Sequence, t) -> mpc:
    """(z_b - z_c)(z_c - z_a)(z_a - z_b) for t = (a, b, c)."""
    a, b, c = (z[i] for i in t)
    return (b - c) * (c - a) * (a - b)


def power_determinant(z: Sequence, t, exponents) -> mpc:
    """det [z_i^e] over rows i in t and columns e in exponents."""
    return det([[z[i] ** e for e in exponents] for i in t])


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CubicCovariant:
    """Ternary cubic stored by its symmetric coefficients phi_{abc}.

    The cubic is sum over ordered (a, b, c) of phi_{abc} x_a x_b x_c, so the
    coefficient of a monomial is phi times its multinomial count.
    """

    phi: tuple

    @staticmethod
    def labels() -> list[str]:
        return ["".join(str(v + 1) * e for v, e in enumerate(m)) for m in monomials(3, 3)]

    @classmethod
    def from_form(cls, form: HomogeneousForm) -> "CubicCovariant":
        if form.num_vars != 3 or form.degree != 3:
            raise ValueError("not a ternary cubic")
        return cls(tuple(c / multinomial(m) for m, c in zip(form.monomials, form.coeffs)))

    def form(self) -> HomogeneousForm:
        return HomogeneousForm(3, 3, [p * multinomial(m) for m, p in zip(monomials(3, 3), self.phi)])

    def __call__(self, point) -> mpc:
        return self.form()(point)

    def norm(self) -> mpfr:
        return max(abs(p) for p in self.phi)


def _weighted_sum(context, weights: dict) -> HomogeneousForm:
    q = quotients(context)
    acc = HomogeneousForm(3, 3)
    for t, w in weights.items():
        acc = acc + q[t].scale(w)
    return acc


def _check_nonzero(form: HomogeneousForm, weights: dict, context, stage: str):
    q = quotients(context)
    scale = sum((abs(w) * q[t].norm() for t, w in weights.items()), mpfr(0))
    if scale == 0 or form.norm() <= context.config.tol * scale:
        raise DegeneracyError(stage, "the cubic covariant vanishes identically")


def omega_cubic(instance: SexticInstance, context) -> CubicCovariant:
    """Omega = sum over the 20 triples of the difference product times J/c."""
    return generalized_omega(instance, context, (0, 1, 2), stage="omega_cubic")


def generalized_omega(instance: SexticInstance, context, exponents=(0, 1, 2),
                      stage: str = "generalized_omega") -> CubicCovariant:
    """Omega with det[z^a, z^b, z^c] in place of the difference product.

    (0, 1, 2) gives the difference product itself.
    """
    a, b, c = exponents
    if len({a, b, c}) != 3 or min(exponents) < 0:
        raise ValueError("exponents must be distinct nonnegative integers")
    with context.config.context():
        z = instance.roots
        require_distinct(z, context.config.tol, stage)
        if tuple(exponents) == (0, 1, 2):
            weights = {t: difference_triple(z, t) for t in TRIPLES}
        else:
            weights = {t: power_determinant(z, t, exponents) for t in TRIPLES}
        form = _weighted_sum(context, weights)
        _check_nonzero(form, weights, context, stage)
        return CubicCovariant.from_form(form)


def omega_value(instance: SexticInstance, context, point) -> mpc:
    return omega_cubic(instance, context).form()(point)


# --------------------------------------------------------------------------
# sign bookkeeping


def quotient_sign_action(context, g: LinearSubstitution) -> dict:
    """For each ascending triple T: (T', s) with act(g, Q_T) = s Q_{T'}, read off the forms."""
    q = quotients(context)
    tol = context.config.tol
    out = {}
    with context.config.context():
        for t in TRIPLES:
            moved = act_on_form(g, q[t])
            for t2 in TRIPLES:
                for s in (1, -1):
                    if (moved - q[t2].scale(s)).norm() <= tol * q[t2].norm() * 64:
                        out[t] = (t2, s)
                        break
                if t in out:
                    break
            else:
                raise AssertionError(f"act(g, Q_{t}) is not a signed quotient")
    return out


def difference_sign_action(sigma: Sequence[int], z: Sequence) -> dict:
    """For each ascending triple T: (T', s) with Delta_T(sigma.z) = s Delta_{T'}(z),
    found by evaluating the difference products at the sample roots ``z``."""
    zs = perms.act(sigma, z)
    base = {t: difference_triple(z, t) for t in TRIPLES}
    out = {}
    for t in TRIPLES:
        v = difference_triple(zs, t)
        best = min(((t2, s) for t2 in TRIPLES for s in (1, -1)),
                   key=lambda ts: abs(v - ts[1] * base[ts[0]]))
        out[t] = best
    return out


def combinatorial_sign_action(sigma: Sequence[int]) -> dict:
    """The same table from the permutation alone: T' = sigma^-1(T) sorted, s its sign."""
    inv = perms.inverse(sigma)
    return {t: _sorted_triple(tuple(inv[i] for i in t)) for t in TRIPLES}
