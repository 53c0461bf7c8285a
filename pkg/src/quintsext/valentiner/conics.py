"""The six mutually apolar conics permuted by the Valentiner group."""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpc

from ..core.forms import HomogeneousForm, quadratic_form_matrix
from ..core.matrices import det
from ..core.numbers import omega3, sqrt_m15

# sign patterns of (x2 x3, x3 x1, x1 x2) in k3 .. k6
SIGN_PATTERNS = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))


def conic_constants(flipped: bool = False) -> tuple[mpc, mpc]:
    """(alpha, beta) for k3 .. k6.

    The determinant-one normalization needs alpha = (-1 - sqrt(-15))/8 together
    with beta = (-3 + sqrt(-15))/4.  ``flipped=True`` reverses the sign of the real
    part, alpha = (1 - sqrt(-15))/8; then det k3 = (115 + 9 sqrt(-15))/128 and only
    24 collineations of the group preserve the conic set.  The tests use it to pin
    down that the sign matters.
    """
    r = sqrt_m15()
    alpha = (1 - r) / 8 if flipped else (-1 - r) / 8
    beta = (-3 + r) / 4
    return alpha, beta


def _ternary(terms: dict) -> HomogeneousForm:
    return HomogeneousForm.from_dict(3, 2, terms)


@dataclass(frozen=True)
class ConicSystem:
    forms: tuple          # k1 .. k6 as ternary quadratics
    matrices: tuple       # symmetric 3x3 matrices, k(x) = x^T K x

    def determinants(self) -> list:
        return [det(m) for m in self.matrices]

    def apolarity(self, a: int, b: int) -> mpc:
        """tr(adj(K_a) K_b); zero for distinct conics of the system."""
        ka, kb = self.matrices[a], self.matrices[b]
        adj = [[(ka[(c + 1) % 3][(r + 1) % 3] * ka[(c + 2) % 3][(r + 2) % 3]
                 - ka[(c + 1) % 3][(r + 2) % 3] * ka[(c + 2) % 3][(r + 1) % 3])
                for c in range(3)] for r in range(3)]
        return sum((adj[r][c] * kb[c][r] for r in range(3) for c in range(3)), mpc(0))


def gerbaldi_conics(flipped_alpha: bool = False) -> ConicSystem:
    j = omega3()
    j2 = omega3(2)
    forms = [
        _ternary({(2, 0, 0): 1, (0, 2, 0): j, (0, 0, 2): j2}),
        _ternary({(2, 0, 0): 1, (0, 2, 0): j2, (0, 0, 2): j}),
    ]
    alpha, beta = conic_constants(flipped_alpha)
    for s23, s31, s12 in SIGN_PATTERNS:
        forms.append(_ternary({
            (2, 0, 0): alpha, (0, 2, 0): alpha, (0, 0, 2): alpha,
            (0, 1, 1): s23 * beta, (1, 0, 1): s31 * beta, (1, 1, 0): s12 * beta,
        }))
    mats = tuple(tuple(tuple(r) for r in quadratic_form_matrix(k)) for k in forms)
    return ConicSystem(tuple(forms), mats)


def mixed_discriminant(a, b, c) -> mpc:
    """Coefficient of l1 l2 l3 in det(l1 A + l2 B + l3 C), by inclusion-exclusion."""
    def add(*ms):
        return [[sum((m[r][k] for m in ms[1:]), ms[0][r][k]) for k in range(3)] for r in range(3)]
    return (det(add(a, b, c)) - det(add(a, b)) - det(add(a, c)) - det(add(b, c))
            + det(a) + det(b) + det(c))
