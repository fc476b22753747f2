"""Riley-Mednykh polynomials for the two-bridge knots C(2n, 3).

P_{2n}(x, m) is the defining polynomial of the nonabelian SL(2,C)
representation variety of the knot group: for meridian eigenvalue m, the
representation with trace coordinate x exists iff P_{2n}(x, m) = 0.  It is
built exactly over the integers by the two-sided trace recursion

    P_{2n} = Q P_{2(n-1)} - m^8 P_{2(n-2)}   (n > 1)
    P_{2n} = Q P_{2(n+1)} - m^8 P_{2(n+2)}   (n < -1)

from the seeds P_0 and P_{+-2} below, where Q = m^4 tr(U) for the twist
block U of the knot group word.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import ComplexPoly, LaurentBivariate


def build_q() -> LaurentBivariate:
    """The cubic Q = m^4 tr(U) driving the recursion.

    Q = -m^4 x^3 + (-2m^6 + 2m^4 - 2m^2) x^2
        + (-m^8 + 2m^6 - 3m^4 + 2m^2 - 1) x + 2m^4
    """
    return LaurentBivariate({
        (3, 4): -1,
        (2, 6): -2, (2, 4): 2, (2, 2): -2,
        (1, 8): -1, (1, 6): 2, (1, 4): -3, (1, 2): 2, (1, 0): -1,
        (0, 4): 2,
    })


def _p2() -> LaurentBivariate:
    # P_2 = -m^4 x^3 + (-2m^6 + m^4 - 2m^2) x^2
    #       + (-m^8 + m^6 - 2m^4 + m^2 - 1) x + m^4
    return LaurentBivariate({
        (3, 4): -1,
        (2, 6): -2, (2, 4): 1, (2, 2): -2,
        (1, 8): -1, (1, 6): 1, (1, 4): -2, (1, 2): 1, (1, 0): -1,
        (0, 4): 1,
    })


def _p_minus2() -> LaurentBivariate:
    # P_{-2} = m^2 x^2 + (m^4 - m^2 + 1) x + m^2
    return LaurentBivariate({
        (2, 2): 1,
        (1, 4): 1, (1, 2): -1, (1, 0): 1,
        (0, 2): 1,
    })


_M8 = LaurentBivariate.monomial(1, 0, 8)


@lru_cache(maxsize=None)
def _chain_pos(k: int) -> LaurentBivariate:
    """P_{2k} for k >= 0 on the positive branch (P_0 = 1)."""
    if k == 0:
        return LaurentBivariate.one()
    if k == 1:
        return _p2()
    return build_q() * _chain_pos(k - 1) - _M8 * _chain_pos(k - 2)


@lru_cache(maxsize=None)
def _chain_neg(k: int) -> LaurentBivariate:
    """P_{2k} for k <= 0 on the negative branch (P_0 = m^{-2})."""
    if k == 0:
        return LaurentBivariate.monomial(1, 0, -2)
    if k == -1:
        return _p_minus2()
    return build_q() * _chain_neg(k + 1) - _M8 * _chain_neg(k + 2)


def expected_degree(n: int) -> int:
    """Degree law in x: 3n for n >= 1, -(3n+1) for n <= -1."""
    if n == 0:
        raise ValueError("n = 0 has no Riley-Mednykh polynomial")
    return 3 * n if n > 0 else -(3 * n + 1)


@dataclass(frozen=True)
class RMPolynomial:
    """P_{2n} for the knot C(2n, 3), kept exact over the integers."""

    n: int
    poly: LaurentBivariate

    @property
    def degree_x(self) -> int:
        return self.poly.degree_x


@lru_cache(maxsize=None)
def build_rm(n: int) -> RMPolynomial:
    """Construct P_{2n} by the trace recursion; n = 0 is rejected.

    The knot C(0, 3) is not hyperbolic, so the half-twist count n must be a
    nonzero integer.
    """
    if n == 0:
        raise ValueError("n = 0 is excluded: C(0, 3) is not a hyperbolic knot")
    poly = _chain_pos(n) if n > 0 else _chain_neg(n)
    got = poly.degree_x
    want = expected_degree(n)
    if got != want:
        raise RuntimeError(f"degree law violated for n={n}: got {got}, want {want}")
    return RMPolynomial(n, poly)


def rm_numeric(n: int, alpha: float) -> ComplexPoly:
    """P_{2n} specialized at meridian eigenvalue m = exp(i*alpha/2)."""
    return build_rm(n).poly.specialize(alpha)


# Extended-precision dtypes for refine_roots.  On x86 Linux this is the
# 80-bit long double; elsewhere numpy may alias it to float64, in which
# case refinement degrades gracefully to ordinary Newton polish.
_LD = np.longdouble
_CLD = np.complex256 if hasattr(np, "complex256") else np.complex128


def _exact_coeffs_extended(n: int, alpha: float) -> np.ndarray:
    terms = sorted(build_rm(n).poly.terms.items())
    coeffs = np.zeros(expected_degree(n) + 1, dtype=_CLD)
    half = _LD(alpha) / _LD(2)
    for (xe, me), c in terms:
        coeffs[xe] += _LD(c) * np.exp(_CLD(1j) * (half * _LD(me)))
    return coeffs


def refine_roots(n: int, alpha: float, roots, iters: int = 4) -> list[complex]:
    """Newton-polish roots against the exact integer terms of P_{2n}.

    Double-precision specialization rounds the coefficients, which shifts
    roots by enough (~1e-11 for |n| = 5) to matter when closed-form
    identities are checked at them.  Refining in extended precision against
    the exact terms brings the roots to full double accuracy.
    """
    coeffs = _exact_coeffs_extended(n, alpha)
    dcoeffs = coeffs[1:] * np.arange(1, coeffs.size, dtype=_LD)
    out = []
    for r in roots:
        z = _CLD(r)
        for _ in range(iters):
            pv = coeffs[-1]
            for c in coeffs[-2::-1]:
                pv = pv * z + c
            dv = dcoeffs[-1]
            for c in dcoeffs[-2::-1]:
                dv = dv * z + c
            if dv == 0:
                break
            z = z - pv / dv
        out.append(complex(z))
    return out
