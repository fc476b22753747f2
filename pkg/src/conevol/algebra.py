"""Exact bivariate Laurent arithmetic and floating-point univariate root finding.

Two coefficient worlds live here.  ``LaurentBivariate`` is an exact integer
polynomial in ``x`` and the meridian eigenvalue ``m``, where only ``m`` may
carry negative exponents.  ``ComplexPoly`` is its double-precision image in
``x`` after substituting a unit-modulus value for ``m``.  On top of the
numeric side sit companion-matrix root solving with Newton polish and
Sylvester resultants/discriminants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Relative trim threshold for ComplexPoly coefficients.  Unit-modulus m keeps
# the specialized coefficient scale O(1)-O(2^deg), so relative trimming is safe.
TRIM_REL = 1e-12

# Default residual tolerance for all_roots, relative to the evaluation scale
# sum_i |c_i| |r|^i at the root (the backward-stable floor; a max|c_i| scale
# would be unattainable in doubles for roots of magnitude > 1).
ROOT_TOL = 1e-12

NEWTON_MAX_ITER = 50


class AlgebraError(Exception):
    """Degenerate polynomial input: zero/trimmed leading coefficient, etc."""


class RootFindingError(AlgebraError):
    """Newton polish failed to reach the residual target.

    Carries the best iterates and their residuals so callers can inspect how
    close the solve got.
    """

    def __init__(self, message: str, roots, residuals):
        super().__init__(message)
        self.roots = list(roots)
        self.residuals = list(residuals)


class LaurentBivariate:
    """Integer polynomial in ``x`` and ``m``; ``m``-exponents may be negative.

    Terms are a map ``{(x_exp, m_exp): coeff}`` with exact (arbitrary-width)
    integer coefficients.  Zero coefficients are never stored and instances
    are treated as immutable.  ``x``-exponents must be >= 0.
    """

    __slots__ = ("terms", "_spec_cache")

    def __init__(self, terms=None):
        clean: dict[tuple[int, int], int] = {}
        for key, coeff in (terms or {}).items():
            xe, me = key
            if not isinstance(coeff, int) or isinstance(coeff, bool):
                raise TypeError(f"coefficient {coeff!r} must be a Python int")
            if xe < 0:
                raise ValueError(f"negative x-exponent {xe} not allowed")
            if coeff != 0:
                clean[(int(xe), int(me))] = coeff
        self.terms = clean
        self._spec_cache = None

    @classmethod
    def zero(cls) -> "LaurentBivariate":
        return cls({})

    @classmethod
    def one(cls) -> "LaurentBivariate":
        return cls({(0, 0): 1})

    @classmethod
    def monomial(cls, coeff: int, x_exp: int = 0, m_exp: int = 0) -> "LaurentBivariate":
        return cls({(x_exp, m_exp): coeff})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree_x(self) -> int:
        """Degree in x; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(xe for xe, _ in self.terms)

    @property
    def m_exp_range(self) -> tuple[int, int]:
        if not self.terms:
            return (0, 0)
        mes = [me for _, me in self.terms]
        return (min(mes), max(mes))

    def sorted_terms(self) -> list[tuple[int, int, int]]:
        """Terms as (x_exp, m_exp, coeff), sorted by x then m, descending."""
        return [(xe, me, c) for (xe, me), c in
                sorted(self.terms.items(), key=lambda kv: (-kv[0][0], -kv[0][1]))]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentBivariate):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __neg__(self) -> "LaurentBivariate":
        return LaurentBivariate({k: -c for k, c in self.terms.items()})

    def __add__(self, other: "LaurentBivariate") -> "LaurentBivariate":
        if not isinstance(other, LaurentBivariate):
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentBivariate(out)

    def __sub__(self, other: "LaurentBivariate") -> "LaurentBivariate":
        if not isinstance(other, LaurentBivariate):
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) - c
        return LaurentBivariate(out)

    def __mul__(self, other: "LaurentBivariate") -> "LaurentBivariate":
        """Exact convolution of term maps; Python ints never overflow."""
        if not isinstance(other, LaurentBivariate):
            return NotImplemented
        out: dict[tuple[int, int], int] = {}
        for (xa, ma), ca in self.terms.items():
            for (xb, mb), cb in other.terms.items():
                k = (xa + xb, ma + mb)
                out[k] = out.get(k, 0) + ca * cb
        return LaurentBivariate(out)

    def evaluate(self, x: complex, m: complex) -> complex:
        """Direct term-by-term evaluation (test oracle; not performance code)."""
        return sum(c * x ** xe * m ** me for (xe, me), c in self.terms.items())

    def specialize(self, alpha: float) -> "ComplexPoly":
        """Substitute m = exp(i*alpha/2) and collect by x-exponent.

        Unit-modulus m never vanishes, so negative m-exponents are safe.
        Requires 0 <= alpha <= pi.
        """
        if not -1e-12 <= alpha <= math.pi + 1e-12:
            raise ValueError(f"alpha {alpha} outside [0, pi]")
        if self._spec_cache is None:
            items = sorted(self.terms.items())
            x_idx = np.array([xe for (xe, _), _ in items], dtype=np.intp)
            m_exp = np.array([me for (_, me), _ in items], dtype=np.float64)
            coeff = np.array([float(c) for _, c in items], dtype=np.float64)
            self._spec_cache = (x_idx, m_exp, coeff)
        x_idx, m_exp, coeff = self._spec_cache
        out = np.zeros(self.degree_x + 1 if self.terms else 1, dtype=complex)
        if len(x_idx):
            np.add.at(out, x_idx, coeff * np.exp(0.5j * alpha * m_exp))
        return ComplexPoly(out, trim=False)

    def __repr__(self) -> str:
        return f"LaurentBivariate({len(self.terms)} terms, deg_x={self.degree_x})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for xe, me, c in self.sorted_terms():
            mono = []
            if xe:
                mono.append("x" if xe == 1 else f"x^{xe}")
            if me:
                mono.append("m" if me == 1 else f"m^{me}")
            body = "*".join(mono)
            if not body:
                piece = str(c)
            elif c == 1:
                piece = body
            elif c == -1:
                piece = f"-{body}"
            else:
                piece = f"{c}*{body}"
            parts.append(piece)
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


class ComplexPoly:
    """Dense univariate polynomial; ``coeffs[i]`` multiplies ``x**i``.

    Trailing coefficients below TRIM_REL times the largest magnitude are
    trimmed so the leading coefficient is meaningful.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, trim: bool = True):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        if trim:
            scale = np.max(np.abs(arr))
            cut = arr.size
            while cut > 1 and abs(arr[cut - 1]) <= TRIM_REL * scale:
                cut -= 1
            arr = arr[:cut]
        self.coeffs = arr

    @classmethod
    def from_roots(cls, roots, lead: complex = 1.0) -> "ComplexPoly":
        c = np.array([lead], dtype=complex)
        for r in roots:
            c = np.convolve(c, np.array([-r, 1.0], dtype=complex))
        return cls(c, trim=False)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        """Horner evaluation; accepts scalars or arrays."""
        acc = np.zeros_like(np.asarray(x, dtype=complex)) + self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            acc = acc * x + c
        if np.ndim(x) == 0:
            return complex(acc)
        return acc

    def derivative(self) -> "ComplexPoly":
        if self.degree == 0:
            return ComplexPoly([0.0], trim=False)
        d = self.coeffs[1:] * np.arange(1, self.coeffs.size)
        return ComplexPoly(d, trim=False)

    def __mul__(self, other: "ComplexPoly") -> "ComplexPoly":
        if not isinstance(other, ComplexPoly):
            return NotImplemented
        return ComplexPoly(np.convolve(self.coeffs, other.coeffs), trim=False)

    def __repr__(self) -> str:
        return f"ComplexPoly(degree={self.degree})"


@dataclass
class RootSet:
    """All roots of a polynomial (with multiplicity) plus polish residuals."""

    roots: list[complex]
    residuals: list[float]

    def __len__(self) -> int:
        return len(self.roots)


def eval_scale(p: ComplexPoly, z: complex) -> float:
    """sum_i |c_i| |z|^i: the attainable residual scale at z in doubles."""
    az = abs(z)
    acc = 0.0
    for c in p.coeffs[::-1]:
        acc = acc * az + abs(c)
    return max(acc, abs(p.coeffs[-1]))


def all_roots(p: ComplexPoly, tol: float = ROOT_TOL) -> RootSet:
    """Every root of p, from companion-matrix eigenvalues, Newton-polished.

    Each returned root r satisfies |p(r)| <= tol * eval_scale(p, r); otherwise
    RootFindingError is raised with the best iterates found.
    """
    d = p.degree
    if d < 1:
        raise AlgebraError("all_roots needs degree >= 1")
    scale = float(np.max(np.abs(p.coeffs)))
    if abs(p.coeffs[-1]) <= TRIM_REL * scale:
        raise AlgebraError("leading coefficient below trim threshold")
    raw = np.roots(p.coeffs[::-1])
    dp = p.derivative()
    roots: list[complex] = []
    residuals: list[float] = []
    failed = False
    for r0 in raw:
        best = complex(r0)
        best_res = abs(p(best))
        z = best
        for _ in range(NEWTON_MAX_ITER):
            if best_res <= tol * eval_scale(p, best):
                break
            dz = dp(z)
            if dz == 0:
                break
            z = z - p(z) / dz
            res = abs(p(z))
            if res < best_res:
                best, best_res = z, res
        if best_res > tol * eval_scale(p, best):
            failed = True
        roots.append(best)
        residuals.append(best_res)
    if failed:
        raise RootFindingError(
            f"root polish did not reach tol={tol:g} for degree-{d} polynomial",
            roots, residuals)
    return RootSet(roots, residuals)


def sylvester_matrix(p: ComplexPoly, q: ComplexPoly) -> np.ndarray:
    """Sylvester matrix of p and q (coefficients in descending order)."""
    dp_, dq_ = p.degree, q.degree
    if dp_ < 1 or dq_ < 0:
        raise AlgebraError("sylvester_matrix needs deg(p) >= 1")
    n = dp_ + dq_
    s = np.zeros((n, n), dtype=complex)
    pc = p.coeffs[::-1]
    qc = q.coeffs[::-1]
    for i in range(dq_):
        s[i, i:i + dp_ + 1] = pc
    for i in range(dp_):
        s[dq_ + i, i:i + dq_ + 1] = qc
    return s


def resultant(p: ComplexPoly, q: ComplexPoly) -> complex:
    """Res(p, q) via pivoted LU on the Sylvester matrix."""
    return complex(np.linalg.det(sylvester_matrix(p, q)))


def discriminant_x(p: ComplexPoly) -> complex:
    """disc(p) = (-1)^(d(d-1)/2) Res(p, p') / lead(p).

    This normalization gives disc(ax^2+bx+c) = b^2 - 4ac and vanishes exactly
    when p has a multiple root.
    """
    d = p.degree
    if d < 2:
        raise AlgebraError("discriminant needs degree >= 2")
    lead = p.coeffs[-1]
    if abs(lead) <= TRIM_REL * float(np.max(np.abs(p.coeffs))):
        raise AlgebraError("degenerate leading coefficient")
    sign = -1.0 if (d * (d - 1) // 2) % 2 else 1.0
    return sign * resultant(p, p.derivative()) / lead


def discriminant_rel(p: ComplexPoly) -> float:
    """|det(Sylvester)| normalized by its Hadamard bound, in [0, 1].

    Scale-free collision detector: close to 0 iff p is near a multiple root,
    regardless of coefficient or root magnitudes.
    """
    s = sylvester_matrix(p, p.derivative())
    norms = np.linalg.norm(s, axis=1)
    bound = float(np.prod(norms))
    if bound == 0.0:
        return 0.0
    return abs(complex(np.linalg.det(s))) / bound


def horner_vs_direct_gap(p: ComplexPoly, x: complex) -> float:
    """|Horner - term-by-term| at x (consistency probe used by tests)."""
    direct = 0.0 + 0.0j
    xp = 1.0 + 0.0j
    for c in p.coeffs:
        direct += c * xp
        xp *= x
    return abs(p(x) - direct)
