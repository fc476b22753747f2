"""Root branches, the Euclidean collision angle, and the volume integrals.

For each cone angle alpha the roots of P_{2n}(x, exp(i*alpha/2)) are tracked
continuously over [0, pi].  The geometric branch keeps Im(x) <= 0 and
longitude eigenvalue modulus |L| >= 1 until the conjugate pair collides on
the real axis at the Euclidean angle alpha0 in [2*pi/3, pi).  The
cone-manifold volume is then the Schlaefli integral

    Vol(alpha) = integral from alpha to alpha0 of log|L| d(angle),

where log|L| = log|m^-2 + x| - log|m^2 + x| and the integrand vanishes
identically beyond alpha0 (all characters are real there).
"""

from __future__ import annotations

import bisect
import cmath
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import all_roots, discriminant_rel, discriminant_x
from .rmpoly import rm_numeric

log = logging.getLogger(__name__)

DEFAULT_GRID_SPACING = 0.005
MAX_GRID_SPACING = 0.01
AMBIGUITY_RATIO = 0.5     # nearest/second-nearest above this forces halving
MAX_HALVINGS = 12
CONTINUITY_BOUND = 0.5    # max per-step movement of a tracked root
MERGE_IM_TOL = 1e-2       # |Im| window where conjugate pairs may merge
IM_COMPLEX = -1e-6        # branch counts as genuinely complex below this
IM_REAL = -1e-9           # ...and as (numerically) real above this
ALPHA0_TOL = 1e-12
DEFAULT_QUAD_TOL = 1e-10
EUCLIDEAN_LOW = 2.0 * math.pi / 3.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


class GeometryError(Exception):
    """Base class for branch-tracking and integration failures."""


class BranchTrackingError(GeometryError):
    """Root continuation could not be resolved unambiguously."""


class NoEuclideanDegenerationError(GeometryError):
    """The branch never collides onto the real axis before pi."""


class Alpha0DetectionError(GeometryError):
    """The discriminant cross-check rejected a detected collision angle."""


class NoGeometricBranchError(GeometryError):
    """No tracked branch qualifies as the geometric component."""


class QuadratureError(GeometryError):
    """Adaptive integration hit the recursion cap before converging."""


class LongitudePoleError(GeometryError):
    """log|L| is singular: x hit -m^2 or -m^{-2}."""


def log_abs_L(alpha: float, x: complex) -> float:
    """log of the longitude eigenvalue modulus, log|m^-2 + x| - log|m^2 + x|.

    The unit-modulus prefactor of L drops out.  Positive iff Im(x) < 0.
    """
    num = abs(cmath.exp(-1j * alpha) + x)
    den = abs(cmath.exp(1j * alpha) + x)
    guard = 1e-15 * (1.0 + abs(x))
    if den <= guard:
        raise LongitudePoleError(f"x = -m^2 pole at alpha={alpha}")
    if num <= guard:
        raise LongitudePoleError(f"x = -m^(-2) degeneracy at alpha={alpha}")
    return math.log(num) - math.log(den)


def _safe_log_abs_L(alpha: float, x: complex) -> float:
    try:
        return log_abs_L(alpha, x)
    except LongitudePoleError:
        return math.nan


@dataclass(frozen=True)
class BranchSample:
    alpha: float
    x: complex
    log_abs_l: float


@dataclass
class RootBranch:
    """One continuously tracked root x(alpha) of P_{2n} over [0, pi]."""

    n: int
    branch_id: int
    samples: list[BranchSample]
    alpha0: float | None = None
    qualifies: bool = False
    usable: bool = True
    # continuation anchors (samples plus every point evaluated on demand)
    _anchor_alphas: list[float] = field(default_factory=list, repr=False)
    _anchor_x: list[complex] = field(default_factory=list, repr=False)

    def _ensure_anchors(self) -> None:
        if not self._anchor_alphas:
            for s in self.samples:
                self._anchor_alphas.append(s.alpha)
                self._anchor_x.append(s.x)

    def value_at(self, alpha: float) -> complex:
        """x(alpha) by nearest-root continuation from the closest anchor."""
        self._ensure_anchors()
        i = bisect.bisect_left(self._anchor_alphas, alpha)
        cands = [j for j in (i - 1, i) if 0 <= j < len(self._anchor_alphas)]
        j = min(cands, key=lambda j: abs(self._anchor_alphas[j] - alpha))
        a_from, x_from = self._anchor_alphas[j], self._anchor_x[j]
        if a_from == alpha:
            return x_from
        x = _walk(self.n, x_from, a_from, alpha)
        k = bisect.bisect_left(self._anchor_alphas, alpha)
        self._anchor_alphas.insert(k, alpha)
        self._anchor_x.insert(k, x)
        return x


def _roots_at(n: int, alpha: float) -> list[complex]:
    return all_roots(rm_numeric(n, alpha)).roots


def _nearest_two(x: complex, roots: list[complex]):
    d = [abs(r - x) for r in roots]
    i1 = min(range(len(d)), key=d.__getitem__)
    d1 = d[i1]
    d2 = math.inf
    for j, dj in enumerate(d):
        if j != i1 and dj < d2:
            d2 = dj
    return i1, d1, d2


def _is_ambiguous(d1: float, d2: float) -> bool:
    if d1 > CONTINUITY_BOUND:
        return True
    return math.isfinite(d2) and d2 > 0 and d1 / d2 > AMBIGUITY_RATIO


def _walk(n: int, x_from: complex, a_from: float, a_to: float,
          depth: int = 0) -> complex:
    """Continue one root from (a_from, x_from) to a_to.

    Ambiguous nearest-root matches halve the step up to MAX_HALVINGS times;
    at the cap, near-real candidates may be taken (conjugate collision onto
    the real axis), preferring the Im <= 0 side that the geometric branch
    lives on.
    """
    roots = _roots_at(n, a_to)
    i1, d1, d2 = _nearest_two(x_from, roots)
    if not _is_ambiguous(d1, d2):
        return roots[i1]
    if depth < MAX_HALVINGS:
        mid = 0.5 * (a_from + a_to)
        if mid != a_from and mid != a_to:
            x_mid = _walk(n, x_from, a_from, mid, depth + 1)
            return _walk(n, x_mid, mid, a_to, depth + 1)
    if d1 > CONTINUITY_BOUND:
        raise BranchTrackingError(
            f"root moved {d1:.3g} in one step near alpha={a_to:.6f} (n={n})")
    if abs(x_from.imag) <= MERGE_IM_TOL:
        near = [r for r in roots
                if abs(r - x_from) <= max(2.0 * d1, 1e-12)
                and abs(r.imag) <= MERGE_IM_TOL]
        if near:
            # collision region: stay on (or return to) the Im <= 0 side
            lower = [r for r in near if r.imag <= 1e-9]
            pool = lower or near
            return min(pool, key=lambda r: abs(r - x_from))
    raise BranchTrackingError(
        f"ambiguous continuation at alpha={a_to:.6f} (n={n}, "
        f"d1={d1:.3g}, d2={d2:.3g})")


def track_branches(n: int, grid=None) -> list[RootBranch]:
    """Track every root of P_{2n} over an alpha grid covering [0, pi].

    Branches are seeded from the roots at alpha = 0 (sorted by real part,
    then imaginary part) and advanced by nearest-root matching; ambiguous
    steps are recursively halved, and unresolved branches are flagged
    unusable rather than misassigned.  Detected collision angles and
    qualification flags are filled in on the returned branches.
    """
    if grid is None:
        count = int(math.ceil(math.pi / DEFAULT_GRID_SPACING)) + 1
        grid = np.linspace(0.0, math.pi, count)
    grid = np.asarray(grid, dtype=float)
    if grid[0] > 1e-12 or abs(grid[-1] - math.pi) > 1e-12:
        raise ValueError("grid must cover [0, pi]")
    steps = np.diff(grid)
    if np.any(steps <= 0) or np.max(steps) > MAX_GRID_SPACING + 1e-15:
        raise ValueError(f"grid must be monotone with spacing <= {MAX_GRID_SPACING}")

    start = sorted(_roots_at(n, float(grid[0])), key=lambda z: (z.real, z.imag))
    branches = [
        RootBranch(n=n, branch_id=i,
                   samples=[BranchSample(float(grid[0]), x,
                                         _safe_log_abs_L(float(grid[0]), x))])
        for i, x in enumerate(start)
    ]
    positions = list(start)

    def advance(a: float, b: float, depth: int) -> None:
        roots = _roots_at(n, b)
        matches = {}
        needs_halving = False
        for br in branches:
            if not br.usable:
                continue
            i1, d1, d2 = _nearest_two(positions[br.branch_id], roots)
            ambiguous = _is_ambiguous(d1, d2)
            matches[br.branch_id] = (i1, d1, d2, ambiguous)
            if ambiguous and depth < MAX_HALVINGS:
                needs_halving = True
        if needs_halving:
            mid = 0.5 * (a + b)
            if mid != a and mid != b:
                advance(a, mid, depth + 1)
                advance(mid, b, depth + 1)
                return
        for br in branches:
            if not br.usable:
                continue
            i1, d1, d2, ambiguous = matches[br.branch_id]
            x_new = roots[i1]
            if ambiguous:
                cur = positions[br.branch_id]
                mergeable = (d1 <= CONTINUITY_BOUND
                             and abs(cur.imag) <= MERGE_IM_TOL
                             and abs(x_new.imag) <= MERGE_IM_TOL)
                if not mergeable:
                    br.usable = False
                    log.warning("branch %d of n=%d flagged unusable at "
                                "alpha=%.6f (d1=%.3g, d2=%.3g)",
                                br.branch_id, n, b, d1, d2)
                    continue
            positions[br.branch_id] = x_new
            br.samples.append(BranchSample(b, x_new, _safe_log_abs_L(b, x_new)))

    for a, b in zip(grid[:-1], grid[1:]):
        advance(float(a), float(b), 0)

    for br in branches:
        if not br.usable:
            continue
        try:
            br.alpha0 = find_alpha0(br)
        except (NoEuclideanDegenerationError, Alpha0DetectionError) as exc:
            log.debug("branch %d of n=%d: %s", br.branch_id, n, exc)
            br.alpha0 = None
        br.qualifies = _branch_qualifies(br)
    return branches


def _branch_qualifies(br: RootBranch) -> bool:
    """Geometric candidacy: collision in [2*pi/3, pi), Im(x) <= 0 and
    |L| >= 1 on the hyperbolic range."""
    if br.alpha0 is None or not br.usable:
        return False
    if not (EUCLIDEAN_LOW - 1e-9 <= br.alpha0 < math.pi):
        return False
    for s in br.samples:
        if s.alpha >= br.alpha0:
            break
        if s.x.imag > 1e-9:
            return False
        if not math.isnan(s.log_abs_l) and s.log_abs_l < -1e-9:
            return False
    return True


def find_alpha0(branch: RootBranch) -> float:
    """Collision angle of a branch: bisection on Im(x(alpha)) = 0.

    The branch must be genuinely complex (Im < -1e-6) somewhere and return
    to the real axis before pi; otherwise NoEuclideanDegenerationError is
    raised.  The result is cross-checked against the discriminant of the
    specialized polynomial, which must be relatively tiny at alpha0 and
    locally minimal.
    """
    samples = branch.samples
    enter = None
    exit_ = None
    for i, s in enumerate(samples):
        if enter is None:
            if s.x.imag < IM_COMPLEX:
                enter = i
        elif s.x.imag >= IM_REAL:
            exit_ = i
            break
    if enter is None:
        raise NoEuclideanDegenerationError(
            f"branch {branch.branch_id} of n={branch.n} never leaves the real axis")
    if exit_ is None:
        raise NoEuclideanDegenerationError(
            f"branch {branch.branch_id} of n={branch.n} stays complex up to pi")

    lo, lo_x = samples[exit_ - 1].alpha, samples[exit_ - 1].x
    hi = samples[exit_].alpha
    n = branch.n
    while hi - lo > ALPHA0_TOL:
        mid = 0.5 * (lo + hi)
        x_mid = _walk(n, lo_x, lo, mid)
        if x_mid.imag < IM_REAL:
            lo, lo_x = mid, x_mid
        else:
            hi = mid
    alpha0 = 0.5 * (lo + hi)

    rel = discriminant_rel(rm_numeric(n, alpha0))
    if rel > 1e-6:
        raise Alpha0DetectionError(
            f"discriminant not small at detected alpha0={alpha0:.12f} "
            f"(relative magnitude {rel:.3g})")
    d0 = abs(discriminant_x(rm_numeric(n, alpha0)))
    probe = 1e-3
    for side in (alpha0 - probe, alpha0 + probe):
        if 0.0 < side < math.pi and abs(discriminant_x(rm_numeric(n, side))) <= d0:
            raise Alpha0DetectionError(
                f"discriminant magnitude not locally minimal at {alpha0:.12f}")
    return alpha0


def discriminant_alpha0(n: int, lo: float, hi: float, tol: float = 1e-9) -> float:
    """Independent collision detector: minimize |disc| over [lo, hi].

    Golden-section search; the discriminant has a simple zero in alpha at a
    conjugate-pair collision, so its magnitude is V-shaped there.
    """
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0

    def g(a: float) -> float:
        return abs(discriminant_x(rm_numeric(n, a)))

    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    gc, gd = g(c), g(d)
    while b - a > tol:
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - inv_phi * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + inv_phi * (b - a)
            gd = g(d)
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# quadrature

def _gauss_panel(f, a: float, b: float) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * sum(w * f(mid + half * t)
                      for t, w in zip(_GL_NODES, _GL_WEIGHTS))


def _adaptive(f, a: float, b: float, tol: float, whole: float | None = None,
              depth: int = 0) -> tuple[float, float]:
    """Adaptive panel bisection with a fixed 15-point Gauss rule.

    Accepts a panel when the whole-vs-halves defect is below the panel's
    share of the absolute tolerance; the defect sum is the (conservative)
    error estimate.
    """
    if whole is None:
        whole = _gauss_panel(f, a, b)
    mid = 0.5 * (a + b)
    left = _gauss_panel(f, a, mid)
    right = _gauss_panel(f, mid, b)
    err = abs(whole - (left + right))
    if err <= tol:
        return left + right, err
    if depth >= 60:
        raise QuadratureError(
            f"no convergence on [{a}, {b}] (defect {err:.3g} > tol {tol:.3g})")
    vl, el = _adaptive(f, a, mid, 0.5 * tol, left, depth + 1)
    vr, er = _adaptive(f, mid, b, 0.5 * tol, right, depth + 1)
    return vl + vr, el + er


def _integrate_branch(branch: RootBranch, a: float, b: float,
                      tol: float) -> tuple[float, float]:
    """Integral of log|L| along the branch over [a, b] (b <= alpha0)."""
    if b - a <= ALPHA0_TOL:
        return 0.0, 0.0

    def integrand(alpha: float) -> float:
        return log_abs_L(alpha, branch.value_at(alpha))

    return _adaptive(integrand, a, b, tol)


# ---------------------------------------------------------------------------
# volumes

@dataclass(frozen=True)
class VolumeResult:
    """A cone-manifold (or cyclic-covering) volume with its provenance."""

    n: int
    alpha: float
    volume: float
    error_estimate: float
    alpha0: float
    branch_id: int
    k: int | None = None
    out_of_range: bool = False

    def __post_init__(self):
        if self.volume < 0.0:
            raise ValueError("volume must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "k": self.k,
            "volume": self.volume,
            "error_estimate": self.error_estimate,
            "alpha0": self.alpha0,
            "branch_id": self.branch_id,
            "out_of_range": self.out_of_range,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VolumeResult":
        return cls(n=d["n"], alpha=d["alpha"], volume=d["volume"],
                   error_estimate=d["error_estimate"], alpha0=d["alpha0"],
                   branch_id=d["branch_id"], k=d["k"],
                   out_of_range=d["out_of_range"])


@lru_cache(maxsize=64)
def _tracked(n: int) -> tuple[RootBranch, ...]:
    return tuple(track_branches(n))


@lru_cache(maxsize=64)
def _geometric_selection(n: int) -> tuple[int, float]:
    """(branch_id, alpha0) of the maximal-volume qualifying branch."""
    branches = _tracked(n)
    qualifying = [b for b in branches if b.qualifies]
    if not qualifying:
        raise NoGeometricBranchError(f"no qualifying branch for n={n}")
    scored = []
    for b in qualifying:
        vol, _ = _integrate_branch(b, 0.0, b.alpha0, 1e-9)
        scored.append((vol, b))
    scored.sort(key=lambda t: -t[0])
    best_vol, best = scored[0]
    if len(scored) > 1 and abs(scored[1][0] - best_vol) < 1e-9:
        tied = [b for v, b in scored if abs(v - best_vol) < 1e-9]
        tied.sort(key=lambda b: abs(b.samples[0].x.imag))
        best = tied[0]
        log.warning("volume tie among %d branches for n=%d; picking branch "
                    "%d (smallest |Im x| at alpha=0)", len(tied), n,
                    best.branch_id)
    return best.branch_id, best.alpha0


def geometric_branch(n: int) -> RootBranch:
    """The tracked branch carrying the hyperbolic structure."""
    branch_id, _ = _geometric_selection(n)
    return _tracked(n)[branch_id]


def cone_volume(n: int, alpha: float, tol: float = DEFAULT_QUAD_TOL) -> VolumeResult:
    """Volume of the cone-manifold with cone angle alpha along C(2n, 3).

    Integrates log|L| along the geometric branch from alpha to alpha0 by
    adaptive Gauss quadrature (the integrand vanishes identically beyond
    alpha0, so that range contributes nothing).  Angles at or beyond alpha0
    give volume zero with the out_of_range flag set.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    if not 0.0 <= alpha < math.pi:
        raise ValueError(f"alpha {alpha} outside [0, pi)")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    branch_id, alpha0 = _geometric_selection(n)
    branch = _tracked(n)[branch_id]
    if alpha >= alpha0 - ALPHA0_TOL:
        return VolumeResult(n=n, alpha=alpha, volume=0.0, error_estimate=0.0,
                            alpha0=alpha0, branch_id=branch_id,
                            out_of_range=True)
    value, err = _integrate_branch(branch, alpha, alpha0, tol)
    return VolumeResult(n=n, alpha=alpha, volume=max(value, 0.0),
                        error_estimate=err, alpha0=alpha0,
                        branch_id=branch_id)


def covering_volume(n: int, k: int, tol: float = DEFAULT_QUAD_TOL) -> VolumeResult:
    """Volume of the k-fold cyclic covering: k times the cone volume at 2*pi/k."""
    if k < 3:
        raise ValueError("k must be >= 3 (cone angle 2*pi/k must stay below pi)")
    alpha = 2.0 * math.pi / k
    base = cone_volume(n, alpha, tol / k)
    return VolumeResult(n=n, alpha=alpha, volume=k * base.volume,
                        error_estimate=k * base.error_estimate,
                        alpha0=base.alpha0, branch_id=base.branch_id, k=k,
                        out_of_range=base.out_of_range)


def volume_profile(n: int, alphas, tol: float = DEFAULT_QUAD_TOL) -> list[VolumeResult]:
    """Volumes at many angles, sharing one cumulative integration pass.

    The angles must be sorted ascending.  Segment integrals between
    consecutive angles are accumulated from alpha0 downward, so the whole
    profile costs about as much as the single largest volume.
    """
    alphas = [float(a) for a in alphas]
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be strictly increasing")
    if not alphas:
        return []
    if alphas[0] < 0.0 or alphas[-1] >= math.pi:
        raise ValueError("alphas must lie in [0, pi)")
    branch_id, alpha0 = _geometric_selection(n)
    branch = _tracked(n)[branch_id]
    inside = [a for a in alphas if a < alpha0 - ALPHA0_TOL]
    results: dict[float, VolumeResult] = {}
    for a in alphas[len(inside):]:
        results[a] = VolumeResult(n=n, alpha=a, volume=0.0, error_estimate=0.0,
                                  alpha0=alpha0, branch_id=branch_id,
                                  out_of_range=True)
    if inside:
        total_len = alpha0 - inside[0]
        bounds = inside + [alpha0]
        acc_v = 0.0
        acc_e = 0.0
        for a, b in zip(bounds[-2::-1], bounds[::-1]):
            seg_tol = tol * max((b - a) / total_len, 1e-6)
            v, e = _integrate_branch(branch, a, b, seg_tol)
            acc_v += v
            acc_e += e
            results[a] = VolumeResult(n=n, alpha=a, volume=max(acc_v, 0.0),
                                      error_estimate=acc_e, alpha0=alpha0,
                                      branch_id=branch_id)
    return [results[a] for a in alphas]
