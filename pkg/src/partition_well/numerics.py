"""Precision policy, certified summation, root finding and quadrature.

Every quantity the exact oracle reports is accompanied by a bound on the
error committed by truncating an infinite sum or stopping an iteration.
The tools here supply those bounds:

* :func:`find_root_bracketed` - deterministic bisection/secant hybrid.
* :func:`sum_with_tail_bound` - truncates a positive decreasing series and
  certifies the dropped tail with a geometric or Gaussian-integral envelope.
* :func:`gaussian_tail_upper_bound` - closed upper bound for the Gaussian
  tail integral, used whenever a dropped sum is replaced by an integral.
* :func:`trapezoid_sum_approx` - midpoint-grid sum-to-integral formula.
* :func:`quad_semi_infinite` - adaptive quadrature on [0, inf).

All routines are pure and run at the precision requested by the supplied
:class:`PrecisionPolicy`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from mpmath import mp, mpf

__all__ = [
    "PrecisionPolicy",
    "TailBound",
    "RootResult",
    "DEFAULT_POLICY",
    "NoSignChange",
    "MaxIterations",
    "BoundUnavailable",
    "NonConvergent",
    "PrecisionExhausted",
    "find_root_bracketed",
    "sum_with_tail_bound",
    "gaussian_tail_upper_bound",
    "trapezoid_sum_approx",
    "quad_semi_infinite",
]

# extra decimal digits carried internally beyond the policy's working digits
GUARD_DIGITS = 10


class NoSignChange(ValueError):
    """Root bracket endpoints do not straddle a sign change."""


class MaxIterations(RuntimeError):
    """Iteration budget exhausted before reaching the requested tolerance."""


class BoundUnavailable(RuntimeError):
    """No dominating envelope could be certified from probe evaluations."""


class NonConvergent(RuntimeError):
    """Quadrature refinement failed to reach the requested tolerance."""


class PrecisionExhausted(RuntimeError):
    """The precision ceiling was reached without meeting the target."""


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision and error targets for the numerical kernels."""

    working_digits: int = 30
    max_digits: int = 120
    escalation_factor: float = 2.0
    target_abs_error: float = 1e-12
    target_rel_error: float = 1e-12
    max_iterations: int = 240

    def __post_init__(self):
        if self.working_digits < 20:
            raise ValueError("working_digits must be at least 20")
        if self.working_digits > self.max_digits:
            raise ValueError("working_digits must not exceed max_digits")
        if not self.escalation_factor > 1:
            raise ValueError("escalation_factor must exceed 1")
        if not (self.target_abs_error > 0 and self.target_rel_error > 0):
            raise ValueError("error targets must be positive")

    def escalate(self) -> "PrecisionPolicy":
        """Return a policy with strictly more digits, capped at ``max_digits``."""
        if self.working_digits >= self.max_digits:
            raise PrecisionExhausted(
                f"cannot escalate beyond max_digits={self.max_digits}")
        digits = min(self.max_digits, math.ceil(self.working_digits * self.escalation_factor))
        return replace(self, working_digits=max(digits, self.working_digits + 1))


DEFAULT_POLICY = PrecisionPolicy()


@dataclass(frozen=True)
class TailBound:
    """Certified upper bound on the dropped tail of a truncated sum."""

    kind: str  # geometric | polynomial_geometric | gaussian_integral
    bound_value: mpf
    truncation_index: int

    def __post_init__(self):
        if self.kind not in ("geometric", "polynomial_geometric", "gaussian_integral"):
            raise ValueError(f"unknown tail-bound kind {self.kind!r}")
        if not self.bound_value >= 0:
            raise ValueError("bound_value must be non-negative")
        if self.truncation_index < 1:
            raise ValueError("truncation_index must be positive")


@dataclass(frozen=True)
class RootResult:
    root: mpf
    residual: mpf
    bracket_width: mpf
    evaluations: int


def find_root_bracketed(func: Callable, lo, hi,
                        policy: PrecisionPolicy = DEFAULT_POLICY) -> RootResult:
    """Solve func(x) = 0 on a sign-changing bracket [lo, hi].

    Bisection narrows the bracket first; afterwards guarded secant steps are
    taken, falling back to bisection whenever the secant candidate leaves the
    bracket or progress stalls.  Terminates once both the residual is below
    ``target_abs_error`` and the bracket width is below
    ``max(target_abs_error, |root| * target_rel_error)``.

    Deterministic: identical inputs and policy produce identical output.
    """
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        a, b = mpf(lo), mpf(hi)
        if not a < b:
            raise ValueError("bracket must satisfy lo < hi")
        fa, fb = mpf(func(a)), mpf(func(b))
        evals = 2
        ftol = mpf(policy.target_abs_error)
        if fa == 0:
            return RootResult(a, fa, mpf(0), evals)
        if fb == 0:
            return RootResult(b, fb, mpf(0), evals)
        if mp.sign(fa) == mp.sign(fb):
            raise NoSignChange(
                f"func({mp.nstr(a, 8)}) and func({mp.nstr(b, 8)}) have the same sign")

        # keep the orientation fa > 0 > fb implicit via sign comparisons
        best_x, best_f = (a, fa) if abs(fa) < abs(fb) else (b, fb)
        prev_x, prev_f = (b, fb) if abs(fa) < abs(fb) else (a, fa)
        bisect_left = 6  # initial pure-bisection steps to a safe width

        def done(x, fx):
            xtol = max(ftol, abs(x) * mpf(policy.target_rel_error))
            return abs(fx) <= ftol and (b - a) <= xtol

        while evals < policy.max_iterations:
            if done(best_x, best_f):
                return RootResult(best_x, best_f, b - a, evals)
            x = None
            if bisect_left <= 0 and prev_f != best_f:
                cand = best_x - best_f * (best_x - prev_x) / (best_f - prev_f)
                if a < cand < b and cand not in (best_x, prev_x):
                    x = cand
            if x is None:
                x = (a + b) / 2
                if not a < x < b:  # bracket collapsed to adjacent floats
                    return RootResult(best_x, best_f, b - a, evals)
            bisect_left -= 1
            fx = mpf(func(x))
            evals += 1
            if fx == 0:
                return RootResult(x, fx, mpf(0), evals)
            if mp.sign(fx) == mp.sign(fa):
                a, fa = x, fx
            else:
                b, fb = x, fx
            prev_x, prev_f = best_x, best_f
            best_x, best_f = x, fx
            # every few steps force a bisection so the bracket keeps shrinking
            if evals % 4 == 0:
                bisect_left = max(bisect_left, 1)
        raise MaxIterations(
            f"no root to tolerance {policy.target_abs_error} within "
            f"{policy.max_iterations} evaluations (best residual {mp.nstr(best_f, 6)})")


def gaussian_tail_upper_bound(y_trunc) -> mpf:
    """Certified upper bound on the tail integral of exp(-y^2) from ``y_trunc``.

    Uses min(sqrt(pi)/2, 1/(2 y)) * exp(-y^2); both factors are rigorous upper
    bounds, the second is within a factor (1 - 1/(2 y^2))^{-1} of the true
    tail for large y.
    """
    y = mpf(y_trunc)
    if not y > 0:
        raise ValueError("y_trunc must be positive")
    return mp.e ** (-y * y) * min(mp.sqrt(mp.pi) / 2, 1 / (2 * y))


def _gaussian_tail_integral_bound(lam, n) -> mpf:
    """Upper bound on the integral of exp(-lam*u^2) over [n, inf)."""
    return gaussian_tail_upper_bound(mp.sqrt(lam) * n) / mp.sqrt(lam)


def sum_with_tail_bound(summand: Callable[[int], object],
                        policy: PrecisionPolicy = DEFAULT_POLICY,
                        regime_hint: str = "low_t"):
    """Sum a positive, eventually decreasing series with a certified tail.

    ``regime_hint`` selects the dominating envelope family:

    * ``"low_t"``   - tail dominated by a geometric sequence; the ratio is
      probed from successive quotients and inflated by a 1.1 safety factor.
    * ``"high_t"``  - tail dominated by a Gaussian envelope c*exp(-lam*n^2)
      fitted (conservatively) from probe evaluations.

    Returns ``(value, TailBound)`` with ``value <= true sum <= value +
    bound_value``.  The truncation index is the smallest one at which the
    envelope certifies a tail below ``target_abs_error``.
    """
    if regime_hint not in ("low_t", "high_t"):
        raise ValueError(f"unknown regime hint {regime_hint!r}")
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        target = mpf(policy.target_abs_error)
        cache: dict[int, mpf] = {}

        def a(n: int) -> mpf:
            if n not in cache:
                v = mpf(summand(n))
                if v < 0:
                    raise BoundUnavailable(f"summand({n}) is negative")
                cache[n] = v
            return cache[n]

        if regime_hint == "low_t":
            bound_at, kind = _geometric_bound_factory(a), None
        else:
            bound_at, kind = _gaussian_bound_factory(a), "gaussian_integral"

        # find a passing index by doubling, then binary-search the least one
        n = 4
        limit = 1 << 24
        while True:
            try:
                if bound_at(n) <= target:
                    break
            except BoundUnavailable:
                if n >= limit:
                    raise
            n *= 2
            if n > limit:
                raise BoundUnavailable("no certified envelope below the target "
                                       f"tail {policy.target_abs_error} up to index {limit}")
        lo = max(1, n // 2)
        hi = n
        while lo < hi:
            mid = (lo + hi) // 2
            try:
                ok = bound_at(mid) <= target
            except BoundUnavailable:
                ok = False
            if ok:
                hi = mid
            else:
                lo = mid + 1
        n_trunc = lo
        bound, tag = bound_at(n_trunc, with_kind=True)
        value = mp.fsum(a(m) for m in range(1, n_trunc + 1))
        return value, TailBound(kind or tag, bound, n_trunc)


def _geometric_bound_factory(a):
    """Tail bound sum_{m>n} a(m) <= a(n+1)/(1 - r) with a probed ratio r."""

    def classify() -> str:
        # a polynomial prefactor shows up as drifting quotients near the head
        try:
            head = [a(m) for m in range(1, 7)]
        except BoundUnavailable:
            return "geometric"
        if any(v <= 0 for v in head):
            return "geometric"
        ratios = [y / x for x, y in zip(head, head[1:])]
        drift = max(ratios) - min(ratios)
        return "polynomial_geometric" if drift > mpf("0.05") * max(ratios) else "geometric"

    def bound_at(n: int, with_kind: bool = False):
        a1, a2, a3 = a(n + 1), a(n + 2), a(n + 3)
        if a1 == 0 and a2 == 0 and a3 == 0:
            return (mpf(0), "geometric") if with_kind else mpf(0)
        if a1 <= 0 or a2 <= 0:
            raise BoundUnavailable(f"cannot probe a ratio at index {n}")
        r1, r2 = a2 / a1, a3 / a2
        r = mpf("1.1") * max(r1, r2)
        if r >= 1:
            raise BoundUnavailable(
                f"probed ratio {mp.nstr(r, 6)} at index {n} does not certify decay")
        val = a1 / (1 - r)
        return (val, classify()) if with_kind else val

    return bound_at


def _gaussian_bound_factory(a):
    """Tail bound from a conservative Gaussian envelope c*exp(-lam*m^2)."""

    def bound_at(n: int, with_kind: bool = False):
        a1, a2 = a(n + 1), a(n + 2)
        probe_far = a(n + 4)
        if a1 == 0 and a2 == 0 and probe_far == 0:
            return (mpf(0), "gaussian_integral") if with_kind else mpf(0)
        if a1 <= 0 or a2 <= 0 or not a2 < a1:
            raise BoundUnavailable(f"no Gaussian-type decay visible at index {n}")
        lam = mp.log(a1 / a2) / ((n + 2) ** 2 - (n + 1) ** 2)
        if not lam > 0:
            raise BoundUnavailable("probed envelope exponent is not positive")
        lam = lam / mpf("1.1")  # weaker decay is the safe direction
        c = mpf("1.1") * a1 * mp.e ** (lam * (n + 1) ** 2)
        if probe_far > c * mp.e ** (-lam * (n + 4) ** 2):
            raise BoundUnavailable(f"envelope violated by probe at index {n + 4}")
        val = c * (mp.e ** (-lam * (n + 1) ** 2) + _gaussian_tail_integral_bound(lam, n + 1))
        return (val, "gaussian_integral") if with_kind else val

    return bound_at


def quad_semi_infinite(integrand: Callable,
                       policy: PrecisionPolicy = DEFAULT_POLICY) -> mpf:
    """Integrate a decaying integrand over [0, inf) to ``target_abs_error``.

    Probes the decay beyond y = 8.  Gaussian-like integrands are cut at a
    point where the certified envelope tail (via
    :func:`gaussian_tail_upper_bound`) is negligible; slower decaying ones
    are handed to the variable-transformed infinite-interval rule.  Raises
    :class:`NonConvergent` when the quadrature error estimate stays above
    the target.
    """
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        target = mpf(policy.target_abs_error)
        f = lambda y: mpf(integrand(y))

        cut = _gaussian_cutoff(f, target)
        if cut is not None:
            points = [mpf(0), mpf(1), mpf(2), mpf(4)] + [mpf(8) * 2 ** k for k in range(20)]
            points = [p for p in points if p < cut] + [cut]
            val, err = mp.quad(f, points, error=True)
            err = err + target / 4  # tail certificate folded into the estimate
        else:
            points = [mpf(0), mpf(1), mpf(2), mpf(4), mpf(8), mpf(16), mpf(64), mp.inf]
            val, err = mp.quad(f, points, error=True)
        if err > target and err > abs(val) * mpf(policy.target_rel_error):
            # one retry at higher degree before giving up
            val, err = mp.quad(f, points, error=True, maxdegree=10)
            if err > target and err > abs(val) * mpf(policy.target_rel_error):
                raise NonConvergent(
                    f"quadrature error estimate {mp.nstr(err, 4)} above target "
                    f"{policy.target_abs_error}")
        return val


def _gaussian_cutoff(f, target):
    """Cutoff Y with a certified Gaussian tail below target/4, else None."""
    y1, y2 = mpf(8), mpf(12)
    f1, f2 = abs(f(y1)), abs(f(y2))
    if f1 == 0 and f2 == 0:
        # treat an identically-vanishing tail as already cut
        return mpf(16)
    if f2 >= f1 or f1 == 0 or f2 == 0:
        return None
    lam = mp.log(f1 / f2) / (y2 ** 2 - y1 ** 2)
    if lam < mpf("0.2"):
        return None  # decay too slow to certify a Gaussian envelope
    lam = lam / mpf("1.1")
    c = mpf("1.1") * f1 * mp.e ** (lam * y1 ** 2)
    y = y2
    for _ in range(40):
        # envelope must keep holding at the candidate cut
        if abs(f(y)) > c * mp.e ** (-lam * y * y):
            return None
        tail = c / mp.sqrt(lam) * gaussian_tail_upper_bound(mp.sqrt(lam) * y)
        if tail <= target / 4:
            return y
        y = y * mpf("1.5")
    return None


def trapezoid_sum_approx(g: Callable, delta_y, tau,
                         policy: PrecisionPolicy = DEFAULT_POLICY) -> mpf:
    """Integral approximation of sum_{n>=1} g(y_n) on the grid y_n = (n - tau)*delta_y.

    For a smooth integrable g on [0, inf) the trapezoid rule gives

        sum_n g(y_n)  ~=  (tau - 1/2) g(0) + (1/delta_y) * integral_0^inf g

    which is one order better in ``delta_y`` than the rectangle rule.  A
    divergent integral surfaces as :class:`NonConvergent`.
    """
    delta_y = mpf(delta_y)
    if not delta_y > 0:
        raise ValueError("delta_y must be positive")
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        boundary = (mpf(tau) - mpf(1) / 2) * mpf(g(mpf(0)))
        return boundary + quad_semi_infinite(g, policy) / delta_y
