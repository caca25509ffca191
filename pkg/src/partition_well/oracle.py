"""Exact numerical evaluation of the net force on the partition.

For each half well the occupancy parameter ``alpha`` is solved from the
particle-number constraint

    N = sum_n 1 / (exp(alpha + b e_n) - eta),        b = 1/t,

and the reduced force ``f = sum_n N_n e_n`` is evaluated at the solution.
Every sum is truncated with a certified tail bound and every reported value
carries an error bound combining truncation and root residual, so the
routines here serve as the oracle against which all closed-form regime
approximations are validated.

Two evaluation routes are used, both exact up to the certified bounds:

* direct summation over levels, with Gaussian-integral tail bounds;
* for small ``b`` and ``alpha >= 1/2``, the geometrically convergent
  fugacity series ``sum_k eta^(k-1) q^k Theta(k b)`` whose level sums
  ``Theta`` are evaluated through their Poisson-resummed (theta-function)
  form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from mpmath import mp, mpf

from .model import Statistics, W_MINUS, W_PLUS, WellSide, as_mpf
from .numerics import (
    DEFAULT_POLICY,
    GUARD_DIGITS,
    MaxIterations,
    PrecisionExhausted,
    PrecisionPolicy,
    find_root_bracketed,
    gaussian_tail_upper_bound,
)

__all__ = [
    "OccupancySolution",
    "CurvePoint",
    "BracketFailure",
    "NotUnimodal",
    "StepNotFound",
    "SweepFailure",
    "solve_alpha",
    "occupancy",
    "force_side",
    "net_force",
    "sweep_curve",
    "locate_minimum",
    "locate_inflections",
]

# route thresholds: the fugacity series needs q = e^-alpha safely below 1,
# and pays off only where the Poisson form of the level sums is cheap
_SERIES_MIN_ALPHA = mpf("0.5")
_SERIES_MAX_B = mpf("0.5")
_THETA_POISSON_MAX_BETA = mpf("1.5")


class BracketFailure(RuntimeError):
    """No sign-changing bracket could be constructed for the constraint."""


class NotUnimodal(RuntimeError):
    """Probe points do not show a single interior minimum."""

    def __init__(self, message, probes):
        super().__init__(message)
        self.probes = probes


class StepNotFound(RuntimeError):
    """Fewer than two inflection points detected in the search window."""


class SweepFailure(RuntimeError):
    """One or more sweep points failed; carries the completed points."""

    def __init__(self, failures, points):
        super().__init__("; ".join(f"t={t}: {msg}" for _, t, msg in failures))
        self.failures = failures
        self.points = points


@dataclass(frozen=True)
class OccupancySolution:
    """Solved occupancy parameter with its certified error budget."""

    alpha: mpf
    q_fugacity: mpf
    alpha_error: mpf
    n_trunc: int
    digits_used: int
    residual_bound: mpf  # certified |sum_n N_n(alpha) - N|


@dataclass(frozen=True)
class CurvePoint:
    t: mpf
    alpha_plus: mpf
    alpha_minus: mpf
    f_plus: mpf
    f_minus: mpf
    delta_f: mpf
    delta_f_error: mpf


class _LevelSums(NamedTuple):
    number: mpf          # sum_n N_n
    dnumber: mpf         # d/d alpha of the above (negative)
    force: mpf           # sum_n e_n N_n
    dforce: mpf          # d/d alpha of the above (negative)
    tail_number: mpf
    tail_dnumber: mpf
    tail_force: mpf
    tail_dforce: mpf
    terms: int
    route: str


def _theta0(beta: mpf, tau: mpf, sigma: int, eps: mpf):
    """sum_{n>=1} exp(-beta e_n) with certified error below eps."""
    if beta >= _THETA_POISSON_MAX_BETA:
        u = mp.e ** (-beta * (1 - tau) ** 2)
        rho = mp.e ** (-beta * (2 * (1 - tau) + 1))
        shrink = mp.e ** (-2 * beta)
        s = mpf(0)
        while True:
            s += u
            tail = u * rho / (1 - rho)  # level spacing grows, so rho only shrinks
            if tail < eps:
                return s, tail
            u *= rho
            rho *= shrink
    pref = mp.sqrt(mp.pi / (4 * beta))
    g = mp.e ** (-mp.pi ** 2 / beta)
    sgn = 2 * sigma - 1
    s = mpf(1)
    m = 1
    while True:
        s += 2 * (sgn ** m) * g ** (m * m)
        tail = pref * 2 * g ** ((m + 1) ** 2) / (1 - g)
        if tail < eps:
            return pref * s - mpf(sigma) / 2, tail
        m += 1


def _theta1(beta: mpf, tau: mpf, sigma: int, eps: mpf):
    """sum_{n>=1} e_n exp(-beta e_n) with certified error below eps."""
    if beta >= _THETA_POISSON_MAX_BETA:
        u = mp.e ** (-beta * (1 - tau) ** 2)
        rho = mp.e ** (-beta * (2 * (1 - tau) + 1))
        shrink = mp.e ** (-2 * beta)
        s = mpf(0)
        n = 1
        while True:
            en = (n - tau) ** 2
            s += en * u
            ratio = rho * ((n + 1 - tau) / (n - tau)) ** 2
            if ratio < mpf("0.9"):
                tail = en * u * ratio / (1 - ratio)
                if tail < eps:
                    return s, tail
            u *= rho
            rho *= shrink
            n += 1
    pref = mp.sqrt(mp.pi / (16 * beta ** 3))
    g = mp.e ** (-mp.pi ** 2 / beta)
    sgn = 2 * sigma - 1
    s = mpf(1)
    m = 1
    while True:
        s += 2 * (sgn ** m) * (1 - 2 * mp.pi ** 2 * m * m / beta) * g ** (m * m)
        # |1 - 2 pi^2 m^2/beta| <= 1 + 2 pi^2 m^2/beta and g^(2m+1) < 1/2 here
        nxt = (1 + 2 * mp.pi ** 2 * (m + 1) ** 2 / beta) * g ** ((m + 1) ** 2)
        tail = pref * 4 * nxt
        if tail < eps:
            return pref * s, tail
        m += 1


def _level_sums_direct(eta: int, tau: mpf, alpha: mpf, b: mpf, eps: mpf) -> _LevelSums:
    # terms via the recurrence u_{n+1} = u_n rho_n, rho_{n+1} = rho_n e^{-2b},
    # which replaces one exp per level by two multiplications
    u = mp.e ** (-(alpha + b * (1 - tau) ** 2))
    rho = mp.e ** (-b * (2 * (1 - tau) + 1))
    shrink = mp.e ** (-2 * b)
    s_n = mpf(0)
    s_dn = mpf(0)
    s_f = mpf(0)
    s_df = mpf(0)
    n = 1
    ealpha = mp.e ** (-alpha)
    sqrt_b = mp.sqrt(b)
    while True:
        en = (n - tau) ** 2
        occ = u / (1 - eta * u)
        docc = occ * (1 + eta * occ)
        s_n += occ
        s_dn += docc
        s_f += en * occ
        s_df += en * docc
        x = alpha + b * en
        u_next = u * rho
        # tail bounds need N_m <= 2 e^{-x_m} (x >= ln 2) and a decreasing
        # force integrand (b e_m >= 2); the cheap precheck avoids computing
        # the closed-form bounds every iteration
        if x >= 1 and b * en >= 2 and u * (en + 1) * 4 < eps:
            e_next = (n + 1 - tau) ** 2
            y1 = sqrt_b * (n + 1 - tau)
            g0 = gaussian_tail_upper_bound(y1)
            g2 = y1 / 2 * mp.e ** (-y1 * y1) + g0 / 2
            tail_n = 2 * (u_next + ealpha / sqrt_b * g0)
            tail_f = 2 * (e_next * u_next + ealpha / (b * sqrt_b) * g2)
            if tail_n < eps and tail_f < eps:
                return _LevelSums(s_n, -s_dn, s_f, -s_df,
                                  tail_n, 2 * tail_n, tail_f, 2 * tail_f,
                                  n, "direct")
        if n > 10 ** 7:
            raise PrecisionExhausted("level sum did not truncate below the target")
        u = u_next
        rho *= shrink
        n += 1


def _level_sums_series(eta: int, tau: mpf, sigma: int, alpha: mpf, b: mpf,
                       eps: mpf) -> _LevelSums:
    q = mp.e ** (-alpha)
    eps_theta = eps / 16
    s_n = mpf(0)
    s_dn = mpf(0)
    s_f = mpf(0)
    s_df = mpf(0)
    acc_n = mpf(0)
    acc_dn = mpf(0)
    acc_f = mpf(0)
    acc_df = mpf(0)
    k = 1
    qk = q
    while True:
        th0, e0 = _theta0(k * b, tau, sigma, eps_theta)
        th1, e1 = _theta1(k * b, tau, sigma, eps_theta)
        sign = eta ** (k - 1)
        s_n += sign * qk * th0
        s_dn += sign * (-k) * qk * th0
        s_f += sign * qk * th1
        s_df += sign * (-k) * qk * th1
        acc_n += qk * e0
        acc_dn += k * qk * e0
        acc_f += qk * e1
        acc_df += k * qk * e1
        # Theta decreases in beta, so the remaining terms are dominated by
        # geometric series in q; the k-weighted tail has the closed form
        # sum_{j>k} j q^j = q^{k+1} ((k+1) - k q) / (1-q)^2
        nxt = qk * q
        tail_n = nxt * th0 / (1 - q)
        tail_f = nxt * th1 / (1 - q)
        jq = nxt * ((k + 1) - k * q) / (1 - q) ** 2
        if tail_n + tail_f + jq * (th0 + th1) < eps / 2:
            return _LevelSums(s_n, s_dn, s_f, s_df,
                              tail_n + acc_n, jq * th0 + acc_dn,
                              tail_f + acc_f, jq * th1 + acc_df,
                              k, "series")
        qk = nxt
        k += 1
        if k > 100000:
            raise PrecisionExhausted("fugacity series did not truncate")


def _level_sums(stat: Statistics, side: WellSide, alpha: mpf, b: mpf,
                eps: mpf) -> _LevelSums:
    tau = as_mpf(side.tau)
    if b <= _SERIES_MAX_B and alpha >= _SERIES_MIN_ALPHA:
        return _level_sums_series(stat.eta, tau, side.sigma, alpha, b, eps)
    return _level_sums_direct(stat.eta, tau, alpha, b, eps)


def _bracket_alpha(stat: Statistics, side: WellSide, N: int, b: mpf,
                   g: Callable) -> tuple:
    """Sign-changing bracket for the constraint g(alpha) = sum - N (decreasing)."""
    e1 = as_mpf(side.e1)
    # probe at the series-route boundary first: for small b that keeps the
    # expensive direct evaluations out of the high-temperature path
    start = mpf("0.5")
    g0 = g(start)
    if g0 == 0:
        return start, start
    if g0 > 0:
        lo, flo = start, g0
        step = mpf(1)
        hi = start + step
        while g(hi) > 0:
            lo = hi
            step *= 2
            hi = lo + step
            if hi > mpf("1e9"):
                raise BracketFailure("constraint stays above N for very large alpha")
        return lo, hi
    hi = start
    if stat.is_boson:
        # descend toward the simple pole at -b e_1 where the sum diverges
        offset = b * mpf("1e-3")
        floor = b * mpf(10) ** (-(mp.dps - 3))
        while g(-b * e1 + offset) < 0:
            offset /= 16
            if offset < floor:
                raise BracketFailure("no bracket above the bosonic pole")
        return -b * e1 + offset, hi
    # fermions: try a window around the filled-levels estimate, else descend
    tau = as_mpf(side.tau)
    guess = -(b / 2) * ((N - tau) ** 2 + (N + 1 - tau) ** 2)
    width = max(mpf(1), 4 * b * (N + 1))
    for _ in range(12):
        lo = guess - width
        if lo < hi and g(lo) > 0:
            inner = guess + width
            if inner < hi and g(inner) < 0:
                hi = inner
            return lo, hi
        width *= 4
    lo = hi - 1
    step = mpf(2)
    while g(lo) < 0:
        lo -= step
        step *= 2
        if lo < mpf("-1e18"):
            raise BracketFailure("constraint stays below N for very negative alpha")
    return lo, hi


def solve_alpha(stat: Statistics, side: WellSide, N: int, t,
                policy: PrecisionPolicy = DEFAULT_POLICY) -> OccupancySolution:
    """Solve the particle-number constraint for the occupancy parameter.

    The constraint sum is strictly decreasing in alpha, so a sign-changing
    bracket always exists; for bosons the search stays above the pole at
    ``-b e_1``.  The returned ``alpha_error`` follows from the certified
    residual divided by the derivative of the constraint sum, and the
    precision escalates (up to ``max_digits``) if the tolerance cannot be
    met at the working precision.
    """
    if not (isinstance(N, int) and N >= 1):
        raise ValueError("N must be a positive integer")
    sol, _ = _solve_side(stat, side, N, t, policy)
    return sol


def _solve_side(stat: Statistics, side: WellSide, N: int, t,
                policy: PrecisionPolicy):
    t = mpf(t)
    if not t > 0:
        raise ValueError("t must be positive")
    while True:
        try:
            return _solve_side_at(stat, side, N, t, policy)
        except MaxIterations:
            policy = policy.escalate()  # raises PrecisionExhausted at the cap


def _solve_side_at(stat: Statistics, side: WellSide, N: int, t: mpf,
                   policy: PrecisionPolicy):
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        b = 1 / mpf(t)
        eps_sum = mpf(policy.target_abs_error) / 8

        def g(alpha):
            return _level_sums(stat, side, mpf(alpha), b, eps_sum).number - N

        lo, hi = _bracket_alpha(stat, side, N, b, g)
        if lo == hi:
            root = lo
        else:
            root = find_root_bracketed(g, lo, hi, policy).root
        sums = _level_sums(stat, side, root, b, eps_sum)
        residual = abs(sums.number - N) + sums.tail_number
        slope = abs(sums.dnumber) - sums.tail_dnumber
        if not slope > 0:
            raise PrecisionExhausted("constraint derivative lost below its tail bound")
        alpha_error = residual / slope
        sol = OccupancySolution(
            alpha=root,
            q_fugacity=mp.e ** (-root),
            alpha_error=alpha_error,
            n_trunc=sums.terms,
            digits_used=policy.working_digits,
            residual_bound=residual,
        )
        # force error: truncation plus the sensitivity to the alpha residual
        f_err = sums.tail_force + (abs(sums.dforce) + sums.tail_dforce) * alpha_error
        return sol, (sums.force, f_err)


def occupancy(stat: Statistics, side: WellSide, sol: OccupancySolution,
              b, n: int) -> mpf:
    """Occupancy N_n = 1/(exp(alpha + b e_n) - eta) of level n at a solution."""
    if not (isinstance(n, int) and n >= 1):
        raise ValueError("level index must be a positive integer")
    b = mpf(b)
    x1 = sol.alpha + b * as_mpf(side.e1)
    if stat.is_boson and not x1 > 0:
        raise ValueError("bosonic occupancy pole: alpha + b e_1 must be positive")
    x = sol.alpha + b * (n - as_mpf(side.tau)) ** 2
    u = mp.e ** (-x)
    return u / (1 - stat.eta * u)


def force_side(stat: Statistics, side: WellSide, N: int, t,
               policy: PrecisionPolicy = DEFAULT_POLICY):
    """Reduced force of one half well: (value, certified error bound)."""
    _, (f, err) = _solve_side(stat, side, N, t, policy)
    return f, err


def net_force(stat: Statistics, N: int, t,
              policy: PrecisionPolicy = DEFAULT_POLICY) -> CurvePoint:
    """Net reduced force on the partition at one temperature."""
    t = mpf(t)
    sol_m, (f_m, err_m) = _solve_side(stat, W_MINUS, N, t, policy)
    sol_p, (f_p, err_p) = _solve_side(stat, W_PLUS, N, t, policy)
    return CurvePoint(
        t=t,
        alpha_plus=sol_p.alpha,
        alpha_minus=sol_m.alpha,
        f_plus=f_p,
        f_minus=f_m,
        delta_f=f_m - f_p,
        delta_f_error=err_m + err_p,
    )


def sweep_curve(stat: Statistics, N: int, grid: Sequence,
                policy: PrecisionPolicy = DEFAULT_POLICY) -> list:
    """Evaluate the curve on a strictly increasing temperature grid.

    Points are independent; a failing point is recorded with its index and
    the remaining points are still computed, after which a
    :class:`SweepFailure` carrying the partial results is raised.
    """
    ts = [mpf(t) for t in grid]
    if any(not t > 0 for t in ts):
        raise ValueError("grid temperatures must be positive")
    if any(b >= a for a, b in zip(ts[1:], ts)):
        raise ValueError("grid must be strictly increasing")
    points = []
    failures = []
    for i, t in enumerate(ts):
        try:
            points.append(net_force(stat, N, t, policy))
        except Exception as exc:  # noqa: BLE001 - reported per point
            failures.append((i, t, f"{type(exc).__name__}: {exc}"))
    if failures:
        raise SweepFailure(failures, points)
    return points


def locate_minimum(stat: Statistics, N: int,
                   policy: PrecisionPolicy = DEFAULT_POLICY,
                   search_window=None):
    """Locate the single interior minimum of the net-force curve.

    Defaults to the window [0.1 N, 2 N] for bosons and [0.05 N^2, 2 N^2] for
    fermions, matching the particle-number scaling of the minimum.  Probe
    points must be unimodal; golden-section refinement then brings the
    minimum temperature to a relative precision of 1e-3.
    """
    if search_window is None:
        scale = N if stat.is_boson else N * N
        search_window = (mpf("0.1") * scale, 2 * scale) if stat.is_boson \
            else (mpf("0.05") * scale, 2 * scale)
    t_lo, t_hi = mpf(search_window[0]), mpf(search_window[1])
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        cache: dict = {}

        def df(logt):
            if logt not in cache:
                cache[logt] = net_force(stat, N, mp.e ** logt, policy).delta_f
            return cache[logt]

        a, c = mp.log(t_lo), mp.log(t_hi)
        n_probe = 9
        xs = [a + (c - a) * i / (n_probe - 1) for i in range(n_probe)]
        vals = [df(x) for x in xs]
        rises = [vals[i + 1] > vals[i] for i in range(n_probe - 1)]
        flips = sum(1 for i in range(len(rises) - 1) if rises[i] != rises[i + 1])
        i_min = min(range(n_probe), key=lambda i: vals[i])
        if flips > 1 or i_min in (0, n_probe - 1):
            raise NotUnimodal(
                "probe points do not bracket a single interior minimum",
                [(mp.e ** x, v) for x, v in zip(xs, vals)])
        lo, hi = xs[i_min - 1], xs[i_min + 1]
        inv_phi = (mp.sqrt(5) - 1) / 2
        x1 = hi - inv_phi * (hi - lo)
        x2 = lo + inv_phi * (hi - lo)
        f1, f2 = df(x1), df(x2)
        while hi - lo > mpf("1e-3"):
            if f1 < f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - inv_phi * (hi - lo)
                f1 = df(x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + inv_phi * (hi - lo)
                f2 = df(x2)
        x_best = (lo + hi) / 2
        return mp.e ** x_best, df(x_best)


def locate_inflections(stat: Statistics, N: int,
                       policy: PrecisionPolicy = DEFAULT_POLICY,
                       window=None, grid_points: int = 48):
    """Find the two inflection temperatures of the low-temperature step.

    Fermions only: the step is absent for bosons.  A uniform grid over the
    window (default [0.05 N, N]) locates the sign changes of the second
    finite difference of the curve; each is then refined by bisection with a
    half-grid-step stencil.
    """
    if stat.is_boson:
        raise ValueError("the low-temperature step exists only for fermions")
    if window is None:
        window = (mpf("0.05") * N, mpf(N))
    t_lo, t_hi = mpf(window[0]), mpf(window[1])
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        cache: dict = {}

        def df(t):
            key = mp.nstr(t, 25)
            if key not in cache:
                cache[key] = net_force(stat, N, t, policy).delta_f
            return cache[key]

        h = (t_hi - t_lo) / (grid_points - 1)
        ts = [t_lo + i * h for i in range(grid_points)]
        vals = [df(t) for t in ts]
        d2 = [vals[i - 1] - 2 * vals[i] + vals[i + 1] for i in range(1, grid_points - 1)]
        peak = max(range(len(d2)), key=lambda i: d2[i])
        if not d2[peak] > 0:
            raise StepNotFound("no convex stretch found inside the window")
        left = peak
        while left > 0 and d2[left - 1] > 0:
            left -= 1
        right = peak
        while right < len(d2) - 1 and d2[right + 1] > 0:
            right += 1
        if left == 0 or right == len(d2) - 1:
            raise StepNotFound("fewer than two second-difference sign changes detected")

        stencil = h / 2

        def d2_at(t):
            return df(t - stencil) - 2 * df(t) + df(t + stencil)

        def refine(t_neg, t_pos):
            # the refinement stencil differs from the grid spacing, so allow
            # one widening step if the sign change shifted across a cell
            for _ in range(3):
                if d2_at(t_neg) < 0 < d2_at(t_pos):
                    break
                t_neg, t_pos = t_neg - (t_pos - t_neg), t_pos
            else:
                raise StepNotFound("sign change lost during refinement")
            while abs(t_pos - t_neg) > mpf("1e-3") * N:
                mid = (t_neg + t_pos) / 2
                if d2_at(mid) > 0:
                    t_pos = mid
                else:
                    t_neg = mid
            return (t_neg + t_pos) / 2

        # grid index i of d2 corresponds to temperature ts[i+1]
        t_begin = refine(ts[left], ts[left + 1])
        t_end = refine(ts[right + 2], ts[right + 1])
        return t_begin, t_end
