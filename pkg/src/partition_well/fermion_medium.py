"""Fermionic medium-temperature regime: t of order N^2.

With many levels below the Fermi edge the constraint sum collapses to
``N ~ sqrt(t) I(alpha)`` with the Fermi-Dirac integral

    I(alpha) = integral_0^inf dy / (exp(alpha + y^2) + 1),

and the subleading side splitting of alpha turns the net force into

    delta_f ~= (N^2/4) J(alpha),    J = -1 / ((e^alpha + 1) I I'),

so the force minimum is the minimum of the kernel J.  Three evaluation
variants are provided: direct quadrature (the precise route), the truncated
asymptotic series for I paired with its further-truncated derivative, and a
tanh-shaped surrogate of the integrand that admits closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from .numerics import DEFAULT_POLICY, GUARD_DIGITS, PrecisionPolicy, \
    find_root_bracketed, quad_semi_infinite

__all__ = [
    "FermiIntegralValue",
    "VariantDomainError",
    "STONER_INTERVAL",
    "fermi_integral",
    "alpha_from_temperature",
    "force_kernel",
    "force_kernel_minimum",
    "fermion_medium_net_force",
    "alpha_split_subleading",
    "tanh_surrogate_quadratic",
]

VARIANTS = ("quadrature", "stoner", "tanh_surrogate")

# validity window of the truncated asymptotic series for I
STONER_INTERVAL = (mpf("-3.696"), mpf("-1.314"))


class VariantDomainError(ValueError):
    """alpha outside the validity domain of the requested variant."""


@dataclass(frozen=True)
class FermiIntegralValue:
    alpha: mpf
    I: mpf
    I_prime: mpf  # negative: I is strictly decreasing in alpha
    variant: str


def _check_variant(alpha, variant: str, pure_series_derivative: bool):
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")
    if variant == "stoner" and not (STONER_INTERVAL[0] <= alpha <= STONER_INTERVAL[1]):
        raise VariantDomainError(
            f"stoner truncation is valid for alpha in [{STONER_INTERVAL[0]}, "
            f"{STONER_INTERVAL[1]}], got {mp.nstr(mpf(alpha), 6)}")
    if variant == "tanh_surrogate" and not alpha < 0:
        raise VariantDomainError("tanh surrogate requires alpha < 0")
    if pure_series_derivative and variant != "stoner":
        raise ValueError("pure_series_derivative only applies to the stoner variant")


def _quad_I(alpha: mpf, policy: PrecisionPolicy) -> mpf:
    return quad_semi_infinite(lambda y: 1 / (mp.e ** (alpha + y * y) + 1), policy)


def _quad_I_prime(alpha: mpf, policy: PrecisionPolicy) -> mpf:
    def slope(y):
        s = 1 / (mp.e ** (alpha + y * y) + 1)
        return -s * (1 - s)

    return quad_semi_infinite(slope, policy)


def _surrogate_pieces(alpha: mpf):
    """p, I, I^2 and d(I^2)/dalpha of the tanh-shaped surrogate."""
    E = mp.e ** alpha
    E2 = E * E
    p = (1 + E2) / (1 + E)
    dp = (2 * E2 * (1 + E) - E * (1 + E2)) / (1 + E) ** 2
    I = p * (-2 * alpha + E2) / (2 * mp.sqrt(-alpha))
    I2 = p * p * (-alpha + E2)
    dI2 = 2 * p * dp * (-alpha + E2) + p * p * (-1 + 2 * E2)
    return p, I, I2, dI2


def fermi_integral(alpha, variant: str = "quadrature",
                   pure_series_derivative: bool = False,
                   policy: PrecisionPolicy = DEFAULT_POLICY) -> FermiIntegralValue:
    """Fermi-Dirac integral I(alpha) and its derivative.

    * ``quadrature`` - adaptive quadrature of the integrand and of its
      alpha-derivative (valid for all alpha);
    * ``stoner`` - I = sqrt(-alpha) [1 - (pi^2/24)/alpha^2] with the
      further-truncated derivative magnitude 1/(2 sqrt(-alpha)); setting
      ``pure_series_derivative`` instead differentiates the truncated series
      itself, the pairing under which the force kernel loses its minimum;
    * ``tanh_surrogate`` - closed forms from a shifted-tanh model of the
      integrand, exact at y = 0 and matching its half-height point.
    """
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        alpha = mpf(alpha)
        _check_variant(alpha, variant, pure_series_derivative)
        if variant == "quadrature":
            return FermiIntegralValue(alpha, _quad_I(alpha, policy),
                                      _quad_I_prime(alpha, policy), variant)
        if variant == "stoner":
            root = mp.sqrt(-alpha)
            corr = mp.pi ** 2 / 24 / alpha ** 2
            I = root * (1 - corr)
            if pure_series_derivative:
                # d/dalpha of the truncated series itself
                Ip = -(1 / (2 * root) + 3 * (mp.pi ** 2 / 24) / (2 * root ** 5))
            else:
                Ip = -1 / (2 * root)
            return FermiIntegralValue(alpha, I, Ip, variant)
        p, I, I2, dI2 = _surrogate_pieces(alpha)
        return FermiIntegralValue(alpha, I, dI2 / (2 * I), variant)


def force_kernel(alpha, variant: str = "quadrature",
                 pure_series_derivative: bool = False,
                 policy: PrecisionPolicy = DEFAULT_POLICY) -> mpf:
    """Kernel J(alpha) = -1/((e^alpha + 1) I I') whose minimum sets the force minimum.

    Positive for alpha < 0; equals -2/((e^alpha + 1) d(I^2)/dalpha).
    """
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        alpha = mpf(alpha)
        if variant == "tanh_surrogate":
            _check_variant(alpha, variant, pure_series_derivative)
            _, _, _, dI2 = _surrogate_pieces(alpha)
            return -2 / ((mp.e ** alpha + 1) * dI2)
        v = fermi_integral(alpha, variant, pure_series_derivative, policy)
        return -1 / ((mp.e ** alpha + 1) * v.I * v.I_prime)


def force_kernel_minimum(variant: str = "quadrature",
                         policy: PrecisionPolicy = DEFAULT_POLICY,
                         bracket=(-5, -1)):
    """Golden-section minimum (alpha_min, J_min) of the force kernel."""
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        lo, hi = mpf(bracket[0]), mpf(bracket[1])
        if variant == "stoner":
            lo = max(lo, STONER_INTERVAL[0])
            hi = min(hi, STONER_INTERVAL[1])
        inv_phi = (mp.sqrt(5) - 1) / 2
        J = lambda a: force_kernel(a, variant, policy=policy)
        x1 = hi - inv_phi * (hi - lo)
        x2 = lo + inv_phi * (hi - lo)
        f1, f2 = J(x1), J(x2)
        while hi - lo > mpf("1e-6"):
            if f1 < f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - inv_phi * (hi - lo)
                f1 = J(x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + inv_phi * (hi - lo)
                f2 = J(x2)
        a = (lo + hi) / 2
        return a, J(a)


def alpha_from_temperature(N: int, t, variant: str = "quadrature",
                           policy: PrecisionPolicy = DEFAULT_POLICY) -> mpf:
    """Invert the collapsed constraint I(alpha) = N/sqrt(t).

    Depends on (N, t) only through N/sqrt(t), so alpha(N, t) = alpha(k N,
    k^2 t) identically.  Raises :class:`VariantDomainError` when the target
    is not reachable on the variant's monotone domain.
    """
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        t = mpf(t)
        if not (t > 0 and N >= 1):
            raise ValueError("need t > 0 and N >= 1")
        target = N / mp.sqrt(t)
        I = lambda a: fermi_integral(a, variant, policy=policy).I

        if variant == "stoner":
            lo, hi = STONER_INTERVAL
            if not I(hi) <= target <= I(lo):
                raise VariantDomainError(
                    f"N/sqrt(t) = {mp.nstr(target, 6)} outside the stoner range "
                    f"[{mp.nstr(I(hi), 6)}, {mp.nstr(I(lo), 6)}]")
        elif variant == "tanh_surrogate":
            # the surrogate is monotone only left of its spurious pole near 0
            hi = mpf("-0.7")
            if target < I(hi):
                raise VariantDomainError(
                    "N/sqrt(t) below the reachable surrogate values")
            lo = hi - 1
            while I(lo) < target:
                lo = 2 * lo
                if lo < mpf("-1e9"):
                    raise VariantDomainError("target not reachable")
        else:
            lo, hi = mpf(-1), mpf(1)
            while I(lo) < target:
                lo *= 2
                if lo < mpf("-1e12"):
                    raise VariantDomainError("target not reachable")
            while I(hi) > target:
                hi *= 2
                if hi > mpf("1e12"):
                    raise VariantDomainError("target not reachable")
        res = find_root_bracketed(lambda a: I(a) - target, lo, hi, policy)
        return res.root


def fermion_medium_net_force(N: int, t, variant: str = "quadrature",
                             policy: PrecisionPolicy = DEFAULT_POLICY) -> mpf:
    """Medium-regime net force (N^2/4) J(alpha(N, t)).

    Scale invariant by construction: delta_f(N, t)/N^2 depends only on
    N/sqrt(t).
    """
    alpha = alpha_from_temperature(N, t, variant, policy)
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        return mpf(N) ** 2 / 4 * force_kernel(alpha, variant, policy=policy)


def alpha_split_subleading(N: int, alpha, variant: str = "quadrature",
                           policy: PrecisionPolicy = DEFAULT_POLICY) -> mpf:
    """Subleading side splitting (1/2N) I / ((e^alpha + 1) I') of alpha.

    Negative for alpha < 0 since I > 0 and I' < 0; scales as 1/N.
    """
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        v = fermi_integral(alpha, variant, policy=policy)
        return v.I / ((mp.e ** v.alpha + 1) * v.I_prime) / (2 * N)


def tanh_surrogate_quadratic(policy: PrecisionPolicy = DEFAULT_POLICY,
                             alpha_star=mpf("-2.5")):
    """Quadratic Taylor model a (alpha - center)^2 + minimum of the surrogate kernel.

    Expands the tanh-surrogate J to second order about ``alpha_star`` and
    completes the square; the coefficients are recomputed rather than
    frozen.  Returns (a, center, minimum).
    """
    with mp.workdps(policy.working_digits + GUARD_DIGITS):
        a_star = mpf(alpha_star)

        def J(a):
            # ambient-precision closure: mp.diff varies its working precision
            _, _, _, dI2 = _surrogate_pieces(mpf(a))
            return -2 / ((mp.e ** a + 1) * dI2)

        J0 = J(a_star)
        J1 = mp.diff(J, a_star)
        J2 = mp.diff(J, a_star, 2)
        curvature = J2 / 2
        center = a_star - J1 / J2
        minimum = J0 - J1 ** 2 / (2 * J2)
        return curvature, center, minimum
