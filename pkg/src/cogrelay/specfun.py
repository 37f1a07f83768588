"""Special functions and algebraic kernels underlying the closed forms.

Everything here is elementary but numerically delicate: integer-shape
incomplete gamma via its finite series, the Tricomi confluent
hypergeometric function via its integral representation, and
partial-fraction expansion of products of simple-pole powers with
arbitrary multiplicities.  All gamma/factorial products are assembled in
the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import NearDegeneratePoles

__all__ = [
    "PoleSet",
    "log_gamma",
    "upper_incomplete_gamma_int",
    "log_upper_incomplete_gamma_int",
    "tricomi_u",
    "partial_fractions",
    "erfc_scaled_q",
]

# Relative pole separation below which a partial-fraction expansion is
# numerically meaningless.
POLE_SEPARATION_FLOOR = 1e-8


@dataclass(frozen=True)
class PoleSet:
    """Poles of a rational function prod_i (x + alpha_i)^{-n_i}.

    ``poles`` is a sequence of (location, multiplicity) pairs with
    strictly positive locations and multiplicities >= 1.
    """

    poles: tuple[tuple[float, int], ...]

    def __init__(self, poles):
        object.__setattr__(self, "poles", tuple((float(a), int(n)) for a, n in poles))
        for alpha, n in self.poles:
            if alpha <= 0.0:
                raise ValueError(f"pole location must be positive, got {alpha}")
            if n < 1:
                raise ValueError(f"pole multiplicity must be >= 1, got {n}")

    def min_relative_separation(self) -> float:
        locs = [a for a, _ in self.poles]
        if len(locs) < 2:
            return math.inf
        sep = math.inf
        for i in range(len(locs)):
            for j in range(i + 1, len(locs)):
                sep = min(sep, abs(locs[i] - locs[j]) / max(locs[i], locs[j]))
        return sep


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if x <= 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def log_upper_incomplete_gamma_int(n: int, x: float) -> float:
    """ln Gamma(n, x) for integer shape n >= 1, x >= 0.

    Uses the finite series Gamma(n, x) = (n-1)! e^{-x} sum_{m<n} x^m/m!,
    evaluated as a log-sum-exp so large x cannot underflow intermediate
    terms.
    """
    if n < 1 or n != int(n):
        raise ValueError(f"shape must be a positive integer, got {n}")
    if x < 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    n = int(n)
    if x == 0.0:
        return math.lgamma(n)
    logx = math.log(x)
    terms = [m * logx - math.lgamma(m + 1) for m in range(n)]
    peak = max(terms)
    acc = math.fsum(math.exp(t - peak) for t in terms)
    return math.lgamma(n) - x + peak + math.log(acc)


def upper_incomplete_gamma_int(n: int, x: float) -> float:
    """Gamma(n, x) for integer shape n >= 1, x >= 0."""
    return math.exp(log_upper_incomplete_gamma_int(n, x))


def gamma_survival(n: int, x: float) -> float:
    """Regularized upper gamma Gamma(n, x)/Gamma(n) for integer n >= 1.

    This is the survival function of a unit-scale Gamma(n) variate and
    the workhorse of every outage expression.
    """
    return math.exp(log_upper_incomplete_gamma_int(n, x) - math.lgamma(n))


def tricomi_u(a: float, b: float, z: float) -> float:
    """Tricomi confluent hypergeometric function Psi(a, b, z).

    Evaluated by adaptive quadrature of the defining integral

        Psi(a,b,z) = 1/Gamma(a) int_0^inf e^{-z t} t^{a-1} (1+t)^{b-a-1} dt

    after the substitution t = u^2, which removes the integrable
    endpoint singularity for a < 1.
    """
    if a <= 0.0 or z <= 0.0:
        raise ValueError(f"tricomi_u requires a > 0 and z > 0, got a={a}, z={z}")
    c = b - a - 1.0

    def integrand(u: float) -> float:
        t = u * u
        return 2.0 * math.exp(-z * t + (2.0 * a - 1.0) * math.log(u) + c * math.log1p(t))

    val, _ = quad(integrand, 0.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=400)
    return val / math.gamma(a) if a < 170 else val * math.exp(-math.lgamma(a))


def partial_fractions(pole_set: PoleSet) -> list[tuple[int, int, float]]:
    """Expand prod_i (x + alpha_i)^{-n_i} into simple-pole powers.

    Returns a list of (pole index, order j, coefficient A) with

        prod_i (x + alpha_i)^{-n_i} = sum_i sum_{j=1}^{n_i} A_{i,j} (x + alpha_i)^{-j}.

    Coefficients are Taylor coefficients of the deflated product around
    each pole, computed by exact truncated-series arithmetic (no
    numerical differentiation).

    Raises NearDegeneratePoles when any pair of pole locations is closer
    than POLE_SEPARATION_FLOOR in relative terms.
    """
    if pole_set.min_relative_separation() <= POLE_SEPARATION_FLOOR:
        raise NearDegeneratePoles(
            f"pole separation {pole_set.min_relative_separation():.3e} below "
            f"{POLE_SEPARATION_FLOOR:.0e}"
        )
    poles = pole_set.poles
    out: list[tuple[int, int, float]] = []
    for i, (alpha_i, n_i) in enumerate(poles):
        # Taylor series of psi_i(x) = prod_{j != i} (x + alpha_j)^{-n_j}
        # in h = x + alpha_i, truncated at order n_i - 1.
        series = [0.0] * n_i
        series[0] = 1.0
        for j, (alpha_j, n_j) in enumerate(poles):
            if j == i:
                continue
            d = alpha_j - alpha_i
            # (d + h)^{-n_j} = d^{-n_j} sum_k binom(n_j+k-1, k) (-h/d)^k
            fac = [
                math.comb(n_j + k - 1, k) * (-1.0 / d) ** k * d ** (-n_j)
                for k in range(n_i)
            ]
            series = _poly_mul_trunc(series, fac, n_i)
        # coefficient of h^{n_i - j} is A_{i,j}
        for j in range(1, n_i + 1):
            out.append((i, j, series[n_i - j]))
    return out


def _poly_mul_trunc(p: list[float], q: list[float], order: int) -> list[float]:
    out = [0.0] * order
    for i, pi in enumerate(p):
        if pi == 0.0:
            continue
        for j, qj in enumerate(q):
            if i + j >= order:
                break
            out[i + j] += pi * qj
    return out


def erfc_scaled_q(b: float, gamma: float) -> float:
    """Per-realization conditional symbol-error kernel erfc(sqrt(b*gamma))/2.

    Multiplied by the modulation constant ``a`` this is the conditional
    MPSK SEP at instantaneous SINR ``gamma``.
    """
    if b <= 0.0:
        raise ValueError(f"b must be positive, got {b}")
    if gamma < 0.0:
        gamma = 0.0
    return 0.5 * math.erfc(math.sqrt(b * gamma))
