"""Closed-form outage and symbol-error expressions.

All expressions are finite multi-index sums obtained by expanding the
integer-shape Gamma survival series inside the relevant expectations and
integrating term by term.  The printed forms in the source material
contain transcription slips, so every function here is assembled
directly from the underlying expectation integrals; the quadrature
oracles in :mod:`cogrelay.oracle` and the Monte Carlo engine arbitrate.

Term products are put together in the log domain and accumulated with
compensated summation, so integer severities up to ~8 and SNRs up to
~40 dB stay well inside double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, exp, fsum, lgamma, log

from scipy.integrate import quad

from .errors import Infeasible, NearDegeneratePoles, NumericalInstability
from .model import FadingLink, ModulationSpec
from .specfun import PoleSet, partial_fractions, tricomi_u

__all__ = [
    "PrimaryOutageInputs",
    "SecondaryCdfInputs",
    "AsepResult",
    "primary_outage",
    "relay_phase_outage",
    "solve_secondary_source_power",
    "solve_relay_power",
    "cdf_scenario_a",
    "cdf_scenario_a_e2e",
    "cdf_scenario_b",
    "outage_capacity",
    "asep_scenario_a",
]

# Probabilities may overshoot [0, 1] by at most this much before we call
# the evaluation unstable.
CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class PrimaryOutageInputs:
    """Symbols of the primary outage constraint: the four links into the
    primary receiver, the transmit SNRs, and the SINR threshold."""

    e: FadingLink          # PT -> PX
    f: FadingLink          # S1 -> PX
    g: FadingLink          # S2 -> PX
    l: FadingLink          # R  -> PX
    gamma_bar_p: float
    gamma_bar_s1: float
    gamma_bar_s2: float
    gamma_bar_r: float
    threshold: float       # gamma_th = 2^R_P - 1, linear

    def __post_init__(self):
        if not (self.gamma_bar_p > 0.0):
            raise ValueError("gamma_bar_p must be positive")
        for name in ("gamma_bar_s1", "gamma_bar_s2", "gamma_bar_r", "threshold"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class SecondaryCdfInputs:
    """Symbols of the secondary SINR cdf: secondary links, interference
    links and transmit SNRs."""

    x: FadingLink          # R  <-> S2
    w: FadingLink          # R  <-> S1
    y: FadingLink          # PT -> R
    z: FadingLink          # PT -> S1
    v: FadingLink          # PT -> S2
    gamma_bar_p: float
    gamma_bar_s: float
    gamma_bar_r: float

    def __post_init__(self):
        for name in ("gamma_bar_p", "gamma_bar_s", "gamma_bar_r"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"{name} must be positive")

    def swapped(self) -> "SecondaryCdfInputs":
        """Parameter binding for the opposite direction (S2 receiving):
        x <-> w and z <-> v."""
        return SecondaryCdfInputs(
            x=self.w, w=self.x, y=self.y, z=self.v, v=self.z,
            gamma_bar_p=self.gamma_bar_p,
            gamma_bar_s=self.gamma_bar_s,
            gamma_bar_r=self.gamma_bar_r,
        )


def _log_pow(base: float, expo: float) -> float:
    """expo * log(base) with the 0**0 = 1 convention."""
    if expo == 0:
        return 0.0
    if base == 0.0:
        return -math.inf
    return expo * log(base)


def _clamp_probability(p: float, where: str) -> float:
    if p < -CLAMP_TOL or p > 1.0 + CLAMP_TOL:
        raise NumericalInstability(f"{where}: probability {p!r} outside [0,1] beyond tolerance")
    return min(1.0, max(0.0, p))


# ---------------------------------------------------------------------------
# Primary network
# ---------------------------------------------------------------------------

def primary_outage(inputs: PrimaryOutageInputs) -> float:
    """Outage probability of the primary receiver in the multiple-access
    phase, where both secondary sources interfere.

    This is E_{F,G}[F_E(theta/gp * (gs1 F + gs2 G + 1))] with every
    variable Gamma distributed, reduced to a finite triple sum.
    """
    me = inputs.e.m
    c = me * inputs.threshold / (inputs.e.mean_gain * inputs.gamma_bar_p)
    af, ag = inputs.f.rate, inputs.g.rate
    mf, mg = inputs.f.m, inputs.g.m
    s1, s2 = inputs.gamma_bar_s1, inputs.gamma_bar_s2
    terms = []
    for ell in range(me):
        for t1 in range(ell + 1):
            for t2 in range(ell - t1 + 1):
                lt = (
                    -c
                    + _log_pow(c, ell) - lgamma(ell + 1)
                    + log(comb(ell, t1)) + log(comb(ell - t1, t2))
                    + _log_pow(s1, t1) + _log_pow(s2, t2)
                    + mf * log(af) + lgamma(mf + t1) - lgamma(mf)
                    - (mf + t1) * log(af + c * s1)
                    + mg * log(ag) + lgamma(mg + t2) - lgamma(mg)
                    - (mg + t2) * log(ag + c * s2)
                )
                terms.append(exp(lt))
    return _clamp_probability(1.0 - fsum(terms), "primary_outage")


def relay_phase_outage(inputs: PrimaryOutageInputs) -> float:
    """Outage probability of the primary receiver in the broadcast phase,
    where only the relay interferes: E_L[F_E(theta/gp * (gr L + 1))]."""
    me = inputs.e.m
    c = me * inputs.threshold / (inputs.e.mean_gain * inputs.gamma_bar_p)
    al, ml = inputs.l.rate, inputs.l.m
    gr = inputs.gamma_bar_r
    terms = []
    for ell in range(me):
        for i in range(ell + 1):
            lt = (
                -c
                + _log_pow(c, ell) - lgamma(ell + 1)
                + log(comb(ell, i))
                + _log_pow(gr, ell - i)
                + ml * log(al) + lgamma(ml + ell - i) - lgamma(ml)
                - (ml + ell - i) * log(al + c * gr)
            )
            terms.append(exp(lt))
    return _clamp_probability(1.0 - fsum(terms), "relay_phase_outage")


def _bisect_power(constraint, threshold: float, cap: float, what: str) -> float:
    """Largest power in (0, cap] keeping ``constraint`` below ``threshold``.

    ``constraint`` must be nondecreasing in the power; this is probed at
    three points and asserted before bisection.
    """
    if not (0.0 <= threshold <= 1.0):
        raise ValueError(f"threshold must be a probability, got {threshold}")
    f0 = constraint(0.0)
    if f0 > threshold:
        raise Infeasible(
            f"{what}: outage without interference ({f0:.6g}) already exceeds "
            f"the threshold {threshold:.6g}"
        )
    fc = constraint(cap)
    if fc <= threshold:
        return cap
    probes = [constraint(cap * t) for t in (0.25, 0.5, 0.75)]
    seq = [f0, *probes, fc]
    assert all(a <= b + 1e-12 for a, b in zip(seq, seq[1:])), \
        f"{what}: constraint is not monotone in the power"
    lo, hi = 0.0, cap
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if constraint(mid) <= threshold:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(hi, 1.0):
            break
    return lo


def solve_secondary_source_power(inputs: PrimaryOutageInputs, threshold: float,
                                 cap: float) -> float:
    """Invert the MA-phase outage constraint for the shared source SNR
    (gamma_bar_S1 = gamma_bar_S2), capped at ``cap``."""

    def constraint(gs: float) -> float:
        probe = PrimaryOutageInputs(
            e=inputs.e, f=inputs.f, g=inputs.g, l=inputs.l,
            gamma_bar_p=inputs.gamma_bar_p,
            gamma_bar_s1=gs, gamma_bar_s2=gs,
            gamma_bar_r=inputs.gamma_bar_r,
            threshold=inputs.threshold,
        )
        return primary_outage(probe)

    return _bisect_power(constraint, threshold, cap, "secondary source power")


def solve_relay_power(inputs: PrimaryOutageInputs, threshold: float,
                      cap: float) -> float:
    """Invert the BC-phase outage constraint for the relay SNR, capped."""

    def constraint(gr: float) -> float:
        probe = PrimaryOutageInputs(
            e=inputs.e, f=inputs.f, g=inputs.g, l=inputs.l,
            gamma_bar_p=inputs.gamma_bar_p,
            gamma_bar_s1=inputs.gamma_bar_s1,
            gamma_bar_s2=inputs.gamma_bar_s2,
            gamma_bar_r=gr,
            threshold=inputs.threshold,
        )
        return relay_phase_outage(probe)

    return _bisect_power(constraint, threshold, cap, "relay power")


# ---------------------------------------------------------------------------
# Secondary network, Scenario (a)
# ---------------------------------------------------------------------------

class _Rates:
    """Derived rate constants of the normalized interference variables."""

    def __init__(self, inp: SecondaryCdfInputs):
        gp, gs, gr = inp.gamma_bar_p, inp.gamma_bar_s, inp.gamma_bar_r
        self.beta = gr / gs
        self.qx = inp.x.m / (inp.x.mean_gain * gr)
        self.qw = inp.w.m / (inp.w.mean_gain * gr)
        self.by = inp.y.m * gs / (gr * gp * inp.y.mean_gain)
        self.bz = inp.z.m / (gp * inp.z.mean_gain)
        self.bv = inp.v.m / (gp * inp.v.mean_gain)


def _chi1(inp: SecondaryCdfInputs, theta: float) -> float:
    """E_{Z,Y}[Pr{X > (Z + Y + beta + 1) theta / gr}] as a finite sum."""
    r = _Rates(inp)
    cx = r.qx * theta
    mx, my, mz = inp.x.m, inp.y.m, inp.z.m
    terms = []
    for n in range(mx):
        for i1 in range(n + 1):
            for i2 in range(n - i1 + 1):
                lt = (
                    -cx * (r.beta + 1.0)
                    + log(comb(n, i1)) + log(comb(n - i1, i2))
                    + _log_pow(r.beta + 1.0, n - i1 - i2)
                    + _log_pow(cx, n) - lgamma(n + 1)
                    + my * log(r.by) + lgamma(my + i1) - lgamma(my)
                    - (my + i1) * log(cx + r.by)
                    + mz * log(r.bz) + lgamma(mz + i2) - lgamma(mz)
                    - (mz + i2) * log(cx + r.bz)
                )
                terms.append(exp(lt))
    return fsum(terms)


def _chi2(inp: SecondaryCdfInputs, theta: float) -> float:
    """E_Z[Pr{W > (Z + 1) theta / gr}] as a finite sum."""
    r = _Rates(inp)
    cw = r.qw * theta
    mw, mz = inp.w.m, inp.z.m
    terms = []
    for k in range(mw):
        for k1 in range(k + 1):
            lt = (
                -cw
                + _log_pow(cw, k) - lgamma(k + 1)
                + log(comb(k, k1))
                + mz * log(r.bz) + lgamma(mz + k1) - lgamma(mz)
                - (mz + k1) * log(cw + r.bz)
            )
            terms.append(exp(lt))
    return fsum(terms)


def cdf_scenario_a(inputs: SecondaryCdfInputs, theta: float) -> float:
    """cdf at ``theta`` of the upper-bounded SINR at source 1 in
    Scenario (a): 1 - chi1 * chi2."""
    if theta < 0.0:
        raise ValueError("theta must be nonnegative")
    if theta == 0.0:
        return 0.0
    return _clamp_probability(1.0 - _chi1(inputs, theta) * _chi2(inputs, theta),
                              "cdf_scenario_a")


def _survival_side(inp: SecondaryCdfInputs, theta: float) -> float:
    """E[Pr{X > max(Z + Y + beta + 1, V + 1) theta / gr}] split into the
    V <= Z + Y + beta region (upsilon_1) and its complement (upsilon_2)."""
    r = _Rates(inp)
    cx = r.qx * theta
    mx, my, mz, mv = inp.x.m, inp.y.m, inp.z.m, inp.v.m

    # upsilon_1 = chi1 - E[Pr{X > (Z+Y+beta+1) theta/gr} ; V > Z+Y+beta]
    sub = []
    for varpi in range(mv):
        for rho in range(mx):
            for e1 in range(rho + 1):
                for e2 in range(rho - e1 + 1):
                    for t1 in range(varpi + 1):
                        for t2 in range(varpi - t1 + 1):
                            lt = (
                                -cx * (r.beta + 1.0) - r.bv * r.beta
                                + log(comb(rho, e1)) + log(comb(rho - e1, e2))
                                + log(comb(varpi, t1)) + log(comb(varpi - t1, t2))
                                + _log_pow(r.beta + 1.0, rho - e1 - e2)
                                + _log_pow(r.beta, varpi - t1 - t2)
                                + _log_pow(cx, rho) - lgamma(rho + 1)
                                + _log_pow(r.bv, varpi) - lgamma(varpi + 1)
                                + my * log(r.by) + lgamma(my + e1 + t1) - lgamma(my)
                                - (my + e1 + t1) * log(cx + r.bv + r.by)
                                + mz * log(r.bz) + lgamma(mz + e2 + t2) - lgamma(mz)
                                - (mz + e2 + t2) * log(cx + r.bv + r.bz)
                            )
                            sub.append(exp(lt))
    upsilon1 = _chi1(inp, theta) - fsum(sub)

    # upsilon_2 = E[Pr{X > (V+1) theta/gr} ; V > Z+Y+beta]
    s = cx + r.bv
    terms = []
    for i in range(mx):
        for j in range(i + 1):
            for k in range(mv + j):
                for k1 in range(k + 1):
                    for k2 in range(k1 + 1):
                        lt = (
                            -cx - r.beta * s
                            + _log_pow(cx, i) - lgamma(i + 1)
                            + log(comb(i, j))
                            + mv * log(r.bv) + lgamma(mv + j) - lgamma(mv)
                            - (mv + j - k) * log(s) - lgamma(k + 1)
                            + log(comb(k, k1)) + log(comb(k1, k2))
                            + _log_pow(r.beta, k - k1)
                            + mz * log(r.bz) + lgamma(mz + k2) - lgamma(mz)
                            - (mz + k2) * log(s + r.bz)
                            + my * log(r.by) + lgamma(my + k1 - k2) - lgamma(my)
                            - (my + k1 - k2) * log(s + r.by)
                        )
                        terms.append(exp(lt))
    upsilon2 = fsum(terms)
    return upsilon1 + upsilon2


def cdf_scenario_a_e2e(inputs: SecondaryCdfInputs, theta: float) -> float:
    """cdf at ``theta`` of the end-to-end upper-bounded SINR
    min(gamma_S1, gamma_S2) in Scenario (a).

    The two directional survival factors share the relay-side variables,
    so their product form is the usual tight approximation; the S2-side
    factor is the S1-side evaluator under the x <-> w, z <-> v swap.
    """
    if theta < 0.0:
        raise ValueError("theta must be nonnegative")
    if theta == 0.0:
        return 0.0
    side1 = _survival_side(inputs, theta)
    side2 = _survival_side(inputs.swapped(), theta)
    return _clamp_probability(1.0 - side1 * side2, "cdf_scenario_a_e2e")


# ---------------------------------------------------------------------------
# Secondary network, Scenario (b)
# ---------------------------------------------------------------------------

def _relay_pair_survival(inp: SecondaryCdfInputs, theta: float) -> float:
    """Survival at ``theta`` of the per-relay pair SINR
    gr * min(X, W) / (Y + beta + 1) (source nodes noise-limited)."""
    r = _Rates(inp)
    cx, cw = r.qx * theta, r.qw * theta
    mx, mw, my = inp.x.m, inp.w.m, inp.y.m
    terms = []
    for n in range(mx):
        for n1 in range(mw):
            for i1 in range(n + n1 + 1):
                for i2 in range(n + n1 - i1 + 1):
                    lt = (
                        -(cx + cw) * (r.beta + 1.0)
                        + _log_pow(cx, n) - lgamma(n + 1)
                        + _log_pow(cw, n1) - lgamma(n1 + 1)
                        + log(comb(n + n1, i1)) + log(comb(n + n1 - i1, i2))
                        + _log_pow(r.beta, i2)
                        + my * log(r.by) + lgamma(my + i1) - lgamma(my)
                        - (my + i1) * log(cx + cw + r.by)
                    )
                    terms.append(exp(lt))
    return fsum(terms)


def cdf_scenario_b(inputs: list[SecondaryCdfInputs], K: int, theta: float) -> float:
    """cdf at ``theta`` of the best-relay end-to-end SINR in Scenario (b):
    the relays are independent, so the max-order statistic is the product
    of the per-relay pair cdfs (only the x, w, y links of each input are
    used; source nodes carry no direct primary interference)."""
    if K < 1 or len(inputs) != K:
        raise ValueError(f"need one input set per relay, got {len(inputs)} for K={K}")
    if theta < 0.0:
        raise ValueError("theta must be nonnegative")
    if theta == 0.0:
        return 0.0
    prod = 1.0
    for inp in inputs:
        prod *= _clamp_probability(1.0 - _relay_pair_survival(inp, theta),
                                   "cdf_scenario_b per-relay term")
    return _clamp_probability(prod, "cdf_scenario_b")


def outage_capacity(scenario, inputs, theta: float, *, end_to_end: bool = True) -> float:
    """Outage capacity of the secondary network at threshold ``theta``.

    Dispatches on the scenario: Scenario A evaluates the end-to-end cdf
    (or the single-direction cdf with ``end_to_end=False``); Scenario B
    takes a per-relay input list.
    """
    from .model import Scenario  # local import to avoid cycle at module load

    if scenario is Scenario.A:
        if end_to_end:
            return cdf_scenario_a_e2e(inputs, theta)
        return cdf_scenario_a(inputs, theta)
    if scenario is Scenario.B:
        return cdf_scenario_b(list(inputs), len(inputs), theta)
    raise ValueError(f"unknown scenario {scenario!r}")


# ---------------------------------------------------------------------------
# ASEP, Scenario (a)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AsepResult:
    value: float
    used_fallback: bool


def _asep_quadrature(inputs: SecondaryCdfInputs, mod: ModulationSpec) -> float:
    """a*sqrt(b)/sqrt(pi) * int_0^inf e^{-b u^2} F(u^2) du, the kernel
    average written with gamma = u^2 so the sqrt singularity vanishes."""
    a, b = mod.a, mod.b

    def integrand(u: float) -> float:
        return math.exp(-b * u * u) * cdf_scenario_a(inputs, u * u)

    val, _ = quad(integrand, 0.0, math.inf, epsabs=1e-13, epsrel=1e-10, limit=300)
    return a * math.sqrt(b) / math.sqrt(math.pi) * val


def asep_scenario_a(inputs: SecondaryCdfInputs, mod: ModulationSpec) -> AsepResult:
    """Average symbol error probability of source 1 in Scenario (a).

    Closed form: the cdf kernel integral is expanded term by term; each
    term is a product of three pole powers in gamma, expanded by partial
    fractions and integrated against gamma^{n+k-1/2} e^{-mu gamma} via
    the Tricomi function.  When the three pole locations are too close
    for a stable expansion the result falls back to direct quadrature of
    the kernel integral and is flagged.
    """
    r = _Rates(inputs)
    a, b = mod.a, mod.b
    mx, mw, my, mz = inputs.x.m, inputs.w.m, inputs.y.m, inputs.z.m
    alpha1 = r.bz / r.qw
    alpha2 = r.bz / r.qx
    alpha3 = r.by / r.qx
    mu = b + r.qx * (r.beta + 1.0) + r.qw

    psi_cache: dict[tuple[float, float, float], float] = {}

    def psi(aa: float, bb: float, zz: float) -> float:
        key = (aa, bb, zz)
        if key not in psi_cache:
            psi_cache[key] = tricomi_u(aa, bb, zz)
        return psi_cache[key]

    pf_cache: dict[tuple[int, int, int], list[tuple[int, int, float]]] = {}
    alphas = (alpha1, alpha2, alpha3)

    try:
        terms = []
        for n in range(mx):
            for i1 in range(n + 1):
                for i2 in range(n - i1 + 1):
                    for k in range(mw):
                        for k1 in range(k + 1):
                            lcoef = (
                                log(comb(n, i1)) + log(comb(n - i1, i2))
                                + log(comb(k, k1))
                                + _log_pow(r.beta + 1.0, n - i1 - i2)
                                + _log_pow(r.qx, n) + _log_pow(r.qw, k)
                                - lgamma(n + 1) - lgamma(k + 1)
                                + my * log(r.by) + lgamma(my + i1) - lgamma(my)
                                + mz * log(r.bz) + lgamma(mz + i2) - lgamma(mz)
                                + mz * log(r.bz) + lgamma(mz + k1) - lgamma(mz)
                                - (my + i1 + mz + i2) * log(r.qx)
                                - (mz + k1) * log(r.qw)
                            )
                            mults = (mz + k1, mz + i2, my + i1)
                            if mults not in pf_cache:
                                pf_cache[mults] = partial_fractions(
                                    PoleSet(tuple(zip(alphas, mults))))
                            s = n + k + 0.5
                            inner = fsum(
                                coef
                                * alphas[pi] ** (s - j)
                                * psi(s, s + 1.0 - j, mu * alphas[pi])
                                for pi, j, coef in pf_cache[mults]
                            )
                            terms.append(exp(lcoef + lgamma(s)) * inner)
        kernel = fsum(terms)
        value = a / 2.0 - a * math.sqrt(b) / (2.0 * math.sqrt(math.pi)) * kernel
        used_fallback = False
    except NearDegeneratePoles:
        value = _asep_quadrature(inputs, mod)
        used_fallback = True

    if value < -CLAMP_TOL or value > a / 2.0 + 1e-9:
        raise NumericalInstability(f"asep_scenario_a: value {value!r} outside [0, a/2]")
    return AsepResult(value=min(a / 2.0, max(0.0, value)), used_fallback=used_fallback)
