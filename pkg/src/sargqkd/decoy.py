"""Decoy-state key rates and secure distances under a realistic device model.

The source emits phase-randomised coherent states of mean photon number
``mu``.  An ``n``-photon pulse reaches and fires Bob's detector with
probability ``eta_n = 1 - (1 - eta)^n``, where ``eta`` folds fibre loss and
detector efficiency together.  Detector misalignment ``e_detector =
sin^2(theta)`` and dark counts ``p_dark`` set the error rates.  With
infinitely many decoys the per-photon yields ``Y_n`` and error rates
``e_n`` are known exactly, so the key rate follows from them directly.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .entropy import BellDiag, cond_entropy_z_given_x, h2
from .errors import DegenerateInputError, DomainError
from .geometry import phase_bound_two_photon, sarg_state

DECOY_PROTOCOLS = ("bb84", "sarg04")
ONE_PHOTON_INSECURE = {"bb84": 0.25, "sarg04": 1.0 / 3.0}
TWO_PHOTON_INSECURE = (3.0 - math.sqrt(2.0)) / 7.0
MU_CEILING = 2.5
MU_GRID_STEP = 1e-3


def normalize_decoy_protocol(protocol: str) -> str:
    p = str(protocol).lower().replace("-", "").replace("_", "")
    if p == "sarg":
        p = "sarg04"
    if p not in DECOY_PROTOCOLS:
        raise DomainError(f"unknown protocol {protocol!r}; expected one of {DECOY_PROTOCOLS}")
    return p


@dataclass(frozen=True)
class ChannelParams:
    """Fibre and detector parameters.

    Attributes
    ----------
    alpha : float
        Fibre loss in dB/km.
    eta_bob : float
        Transmittance of Bob's optics times detector efficiency.
    e_detector : float
        Misalignment error probability, ``sin^2`` of the misalignment angle.
    p_dark : float
        Dark-count probability per detection window.
    f_ec : float
        Error-correction inefficiency (1 is the Shannon limit).
    """

    alpha: float
    eta_bob: float
    e_detector: float
    p_dark: float
    f_ec: float = 1.0

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        for name in ("eta_bob", "e_detector", "p_dark"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        if not self.f_ec >= 1.0:
            raise DomainError(f"f_ec must be at least 1, got {self.f_ec}")

    def replace(self, **changes) -> "ChannelParams":
        d = asdict(self)
        d.update(changes)
        return ChannelParams(**d)

    @property
    def theta(self) -> float:
        return math.asin(math.sqrt(self.e_detector))


def eta(params: ChannelParams, length_km: float) -> float:
    """Overall transmittance ``10^(-alpha l / 10) * eta_bob``."""
    if length_km < 0.0:
        raise DomainError(f"distance must be nonnegative, got {length_km}")
    return 10.0 ** (-params.alpha * length_km / 10.0) * params.eta_bob


def eta_n(eta_value: float, n: int) -> float:
    """Probability that at least one of ``n`` photons is detected."""
    if n < 0:
        raise DomainError(f"photon number must be nonnegative, got {n}")
    if n == 0:
        return 0.0
    return -math.expm1(n * math.log1p(-eta_value)) if eta_value < 1.0 else 1.0


def length_from_eta(params: ChannelParams, eta_value: float) -> float:
    """Inverse of :func:`eta`."""
    if not 0.0 < eta_value <= params.eta_bob:
        raise DomainError(f"transmittance {eta_value} not reachable with eta_bob={params.eta_bob}")
    return -10.0 / params.alpha * math.log10(eta_value / params.eta_bob)


# --- SARG04 detection geometry ----------------------------------------------

def detector_model_probs(theta: float, signal_present: bool = True) -> tuple[float, float, float]:
    """``(conclusive, correct, incorrect)`` probabilities of SARG04 decoding.

    With a signal, Alice picks a set ``{phi_m, phi_{m+1}}`` and a state in
    it; Bob measures in ``{phi_0, phi_2}`` or ``{phi_1, phi_3}`` rotated by
    ``theta`` and is conclusive when his outcome is orthogonal to one state
    of the announced set.  Everything is averaged by direct enumeration.
    Without a signal (dark count) the click is a fair coin in a random
    basis.
    """
    if not signal_present:
        return 0.5, 0.25, 0.25
    c, s = math.cos(theta), math.sin(theta)
    tilt = np.array([[c, -s], [s, c]])
    bob = [tilt @ sarg_state(k) for k in range(4)]
    # basis b in {0, 1} measures {phi_b, phi_{b+2}}
    conclusive = correct = incorrect = 0.0
    for m in range(4):
        pair = (m, (m + 1) % 4)
        for sent in pair:
            other = pair[1] if sent == pair[0] else pair[0]
            psi = sarg_state(sent)
            for basis in range(2):
                for outcome in (basis, basis + 2):
                    prob = 0.125 * 0.5 * float(np.dot(bob[outcome], psi)) ** 2
                    # conclusive when the ideal outcome rules out one set member
                    rules_out = [q for q in pair if abs(np.dot(sarg_state(outcome), sarg_state(q))) < 1e-12]
                    if len(rules_out) != 1:
                        continue
                    conclusive += prob
                    if rules_out[0] == other:
                        correct += prob
                    else:
                        incorrect += prob
    return conclusive, correct, incorrect


# --- yields, gains and error rates ---------------------------------------------

def yield_and_error(protocol: str, n: int, params: ChannelParams,
                    length_km: float) -> tuple[float, float]:
    """``(Y_n, e_n)`` for ``n``-photon pulses; ``e_n = 1/2`` when ``Y_n = 0``."""
    protocol = normalize_decoy_protocol(protocol)
    en = eta_n(eta(params, length_km), n)
    pd, ed = params.p_dark, params.e_detector
    if protocol == "bb84":
        y = 0.5 * (en + (1.0 - en) * pd)
    else:
        y = en * (0.5 * ed + 0.25) + (1.0 - en) * pd * 0.5
    err = en * ed * 0.5 + (1.0 - en) * pd * 0.25
    if y <= 0.0:
        return 0.0, 0.5
    return y, err / y


def overall_gain_qber(protocol: str, mu: float, params: ChannelParams,
                      length_km: float) -> tuple[float, float]:
    """Closed-form ``(Q_mu, E_mu)`` for a Poisson source."""
    protocol = normalize_decoy_protocol(protocol)
    if mu < 0.0:
        raise DomainError(f"mu must be nonnegative, got {mu}")
    et = eta(params, length_km)
    x = math.exp(-et * mu)
    one_minus = -math.expm1(-et * mu)
    pd, ed = params.p_dark, params.e_detector
    signal = 0.5 if protocol == "bb84" else 0.5 * ed + 0.25
    q = 0.5 * pd * x + signal * one_minus
    if q <= 0.0:
        raise DegenerateInputError("overall gain is zero; the error rate is undefined")
    eq = 0.25 * pd * x + 0.5 * ed * one_minus
    return q, eq / q


def overall_gain_qber_series(protocol: str, mu: float, params: ChannelParams,
                             length_km: float, n_max: int = 60) -> tuple[float, float]:
    """``(Q_mu, E_mu)`` by summing photon numbers up to ``n_max``."""
    q = eq = 0.0
    log_mu = math.log(mu) if mu > 0 else -math.inf
    for n in range(n_max + 1):
        weight = math.exp(-mu + n * log_mu - math.lgamma(n + 1)) if mu > 0 else float(n == 0)
        y, e = yield_and_error(protocol, n, params, length_km)
        q += weight * y
        eq += weight * y * e
    if q <= 0.0:
        raise DegenerateInputError("overall gain is zero")
    return q, eq / q


def poisson(mu: float, n: int) -> float:
    return math.exp(-mu) * mu**n / math.factorial(n)


@dataclass(frozen=True)
class RateReport:
    """Everything computed at one operating point.

    ``rate`` is the raw lower bound (it may be negative, or ``-inf`` when
    the pessimistic single-photon gain vanishes); ``rate_clamped`` is
    ``max(rate, 0)`` for plotting.
    """

    protocol: str
    mu: float
    distance_km: float
    q_mu: float
    e_mu: float
    q1: float
    e1: float
    q2: float
    e2: float
    ep1: float
    ep2: float
    rate: float
    method: str = "decoy"

    @property
    def rate_clamped(self) -> float:
        return max(self.rate, 0.0)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["rate_clamped"] = self.rate_clamped
        return d


def _sarg_one_photon_term(e1: float) -> tuple[float, float]:
    """``(1 - H(Z|X), e_p)`` of the worst one-photon state; zero beyond 1/3."""
    if e1 >= 1.0 / 3.0:
        return 0.0, 1.5 * e1
    state = BellDiag.from_errors(e1 / 2.0, e1 / 2.0, e1)
    return max(0.0, 1.0 - cond_entropy_z_given_x(state)), 1.5 * e1


def _sarg_two_photon_term(e2: float) -> tuple[float, float]:
    """``(1 - h(e_p2), e_p2)``; zero once ``e2`` reaches the attack bound."""
    if e2 >= TWO_PHOTON_INSECURE or e2 > 1.0 / 3.0:
        return 0.0, 0.5
    ep2 = phase_bound_two_photon(e2)
    if ep2 >= 0.5:
        return 0.0, ep2
    return max(0.0, 1.0 - h2(ep2)), ep2


def rate_decoy(protocol: str, mu: float, params: ChannelParams, length_km: float,
               two_photon: bool = True) -> RateReport:
    """Infinite-decoy key rate per pulse.

    BB84 keeps the single-photon term only.  SARG04 adds the two-photon
    term (disable with ``two_photon=False``); each photon-number term is
    dropped once its error rate reaches the point where that part is
    insecure.
    """
    protocol = normalize_decoy_protocol(protocol)
    if not mu > 0.0:
        raise DomainError(f"mu must be positive, got {mu}")
    q, e = overall_gain_qber(protocol, mu, params, length_km)
    y1, e1 = yield_and_error(protocol, 1, params, length_km)
    y2, e2 = yield_and_error(protocol, 2, params, length_km)
    q1, q2 = y1 * poisson(mu, 1), y2 * poisson(mu, 2)
    rate = -q * params.f_ec * h2(e)
    if protocol == "bb84":
        ep1, ep2 = e1, e2
        if e1 < 0.5:
            rate += q1 * (1.0 - h2(e1))
        q2_used = 0.0
    else:
        gain1, ep1 = _sarg_one_photon_term(e1)
        rate += q1 * gain1
        gain2, ep2 = _sarg_two_photon_term(e2)
        if two_photon:
            rate += q2 * gain2
        q2_used = q2 if two_photon else 0.0
    return RateReport(protocol, mu, length_km, q, e, q1, e1, q2_used, e2, ep1, ep2,
                      rate, "decoy" if two_photon or protocol == "bb84" else "decoy-1photon")


def rate_gllp(protocol: str, mu: float, params: ChannelParams, length_km: float) -> RateReport:
    """Key rate without decoys: every multi-photon pulse is assumed tagged
    and every error is charged to the single-photon part.

    BB84 uses ``Q_1 = Q_mu - p_multi/2``; the SARG04 analog subtracts the
    whole multi-photon probability ``p_{n>=2}``.  A non-positive ``Q_1``
    returns ``rate = -inf``.
    """
    protocol = normalize_decoy_protocol(protocol)
    if not mu > 0.0:
        raise DomainError(f"mu must be positive, got {mu}")
    q, e = overall_gain_qber(protocol, mu, params, length_km)
    p_multi = -math.expm1(-mu) - mu * math.exp(-mu)
    q1 = q - (0.5 * p_multi if protocol == "bb84" else p_multi)
    if q1 <= 0.0:
        return RateReport(protocol, mu, length_km, q, e, q1, math.nan, 0.0, math.nan,
                          math.nan, math.nan, -math.inf, "gllp")
    e1 = e * q / q1
    rate = -q * params.f_ec * h2(e)
    if protocol == "bb84":
        ep1 = e1
        if e1 < 0.5:
            rate += q1 * (1.0 - h2(e1))
    else:
        gain1, ep1 = _sarg_one_photon_term(e1)
        rate += q1 * gain1
    return RateReport(protocol, mu, length_km, q, e, q1, e1, 0.0, math.nan, ep1, math.nan,
                      rate, "gllp")


# --- optimisation over mu and distance --------------------------------------

def _decoy_rates_vector(protocol: str, mus: np.ndarray, params: ChannelParams,
                        length_km: float, two_photon: bool) -> np.ndarray:
    """Vectorised :func:`rate_decoy` over ``mu`` (``e_1``, ``e_2`` do not depend
    on ``mu``)."""
    protocol = normalize_decoy_protocol(protocol)
    et = eta(params, length_km)
    pd, ed = params.p_dark, params.e_detector
    x = np.exp(-et * mus)
    one_minus = -np.expm1(-et * mus)
    signal = 0.5 if protocol == "bb84" else 0.5 * ed + 0.25
    q = 0.5 * pd * x + signal * one_minus
    if np.any(q <= 0.0):
        raise DegenerateInputError(f"overall gain is zero at {length_km} km")
    e = (0.25 * pd * x + 0.5 * ed * one_minus) / q
    rate = -q * params.f_ec * h2(np.clip(e, 0.0, 1.0))
    y1, e1 = yield_and_error(protocol, 1, params, length_km)
    q1 = y1 * mus * np.exp(-mus)
    if protocol == "bb84":
        if e1 < 0.5:
            rate = rate + q1 * (1.0 - h2(e1))
        return rate
    rate = rate + q1 * _sarg_one_photon_term(e1)[0]
    if two_photon:
        y2, e2 = yield_and_error(protocol, 2, params, length_km)
        rate = rate + y2 * 0.5 * mus**2 * np.exp(-mus) * _sarg_two_photon_term(e2)[0]
    return rate


def _gllp_rates_vector(protocol: str, mus: np.ndarray, params: ChannelParams,
                       length_km: float) -> np.ndarray:
    return np.array([rate_gllp(protocol, float(m), params, length_km).rate for m in mus])


def optimal_mu(protocol: str, params: ChannelParams, length_km: float,
               method: str = "decoy", two_photon: bool = True,
               mu_max: float = MU_CEILING) -> tuple[float, float]:
    """``(mu, rate)`` maximising the key rate over ``mu in (0, mu_max]``.

    The decoy rate is scanned on a grid of step 1e-3 and polished with a
    bounded scalar search inside the best grid cell.  GLLP rates are scanned
    on a log-spaced grid instead: their optimum sits at ``mu`` of order
    ``eta``, far below the first point of a linear grid at long distance.
    When no rate is positive the best (non-positive) point is returned.
    """
    protocol = normalize_decoy_protocol(protocol)
    if method == "decoy":
        mus = np.arange(1, int(round(mu_max / MU_GRID_STEP)) + 1) * MU_GRID_STEP

        def f(m: float) -> float:
            return rate_decoy(protocol, m, params, length_km, two_photon).rate

        rates = _decoy_rates_vector(protocol, mus, params, length_km, two_photon)
    elif method == "gllp":
        mus = np.geomspace(1e-7, mu_max, 1201)

        def f(m: float) -> float:
            return rate_gllp(protocol, m, params, length_km).rate

        rates = _gllp_rates_vector(protocol, mus, params, length_km)
    else:
        raise DomainError(f"unknown rate method {method!r}")
    i = int(np.argmax(rates))
    lo, hi = mus[max(i - 1, 0)], mus[min(i + 1, len(mus) - 1)]
    best_mu, best = float(mus[i]), float(rates[i])
    if np.isfinite(best) and hi > lo:
        res = minimize_scalar(lambda m: -f(m), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-7})
        if -res.fun > best:
            best_mu, best = float(res.x), float(-res.fun)
    return best_mu, best


def secure_distance(protocol: str, params: ChannelParams, method: str = "decoy",
                    two_photon: bool = True, tol_km: float = 0.01,
                    max_km: float = 400.0) -> float:
    """Largest distance with a positive optimised key rate.

    Walks outward in 1 km steps until the rate stops being positive, then
    bisects the last step to ``tol_km``.  Returns 0 when there is no key
    even at zero distance.
    """
    def positive(length: float) -> bool:
        return optimal_mu(protocol, params, length, method, two_photon)[1] > 0.0

    if not positive(0.0):
        return 0.0
    # coarse outward walk: 10 km, then 1 km, then bisection
    lo = 0.0
    for step in (10.0, 1.0):
        while lo + step <= max_km and positive(lo + step):
            lo += step
    hi = min(lo + 1.0, max_km)
    if hi == lo:
        return lo
    while hi - lo > tol_km:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if positive(mid) else (lo, mid)
    return lo


@dataclass(frozen=True)
class UpperBoundDistances:
    """Distances at which the single- (and two-) photon error rates reach the
    points where those parts become insecure.  ``math.inf`` marks an
    unreachable bound."""

    one_photon_km: float
    two_photon_km: float | None
    eta_one: float

    @property
    def overall_km(self) -> float:
        return self.one_photon_km


def _eta_n_at_error(protocol: str, params: ChannelParams, target: float) -> float:
    """``eta_n`` at which ``e_n`` equals ``target`` (linear in ``eta_n``)."""
    pd, ed = params.p_dark, params.e_detector
    if protocol == "bb84":
        a_sig, a_dark = 0.5, 0.5 * pd
    else:
        a_sig, a_dark = 0.5 * ed + 0.25, 0.5 * pd
    # eta_n * (ed/2 - t a_sig) + (1 - eta_n) (pd/4 - t a_dark) = 0
    u = 0.5 * ed - target * a_sig
    v = 0.25 * pd - target * a_dark
    if u - v == 0.0:
        return math.inf
    return -v / (u - v)


def eta_one_closed_form(params: ChannelParams) -> float:
    """``p_dark / (1 - 4 e_detector + p_dark)``: the transmittance at which the
    one-photon error rate reaches its insecure value (both protocols)."""
    den = 1.0 - 4.0 * params.e_detector + params.p_dark
    if den <= 0.0:
        return math.inf
    return params.p_dark / den


def upper_bound_distance(protocol: str, params: ChannelParams) -> UpperBoundDistances:
    """Distances beyond which the photon-number parts cannot give key.

    The one-photon bound (``e_1 = 1/4`` for BB84, ``1/3`` for SARG04) uses
    the shared closed form for ``eta_1``.  SARG04 also reports where ``e_2``
    reaches ``(3 - sqrt 2)/7``.
    """
    protocol = normalize_decoy_protocol(protocol)
    eta1 = eta_one_closed_form(params)
    one = _distance_for_eta_n(params, eta1, 1)
    two = None
    if protocol == "sarg04":
        two = _distance_for_eta_n(params, _eta_n_at_error(protocol, params, TWO_PHOTON_INSECURE), 2)
    return UpperBoundDistances(one, two, eta1)


def _distance_for_eta_n(params: ChannelParams, eta_n_value: float, n: int) -> float:
    if not 0.0 < eta_n_value < 1.0 or not math.isfinite(eta_n_value):
        return math.inf
    eta_value = -math.expm1(math.log1p(-eta_n_value) / n)
    if eta_value > params.eta_bob:
        return 0.0
    return length_from_eta(params, eta_value)


def upper_bound_distance_numeric(protocol: str, params: ChannelParams, n: int,
                                 target: float, max_km: float = 1000.0) -> float:
    """Same bound by root-finding ``e_n(l) = target`` directly."""
    protocol = normalize_decoy_protocol(protocol)

    def g(length: float) -> float:
        return yield_and_error(protocol, n, params, length)[1] - target

    if g(0.0) >= 0.0:
        return 0.0
    if g(max_km) < 0.0:
        return math.inf
    return float(brentq(g, 0.0, max_km, xtol=1e-10))


__all__ = [
    "DECOY_PROTOCOLS", "ONE_PHOTON_INSECURE", "TWO_PHOTON_INSECURE", "MU_CEILING",
    "normalize_decoy_protocol", "ChannelParams", "eta", "eta_n", "length_from_eta",
    "detector_model_probs", "yield_and_error", "overall_gain_qber",
    "overall_gain_qber_series", "poisson", "RateReport", "rate_decoy", "rate_gllp",
    "optimal_mu", "secure_distance", "UpperBoundDistances", "eta_one_closed_form",
    "upper_bound_distance", "upper_bound_distance_numeric",
]
