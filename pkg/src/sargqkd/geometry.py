"""SARG04 state geometry and the initial Bell-diagonal states it induces.

Vectors are stored in the X eigenbasis, ``|0_x> = (1, 0)`` and
``|1_x> = (0, 1)``, so the four SARG04 states and the rotation ``R`` are
real.  The Z eigenbasis is ``|0_z> = (|0_x> + |1_x>)/sqrt(2)`` and
``|1_z> = (|0_x> - |1_x>)/sqrt(2)``; key bits and bit errors live in Z.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .entropy import BellDiag, h2, rate_one_way
from .errors import DegenerateInputError, DomainError

ALPHA = math.sin(math.pi / 8)
BETA = math.cos(math.pi / 8)

KET_0X = np.array([1.0, 0.0])
KET_1X = np.array([0.0, 1.0])
KET_0Z = np.array([1.0, 1.0]) / math.sqrt(2.0)
KET_1Z = np.array([1.0, -1.0]) / math.sqrt(2.0)
Z_BASIS = (KET_0Z, KET_1Z)

# pi/2 rotation about the Y axis: cos(pi/4) I + sin(pi/4) (|1x><0x| - |0x><1x|)
ROTATION = np.array(
    [[math.cos(math.pi / 4), -math.sin(math.pi / 4)],
     [math.sin(math.pi / 4), math.cos(math.pi / 4)]]
)

PROTOCOLS = ("bb84", "sarg1", "sarg2")

# Phase-to-bit error ratio forced on one-photon SARG04 by the filter geometry.
PHASE_FACTOR_ONE_PHOTON = 1.5


def normalize_protocol(protocol: str) -> str:
    p = str(protocol).lower().replace("-", "").replace("_", "")
    if p not in PROTOCOLS:
        raise DomainError(f"unknown protocol {protocol!r}; expected one of {PROTOCOLS}")
    return p


def rotation_power(k: int) -> np.ndarray:
    """``R**k`` for any integer ``k``; negative powers use ``R^T``.

    In the real storage basis ``R`` turns vectors by pi/4, so ``R^4 = -I``.
    That sign is a global phase on states but it is *not* harmless inside a
    superposition, so powers are never reduced modulo 4 here.
    """
    base = ROTATION if k >= 0 else ROTATION.T
    return np.linalg.matrix_power(base, abs(int(k)))


def sarg_state(m: int) -> np.ndarray:
    """``|phi_m> = R^{-m} |phi_0>`` with ``|phi_0> = cos(pi/8)|0_x> + sin(pi/8)|1_x>``.

    ``m`` is reduced modulo 4 first, which fixes the global phase of the
    four states.
    """
    return rotation_power(-(int(m) % 4)) @ np.array([BETA, ALPHA])


def filter_f() -> np.ndarray:
    """Kraus operator of Bob's successful (conclusive) filtering."""
    return np.diag([ALPHA, BETA])


def as_qubit(v, tol: float = 1e-12) -> np.ndarray:
    """Validate a normalised two-component state vector."""
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if arr.shape != (2,):
        raise DomainError("a qubit state has exactly two amplitudes")
    if abs(np.vdot(arr, arr).real - 1.0) > tol:
        raise DomainError(f"qubit state is not normalised: {v!r}")
    return arr


def initial_one_photon(e_b: float, a: float | None = None) -> BellDiag:
    """Worst-case-compatible one-photon state ``(e_b - a, a, 3e_b/2 - a)``.

    ``a`` is the Y-error fraction and must lie in ``[e_b/2, e_b]``; it
    defaults to the worst case ``e_b/2``.
    """
    if not 0.0 <= e_b < 1.0 / 3.0:
        raise DomainError(f"one-photon bit error rate must lie in [0, 1/3), got {e_b}")
    if a is None:
        a = e_b / 2.0
    if a < e_b / 2.0 - 1e-15 or a > e_b + 1e-15:
        raise DomainError(f"a={a} outside [e_b/2, e_b] for e_b={e_b}")
    return BellDiag.from_errors(e_b - a, a, PHASE_FACTOR_ONE_PHOTON * e_b - a)


def g_func(x: float) -> float:
    disc = 6.0 - 6.0 * math.sqrt(2.0) * x + 4.0 * x * x
    if disc < 0.0:
        raise DomainError(f"g(x) undefined for x={x}")
    return (3.0 - 2.0 * x + math.sqrt(disc)) / 6.0


def _check_two_photon_range(e_b: float) -> None:
    if not 0.0 <= e_b <= 1.0 / 3.0:
        raise DomainError(f"two-photon bit error rate must lie in [0, 1/3], got {e_b}")


def phase_bound_two_photon(e_b: float) -> float:
    """Closed-form ``min_x (x e_b + g(x))``: the two-photon phase error bound."""
    _check_two_photon_range(e_b)
    u = 1.0 - 3.0 * e_b
    return 0.5 - u / (2.0 * math.sqrt(2.0)) + math.sqrt(max(1.0 - u * u, 0.0) / 24.0)


def phase_bound_two_photon_search(e_b: float) -> tuple[float, float]:
    """Direct minimisation of ``x e_b + g(x)``; returns ``(value, argmin)``.

    The minimiser runs off to infinity as ``e_b -> 0``, so the search is
    done in ``theta`` with ``x = tan(theta)``, ``theta in [0, pi/2)``: a
    grid of 20001 points brackets the minimum and a bounded scalar search
    polishes it.  At ``e_b = 0`` the infimum is the ``x -> inf`` limit and
    is returned with ``argmin = inf``.
    """
    _check_two_photon_range(e_b)
    if e_b == 0.0:
        return 0.5 - math.sqrt(2.0) / 4.0, math.inf

    def f(theta: float) -> float:
        x = math.tan(theta)
        return x * e_b + g_func(x)

    thetas = np.linspace(0.0, math.pi / 2, 20001)[:-1]
    xs = np.tan(thetas)
    vals = xs * e_b + (3.0 - 2.0 * xs + np.sqrt(6.0 - 6.0 * math.sqrt(2.0) * xs + 4.0 * xs**2)) / 6.0
    i = int(np.argmin(vals))
    lo, hi = thetas[max(i - 1, 0)], thetas[min(i + 1, len(thetas) - 1)]
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    if res.fun > vals[i]:
        return float(vals[i]), float(xs[i])
    return float(res.fun), math.tan(float(res.x))


def initial_two_photon(e_b: float, a: float = 0.0) -> BellDiag:
    """Two-photon state ``(e_b - a, a, bound(e_b) - a)``; worst case is ``a = 0``."""
    _check_two_photon_range(e_b)
    if a < 0.0 or a > e_b + 1e-15:
        raise DomainError(f"a={a} outside [0, e_b] for e_b={e_b}")
    return BellDiag.from_errors(e_b - a, a, phase_bound_two_photon(e_b) - a)


def initial_bb84(e_b: float, a: float = 0.0) -> BellDiag:
    """BB84 state with equal bit and phase error rates ``e_b``."""
    if not 0.0 <= e_b <= 0.5:
        raise DomainError(f"BB84 bit error rate must lie in [0, 1/2], got {e_b}")
    if a < 0.0 or a > e_b + 1e-15:
        raise DomainError(f"a={a} outside [0, e_b] for e_b={e_b}")
    return BellDiag.from_errors(e_b - a, a, e_b - a)


def a_range(protocol: str, e_b: float) -> tuple[float, float]:
    """Admissible Y-error fractions for a protocol at bit error rate ``e_b``."""
    protocol = normalize_protocol(protocol)
    if protocol == "sarg1":
        return e_b / 2.0, e_b
    return 0.0, e_b


def initial_state(protocol: str, e_b: float, a: float | None = None) -> BellDiag:
    """Initial state for a protocol; ``a=None`` picks the two-way worst case
    (``e_b/2`` for one-photon SARG04, zero otherwise)."""
    protocol = normalize_protocol(protocol)
    if protocol == "sarg1":
        return initial_one_photon(e_b, a)
    if protocol == "sarg2":
        return initial_two_photon(e_b, 0.0 if a is None else a)
    return initial_bb84(e_b, 0.0 if a is None else a)


def worst_case_one_way_rate(protocol: str, e_b: float) -> tuple[float, float]:
    """Minimum of ``rate_one_way`` over the admissible ``a``; ``(rate, a)``.

    The rate is ``1 - H(joint)`` and the joint law is affine in ``a``, so the
    objective is convex and a bounded scalar search finds the minimum.
    """
    lo, hi = a_range(protocol, e_b)

    def f(a: float) -> float:
        return rate_one_way(initial_state(protocol, e_b, a))

    if hi - lo < 1e-15:
        return f(lo), lo
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    best = min(((res.fun, res.x), (f(lo), lo), (f(hi), hi)))
    return float(best[0]), float(best[1])


def one_way_threshold(protocol: str, bracket: tuple[float, float] = (1e-6, 0.3)) -> float:
    """Largest bit error rate with a positive worst-case one-way rate."""
    protocol = normalize_protocol(protocol)
    lo, hi = bracket

    def f(e: float) -> float:
        return worst_case_one_way_rate(protocol, e)[0]

    scan = np.linspace(lo, hi, 101)
    signs = [f(e) > 0.0 for e in scan]
    changes = sum(1 for u, v in zip(signs, signs[1:]) if u != v)
    if not signs[0]:
        return 0.0
    if changes != 1:
        raise DegenerateInputError(f"{protocol}: one-way rate changes sign {changes} times on {bracket}")
    i = signs.index(False)
    return float(brentq(f, scan[i - 1], scan[i], xtol=1e-10))


def monotonicity_conditions(e_b: float, a: float, xi: float) -> tuple[bool, bool]:
    """Sufficient conditions under which the two-way rate grows with ``a``:
    ``e_b < (1 + 4a) / (2(1 + xi))`` and ``e_b < 1/(2 xi)``."""
    if xi < 1.0:
        raise DomainError(f"xi must be >= 1, got {xi}")
    return e_b < (1.0 + 4.0 * a) / (2.0 * (1.0 + xi)), e_b < 1.0 / (2.0 * xi)


# --- arbitrary single-qubit attack, closed form and brute force ---------------

def _check_eve_matrix(E) -> np.ndarray:
    E = np.asarray(E, dtype=complex)
    if E.shape != (2, 2):
        raise DomainError("Eve's matrix must be 2x2")
    if not np.any(np.abs(E) > 0.0):
        raise DegenerateInputError("all-zero attack matrix sends nothing to Bob")
    return E


def attack_weights_closed(E) -> tuple[float, float, float, float]:
    """Unnormalised Bell weights ``(p_I, p_X, p_Y, p_Z)`` produced by an
    arbitrary 2x2 operator ``E`` (entries in the storage basis)."""
    E = _check_eve_matrix(E)
    a11, a12, a21, a22 = E[0, 0], E[0, 1], E[1, 0], E[1, 1]
    d = abs(a11 - a22) ** 2
    p_i = 0.5 * abs(a11 + a22) ** 2
    p_x = 0.25 * (abs(a12 + a21) ** 2 + d)
    p_y = 0.25 * (((5 * a12 - 3 * a21) * np.conj(a12) + (-3 * a12 + 5 * a21) * np.conj(a21)).real + d)
    p_z = abs(a12) ** 2 + abs(a21) ** 2 + 0.5 * d
    return float(p_i), float(p_x), float(p_y), float(p_z)


def bell_basis_z() -> dict[str, np.ndarray]:
    """Bell vectors on A (x) B in the Z basis, keyed by the Pauli error they
    represent relative to ``|Phi+>``."""
    z0, z1 = KET_0Z, KET_1Z
    s = 1.0 / math.sqrt(2.0)
    return {
        "I": s * (np.kron(z0, z0) + np.kron(z1, z1)),
        "Z": s * (np.kron(z0, z0) - np.kron(z1, z1)),
        "X": s * (np.kron(z0, z1) + np.kron(z1, z0)),
        "Y": s * (np.kron(z0, z1) - np.kron(z1, z0)),
    }


def attack_weights_brute(E) -> tuple[float, float, float, float]:
    """Same weights by explicit construction of
    ``sum_k P((F R^-k E R^k)_B |Psi>)`` with
    ``|Psi> = |0_z>|phi_0> + |1_z>|phi_1>`` and projection on the Bell basis."""
    E = _check_eve_matrix(E)
    F = filter_f()
    rho = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        op = F @ rotation_power(-k) @ E @ rotation_power(k)
        psi = np.kron(KET_0Z, op @ sarg_state(0)) + np.kron(KET_1Z, op @ sarg_state(1))
        rho += np.outer(psi, psi.conj())
    bell = bell_basis_z()
    w = {key: float(np.vdot(v, rho @ v).real) for key, v in bell.items()}
    return w["I"], w["X"], w["Y"], w["Z"]


def bit_rate_from_weights(w) -> float:
    """Normalised bit error rate from unnormalised ``(p_I, p_X, p_Y, p_Z)``."""
    total = sum(w)
    if total <= 0.0:
        raise DegenerateInputError("zero total weight")
    return (w[1] + w[2]) / total


__all__ = [
    "ALPHA", "BETA", "ROTATION", "Z_BASIS", "PROTOCOLS",
    "normalize_protocol", "rotation_power", "sarg_state", "filter_f", "as_qubit",
    "initial_one_photon", "g_func", "phase_bound_two_photon",
    "phase_bound_two_photon_search", "initial_two_photon", "initial_bb84",
    "initial_state", "a_range", "worst_case_one_way_rate", "one_way_threshold",
    "monotonicity_conditions", "attack_weights_closed", "attack_weights_brute", "bell_basis_z",
    "bit_rate_from_weights", "h2",
]
