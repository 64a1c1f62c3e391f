"""Upper bounds on the tolerable bit error rate of SARG04.

Two kinds of bound live here.  The separability bound asks when the
Bell-diagonal state stops being entangled.  The intercept-and-resend bound
asks how few bit errors an Eve who measures every signal and resends a
fresh state can cause.

For a resent state ``sigma`` and a ``nu``-photon source, the bit errors and
the conclusive events Eve causes are linear in her POVM element ``M``:
``Tr[M N(sigma)]`` and ``Tr[M D(sigma)]``.  ``N`` and ``D`` are built by
enumerating the announced set ``k`` and Alice's bit ``j``.  The smallest
achievable error rate for one ``sigma`` is the smallest generalised
eigenvalue of the pair ``(N, D)`` on the range of ``D``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .eigen import embed, hermitian_eig, jacobi_eigh
from .errors import DegenerateInputError, DomainError
from .geometry import Z_BASIS, as_qubit, filter_f, rotation_power, sarg_state

PSEUDO_INVERSE_CUTOFF = 1e-10
TWO_PHOTON_BOUND = (3.0 - math.sqrt(2.0)) / 7.0
ONE_PHOTON_BOUND = 1.0 / 3.0
# Placed on D's null space so that those directions never win the minimum;
# every genuine generalised eigenvalue lies in [0, 1] because 0 <= N <= D.
_NULL_SHIFT = 2.0

PAULI_Z_STORED = np.array([[0.0, 1.0], [1.0, 0.0]])


# --- separability -------------------------------------------------------------

def separability_threshold(a: float) -> float:
    """Bit error rate at which the one-photon state reaches ``p_I = 1/2``."""
    if a < 0.0:
        raise DomainError(f"a must be nonnegative, got {a}")
    return 0.2 + 0.4 * a


def separability_threshold_self_consistent(ratio: float) -> float:
    """Solve ``e_b = 1/5 + 2a/5`` with ``a = ratio * e_b``."""
    if not 0.5 <= ratio <= 1.0:
        raise DomainError(f"a/e_b must lie in [1/2, 1] for one-photon SARG04, got {ratio}")
    return 0.2 / (1.0 - 0.4 * ratio)


# --- numerator and denominator operators --------------------------------------

def _kron_power(v: np.ndarray, nu: int) -> np.ndarray:
    out = v
    for _ in range(nu - 1):
        out = np.kron(out, v)
    return out


def _projector_table(nu: int) -> np.ndarray:
    """``P(|phi_{j-k}>^{(x) nu})`` indexed ``[k, j]``."""
    d = 2**nu
    table = np.zeros((4, 2, d, d))
    for k in range(4):
        for j in range(2):
            v = _kron_power(sarg_state(j - k), nu)
            table[k, j] = np.outer(v, v)
    return table


def _filter_rows() -> np.ndarray:
    """``<b_z| F R^{-k}`` as rows, indexed ``[k, b]``."""
    f = filter_f()
    rows = np.zeros((4, 2, 2))
    for k in range(4):
        op = f @ rotation_power(-k)
        for b in range(2):
            rows[k, b] = Z_BASIS[b] @ op
    return rows


_ROWS = _filter_rows()


def _check_nu(nu: int) -> int:
    if nu not in (1, 2):
        raise DomainError(f"photon number must be 1 or 2, got {nu}")
    return nu


def _weights(sigmas: np.ndarray) -> np.ndarray:
    """``|<b_z| F R^{-k} sigma>|^2`` for a batch, shape ``(n, 4, 2)``."""
    amp = np.einsum("kbi,ni->nkb", _ROWS, sigmas)
    return np.abs(amp) ** 2


def build_num_den_batch(sigmas, nu: int) -> tuple[np.ndarray, np.ndarray]:
    """``N`` and ``D`` for a batch of resent states (rows of ``sigmas``)."""
    _check_nu(nu)
    sig = np.atleast_2d(np.asarray(sigmas, dtype=complex))
    w = _weights(sig)
    proj = _projector_table(nu)
    # error when Bob decodes 1 - j; conclusive for either outcome
    err = np.stack([w[:, :, 1], w[:, :, 0]], axis=2)
    tot = w.sum(axis=2, keepdims=True).repeat(2, axis=2)
    num = np.einsum("nkj,kjab->nab", err, proj)
    den = np.einsum("nkj,kjab->nab", tot, proj)
    return num, den


def build_num_den(sigma, nu: int) -> tuple[np.ndarray, np.ndarray]:
    """Error numerator ``N`` and conclusive denominator ``D`` on Eve's
    ``nu``-photon space for the resent state ``sigma``.

    ``N = sum_{k,j} |<(1-j)_z| F R^{-k} sigma>|^2 P(|phi_{j-k}>^{(x) nu})`` and
    ``D`` is the same sum with both Bob outcomes included.
    """
    sigma = as_qubit(sigma)
    num, den = build_num_den_batch(sigma[None, :], nu)
    return num[0], den[0]


def ratio_operator_reference(m: int) -> tuple[np.ndarray, np.ndarray]:
    """The one-photon operators ``L_m`` and ``B_m`` written out explicitly."""
    p = [np.outer(sarg_state(m + i), sarg_state(m + i)) for i in range(4)]
    lm = 0.5 * p[1] + p[2] + 0.5 * p[3]
    bm = 0.5 * p[0] + p[1] + 1.5 * p[2] + p[3]
    return lm, bm


# --- generalised eigenvalues -------------------------------------------------

def generalized_eigs(num, den, cutoff: float = PSEUDO_INVERSE_CUTOFF) -> np.ndarray:
    """Generalised eigenvalues of ``(num, den)`` on the range of ``den``.

    ``den`` is diagonalised, directions with eigenvalue at most
    ``cutoff * max`` are dropped, and the compressed
    ``den^{-1/2} num den^{-1/2}`` is diagonalised.
    """
    w, v = hermitian_eig(den)
    if w[-1] <= 0.0 or w[-1] < 1e-300:
        raise DegenerateInputError("denominator operator is numerically zero")
    keep = w > cutoff * w[-1]
    wm = v[:, keep] / np.sqrt(w[keep])
    m = wm.conj().T @ np.asarray(num, dtype=complex) @ wm
    return hermitian_eig(0.5 * (m + m.conj().T))[0]


def _min_generalized_batch(num: np.ndarray, den: np.ndarray,
                           cutoff: float = PSEUDO_INVERSE_CUTOFF) -> np.ndarray:
    """Smallest generalised eigenvalue for each pair in a batch.

    Works in the real embedding, where the pseudo-inverse square root and
    the null-space projector are computed from one Jacobi decomposition.
    Null directions of ``den`` get eigenvalue ``_NULL_SHIFT``.
    """
    if np.any(np.asarray(num).imag) or np.any(np.asarray(den).imag):
        num_r, den_r = embed(num), embed(den)
    else:
        num_r, den_r = np.asarray(num).real, np.asarray(den).real
    w, v = jacobi_eigh(den_r)
    top = w[:, -1:]
    if np.any(top <= 0.0):
        raise DegenerateInputError("denominator operator is numerically zero")
    keep = w > cutoff * top
    inv_sqrt = np.where(keep, 1.0 / np.sqrt(np.where(keep, w, 1.0)), 0.0)
    half = np.einsum("nij,nj,nkj->nik", v, inv_sqrt, v)
    null = np.einsum("nij,nj,nkj->nik", v, (~keep).astype(float), v)
    m = half @ num_r @ half + _NULL_SHIFT * null
    m = 0.5 * (m + np.swapaxes(m, 1, 2))
    return jacobi_eigh(m)[0][:, 0]


def min_ber_given_state(sigma, nu: int) -> float:
    """Lowest bit error rate Eve can cause while always resending ``sigma``."""
    num, den = build_num_den(sigma, nu)
    return float(generalized_eigs(num, den)[0])


def closed_form_one_photon(c: float) -> tuple[float, float]:
    """The two one-photon eigenvalues ``(2-c)/(4-c)`` and ``(2+c)/(4+c)``."""
    if not 0.0 <= c <= 1.0:
        raise DomainError(f"c must lie in [0, 1], got {c}")
    return (2.0 - c) / (4.0 - c), (2.0 + c) / (4.0 + c)


def c_parameter(sigma) -> float:
    """``|s_0^2 + s_1^2| / (|s_0|^2 + |s_1|^2)`` with ``s_b = <b_z|sigma>``."""
    s = np.asarray(sigma, dtype=complex)
    s0, s1 = np.vdot(Z_BASIS[0], s), np.vdot(Z_BASIS[1], s)
    norm = abs(s0) ** 2 + abs(s1) ** 2
    if norm == 0.0:
        raise DegenerateInputError("zero vector has no c parameter")
    return float(abs(s0 * s0 + s1 * s1) / norm)


# --- scan over resent states ------------------------------------------------

def rot_y(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rot_z(theta: float) -> np.ndarray:
    return math.cos(theta / 2) * np.eye(2) - 1j * math.sin(theta / 2) * PAULI_Z_STORED


def resent_state(theta_y: float, theta_z: float) -> np.ndarray:
    """``R_y(theta_y) R_z(theta_z) |phi_0>``: every pure state up to phase."""
    return rot_y(theta_y) @ rot_z(theta_z) @ sarg_state(0)


def _states_batch(theta_y: np.ndarray, theta_z: np.ndarray) -> np.ndarray:
    ty, tz = np.asarray(theta_y, float).ravel(), np.asarray(theta_z, float).ravel()
    phi0 = sarg_state(0)
    cz, sz = np.cos(tz / 2), np.sin(tz / 2)
    # R_z phi0 = cos phi0 - i sin Z phi0, with Z swapping the two amplitudes
    u0 = cz * phi0[0] - 1j * sz * phi0[1]
    u1 = cz * phi0[1] - 1j * sz * phi0[0]
    cy, sy = np.cos(ty / 2), np.sin(ty / 2)
    return np.stack([cy * u0 - sy * u1, sy * u0 + cy * u1], axis=1)


def ber_grid(nu: int, grid_size: int = 256):
    """Minimum error rate on a ``grid_size x grid_size`` grid of
    ``(theta_z, theta_y)`` over ``[0, 2 pi)^2``.

    Returns ``(values, theta_z, theta_y)`` with ``values[iz, iy]``.
    """
    _check_nu(nu)
    if grid_size < 2:
        raise DomainError("grid size must be at least 2")
    th = np.arange(grid_size) * (2.0 * math.pi / grid_size)
    tz, ty = np.meshgrid(th, th, indexing="ij")
    sig = _states_batch(ty, tz)
    num, den = build_num_den_batch(sig, nu)
    vals = _min_generalized_batch(num, den)
    return vals.reshape(grid_size, grid_size), th, th


def _ber_at(nu: int, theta_y: float, theta_z: float) -> float:
    sig = _states_batch(np.array([theta_y]), np.array([theta_z]))
    num, den = build_num_den_batch(sig, nu)
    return float(_min_generalized_batch(num, den)[0])


@dataclass(frozen=True)
class StateScanResult:
    """Outcome of :func:`min_ber_over_states`."""

    ber: float
    theta_y: float
    theta_z: float

    def __iter__(self):
        return iter((self.ber, self.theta_y, self.theta_z))


def min_ber_over_states(nu: int, grid_size: int = 256, tie_tol: float = 1e-12,
                        refine_rounds: int = 2) -> StateScanResult:
    """Lowest error rate over all resent states.

    The grid minimum (ties broken by the smaller ``(theta_z, theta_y)``) is
    refined by bounded one-dimensional searches along each axis, within one
    grid cell of the node.
    """
    if grid_size < 64:
        raise DomainError(f"grid size must be at least 64, got {grid_size}")
    vals, tzs, tys = ber_grid(nu, grid_size)
    best = vals.min()
    iz, iy = np.argwhere(vals <= best + tie_tol)[0]
    tz, ty = float(tzs[iz]), float(tys[iy])
    step = 2.0 * math.pi / grid_size
    for _ in range(refine_rounds):
        res = minimize_scalar(lambda t: _ber_at(nu, ty, t), bounds=(tz - step, tz + step),
                              method="bounded", options={"xatol": 1e-10})
        if res.fun < best:
            best, tz = float(res.fun), float(res.x)
        res = minimize_scalar(lambda t: _ber_at(nu, t, tz), bounds=(ty - step, ty + step),
                              method="bounded", options={"xatol": 1e-10})
        if res.fun < best:
            best, ty = float(res.fun), float(res.x)
        step /= 4.0
    return StateScanResult(float(best), ty % (2 * math.pi), tz % (2 * math.pi))


# --- explicit strategies ----------------------------------------------------

@dataclass(frozen=True)
class EveStrategy:
    """POVM elements paired with the pure states Eve resends.

    The vacuum element (nothing resent) is implied: ``I - sum(M_i)``.
    """

    elements: tuple
    nu: int

    def __post_init__(self) -> None:
        _check_nu(self.nu)
        d = 2**self.nu
        total = np.zeros((d, d), dtype=complex)
        for m, sigma in self.elements:
            m = np.asarray(m, dtype=complex)
            if m.shape != (d, d):
                raise DomainError(f"POVM element must be {d}x{d}")
            if hermitian_eig(m)[0][0] < -1e-10:
                raise DomainError("POVM element is not positive semidefinite")
            as_qubit(sigma)
            total = total + m
        if hermitian_eig(np.eye(d) - total)[0][0] < -1e-10:
            raise DomainError("POVM elements sum to more than the identity")

    def vacuum_element(self) -> np.ndarray:
        d = 2**self.nu
        return np.eye(d) - sum(np.asarray(m, dtype=complex) for m, _ in self.elements)


def induced_ber(strategy: EveStrategy) -> float:
    """``sum Tr[M_i N(sigma_i)] / sum Tr[M_i D(sigma_i)]``."""
    errs = conc = 0.0
    for m, sigma in strategy.elements:
        num, den = build_num_den(sigma, strategy.nu)
        m = np.asarray(m, dtype=complex)
        errs += float(np.trace(m @ num).real)
        conc += float(np.trace(m @ den).real)
    if conc <= 0.0:
        raise DegenerateInputError("strategy never produces a conclusive result")
    return errs / conc


def intercept_resend_strategy() -> EveStrategy:
    """Measure in ``{phi_0, phi_2}`` or ``{phi_1, phi_3}`` at random and resend
    the outcome."""
    elements = tuple((0.5 * np.outer(sarg_state(m), sarg_state(m)), sarg_state(m))
                     for m in range(4))
    return EveStrategy(elements, 1)


def optimal_povm(nu: int = 2) -> EveStrategy:
    """Best known strategy for ``nu`` photons.

    For two photons: ``M_m = P(l+ |phi_m phi_m> + l- |phi_{m+2} phi_{m+2}>)``
    with ``l+- = (+-2 + sqrt 2)/4``, resending ``|phi_m>``.  For one photon
    the simple intercept-and-resend attack is already optimal.
    """
    _check_nu(nu)
    if nu == 1:
        return intercept_resend_strategy()
    lp, lm = (2.0 + math.sqrt(2.0)) / 4.0, (-2.0 + math.sqrt(2.0)) / 4.0
    elements = []
    for m in range(4):
        a, b = sarg_state(m), sarg_state(m + 2)
        v = lp * np.kron(a, a) + lm * np.kron(b, b)
        elements.append((np.outer(v, v), sarg_state(m)))
    return EveStrategy(tuple(elements), 2)


def two_photon_vacuum_state() -> np.ndarray:
    """``(|phi_0 phi_2> - |phi_2 phi_0>)/sqrt 2``, the antisymmetric state."""
    a, b = sarg_state(0), sarg_state(2)
    return (np.kron(a, b) - np.kron(b, a)) / math.sqrt(2.0)


__all__ = [
    "PSEUDO_INVERSE_CUTOFF", "TWO_PHOTON_BOUND", "ONE_PHOTON_BOUND",
    "separability_threshold", "separability_threshold_self_consistent",
    "build_num_den", "build_num_den_batch", "ratio_operator_reference", "generalized_eigs",
    "min_ber_given_state", "closed_form_one_photon", "c_parameter", "rot_y", "rot_z",
    "resent_state", "ber_grid", "StateScanResult", "min_ber_over_states", "EveStrategy",
    "induced_ber", "intercept_resend_strategy", "optimal_povm", "two_photon_vacuum_state",
]
