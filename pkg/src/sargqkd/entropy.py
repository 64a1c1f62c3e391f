"""Bell-diagonal error states and one-way key-rate entropy algebra.

A Bell-diagonal state is summarised by the probabilities of the four Pauli
errors acting on Bob's half of an EPR pair.  The bit error (X or Y) and the
phase error (Z or Y) are two dependent binary random variables; the one-way
hashing rate is ``1 - H(bit, phase)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_SUM_TOL = 1e-12
_RENORM_TOL = 1e-9


def h2(p):
    """Binary entropy in bits, with ``0 log 0 = 0``.

    Accepts a float or an array.  Values outside ``[0, 1]`` raise
    :class:`DomainError`.
    """
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"binary entropy argument outside [0, 1]: {p!r}")
    if arr.ndim == 0:
        x = float(arr)
        if x == 0.0 or x == 1.0:
            return 0.0
        return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)
    out = np.zeros_like(arr)
    inner = (arr > 0.0) & (arr < 1.0)
    x = arr[inner]
    out[inner] = -x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x)
    return out


def shannon(probs) -> float:
    """Shannon entropy (bits) of a finite distribution, zeros skipped."""
    total = 0.0
    for q in probs:
        if q > 0.0:
            total -= q * math.log2(q)
    return total


@dataclass(frozen=True)
class BellDiag:
    """Pauli-error probabilities ``(p_i, p_x, p_y, p_z)`` of an EPR ensemble.

    ``p_x`` is a pure bit flip, ``p_z`` a pure phase flip and ``p_y`` both.
    Construction checks the simplex constraints; a sum that drifts from one
    by less than 1e-9 is silently renormalised, larger drift is rejected.
    """

    p_i: float
    p_x: float
    p_y: float
    p_z: float

    def __post_init__(self) -> None:
        vals = [float(v) for v in (self.p_i, self.p_x, self.p_y, self.p_z)]
        if any(not math.isfinite(v) for v in vals):
            raise DomainError(f"non-finite probability in {vals}")
        if any(v < -_SUM_TOL or v > 1.0 + _SUM_TOL for v in vals):
            raise DomainError(f"probability outside [0, 1] in {vals}")
        vals = [min(max(v, 0.0), 1.0) for v in vals]
        total = math.fsum(vals)
        drift = abs(total - 1.0)
        if drift > _RENORM_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")
        if drift > _SUM_TOL:
            vals = [v / total for v in vals]
        for name, v in zip(("p_i", "p_x", "p_y", "p_z"), vals):
            object.__setattr__(self, name, v)

    @classmethod
    def from_errors(cls, p_x: float, p_y: float, p_z: float) -> "BellDiag":
        """Build from the three error probabilities; ``p_i`` is the remainder."""
        return cls(1.0 - p_x - p_y - p_z, p_x, p_y, p_z)

    @property
    def e_bit(self) -> float:
        return self.p_x + self.p_y

    @property
    def e_phase(self) -> float:
        return self.p_z + self.p_y

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_i, self.p_x, self.p_y, self.p_z)


@dataclass(frozen=True)
class JointErrorDist:
    """Joint law of (bit error, phase error); ``table[b, f]``."""

    table: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.table, dtype=float)
        if t.shape != (2, 2):
            raise DomainError("joint error table must be 2x2")
        if np.any(t < 0.0) or abs(t.sum() - 1.0) > _SUM_TOL:
            raise DomainError("joint error table is not a distribution")
        object.__setattr__(self, "table", t)

    @property
    def bit_marginal(self) -> tuple[float, float]:
        s = self.table.sum(axis=1)
        return float(s[0]), float(s[1])

    @property
    def phase_marginal(self) -> tuple[float, float]:
        s = self.table.sum(axis=0)
        return float(s[0]), float(s[1])

    def entropy(self) -> float:
        return shannon(self.table.ravel())

    def mutual_information(self) -> float:
        hb = h2(self.bit_marginal[1])
        hf = h2(self.phase_marginal[1])
        return max(hb + hf - self.entropy(), 0.0)


def joint_dist(s: BellDiag) -> JointErrorDist:
    return JointErrorDist(np.array([[s.p_i, s.p_z], [s.p_x, s.p_y]]))


def joint_entropy(s: BellDiag) -> float:
    return shannon(s.as_tuple())


def cond_entropy_z_given_x(s: BellDiag) -> float:
    """H(phase | bit) = H(bit, phase) - H(bit), clipped into [0, 1]."""
    v = joint_entropy(s) - h2(s.e_bit)
    return min(max(v, 0.0), 1.0)


def rate_one_way(s: BellDiag) -> float:
    """``1 - H(X) - H(Z|X)``.  Not clamped: a negative value means no key."""
    return 1.0 - h2(s.e_bit) - cond_entropy_z_given_x(s)


def rate_one_way_joint(s: BellDiag) -> float:
    """The same rate written as ``1 - H(X, Z)``."""
    return 1.0 - joint_entropy(s)


def rate_ignoring_mi(s: BellDiag) -> float:
    """``1 - H2(e_b) - H2(e_p)``, the rate with bit/phase correlations dropped."""
    return 1.0 - h2(s.e_bit) - h2(min(s.e_phase, 1.0))
