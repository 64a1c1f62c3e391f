"""Two-way entanglement distillation: B steps, P steps and threshold search.

A B step compares the bit parities of two EPR pairs and keeps the target
when they agree; a P step folds three pairs into one by XOR, trading bit
errors for fewer phase errors.  The key question is the largest initial bit
error rate for which some sequence of steps leaves a state with a positive
one-way rate ``1 - h2(t_Z) - h2(t_X)``.

Near the threshold, repeated B steps drive ``t_Z`` and the rate below the
smallest double (around 1e-400 after nine steps), so the threshold
machinery runs a log-domain copy of the evolution (:class:`LogTracker`).
It carries ``log p`` for the four Pauli probabilities, where both steps are
sums of positive monomials, and ``(log|c|, sign)`` for the Pauli characters
``c_X = 1 - 2 t_X``, ``c_Y = p_I + p_Y - p_X - p_Z`` and ``c_Z = 1 - 2 t_Z``,
which stay accurate when an error rate approaches 1/2.  With
``2 p_S = 1 + c_Z^2`` a B step maps the characters to

    c_X' = (c_X^2 + c_Y^2) / (2 p_S),  c_Y' = 2 c_X c_Y / (2 p_S),
    c_Z' = c_Z / p_S,

and a P step to

    c_X' = c_X (3 - c_X^2) / 2,  c_Y' = c_Y (3 c_Z^2 - c_Y^2) / 2,
    c_Z' = c_Z^3.

The sign of the rate is the sign of ``log(1 - h(t_X)) - log h(t_Z)``, which
stays representable long after the rate itself has underflowed.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .entropy import BellDiag, h2, rate_one_way
from .errors import DegenerateInputError, DomainError
from .geometry import initial_state, normalize_protocol, phase_bound_two_photon

MAX_STEPS = 15
CLI_MAX_STEPS = 10
_LN2 = math.log(2.0)
_MIN_SURVIVAL = 1e-15
_SCAN_POINTS = 101
_BRACKET = (1e-9, 0.3)
# Above e_b = 1/6 the two-photon phase-error bound exceeds 1/2.  A bound
# above 1/2 no longer bounds the rate from below (B steps turn a large phase
# error into a small one), so the worst-case state stops being worst-case.
_SARG2_BRACKET = (1e-9, 1.0 / 6.0)


def default_bracket(protocol: str) -> tuple[float, float]:
    """Bit error rates scanned when looking for a threshold."""
    return _SARG2_BRACKET if normalize_protocol(protocol) == "sarg2" else _BRACKET


# --- sequences ----------------------------------------------------------------

def parse_sequence(seq, max_steps: int = MAX_STEPS) -> tuple[str, ...]:
    """Normalise ``"BBP"``, ``["B", "P"]`` or ``"B,B,P"`` to a tuple of tags."""
    if isinstance(seq, str):
        tags = [c for c in seq.upper() if c not in ", "]
    else:
        tags = [str(c).upper() for c in seq]
    bad = [c for c in tags if c not in ("B", "P")]
    if bad:
        raise DomainError(f"step tags must be B or P, got {bad}")
    if len(tags) > max_steps:
        raise DomainError(f"sequence of {len(tags)} steps exceeds the cap of {max_steps}")
    return tuple(tags)


def format_sequence(seq) -> str:
    return "".join(parse_sequence(seq, max_steps=10**9)) or "-"


# --- exact steps on BellDiag ----------------------------------------------------

def survival_b(s: BellDiag) -> float:
    t = s.e_bit
    return 1.0 - 2.0 * t * (1.0 - t)


def b_step(s: BellDiag) -> tuple[BellDiag, float]:
    """One B step; returns the surviving-pair state and its survival ``p_S``."""
    p_s = survival_b(s)
    if p_s <= _MIN_SURVIVAL:
        raise DegenerateInputError(f"B step survival probability {p_s} is zero")
    p_i, p_x, p_y, p_z = s.as_tuple()
    return BellDiag(
        (p_i * p_i + p_z * p_z) / p_s,
        (p_x * p_x + p_y * p_y) / p_s,
        2.0 * p_x * p_y / p_s,
        2.0 * p_i * p_z / p_s,
    ), p_s


def p_step(s: BellDiag) -> BellDiag:
    """One P step (XOR of three pairs)."""
    p_i, p_x, p_y, p_z = s.as_tuple()
    q_x = 3 * p_i**2 * (p_x + p_y) + 6 * p_i * p_x * p_z + 3 * p_x**2 * p_y + p_x**3
    q_y = 6 * p_i * p_y * p_z + 3 * p_x * (p_y**2 + p_z**2) + 3 * p_y * p_z**2 + p_y**3
    q_z = 3 * p_i * (p_y**2 + p_z**2) + 6 * p_x * p_y * p_z + 3 * p_y**2 * p_z + p_z**3
    return BellDiag.from_errors(q_x, q_y, q_z)


def trajectory(seq, s: BellDiag) -> list[BellDiag]:
    """States before the first step and after each step."""
    states = [s]
    for i, tag in enumerate(parse_sequence(seq)):
        try:
            s = b_step(s)[0] if tag == "B" else p_step(s)
        except DegenerateInputError as exc:
            raise DegenerateInputError(str(exc), step=i) from exc
        states.append(s)
    return states


def evolve(seq, s: BellDiag) -> tuple[BellDiag, float]:
    """Apply a sequence; returns the final state and the fraction of input
    pairs that remain (``p_S/2`` per B step, ``1/3`` per P step)."""
    frac = 1.0
    for i, tag in enumerate(parse_sequence(seq)):
        if tag == "B":
            try:
                s, p_s = b_step(s)
            except DegenerateInputError as exc:
                raise DegenerateInputError(str(exc), step=i) from exc
            frac *= 0.5 * p_s
        else:
            s = p_step(s)
            frac /= 3.0
    return s, frac


# --- log-domain tracker -------------------------------------------------------

_PAULI_BITS = {"i": (0, 0), "x": (1, 0), "y": (1, 1), "z": (0, 1)}
_BITS_PAULI = {v: k for k, v in _PAULI_BITS.items()}


def _p_step_terms():
    """Monomials of the P step grouped by output error.

    Three pairs with errors ``(b_k, f_k)`` (bit, phase) give one pair with
    bit ``b_1 ^ b_2 ^ b_3`` and phase ``majority(f_1, f_2, f_3)``.  Returns
    ``{out: [(log coefficient, exponents over (i, x, y, z))]}``.
    """
    counts: dict[str, dict[tuple[int, ...], int]] = {k: {} for k in "ixyz"}
    for triple in itertools.product("ixyz", repeat=3):
        bits = [_PAULI_BITS[c] for c in triple]
        b = bits[0][0] ^ bits[1][0] ^ bits[2][0]
        f = int(bits[0][1] + bits[1][1] + bits[2][1] >= 2)
        expo = tuple(triple.count(c) for c in "ixyz")
        bucket = counts[_BITS_PAULI[(b, f)]]
        bucket[expo] = bucket.get(expo, 0) + 1
    return {k: [(math.log(n), e) for e, n in v.items()] for k, v in counts.items()}


_P_TERMS = _p_step_terms()


def _logsumexp(terms):
    out = terms[0]
    for t in terms[1:]:
        out = np.logaddexp(out, t)
    return out


@dataclass
class LogTracker:
    """Vectorised log-domain state; every field is an array of one shape.

    ``lp`` holds ``log p_I, log p_X, log p_Y, log p_Z``; these are accurate
    when an error rate is tiny.  ``lc``/``sc`` hold ``log|c|`` and the sign of
    the three Pauli characters ``c_X = 1 - 2 t_X``, ``c_Y`` and
    ``c_Z = 1 - 2 t_Z``; these are accurate when a rate is close to 1/2.
    """

    lp: tuple
    lc: tuple
    sc: tuple

    @classmethod
    def from_probs(cls, p_i, p_x, p_y, p_z) -> "LogTracker":
        p = [np.asarray(v, dtype=float) for v in (p_i, p_x, p_y, p_z)]
        p_i, p_x, p_y, p_z = p
        c = ((p_i + p_x) - (p_y + p_z), (p_i + p_y) - (p_x + p_z), (p_i + p_z) - (p_x + p_y))
        with np.errstate(divide="ignore"):
            return cls(tuple(np.log(np.maximum(v, 0.0)) for v in p),
                       tuple(np.log(np.abs(v)) for v in c),
                       tuple(np.where(v >= 0, 1.0, -1.0) for v in c))

    @classmethod
    def from_state(cls, s: BellDiag) -> "LogTracker":
        return cls.from_probs(*s.as_tuple())

    def b(self) -> "LogTracker":
        li, lx, ly, lz = self.lp
        (lcx, lcy, lcz), (sx, sy, sz) = self.lc, self.sc
        l_s = np.logaddexp(2.0 * np.logaddexp(li, lz), 2.0 * np.logaddexp(lx, ly))
        lp = (np.logaddexp(2.0 * li, 2.0 * lz) - l_s,
              np.logaddexp(2.0 * lx, 2.0 * ly) - l_s,
              _LN2 + lx + ly - l_s,
              _LN2 + li + lz - l_s)
        # 2 p_S = 1 + c_Z^2
        lden = _LN2 + l_s
        lc = (np.logaddexp(2.0 * lcx, 2.0 * lcy) - lden,
              _LN2 + lcx + lcy - lden,
              lcz - l_s)
        return LogTracker(lp, lc, (np.ones_like(sx), sx * sy, sz))

    def p(self) -> "LogTracker":
        lp_in = self.lp
        lp = []
        for out in "ixyz":
            terms = []
            for lcoef, expo in _P_TERMS[out]:
                acc = lcoef
                for k, e in enumerate(expo):
                    if e:
                        acc = acc + e * lp_in[k]
                terms.append(acc)
            lp.append(_logsumexp(terms))
        (lcx, lcy, lcz), (sx, sy, sz) = self.lc, self.sc
        cx2 = np.minimum(np.exp(2.0 * lcx), 1.0)
        v = 3.0 * np.exp(2.0 * lcz) - np.exp(2.0 * lcy)
        with np.errstate(divide="ignore"):
            lc = (lcx + np.log(3.0 - cx2) - _LN2,
                  lcy + np.log(np.abs(v)) - _LN2,
                  3.0 * lcz)
        return LogTracker(tuple(lp), lc, (sx, sy * np.where(v >= 0, 1.0, -1.0), sz))

    def select(self, mask: np.ndarray, other: "LogTracker") -> "LogTracker":
        """Elementwise ``self`` where ``mask`` else ``other``."""
        pick = lambda a, b: tuple(np.where(mask, x, y) for x, y in zip(a, b))  # noqa: E731
        return LogTracker(pick(self.lp, other.lp), pick(self.lc, other.lc),
                          pick(self.sc, other.sc))

    @staticmethod
    def stack(first: "LogTracker", second: "LogTracker", width: int) -> "LogTracker":
        """Interleave rows: row ``2k`` from ``first``, ``2k+1`` from ``second``."""
        st = lambda a, b: tuple(np.stack([x, y], axis=1).reshape(-1, width)  # noqa: E731
                                for x, y in zip(a, b))
        return LogTracker(st(first.lp, second.lp), st(first.lc, second.lc),
                          st(first.sc, second.sc))

    def apply(self, tag: str) -> "LogTracker":
        return self.b() if tag == "B" else self.p()

    def log_t_z(self) -> np.ndarray:
        return np.logaddexp(self.lp[1], self.lp[2])

    def log_t_x(self) -> np.ndarray:
        return np.logaddexp(self.lp[2], self.lp[3])


def log_one_minus_h(lc):
    """``log(1 - h((1 - c)/2))`` given ``log|c|``; accurate for tiny ``c``."""
    lc = np.asarray(lc, dtype=float)
    c = np.exp(np.minimum(lc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        cc = np.clip(c, 0.0, 1.0 - 1e-16)
        mid = np.log(((1.0 + cc) * np.log1p(cc) + (1.0 - cc) * np.log1p(-cc)) / (2.0 * _LN2))
        small = 2.0 * lc - math.log(2.0 * _LN2) + np.log1p(c * c / 6.0)
    out = np.where(c < 1e-4, small, mid)
    out = np.where(c >= 1.0, 0.0, out)
    return np.where(np.isneginf(lc), -np.inf, out)


def log_h(lt):
    """``log h2(t)`` given ``log t``; accurate when ``t`` underflows."""
    lt = np.asarray(lt, dtype=float)
    t = np.exp(lt)
    with np.errstate(divide="ignore", invalid="ignore"):
        tt = np.clip(t, 1e-300, 1.0 - 1e-16)
        direct = np.log(-tt * np.log2(tt) - (1.0 - tt) * np.log2(1.0 - tt))
        r = np.where(t > 1e-300, -np.log1p(-np.minimum(t, 0.5)) / np.maximum(t, 1e-300), 1.0)
        small = lt + np.log((-lt + (1.0 - t) * r) / _LN2)
    out = np.where(t > 1e-3, direct, small)
    out = np.where(t >= 1.0, -np.inf, out)
    return np.where(np.isneginf(lt), -np.inf, out)


def _entropy_logs(lt, lc):
    """``(log h(t), log(1 - h(t)))`` from both representations of ``t``.

    ``log t`` is trusted when ``|c| > 1/2`` (``t`` away from 1/2) and
    ``log|c|`` otherwise.
    """
    near_half = lc <= math.log(0.5)
    lh_t = log_h(lt)
    l1mh_c = log_one_minus_h(lc)
    with np.errstate(divide="ignore", invalid="ignore"):
        lh = np.where(near_half, np.log1p(-np.exp(np.minimum(l1mh_c, 0.0))), lh_t)
        l1mh = np.where(near_half, l1mh_c, np.log1p(-np.exp(np.minimum(lh_t, 0.0))))
    return lh, l1mh


def _rate_logs(tr: LogTracker):
    """``(log(1 - h(t_X)), log h(t_Z))``; the rate is their exp difference."""
    lh_z, _ = _entropy_logs(tr.log_t_z(), tr.lc[2])
    _, l1mh_x = _entropy_logs(tr.log_t_x(), tr.lc[0])
    return l1mh_x, lh_z


def _margin(tr: LogTracker) -> np.ndarray:
    a, b = _rate_logs(tr)
    return a - b


def _rate_from_logs(a, b):
    """``exp(a) - exp(b)`` without losing the sign or relative accuracy."""
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    if a > b:
        return math.exp(a) * -math.expm1(b - a)
    return -math.exp(b) * -math.expm1(a - b)


def residual_margin(seq, s: BellDiag) -> float:
    """``log(1 - h(t_X')) - log h(t_Z')``: positive exactly when the residual
    rate is positive, even when the rate itself underflows."""
    tr = LogTracker.from_state(s)
    for tag in parse_sequence(seq):
        tr = tr.apply(tag)
    return float(_margin(tr))


def residual_rate(seq, s: BellDiag) -> float:
    """``1 - h2(t_Z') - h2(t_X')`` after the sequence; mutual information is
    deliberately left out."""
    tr = LogTracker.from_state(s)
    for tag in parse_sequence(seq):
        tr = tr.apply(tag)
    return _rate_from_logs(*_rate_logs(tr))


# --- thresholds -------------------------------------------------------------

def _initial_probs(protocol: str, e):
    """Worst-case two-way initial states on an array of bit error rates."""
    e = np.asarray(e, dtype=float)
    if protocol == "sarg1":
        return 1.0 - 2.0 * e, e / 2.0, e / 2.0, e
    if protocol == "sarg2":
        u = 1.0 - 3.0 * e
        p_z = 0.5 - u / (2.0 * math.sqrt(2.0)) + np.sqrt(np.maximum(1.0 - u * u, 0.0) / 24.0)
        return 1.0 - e - p_z, e, np.zeros_like(e), p_z
    return 1.0 - 2.0 * e, e, np.zeros_like(e), e


def _margins(seqs: np.ndarray, protocol: str, e: np.ndarray) -> np.ndarray:
    """Margins for ``seqs`` (bool array, True = B, shape (n, L)) at per-row
    error rates ``e`` (shape (n, m))."""
    tr = LogTracker.from_probs(*_initial_probs(protocol, e))
    for j in range(seqs.shape[1]):
        col = seqs[:, j][:, None]
        if col.all():
            tr = tr.b()
        elif not col.any():
            tr = tr.p()
        else:
            tr = tr.b().select(col, tr.p())
    return _margin(tr)


def _scan_brackets(margins: np.ndarray, grid: np.ndarray):
    """Scan-max rule: the last positive grid point and its right neighbour.

    Rows with no positive point get ``lo = hi = 0``; rows positive at the
    right end get ``lo = hi = grid[-1]``.
    """
    pos = margins > 0.0
    any_pos = pos.any(axis=1)
    last = np.where(any_pos, pos.shape[1] - 1 - np.argmax(pos[:, ::-1], axis=1), 0)
    lo = np.where(any_pos, grid[last], 0.0)
    nxt = np.minimum(last + 1, len(grid) - 1)
    hi = np.where(any_pos, np.where(last == len(grid) - 1, grid[-1], grid[nxt]), 0.0)
    # monotone rows are positive on every grid point up to the last one
    n_pos = pos.sum(axis=1)
    monotone = ~any_pos | (n_pos == last + 1)
    return lo, hi, monotone


def _bisect(seqs: np.ndarray, protocol: str, lo: np.ndarray, hi: np.ndarray,
            tol: float) -> np.ndarray:
    lo, hi = lo.copy(), hi.copy()
    active = hi - lo > tol
    while active.any():
        idx = np.nonzero(active)[0]
        mid = 0.5 * (lo[idx] + hi[idx])
        ok = _margins(seqs[idx], protocol, mid[:, None])[:, 0] > 0.0
        lo[idx] = np.where(ok, mid, lo[idx])
        hi[idx] = np.where(ok, hi[idx], mid)
        active = hi - lo > tol
    return lo


def _encode(seqs) -> np.ndarray:
    seqs = list(seqs)
    width = len(seqs[0]) if seqs else 0
    return np.array([[t == "B" for t in q] for q in seqs], dtype=bool).reshape(len(seqs), width)


def _threshold_grid(bracket) -> np.ndarray:
    return np.linspace(bracket[0], bracket[1], _SCAN_POINTS)


def tolerable_ber_many(seqs, protocol: str, tol: float = 1e-10,
                       bracket=None) -> np.ndarray:
    """Thresholds for several sequences of one length, vectorised.

    A 101-point scan over ``bracket`` finds the last positive grid point
    (so a non-monotone rate falls back to the scan maximum), then bisection
    refines between it and its right neighbour.
    """
    protocol = normalize_protocol(protocol)
    enc = _encode(seqs)
    grid = _threshold_grid(bracket or default_bracket(protocol))
    m = _margins(enc, protocol, np.broadcast_to(grid, (enc.shape[0], grid.size)))
    lo, hi, _ = _scan_brackets(m, grid)
    return _bisect(enc, protocol, lo, hi, tol)


def tolerable_ber(seq, protocol: str, include_mi: bool = False, tol: float = 1e-10) -> float:
    """Largest initial bit error rate giving a positive residual rate.

    ``include_mi=True`` uses the full one-way rate ``1 - H(X, Z)`` of the
    evolved state instead; it is meant for short sequences (the plain float
    evolution underflows after many B steps) and mainly serves the zero-step
    cross-check against the one-way threshold.
    """
    protocol = normalize_protocol(protocol)
    seq = parse_sequence(seq)
    if not include_mi:
        return float(tolerable_ber_many([seq], protocol, tol)[0])

    def positive(e: float) -> bool:
        return rate_one_way(evolve(seq, initial_state(protocol, e))[0]) > 0.0

    grid = _threshold_grid(default_bracket(protocol))
    flags = [positive(e) for e in grid]
    if not any(flags):
        return 0.0
    i = len(flags) - 1 - flags[::-1].index(True)
    if i == len(grid) - 1:
        return float(grid[-1])
    lo, hi = grid[i], grid[i + 1]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if positive(mid) else (lo, mid)
    return float(lo)


@dataclass(frozen=True)
class SearchResult:
    """Outcome of an exhaustive sequence search."""

    sequence: tuple[str, ...]
    tolerable_ber: float
    per_length: list = field(default_factory=list, compare=False)

    @property
    def label(self) -> str:
        return format_sequence(self.sequence)


def search_best_sequence(max_steps: int, protocol: str, tie_tol: float = 1e-8,
                         tol: float = 1e-10) -> SearchResult:
    """Exhaustive search over all sequences of length 1..``max_steps``.

    Ties within ``tie_tol`` go to the shorter sequence, then to the earlier
    one in B-before-P lexicographic order.  ``per_length`` records the best
    cumulative ``(length, sequence, threshold)`` after each length, which is
    the staircase of best thresholds by maximum step count.

    The grid stage shares prefixes: all ``2^L`` sequences of length ``L``
    extend the states of length ``L - 1``.  Only sequences whose grid bracket
    can still reach the running best are refined by bisection.
    """
    protocol = normalize_protocol(protocol)
    if not 0 <= max_steps <= MAX_STEPS:
        raise DomainError(f"max_steps must lie in [0, {MAX_STEPS}], got {max_steps}")
    best_seq: tuple[str, ...] = ()
    best = tolerable_ber((), protocol, tol=tol)
    per_length = [(0, best_seq, best)]
    grid = _threshold_grid(default_bracket(protocol))
    level = LogTracker.from_probs(*(a[None, :] for a in _initial_probs(protocol, grid)))
    for length in range(1, max_steps + 1):
        # children ordered so that row index follows itertools.product("BP")
        level = LogTracker.stack(level.b(), level.p(), grid.size)
        lo, hi, _ = _scan_brackets(_margin(level), grid)
        cand = np.nonzero(hi >= best - tie_tol)[0]
        if cand.size:
            seqs = list(itertools.product("BP", repeat=length))
            enc = _encode([seqs[i] for i in cand])
            vals = _bisect(enc, protocol, lo[cand], hi[cand], tol)
            top = vals.max()
            if top > best + tie_tol:
                first = int(np.nonzero(vals >= top - tie_tol)[0][0])
                best, best_seq = float(vals[first]), tuple(seqs[cand[first]])
        per_length.append((length, best_seq, best))
    return SearchResult(best_seq, best, per_length)


# --- change of variables and monotonicity checks -------------------------------

@dataclass(frozen=True)
class TXZDelta:
    """``t_z = p_x + p_y``, ``t_x = p_y + p_z`` and ``delta = p_z - p_y``."""

    t_z: float
    t_x: float
    delta: float


def to_txz_delta(s: BellDiag) -> TXZDelta:
    return TXZDelta(s.p_x + s.p_y, s.p_y + s.p_z, s.p_z - s.p_y)


@dataclass(frozen=True)
class MonotonicityReport:
    """Step indices (1-based, counted after each step) where a check failed.

    ``bound_checked`` is False when the starting point violates the first
    growth condition; the ``1 - 2 t_Z - 2 delta`` check is then skipped.
    """

    delta_failures: tuple[int, ...]
    bound_failures: tuple[int, ...]
    bound_checked: bool

    @property
    def ok(self) -> bool:
        return not self.delta_failures and not self.bound_failures


def monotone_hypothesis(seq, s: BellDiag, tol: float = 1e-12) -> MonotonicityReport:
    """Run the delta and ``1 - 2t_Z - 2 delta`` checks along an evolution.

    ``xi`` and ``a`` are read off the initial state (``xi = t_x / t_z``,
    ``a = p_y``).  Sequences must start with a B step.
    """
    seq = parse_sequence(seq)
    if seq and seq[0] != "B":
        raise DomainError("the monotonicity argument needs a leading B step")
    v0 = to_txz_delta(s)
    e_b = v0.t_z
    xi = v0.t_x / e_b if e_b > 0 else 1.0
    cond_i = e_b < (1.0 + 4.0 * s.p_y) / (2.0 * (1.0 + max(xi, 1.0)))
    delta_fail, bound_fail = [], []
    for k, st in enumerate(trajectory(seq, s)[1:], start=1):
        v = to_txz_delta(st)
        if v.delta < -tol:
            delta_fail.append(k)
        if cond_i and 1.0 - 2.0 * v.t_z - 2.0 * v.delta < -tol:
            bound_fail.append(k)
    return MonotonicityReport(tuple(delta_fail), tuple(bound_fail), cond_i)


# --- depolarizing channel ---------------------------------------------------------

def depolarizing_ber(p: float, protocol: str) -> float:
    """Bit error rate seen by a protocol on a depolarizing channel of strength
    ``p`` (``rho -> (1 - p) rho + p I/2``)."""
    if not 0.0 <= p <= 0.75:
        raise DomainError(f"depolarizing strength must lie in [0, 3/4], got {p}")
    if normalize_protocol(protocol) == "bb84":
        return 2.0 * p / 3.0
    return 4.0 * p / (3.0 + 4.0 * p)


def depolarizing_strength(e_b: float, protocol: str) -> float:
    """Inverse of :func:`depolarizing_ber`."""
    if normalize_protocol(protocol) == "bb84":
        p = 1.5 * e_b
    else:
        if not 0.0 <= e_b < 1.0:
            raise DomainError(f"bit error rate must lie in [0, 1), got {e_b}")
        p = 3.0 * e_b / (4.0 * (1.0 - e_b))
    if not 0.0 <= p <= 0.75:
        raise DomainError(f"bit error rate {e_b} needs depolarizing strength {p} outside [0, 3/4]")
    return p


__all__ = [
    "MAX_STEPS", "CLI_MAX_STEPS", "default_bracket", "parse_sequence", "format_sequence", "b_step", "p_step",
    "survival_b", "trajectory", "evolve", "LogTracker", "log_h", "log_one_minus_h",
    "residual_margin", "residual_rate", "tolerable_ber", "tolerable_ber_many",
    "SearchResult", "search_best_sequence", "TXZDelta", "to_txz_delta",
    "MonotonicityReport", "monotone_hypothesis", "depolarizing_ber",
    "depolarizing_strength", "h2", "phase_bound_two_photon",
]
