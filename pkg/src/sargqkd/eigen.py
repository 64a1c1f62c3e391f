"""Hermitian eigensolver by cyclic Jacobi rotations.

A complex Hermitian ``H = A + iB`` is handled through its real symmetric
embedding ``[[A, -B], [B, A]]``, whose spectrum is that of ``H`` with every
eigenvalue doubled.  Spectral functions (square roots, projectors) commute
with the embedding, so batched callers can work entirely in the real
picture; :func:`hermitian_eig` maps back to ``n`` complex eigenpairs.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError

_HERMITIAN_TOL = 1e-12


def embed(h: np.ndarray) -> np.ndarray:
    """Real symmetric ``2n x 2n`` embedding of a (batch of) Hermitian matrix."""
    h = np.asarray(h)
    a, b = h.real, h.imag
    top = np.concatenate([a, -b], axis=-1)
    bottom = np.concatenate([b, a], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def jacobi_eigh(a: np.ndarray, tol: float = 1e-13, max_sweeps: int = 60):
    """Eigen-decompose a batch of real symmetric matrices.

    Parameters
    ----------
    a : array, shape (..., n, n)
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm of every matrix is
        below ``tol`` times its full Frobenius norm.

    Returns
    -------
    w : array, shape (..., n), ascending
    v : array, shape (..., n, n); columns are eigenvectors
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[-1]
    batch = a.shape[:-2]
    a = a.reshape(-1, n, n)
    # work on matrices scaled to unit max entry so that squares cannot overflow
    amax = np.abs(a).max(axis=(1, 2))
    amax = np.where(amax > 0.0, amax, 1.0)
    a = a / amax[:, None, None]
    v = np.broadcast_to(np.eye(n), a.shape).copy()
    scale = np.maximum(np.sqrt((a * a).sum(axis=(1, 2))), np.finfo(float).tiny)
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt((a[:, off_mask] ** 2).sum(axis=1))
        if np.all(off <= tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                active = np.abs(apq) > 1e-300
                if not active.any():
                    continue
                safe = np.where(active, apq, 1.0)
                tau = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # A <- J^T A J with J = [[c, s], [-s, c]] in the (p, q) plane
                ap, aq = a[:, :, p].copy(), a[:, :, q].copy()
                a[:, :, p] = c[:, None] * ap - s[:, None] * aq
                a[:, :, q] = s[:, None] * ap + c[:, None] * aq
                ap, aq = a[:, p, :].copy(), a[:, q, :].copy()
                a[:, p, :] = c[:, None] * ap - s[:, None] * aq
                a[:, q, :] = s[:, None] * ap + c[:, None] * aq
                vp, vq = v[:, :, p].copy(), v[:, :, q].copy()
                v[:, :, p] = c[:, None] * vp - s[:, None] * vq
                v[:, :, q] = s[:, None] * vp + c[:, None] * vq
    w = np.diagonal(a, axis1=1, axis2=2) * amax[:, None]
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w.reshape(*batch, n), v.reshape(*batch, n, n)


def check_hermitian(h, tol: float = _HERMITIAN_TOL) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError("expected a square matrix")
    scale = max(1.0, float(np.abs(h).max()))
    if np.abs(h - h.conj().T).max() > tol * scale:
        raise DomainError("matrix is not Hermitian")
    return h


def hermitian_eig(h, tol: float = 1e-13):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian
    matrix.

    Real input is diagonalised directly.  Complex input goes through the
    real embedding; each eigenvalue then appears twice, as ``x + iy`` and
    ``i(x + iy)``, and the duplicate is removed by complex Gram-Schmidt.
    """
    h = check_hermitian(h)
    n = h.shape[0]
    if not np.any(h.imag):
        w, v = jacobi_eigh(h.real, tol=tol)
        return w, v.astype(complex)
    w2, v2 = jacobi_eigh(embed(h), tol=tol)
    cands = v2[:n, :] + 1j * v2[n:, :]
    # eigenvalues of the embedding come in equal pairs; group them into
    # clusters and pick half of each cluster by pivoted Gram-Schmidt
    gap = 1e-8 * max(1.0, float(np.abs(w2).max()))
    clusters, start = [], 0
    for k in range(1, 2 * n + 1):
        if k == 2 * n or w2[k] - w2[k - 1] > gap:
            clusters.append(range(start, k))
            start = k
    vecs: list[np.ndarray] = []
    for cl in clusters:
        pool = [cands[:, k].copy() for k in cl]
        for _ in range(len(cl) // 2):
            for u in vecs:
                pool = [z - np.vdot(u, z) * u for z in pool]
            norms = [np.linalg.norm(z) for z in pool]
            best = int(np.argmax(norms))
            vecs.append(pool.pop(best) / norms[best])
    if len(vecs) != n:
        raise DomainError("eigenvalue pairing of the real embedding failed")
    v = np.stack(vecs, axis=1)
    w = np.real(np.einsum("ij,ik,kj->j", v.conj(), h, v))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


__all__ = ["embed", "jacobi_eigh", "check_hermitian", "hermitian_eig"]
