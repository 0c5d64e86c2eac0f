"""Dense linear-algebra kernels used by the synthesis pipeline.

Everything here works on plain complex ndarrays.  The only nontrivial
routine is :func:`csd`, a cosine-sine decomposition built from one SVD
plus Householder QR factorizations, which keeps the four corner blocks
simultaneously consistent even when principal angles cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "CSDResult",
    "EigResult",
    "csd",
    "csd_sigma",
    "haar_unitary",
    "hermitian_eig",
    "nearest_unitary",
    "unitarity_defect",
    "unitary_distance",
    "unitary_eig",
]

# Entry-wise bound on |U†U - I| below which a matrix is accepted as unitary.
UNITARY_ATOL = 1e-10

# sin(theta) below this is treated as an exact zero principal angle; the
# corresponding column pairs are rebuilt jointly from the bottom-right block.
_CSD_CLUSTER_TOL = 1e-8


def unitarity_defect(u: np.ndarray) -> float:
    """Max-entry deviation of U†U from the identity."""
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    return float(np.max(np.abs(u.conj().T @ u - np.eye(d))))


def nearest_unitary(a: np.ndarray) -> np.ndarray:
    """Closest unitary in Frobenius norm (polar factor, via SVD)."""
    w, _, vh = np.linalg.svd(np.asarray(a, dtype=complex))
    return w @ vh


def unitary_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Phase-aligned Frobenius distance  min_phi ||U - e^{i phi} V||_F.

    Zero iff U = e^{i phi} V; for d x d unitaries the value lies in
    [0, sqrt(2d)].  Insensitive to global phase, which the gate
    factorizations only determine up to the explicit PHASE gate.
    Computed from the aligned difference rather than the equivalent
    sqrt(2d - 2|tr(U†V)|), whose cancellation would floor the result
    near sqrt(d * eps).
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    t = np.trace(u.conj().T @ v)
    phase = np.conj(t) / abs(t) if abs(t) > 1e-300 else 1.0
    return float(np.linalg.norm(u - phase * v, "fro"))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian, R-phases fixed."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    # Fix the gauge so the distribution is exactly Haar, not QR-biased.
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


@dataclass(frozen=True)
class EigResult:
    """Spectral data of a normal matrix: ``vectors @ diag(f(phases)) @ vectors†``."""

    phases: np.ndarray
    vectors: np.ndarray


def unitary_eig(u: np.ndarray, atol: float = UNITARY_ATOL) -> EigResult:
    """Eigen-decomposition of a unitary via a complex Schur form.

    Phases are returned ascending in (-pi, pi].  Within a degenerate
    cluster the Schur vectors are kept in their incoming column order
    (stable sort), so identical inputs give identical outputs.
    """
    u = np.asarray(u, dtype=complex)
    defect = unitarity_defect(u)
    if defect > atol:
        raise ValueError(f"matrix is not unitary (defect {defect:.3e} > {atol:.1e})")
    t, vecs = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diagonal(t))
    order = np.argsort(phases, kind="stable")
    return EigResult(phases[order], vecs[:, order])


def hermitian_eig(h: np.ndarray, atol: float = UNITARY_ATOL) -> EigResult:
    """Ascending eigen-decomposition of a Hermitian matrix (wraps eigh)."""
    h = np.asarray(h, dtype=complex)
    defect = float(np.max(np.abs(h - h.conj().T)))
    if defect > atol:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e} > {atol:.1e})")
    vals, vecs = np.linalg.eigh(h)
    return EigResult(vals, vecs)


@dataclass(frozen=True)
class CSDResult:
    """Cosine-sine factors:  U = diag(L1,L2) @ Sigma(theta) @ diag(R1,R2)†.

    ``theta`` holds the p principal angles in [0, pi/2]; Sigma is the
    real orthogonal middle factor produced by :func:`csd_sigma`.
    """

    l1: np.ndarray
    l2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    theta: np.ndarray


def csd_sigma(theta: np.ndarray, p: int, q: int) -> np.ndarray:
    """Middle CS factor: [[C, -S, 0], [S, C, 0], [0, 0, I_{q-p}]]."""
    c = np.cos(theta)
    s = np.sin(theta)
    sig = np.zeros((p + q, p + q))
    sig[:p, :p] = np.diag(c)
    sig[:p, p : 2 * p] = -np.diag(s)
    sig[p : 2 * p, :p] = np.diag(s)
    sig[p : 2 * p, p : 2 * p] = np.diag(c)
    sig[2 * p :, 2 * p :] = np.eye(q - p)
    return sig


def _phase_fixed_qr(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduced QR with the diagonal of R made real nonnegative."""
    q, r = np.linalg.qr(a)
    d = np.diagonal(r).copy()
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return q * ph, r * ph.conj()[:, None]


def _orthonormal_complement(cols: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the complement of span(cols) in C^dim."""
    k = cols.shape[1]
    if k == 0:
        return np.eye(dim, dtype=complex)
    full, _ = np.linalg.qr(cols, mode="complete")
    # Householder keeps the leading k columns spanning span(cols); re-project
    # the tail once to scrub any leakage from near-dependent inputs.
    tail = full[:, k:]
    tail = tail - cols @ (cols.conj().T @ tail)
    tail, _ = np.linalg.qr(tail)
    return tail


def csd(u: np.ndarray, p: int, q: int) -> CSDResult:
    """Cosine-sine decomposition of a (p+q) x (p+q) unitary, p <= q.

    Construction: SVD of the top-left block gives L1, C, R1 with the
    cosines descending (angles ascending).  The bottom-block columns come
    from phase-fixed Householder QR of U21@R1 and U12†@L1 -- since
    (U21 R1)†(U21 R1) = I - C² exactly for unitary input, those columns
    are already orthogonal and QR only normalizes them, inheriting
    whatever basis the SVD chose inside degenerate cosine clusters.
    Columns whose sine falls below 1e-8 are declared exact-zero angles
    and rebuilt jointly with the trailing q-p columns from the
    bottom-right block, which keeps L2/R2 consistent where the
    individual directions are not determined by U21/U12.
    """
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    if u.shape != (d, d) or d != p + q or p > q or p < 1:
        raise ValueError(f"bad partition ({p},{q}) for shape {u.shape}")
    defect = unitarity_defect(u)
    if defect > UNITARY_ATOL:
        raise ValueError(f"matrix is not unitary (defect {defect:.3e})")

    u11, u12 = u[:p, :p], u[:p, p:]
    u21, u22 = u[p:, :p], u[p:, p:]

    l1, c, r1h = np.linalg.svd(u11)
    r1 = r1h.conj().T
    c = np.clip(c, 0.0, 1.0)

    qy, ty = _phase_fixed_qr(u21 @ r1)
    s = np.clip(np.abs(np.diagonal(ty)), 0.0, 1.0)
    theta = np.arctan2(s, c)

    qx, _ = _phase_fixed_qr(u12.conj().T @ l1)
    # U12 = -L1 S R2†, so the QR direction carries an extra minus sign.
    r2_lead = -qx

    generic = s >= _CSD_CLUSTER_TOL
    theta = np.where(generic, theta, 0.0)

    l2 = np.zeros((q, q), dtype=complex)
    r2 = np.zeros((q, q), dtype=complex)
    l2[:, :p][:, generic] = qy[:, generic]
    r2[:, :p][:, generic] = r2_lead[:, generic]

    # Joint completion: remaining columns must reproduce the bottom-right
    # block, U22 = L2 diag(C, I) R2†, and any orthonormal completion of
    # the generic L2 columns works as long as R2 is slaved to it.
    cols_idx = np.flatnonzero(~generic).tolist() + list(range(p, q))
    e = u22 - (qy[:, generic] * c[generic]) @ r2_lead[:, generic].conj().T
    l2_tail = _orthonormal_complement(qy[:, generic], q)
    r2_tail = e.conj().T @ l2_tail
    # Columns of r2_tail have unit norm up to the zero-angle cutoff; a final
    # QR scrubs the O(tol²) drift without moving any direction.
    r2_tail, _ = _phase_fixed_qr(r2_tail)
    for k, idx in enumerate(cols_idx):
        l2[:, idx] = l2_tail[:, k]
        r2[:, idx] = r2_tail[:, k]

    return CSDResult(l1=l1, l2=l2, r1=r1, r2=r2, theta=theta)
