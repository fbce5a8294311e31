"""Dense matrix substrate for the quadrature calculus.

Conventions used throughout the package: quadrature vectors are ordered
xxpp (all q's first, then all p's), hbar = 1, and the vacuum covariance
is I/2.
"""

from __future__ import annotations

import numpy as np

UNITARY_TOL = 1e-8


def haar_unitary(m: int, seed) -> np.ndarray:
    """Draw an m x m Haar-random unitary matrix.

    QR of a complex Ginibre matrix, with the phases of the R diagonal
    divided out so the distribution is exactly Haar rather than merely
    unitary.

    Parameters
    ----------
    m : int
        Mode count, m >= 1.
    seed : int or numpy seed-like
        Same seed gives a bit-identical matrix.
    """
    if m < 1:
        raise ValueError("mode count must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def unitarity_defect(u: np.ndarray) -> float:
    """Frobenius norm of U^dag U - I."""
    u = np.asarray(u)
    n = u.shape[0]
    return float(np.linalg.norm(u.conj().T @ u - np.eye(n)))


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("expected a square matrix")
    defect = unitarity_defect(u)
    if defect > tol:
        raise ValueError(f"matrix is not unitary (defect {defect:.3e} > {tol:.0e})")
    return u


def symplectic_form(m: int) -> np.ndarray:
    """Symplectic form Omega = [[0, I], [-I, 0]] in xxpp ordering."""
    omega = np.zeros((2 * m, 2 * m))
    omega[:m, m:] = np.eye(m)
    omega[m:, :m] = -np.eye(m)
    return omega


def symplectic_of_unitary(u: np.ndarray) -> np.ndarray:
    """Real 2m x 2m orthogonal-symplectic image [[Re U, -Im U], [Im U, Re U]].

    This is the quadrature (xxpp) action of the passive transformation U,
    i.e. a_out = U a_in.
    """
    u = check_unitary(u)
    re, im = u.real, u.imag
    return np.block([[re, -im], [im, re]])


def symplectic_defect(g: np.ndarray) -> float:
    """Frobenius norm of G Omega G^T - Omega."""
    g = np.asarray(g)
    m = g.shape[0] // 2
    omega = symplectic_form(m)
    return float(np.linalg.norm(g @ omega @ g.T - omega))


def orthogonality_defect(g: np.ndarray) -> float:
    g = np.asarray(g)
    return float(np.linalg.norm(g.T @ g - np.eye(g.shape[0])))


def interleave_permutation(m1: int, m2: int) -> np.ndarray:
    """Permutation taking (q1, p1, q2, p2) block order to (q1, q2, p1, p2).

    Used when two quadrature systems of m1 and m2 modes are stacked: the
    stacked vector carries the first system's q's and p's, then the
    second's, and this matrix reorders it into global xxpp.
    """
    if m1 < 1 or m2 < 1:
        raise ValueError("mode counts must be >= 1")
    m = m1 + m2
    src = np.concatenate(
        [
            np.arange(m1),                      # q1
            2 * m1 + np.arange(m2),             # q2
            m1 + np.arange(m1),                 # p1
            2 * m1 + m2 + np.arange(m2),        # p2
        ]
    )
    p = np.zeros((2 * m, 2 * m))
    p[np.arange(2 * m), src] = 1.0
    return p


def complex_basis(m: int) -> np.ndarray:
    """Unitary change of basis from (q, p) to (alpha, alpha*).

    S = (1/sqrt2) [[I, iI], [I, -iI]]; applied to a real covariance it
    produces the complex covariance entering the photon-pattern formulas.
    """
    if m < 1:
        raise ValueError("mode count must be >= 1")
    eye = np.eye(m)
    return np.block([[eye, 1j * eye], [eye, -1j * eye]]) / np.sqrt(2)


def min_eigenvalue_sym(a: np.ndarray, tol: float = 1e-10) -> float:
    """Smallest eigenvalue of a symmetric real matrix.

    The input is symmetrized as (A + A^T)/2 before solving; asymmetry
    beyond `tol` (relative to the largest entry) is rejected.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    defect = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if defect > tol * scale:
        raise ValueError(f"matrix is not symmetric (defect {defect:.3e})")
    sym = (a + a.T) / 2
    return float(np.linalg.eigvalsh(sym)[0])


def sqrtm_psd(a: np.ndarray, clip: float = 1e-12) -> np.ndarray:
    """Symmetric square root of a PSD (Hermitian) matrix via eigh.

    Eigenvalues in [-clip, 0] are clipped to 0; more negative values are
    rejected.
    """
    a = np.asarray(a)
    vals, vecs = np.linalg.eigh((a + a.conj().T) / 2)
    if vals[0] < -clip:
        raise ValueError(f"matrix is not PSD (min eigenvalue {vals[0]:.3e})")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T
