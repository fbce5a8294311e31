"""Exact small-scale ground truth: hafnians, permanents, Gaussian
photon-pattern probabilities, and the worst-case permanent embedding.

Everything here is exponential-time by design and capped at desk scale;
it exists to pin conventions and validate the fast pipeline, not to
compete with it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import check_unitary, complex_basis, sqrtm_psd

HAFNIAN_MAX_PAIRS = 10   # largest N with A of dimension 2N
PERMANENT_MAX_DIM = 12


def hafnian(a: np.ndarray) -> complex:
    """Hafnian of a symmetric matrix of even dimension 2N, N <= 10.

    Recursive pairing of the lowest free index with every partner,
    memoized on the bitmask of free indices.
    """
    a = np.asarray(a)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if n % 2:
        raise ValueError("hafnian needs even dimension")
    if n > 2 * HAFNIAN_MAX_PAIRS:
        raise ValueError(f"dimension {n} exceeds the exact-hafnian cap")
    if n and np.max(np.abs(a - a.T)) > 1e-10 * max(1.0, np.max(np.abs(a))):
        raise ValueError("matrix is not symmetric")
    memo: dict[int, complex] = {0: 1.0 + 0.0j}

    def rec(mask: int) -> complex:
        cached = memo.get(mask)
        if cached is not None:
            return cached
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        total = 0.0 + 0.0j
        sub = rest
        while sub:
            j = (sub & -sub).bit_length() - 1
            sub ^= 1 << j
            aij = a[i, j]
            if aij != 0:
                total += aij * rec(rest ^ (1 << j))
        memo[mask] = total
        return total

    return complex(rec((1 << n) - 1))


def permanent(w: np.ndarray) -> complex:
    """Permanent by Ryser's formula with Gray-code subset iteration."""
    w = np.asarray(w)
    n = w.shape[0]
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("expected a square matrix")
    if n > PERMANENT_MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the exact-permanent cap")
    if n == 0:
        return 1.0 + 0.0j
    row_sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    prev_gray = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        bit = gray ^ prev_gray
        j = bit.bit_length() - 1
        if gray & bit:
            row_sums += w[:, j]
        else:
            row_sums -= w[:, j]
        prev_gray = gray
        parity = -1.0 if (n - bin(gray).count("1")) % 2 else 1.0
        total += parity * np.prod(row_sums)
    return complex(total)


def husimi_covariance(v: np.ndarray) -> np.ndarray:
    """Sigma_Q = S V S^dag + I/2 in the (alpha, alpha*) basis."""
    v = np.asarray(v, dtype=float)
    m = v.shape[0] // 2
    s = complex_basis(m)
    sigma = s @ v @ s.conj().T
    return sigma + np.eye(2 * m) / 2


def pattern_adjacency(v: np.ndarray) -> np.ndarray:
    """A = X (I - Sigma_Q^{-1}), the kernel matrix of the photon-pattern
    formula for the zero-mean Gaussian state with covariance v."""
    m = v.shape[0] // 2
    sigma_q = husimi_covariance(v)
    inv = np.linalg.inv(sigma_q)
    x = np.zeros((2 * m, 2 * m))
    x[:m, m:] = np.eye(m)
    x[m:, :m] = np.eye(m)
    a = x @ (np.eye(2 * m) - inv)
    defect = np.max(np.abs(a - a.T))
    if defect > 1e-8 * max(1.0, np.max(np.abs(a))):
        raise ValueError(f"pattern kernel is not symmetric (defect {defect:.3e})")
    return (a + a.T) / 2


def gbs_probability(v: np.ndarray, n) -> float:
    """Photon-pattern probability of a zero-mean Gaussian state.

    p(n) = Haf(A_sel) / (sqrt(det Sigma_Q) prod n_i!), where A_sel repeats
    the i-th and (M+i)-th rows/columns of A n_i times. Works for the ideal
    covariance G V_in G^T and for the finite-squeezing covariance with the
    additive noise term.
    """
    v = np.asarray(v, dtype=float)
    m = v.shape[0] // 2
    n = np.asarray(n, dtype=int)
    if n.shape != (m,) or np.any(n < 0):
        raise ValueError("pattern must be M non-negative occupation numbers")
    total = int(n.sum())
    if total > HAFNIAN_MAX_PAIRS:
        raise ValueError(f"pattern with {total} photons exceeds the oracle cap")
    sigma_q = husimi_covariance(v)
    vals = np.linalg.eigvalsh(sigma_q)
    if vals[0] <= 0:
        raise ValueError("Sigma_Q is not positive definite")
    sign, logdet = np.linalg.slogdet(sigma_q)
    norm = math.exp(-0.5 * logdet)
    if total == 0:
        return norm
    a = pattern_adjacency(v)
    sel = [i for i in range(m) for _ in range(n[i])]
    idx = np.array(sel + [m + i for i in sel])
    sub = a[np.ix_(idx, idx)]
    value = hafnian(sub) * norm / np.prod([math.factorial(int(k)) for k in n])
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        raise ValueError(f"pattern probability has residual imaginary part {value.imag:.3e}")
    return float(value.real)


# ---------------------------------------------------------------------------
# worst-case permanent embedding
# ---------------------------------------------------------------------------


@dataclass
class EmbeddingResult:
    """Worst-case matrix W' embedded into a circuit.

    W is the symmetric block matrix with Haf(W) = Per(W'); Y is a complex
    factor W = Y Y^T; u is an M x M unitary whose top-left N x N block is
    Y / ||Y||_2.
    """

    w_prime: np.ndarray
    w: np.ndarray
    y: np.ndarray
    u: np.ndarray
    n: int
    spectral_norm: float  # ||Y||_2


def embed_worst_case(w_prime: np.ndarray, m: int, n: int) -> EmbeddingResult:
    """Embed a {-1,0,1} matrix W' so the ideal N-photon collision-free
    output probability is proportional to Per(W')^2.

    Builds W = [[0, W' + I-padding], [transpose, 0]] of size N (even,
    N >= 2 N0), factors W = Y Y^T through the eigendecomposition with
    complex square roots of negative eigenvalues, and completes Y/||Y||_2
    to a unitary by the standard dilation, polished by a polar correction.
    """
    w_prime = np.asarray(w_prime)
    n0 = w_prime.shape[0]
    if w_prime.ndim != 2 or w_prime.shape[0] != w_prime.shape[1]:
        raise ValueError("W' must be square")
    if not np.all(np.isin(w_prime, (-1, 0, 1))):
        raise ValueError("W' entries must lie in {-1, 0, 1}")
    if n % 2 or n < 2 * n0:
        raise ValueError("embedding size must be even with N >= 2 N0")
    if m < 2 * n:
        raise ValueError("need M >= 2N to fit the dilation")
    pad = n // 2 - n0
    wi = np.zeros((n // 2, n // 2))
    wi[:n0, :n0] = w_prime
    if pad:
        wi[n0:, n0:] = np.eye(pad)
    w = np.zeros((n, n))
    w[: n // 2, n // 2 :] = wi
    w[n // 2 :, : n // 2] = wi.T

    vals, vecs = np.linalg.eigh(w)
    y = vecs.astype(complex) * np.sqrt(vals.astype(complex))
    norm = float(np.sqrt(np.max(np.abs(vals)))) if np.any(vals) else 0.0
    if norm == 0.0:
        # all-zero W: any unitary with a vanishing top-left block works
        u2 = np.zeros((2 * n, 2 * n), dtype=complex)
        u2[:n, n:] = np.eye(n)
        u2[n:, :n] = np.eye(n)
        norm = 1.0
    else:
        z = y / norm
        b = sqrtm_psd(np.eye(n) - z @ z.conj().T, clip=1e-9)
        c = sqrtm_psd(np.eye(n) - z.conj().T @ z, clip=1e-9)
        u2 = np.block([[z, b], [c, -z.conj().T]])
        # polar polish wipes the ~1e-9 unitarity defect of the clipped roots
        vv, ss, wwh = np.linalg.svd(u2)
        u2 = vv @ wwh
    u = np.eye(m, dtype=complex)
    u[: 2 * n, : 2 * n] = u2
    return EmbeddingResult(w_prime, w, y, u, n, norm)


def haf_sum_expansion_check(b: np.ndarray, c: np.ndarray, tol: float = 1e-9) -> bool:
    """Verify Haf(B + C) = sum over even-size index sets J of
    Haf(B_J) Haf(C_complement)."""
    b = np.asarray(b)
    c = np.asarray(c)
    if b.shape != c.shape or b.shape[0] > 8:
        raise ValueError("matrices must share a shape of dimension <= 8")
    dim = b.shape[0]
    lhs = hafnian(b + c)
    rhs = 0.0 + 0.0j
    for size in range(0, dim + 1, 2):
        for subset in itertools.combinations(range(dim), size):
            comp = [i for i in range(dim) if i not in subset]
            rhs += hafnian(b[np.ix_(subset, subset)]) * hafnian(c[np.ix_(comp, comp)])
    scale = max(1.0, abs(lhs))
    return bool(abs(lhs - rhs) <= tol * scale)


# ---------------------------------------------------------------------------
# truncated-Fock cross-validation oracle
# ---------------------------------------------------------------------------


def squeezed_vacuum_amplitudes(r0: float, cutoff: int) -> np.ndarray:
    """Fock amplitudes of the p-squeezed vacuum (variance e^{-2 r0}/2 along
    p): support on even numbers with amplitude
    (tanh r0)^k sqrt((2k)!) / (2^k k! sqrt(cosh r0))."""
    amps = np.zeros(cutoff + 1, dtype=complex)
    t = np.tanh(r0)
    for k in range(0, cutoff // 2 + 1):
        amps[2 * k] = t**k * math.sqrt(math.factorial(2 * k)) / (2**k * math.factorial(k))
    return amps / np.sqrt(np.cosh(r0))


def _patterns(m: int, total: int) -> list[tuple[int, ...]]:
    out = []
    for pat in itertools.product(range(total + 1), repeat=m):
        if sum(pat) == total:
            out.append(pat)
    return out


def fock_amplitude(u: np.ndarray, pattern_out, pattern_in) -> complex:
    """Transition amplitude <out| U |in> of a passive circuit:
    Per(U[out, in]) / sqrt(prod out_i! prod in_j!)."""
    rows = [i for i, k in enumerate(pattern_out) for _ in range(k)]
    cols = [j for j, k in enumerate(pattern_in) for _ in range(k)]
    if len(rows) != len(cols):
        return 0.0
    if not rows:
        return 1.0
    sub = np.asarray(u, dtype=complex)[np.ix_(rows, cols)]
    norm = math.sqrt(
        np.prod([math.factorial(k) for k in pattern_out])
        * np.prod([math.factorial(k) for k in pattern_in])
    )
    return complex(permanent(sub) / norm)


def ideal_fock_probability(u: np.ndarray, r0: float, squeezed_modes: int, n, cutoff: int = 8) -> float:
    """Probability of pattern n for squeezed vacua on the first modes sent
    through the passive circuit u, by explicit Fock expansion.

    Photon number is conserved by a passive circuit, so for a fixed
    pattern the expansion over same-total inputs is exact; `cutoff` only
    caps how large a pattern may be asked for.
    """
    u = check_unitary(u)
    m = u.shape[0]
    n = tuple(int(k) for k in n)
    total = sum(n)
    if total > cutoff:
        raise ValueError("pattern exceeds the truncation")
    amps = squeezed_vacuum_amplitudes(r0, cutoff)
    amplitude = 0.0 + 0.0j
    # photon number is conserved, so only inputs with the same total matter
    for pattern_in in _patterns(squeezed_modes, total):
        if any(k % 2 for k in pattern_in):
            continue
        weight = np.prod([amps[k] for k in pattern_in])
        if weight == 0:
            continue
        full_in = pattern_in + (0,) * (m - squeezed_modes)
        amplitude += weight * fock_amplitude(u, n, full_in)
    return float(abs(amplitude) ** 2)
