"""Finite-squeezing noise analysis: the noise Gram matrix, easiness and
hardness squeezing thresholds, TVD/fidelity bounds, Haar sweeps, and the
multiplicative-gap check against the exact oracle.

Squeezing r is the dimensionless level with quadrature variance
e^{-2r}/2; r -> infinity is the ideal cluster state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .iorel import assemble_mblo
from .linalg import check_unitary, complex_basis, haar_unitary, min_eigenvalue_sym
from .oracle import EmbeddingResult, gbs_probability, husimi_covariance

LAMBDA_FLOOR_SLOPE = 3 - 2 * math.sqrt(2)   # per-mode floor of the noise Gram
LAYER_FLOOR = 6 - 4 * math.sqrt(2)          # per unit-depth layer


def noise_gram(u: np.ndarray) -> np.ndarray:
    """Gram matrix N N^T of the fully assembled noise (Bell coupling plus
    cluster measurements). Symmetric PSD, dimension 2M x 2M."""
    rel = assemble_mblo(u)
    return rel.noise_gram()


def analytic_floor(m: int) -> float:
    """Guaranteed easiness level 0.5 ln((3 - 2 sqrt2) M + 2)."""
    return 0.5 * math.log(LAMBDA_FLOOR_SLOPE * m + 2)


def squeezing_db(r: float) -> float:
    """Convert the dimensionless level to dB: 10 log10(e^{2r})."""
    return 10 * math.log10(math.exp(2 * r))


@dataclass
class ThresholdReport:
    """Squeezing thresholds for one circuit."""

    m: int
    lambda_min: float
    r_easiness: float
    frobenius_nnt: float
    analytic_floor: float
    r_hardness: dict[float, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "M": self.m,
            "lambda_min": self.lambda_min,
            "r_easiness": self.r_easiness,
            "r_easiness_db": squeezing_db(self.r_easiness),
            "frobenius_NNt": self.frobenius_nnt,
            "analytic_floor": self.analytic_floor,
            "r_hardness": {str(k): v for k, v in self.r_hardness.items()},
        }


def easiness_threshold(u: np.ndarray, nnt: np.ndarray | None = None) -> ThresholdReport:
    """Largest r at which the output stays classically sampleable for every
    input state: r = 0.5 ln(lambda_min of the noise Gram)."""
    u = check_unitary(u)
    m = u.shape[0]
    if nnt is None:
        nnt = noise_gram(u)
    lam = min_eigenvalue_sym(nnt)
    return ThresholdReport(
        m=m,
        lambda_min=lam,
        r_easiness=0.5 * math.log(lam),
        frobenius_nnt=float(np.linalg.norm(nnt)),
        analytic_floor=analytic_floor(m),
    )


def tvd_bound(r: float, u: np.ndarray, v_in: np.ndarray, nnt: np.ndarray | None = None) -> float:
    """Upper bound on the distance to the ideal output distribution:
    e^{-r} sqrt(||N N^T||_F ||V_in^{-1}||_F / 8)."""
    if r < 0:
        raise ValueError("squeezing level must be non-negative")
    if nnt is None:
        nnt = noise_gram(u)
    v_in = np.asarray(v_in, dtype=float)
    inv = np.linalg.inv(v_in)
    return float(math.exp(-r) * math.sqrt(np.linalg.norm(nnt) * np.linalg.norm(inv) / 8))


def hardness_threshold(
    u: np.ndarray, v_in: np.ndarray, beta: float, nnt: np.ndarray | None = None
) -> float:
    """Squeezing level beyond which the output distribution is within TVD
    beta of the ideal one: 0.5 ln(||NN^T||_F ||V_in^{-1}||_F / (8 beta^2))."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if nnt is None:
        nnt = noise_gram(u)
    inv = np.linalg.inv(np.asarray(v_in, dtype=float))
    return float(0.5 * math.log(np.linalg.norm(nnt) * np.linalg.norm(inv) / (8 * beta**2)))


def gaussian_fidelity_pure(v: np.ndarray, v_id: np.ndarray) -> float:
    """Fidelity between zero-mean Gaussian states, the second pure:
    F = 1 / sqrt(det(V + V_id))."""
    sign, logdet = np.linalg.slogdet(np.asarray(v) + np.asarray(v_id))
    if sign <= 0:
        raise ValueError("V + V_id must be positive definite")
    return float(math.exp(-0.5 * logdet))


@dataclass
class SweepRecord:
    m: int
    trials: int
    r_min: float
    r_max: float
    r_mean: float


@dataclass
class SweepResult:
    seed: int
    records: list[SweepRecord]
    # per-trial rows (M, trial, r_easiness, lambda_min, frobenius) for CSV
    rows: list[tuple[int, int, float, float, float]]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "records": [
                {
                    "M": rec.m,
                    "trials": rec.trials,
                    "r_min": rec.r_min,
                    "r_max": rec.r_max,
                    "r_mean": rec.r_mean,
                }
                for rec in self.records
            ],
        }


def sweep_easiness(m_list, trials: int, seed: int) -> SweepResult:
    """Easiness-threshold statistics over Haar-random circuits.

    Deterministic for a fixed seed: the trial at (M, t) always uses the
    generator seeded by (seed, M, t), independent of execution order.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    records = []
    rows = []
    for m in m_list:
        values = []
        for t in range(trials):
            u = haar_unitary(m, seed=[seed, m, t])
            report = easiness_threshold(u)
            values.append(report.r_easiness)
            rows.append((m, t, report.r_easiness, report.lambda_min, report.frobenius_nnt))
        arr = np.array(values)
        records.append(
            SweepRecord(m, trials, float(arr.min()), float(arr.max()), float(arr.mean()))
        )
    return SweepResult(seed, records, rows)


def det_ratio_gap(sigma_q: np.ndarray, delta: np.ndarray) -> tuple[float, float]:
    """Left and right side of the determinant-ratio inequality
    |1 - sqrt(det Sigma_Q / det(Sigma_Q + delta))| <= ||delta||_F ||Sigma_Q^{-1}||_F."""
    sigma_q = np.asarray(sigma_q)
    delta = np.asarray(delta)
    _, logdet0 = np.linalg.slogdet(sigma_q)
    _, logdet1 = np.linalg.slogdet(sigma_q + delta)
    lhs = abs(1 - math.exp(0.5 * (logdet0 - logdet1)))
    rhs = float(np.linalg.norm(delta) * np.linalg.norm(np.linalg.inv(sigma_q)))
    return lhs, rhs


@dataclass
class GapCheck:
    """Result of comparing noisy and ideal pattern probabilities of a
    worst-case embedded instance against the analytic multiplicative bound."""

    gap: float | None      # |1 - p/q|, None on the zero-permanent branch
    bound: float
    p: float
    q: float
    zero_branch: bool
    scaled_p: float | None = None  # zero branch: |sqrt-ratio * Haf(B+C)|


def _squeezed_input_cov(m: int, r0: float, k: int) -> np.ndarray:
    qvar = [math.exp(2 * r0)] * k + [1.0] * (m - k)
    pvar = [math.exp(-2 * r0)] * k + [1.0] * (m - k)
    return np.diag(qvar + pvar) / 2


def worst_case_bc(
    r: float, embedding: EmbeddingResult, m: int, r0: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized kernel pieces of the embedded instance: B = W + W (block
    diagonal) and the noise correction C with B + C equal to the rescaled
    noisy pattern kernel on the collision-free outcome."""
    from .linalg import symplectic_of_unitary

    n = embedding.n
    gate = symplectic_of_unitary(embedding.u)
    v_in = _squeezed_input_cov(m, r0, n)
    v_id = gate @ v_in @ gate.T
    nnt = noise_gram(embedding.u)
    s = complex_basis(m)
    sigma_q = husimi_covariance(v_id)
    delta = 0.5 * math.exp(-2 * r) * (s @ nnt @ s.conj().T)
    inv = np.linalg.inv(sigma_q)
    core = inv @ delta @ inv @ np.linalg.inv(np.eye(2 * m) + delta @ inv)
    x = np.zeros((2 * m, 2 * m))
    x[:m, m:] = np.eye(m)
    x[m:, :m] = np.eye(m)
    sel = list(range(n)) + list(range(m, m + n))
    w2 = embedding.spectral_norm**2
    c = (w2 / math.tanh(r0)) * (x @ core)[np.ix_(sel, sel)]
    c = (c + c.T) / 2
    b = np.zeros((2 * n, 2 * n))
    b[:n, :n] = embedding.w
    b[n:, n:] = embedding.w
    return b, c


def multiplicative_gap_check(
    r: float, embedding: EmbeddingResult, m: int, r0: float = 1.0
) -> GapCheck:
    """Evaluate |1 - p(n)/q(n)| for the embedded worst-case instance and
    the analytic bound it must satisfy.

    q is the ideal N-photon collision-free probability (proportional to
    Per(W')^2), p the finite-squeezing one; the bound combines the
    determinant-ratio and hafnian-expansion estimates:
    9 (N0!)^2 N^2 ||W||_2 ||Sigma_Q^{-1}||_F^2 ||dSigma||_F / tanh(r0).
    When Per(W') = 0 the check switches to the zero-permanent branch and
    bounds the rescaled p(n) itself.
    """
    from .linalg import symplectic_of_unitary

    u = embedding.u
    if u.shape[0] != m:
        raise ValueError("embedding was built for a different mode count")
    n = embedding.n
    n0 = embedding.w_prime.shape[0]
    gate = symplectic_of_unitary(u)
    v_in = _squeezed_input_cov(m, r0, n)
    v_id = gate @ v_in @ gate.T
    nnt = noise_gram(u)
    v_noisy = v_id + 0.5 * math.exp(-2 * r) * nnt
    pattern = [1] * n + [0] * (m - n)
    q = gbs_probability(v_id, pattern)
    p = gbs_probability(v_noisy, pattern)

    s = complex_basis(m)
    delta = 0.5 * math.exp(-2 * r) * (s @ nnt @ s.conj().T)
    sigma_q = husimi_covariance(v_id)
    inv_norm = float(np.linalg.norm(np.linalg.inv(sigma_q)))
    delta_norm = float(np.linalg.norm(delta))
    w2 = embedding.spectral_norm**2  # ||W||_2 = ||Y||_2^2
    bound = (
        9
        * math.factorial(n0) ** 2
        * n**2
        * w2
        * inv_norm**2
        * delta_norm
        / math.tanh(r0)
    )
    from .oracle import permanent

    per = permanent(embedding.w_prime)
    if abs(per) > 0.5:  # integer-valued, so nonzero means >= 1
        return GapCheck(gap=abs(1 - p / q), bound=bound, p=p, q=q, zero_branch=False)
    # zero-permanent branch: |sqrt(det ratio) * Haf(B + C)| must stay small
    _, logdet0 = np.linalg.slogdet(sigma_q)
    scale = (w2 / math.tanh(r0)) ** n * math.exp(0.5 * logdet0)
    scaled_p = p * scale
    zero_bound = (1 + delta_norm * inv_norm) * (2 / 3) * bound
    return GapCheck(
        gap=None, bound=zero_bound, p=p, q=q, zero_branch=True, scaled_p=scaled_p
    )
