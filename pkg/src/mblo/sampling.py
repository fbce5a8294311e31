"""Output-state assembly and easiness-regime classical sampling.

In the simulable regime the output state's phase-space quasi-probability
over coherent amplitudes is a proper Gaussian with covariance V - I/2;
drawing a phase-space point and emitting independent Poisson counts with
per-mode intensity |alpha_i|^2 = (q_i^2 + p_i^2)/2 samples the exact
photon-number distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .iorel import assemble_mblo
from .linalg import check_unitary, symplectic_of_unitary, symplectic_form

PHYSICALITY_TOL = 1e-8
SIMULABLE_MARGIN = 1e-12
_CHUNK = 4096


class NonSimulableError(ValueError):
    """The state's phase-space density is not a proper probability."""


@dataclass
class GaussianState:
    """Zero-indexed M-mode Gaussian state: mean (2M,) and covariance
    (2M, 2M) in xxpp ordering."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError("covariance must be square with even dimension")
        if mean.shape != (cov.shape[0],):
            raise ValueError("mean and covariance dimensions differ")
        defect = np.max(np.abs(cov - cov.T)) if cov.size else 0.0
        if defect > 1e-10 * max(1.0, np.max(np.abs(cov))):
            raise ValueError("covariance is not symmetric")
        cov = (cov + cov.T) / 2
        m = cov.shape[0] // 2
        # physicality: V + (i/2) Omega >= 0
        herm = cov + 0.5j * symplectic_form(m)
        lam = np.linalg.eigvalsh(herm)[0]
        if lam < -PHYSICALITY_TOL:
            raise ValueError(f"covariance is unphysical (min eigenvalue {lam:.3e})")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def modes(self) -> int:
        return self.cov.shape[0] // 2


def vacuum_state(m: int) -> GaussianState:
    return GaussianState(np.zeros(2 * m), np.eye(2 * m) / 2)


def squeezed_vacuum_state(m: int, r0: float, k: int | None = None) -> GaussianState:
    """Product of p-squeezed vacua (variance e^{-2 r0}/2 along p) on the
    first k modes, vacuum on the rest."""
    k = m if k is None else k
    if not 0 <= k <= m:
        raise ValueError("squeezed mode count out of range")
    qvar = [math.exp(2 * r0)] * k + [1.0] * (m - k)
    pvar = [math.exp(-2 * r0)] * k + [1.0] * (m - k)
    return GaussianState(np.zeros(2 * m), np.diag(qvar + pvar) / 2)


def output_state(u: np.ndarray, rho_in: GaussianState, r: float) -> GaussianState:
    """Run rho_in through the measurement-based implementation of u at
    squeezing level r: mean G mu, covariance G V_in G^T + e^{-2r}/2 N N^T.

    The outcome displacement is cancelled by feed-forward, so it never
    enters the moments.
    """
    u = check_unitary(u)
    if rho_in.modes != u.shape[0]:
        raise ValueError("input state and circuit mode counts differ")
    rel = assemble_mblo(u)
    gate = rel.gate
    cov = gate @ rho_in.cov @ gate.T + 0.5 * math.exp(-2 * r) * rel.noise_gram()
    return GaussianState(gate @ rho_in.mean, cov)


def ideal_output_state(u: np.ndarray, rho_in: GaussianState) -> GaussianState:
    gate = symplectic_of_unitary(u)
    return GaussianState(gate @ rho_in.mean, gate @ rho_in.cov @ gate.T)


def simulable(state: GaussianState) -> bool:
    """True iff V - I/2 is (strictly) positive definite, i.e. the
    phase-space density used by the sampler is a proper Gaussian."""
    shifted = state.cov - np.eye(2 * state.modes) / 2
    return bool(np.linalg.eigvalsh(shifted)[0] > SIMULABLE_MARGIN)


def _sampling_factor(state: GaussianState) -> np.ndarray:
    """Square root of V - I/2, clipping eigenvalues in [-1e-12, 0] to 0 so
    boundary-of-simulability states remain usable."""
    shifted = state.cov - np.eye(2 * state.modes) / 2
    vals, vecs = np.linalg.eigh((shifted + shifted.T) / 2)
    if vals[0] < -SIMULABLE_MARGIN:
        raise NonSimulableError(
            f"V - I/2 has eigenvalue {vals[0]:.3e} < 0; the noise Gram must dominate e^{{2r}}"
        )
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


def sample(state: GaussianState, shots: int, seed: int) -> np.ndarray:
    """Draw photon-count samples, shape (shots, M).

    Shots are generated in fixed chunks whose streams derive from
    (seed, chunk index), so results for a given (seed, shot index) do not
    depend on how the work is scheduled.
    """
    if shots < 1:
        raise ValueError("need at least one shot")
    # boundary-of-simulability states pass through the clipped factorization;
    # anything further out raises NonSimulableError
    factor = _sampling_factor(state)
    m = state.modes
    out = np.empty((shots, m), dtype=np.int64)
    for start in range(0, shots, _CHUNK):
        count = min(_CHUNK, shots - start)
        rng = np.random.default_rng([seed, start // _CHUNK])
        z = rng.standard_normal((count, 2 * m))
        x = state.mean + z @ factor.T
        intensity = (x[:, :m] ** 2 + x[:, m:] ** 2) / 2
        out[start : start + count] = rng.poisson(intensity)
    return out


def empirical_frequencies(samples: np.ndarray) -> dict[tuple[int, ...], float]:
    patterns, counts = np.unique(samples, axis=0, return_counts=True)
    total = samples.shape[0]
    return {tuple(int(v) for v in p): c / total for p, c in zip(patterns, counts)}


def distribution_tvd(empirical: dict, exact_fn, pattern_set) -> float:
    """Half-L1 distance over a finite pattern set plus the minimal
    completion for the unlisted residual mass."""
    pattern_set = [tuple(int(v) for v in p) for p in pattern_set]
    emp_mass = 0.0
    exact_mass = 0.0
    acc = 0.0
    for pat in pattern_set:
        e = float(empirical.get(pat, 0.0))
        x = float(exact_fn(pat))
        acc += abs(e - x)
        emp_mass += e
        exact_mass += x
    return 0.5 * (acc + abs(emp_mass - exact_mass))
