"""Quadrature input-output calculus on cluster-graph terms.

Every measurement-based computation on a cluster state induces an affine
relation r_out = G r_in + N p_anc + D m between output quadratures,
ancilla momenta (the finite-squeezing noise channel) and homodyne
outcomes. This module provides the two base relations (teleportation step
on a horizontal pair, entangling step on a vertical 3-chain), the
composition rules under graph concatenation and sum, the Bell-measurement
input coupling, and the fully assembled relation for a target circuit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graphs import GraphTerm
from .linalg import interleave_permutation, symplectic_of_unitary

SINGULAR_ANGLE_TOL = 1e-6

P_BASIS = "p"
Q_BASIS = "q"


class SingularAngleError(ValueError):
    """Angle too close to +-pi/2, where the step relation diverges."""


def _check_angles(angles: np.ndarray) -> None:
    if not np.all(np.isfinite(angles)):
        raise SingularAngleError("angles must be finite")
    dist = np.abs(np.mod(angles, np.pi) - np.pi / 2)
    bad = dist < SINGULAR_ANGLE_TOL
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise SingularAngleError(
            f"angle {angles[idx]!r} at index {idx} is within {SINGULAR_ANGLE_TOL:.0e} of +-pi/2"
        )


@dataclass(frozen=True)
class PhaseSchedule:
    """Ordered phase-shift angles with homodyne-basis tags.

    One angle per measured vertex, in the term's canonical (depth-first,
    left-to-right) measurement order. Chain-carrying modes are tagged "p",
    entangling ancillas "q".
    """

    angles: np.ndarray
    bases: tuple[str, ...]

    def __post_init__(self):
        angles = np.atleast_1d(np.asarray(self.angles, dtype=float))
        object.__setattr__(self, "angles", angles)
        if angles.ndim != 1:
            raise ValueError("angles must be a flat sequence")
        if len(self.bases) != angles.size:
            raise ValueError(
                f"{angles.size} angles but {len(self.bases)} basis tags"
            )
        if any(b not in (P_BASIS, Q_BASIS) for b in self.bases):
            raise ValueError("basis tags must be 'p' or 'q'")
        _check_angles(angles)

    def __len__(self) -> int:
        return int(self.angles.size)

    def to_json(self) -> str:
        return json.dumps({"angles": self.angles.tolist(), "bases": list(self.bases)})


def join_schedules(*parts: PhaseSchedule) -> PhaseSchedule:
    angles = np.concatenate([p.angles for p in parts]) if parts else np.zeros(0)
    return PhaseSchedule(angles, sum((p.bases for p in parts), ()))


@dataclass(frozen=True)
class IORelation:
    """Triple (G, N, D): gate, finite-squeezing noise and outcome
    displacement, each acting on xxpp quadratures of `modes` modes. N and
    D have one column per consumed measured mode."""

    gate: np.ndarray
    noise: np.ndarray
    disp: np.ndarray

    def __post_init__(self):
        gate = np.asarray(self.gate, dtype=float)
        noise = np.asarray(self.noise, dtype=float)
        disp = np.asarray(self.disp, dtype=float)
        if gate.shape[0] != gate.shape[1] or gate.shape[0] % 2:
            raise ValueError("gate must be square with even dimension")
        if noise.shape[0] != gate.shape[0] or disp.shape[0] != gate.shape[0]:
            raise ValueError("row dimension mismatch")
        if noise.shape[1] != disp.shape[1]:
            raise ValueError("noise and displacement must have equal column counts")
        object.__setattr__(self, "gate", gate)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "disp", disp)

    @property
    def modes(self) -> int:
        return self.gate.shape[0] // 2

    @property
    def cols(self) -> int:
        return self.noise.shape[1]

    def noise_gram(self) -> np.ndarray:
        g = self.noise @ self.noise.T
        return (g + g.T) / 2

    def to_json(self) -> str:
        return json.dumps(
            {
                "m": self.modes,
                "c": self.cols,
                "G": self.gate.tolist(),
                "N": self.noise.tolist(),
                "D": self.disp.tolist(),
            }
        )


def base_horizontal(phi: float) -> IORelation:
    """Single teleportation step: phase shift by phi on the carrier mode of
    a two-vertex chain, then a p-basis measurement."""
    _check_angles(np.array([phi]))
    t, s = np.tan(phi), 1.0 / np.cos(phi)
    gate = np.array([[-t, -1.0], [1.0, 0.0]])
    noise = np.array([[0.0], [1.0]])
    disp = np.array([[s], [0.0]])
    return IORelation(gate, noise, disp)


def base_vertical(phi: float) -> IORelation:
    """Entangling step on a vertical 3-chain: the middle ancilla is phase
    shifted by phi and measured in the q basis, shearing the two end modes
    together."""
    _check_angles(np.array([phi]))
    t, s = np.tan(phi), 1.0 / np.cos(phi)
    gate = np.eye(4)
    gate[2, 0] = gate[2, 1] = gate[3, 0] = gate[3, 1] = t
    noise = np.array([[0.0], [0.0], [t], [t]])
    disp = np.array([[0.0], [0.0], [s], [s]])
    return IORelation(gate, noise, disp)


def cz_pair() -> IORelation:
    """Bare two-vertex vertical chain: no measurement, the edge is just the
    CZ gate between the two interface modes."""
    gate = np.eye(4)
    gate[2, 1] = gate[3, 0] = 1.0
    empty = np.zeros((4, 0))
    return IORelation(gate, empty, empty)


def compose_concat(r1: IORelation, r2: IORelation) -> IORelation:
    """Relation of a concatenation: r2 is applied after r1."""
    if r1.modes != r2.modes:
        raise ValueError(f"mode mismatch: {r1.modes} vs {r2.modes}")
    return IORelation(
        r2.gate @ r1.gate,
        np.hstack([r2.gate @ r1.noise, r2.noise]),
        np.hstack([r2.gate @ r1.disp, r2.disp]),
    )


def compose_sum(r1: IORelation, r2: IORelation) -> IORelation:
    """Relation of a graph sum: block composition reordered into global
    xxpp via the interleave permutation."""
    m1, m2 = r1.modes, r2.modes
    p = interleave_permutation(m1, m2)
    gate = np.zeros((2 * (m1 + m2), 2 * (m1 + m2)))
    gate[: 2 * m1, : 2 * m1] = r1.gate
    gate[2 * m1 :, 2 * m1 :] = r2.gate
    noise = np.zeros((2 * (m1 + m2), r1.cols + r2.cols))
    noise[: 2 * m1, : r1.cols] = r1.noise
    noise[2 * m1 :, r1.cols :] = r2.noise
    disp = np.zeros((2 * (m1 + m2), r1.cols + r2.cols))
    disp[: 2 * m1, : r1.cols] = r1.disp
    disp[2 * m1 :, r1.cols :] = r2.disp
    return IORelation(p @ gate @ p.T, p @ noise, p @ disp)


def measurement_bases(term: GraphTerm) -> tuple[str, ...]:
    """Canonical basis tags of a term's measured vertices, in schedule order."""
    if term.kind == "chain_h":
        return (P_BASIS,) * (term.length - 1)
    if term.kind == "chain_v":
        if term.length == 2:
            return ()
        if term.length == 3:
            return (Q_BASIS,)
        raise ValueError("vertical chains are evaluable only for length 2 or 3")
    left, right = term.parts
    return measurement_bases(left) + measurement_bases(right)


def schedule_for(term: GraphTerm, angles) -> PhaseSchedule:
    """Attach the term's canonical basis tags to a flat angle list."""
    return PhaseSchedule(np.asarray(angles, dtype=float), measurement_bases(term))


def _eval_node(term: GraphTerm, angles: np.ndarray, pos: int) -> tuple[IORelation, int]:
    if term.kind == "chain_h":
        rel = base_horizontal(angles[pos])
        for i in range(1, term.length - 1):
            rel = compose_concat(rel, base_horizontal(angles[pos + i]))
        return rel, pos + term.length - 1
    if term.kind == "chain_v":
        if term.length == 2:
            return cz_pair(), pos
        if term.length == 3:
            return base_vertical(angles[pos]), pos + 1
        raise ValueError("vertical chains are evaluable only for length 2 or 3")
    left, right = term.parts
    r1, pos = _eval_node(left, angles, pos)
    r2, pos = _eval_node(right, angles, pos)
    if term.kind == "concat":
        return compose_concat(r1, r2), pos
    if term.kind == "sum":
        return compose_sum(r1, r2), pos
    raise ValueError(f"unknown term kind {term.kind!r}")


def evaluate(term: GraphTerm, schedule: PhaseSchedule) -> IORelation:
    """Fold the base relations over the term's expression tree.

    Deterministic; angles are consumed depth-first left-to-right, matching
    schedule concatenation under concat and sum.
    """
    if len(term.begin) != len(term.end):
        raise ValueError("term must have |begin| = |end| to define a relation")
    if len(schedule) != term.measured_count:
        raise ValueError(
            f"schedule length {len(schedule)} != measured vertices {term.measured_count}"
        )
    expected = measurement_bases(term)
    if schedule.bases != expected:
        raise ValueError("schedule basis tags do not match the term's measurement order")
    rel, used = _eval_node(term, schedule.angles, 0)
    assert used == len(schedule)
    return rel


def bell_coupling(m: int) -> IORelation:
    """Relation of m parallel Bell measurements teleporting an arbitrary
    m-mode input onto the cluster input ports: the gate is the identity,
    with one noise/displacement column per measured quadrature."""
    if m < 1:
        raise ValueError("mode count must be >= 1")
    eye = np.eye(m)
    noise = np.zeros((2 * m, 2 * m))
    noise[:m, :m] = -eye
    noise[m:, m:] = eye
    disp = np.block([[-eye, -eye], [-eye, eye]])
    return IORelation(np.eye(2 * m), noise, disp)


def assemble_mblo(u: np.ndarray) -> IORelation:
    """Full relation for running the circuit u measurement-based: Bell
    coupling of the input state into the universal brickwork cluster,
    followed by the synthesized schedule.

    The gate block is the exact symplectic image of u; noise and
    displacement columns accumulate the 2M Bell columns first, then the
    cluster measurements.
    """
    from .graphs import brickwork_graph, universal_depth
    from .synthesis import universal_schedule

    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    sched = universal_schedule(u)
    term = brickwork_graph(m, universal_depth(m))
    inner = evaluate(term, sched)
    gate = symplectic_of_unitary(u)
    bell = bell_coupling(m)
    return IORelation(
        gate,
        np.hstack([gate @ bell.noise, inner.noise]),
        np.hstack([gate @ bell.disp, inner.disp]),
    )
