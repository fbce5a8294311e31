"""Compile passive circuits into brickwork phase-shift schedules.

An arbitrary M x M unitary factors into a rectangular mesh of two-mode
bricks T(beta, theta) (phase beta on the first wire, transmissivity
cos(theta)) plus a final phase layer. Each brick maps to a 27-angle
schedule on the brick graph; the final phases map to theta=0 bricks and,
for the last even mode, to a 13-chain rotation schedule. Concatenating
everything yields the universal schedule for the k = M/2 + 1 layer
brickwork graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graphs import brick_graph, brickwork_graph, chain_h, universal_depth
from .iorel import PhaseSchedule, join_schedules, schedule_for
from .linalg import check_unitary

DENOM_TOL = 1e-12
TWO_PI = 2 * np.pi


class SynthesisError(RuntimeError):
    """Raised when a schedule cannot be built for the requested target."""


class SingularParameterError(SynthesisError):
    """A closed-form angle formula hit a vanishing denominator."""


@dataclass(frozen=True)
class BrickParams:
    """Brick beam-splitter parameters: beta in [0, 2pi), theta in [0, pi/2]."""

    beta: float
    theta: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi / 2 + 1e-12):
            raise ValueError(f"theta {self.theta} outside [0, pi/2]")
        if not (0.0 <= self.beta < TWO_PI + 1e-12):
            raise ValueError(f"beta {self.beta} outside [0, 2pi)")


@dataclass(frozen=True)
class PlacedBrick:
    layer: int  # 1-based mesh layer, j in [M/2]
    row: int    # 1-based brick position, i in [M-1]
    params: BrickParams


def brick_unitary(beta: float, theta: float) -> np.ndarray:
    """2x2 brick T(beta, theta)."""
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * beta)
    return np.array([[e * c, -s], [e * s, c]])


def _brick_top_mode(m: int, row: int) -> int:
    """0-based top wire of brick `row` (aligned rows first, then offset)."""
    half = m // 2
    if row <= half:
        return 2 * (row - 1)
    return 2 * (row - half) - 1


@dataclass
class SynthesisPlan:
    """Brick list plus final phase vector reconstructing the input unitary."""

    m: int
    bricks: list[PlacedBrick]
    final_phases: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """U_ps . U_{M/2} ... U_1 from the stored bricks and phases."""
        u = np.eye(self.m, dtype=complex)
        for layer in range(1, self.m // 2 + 1):
            aligned = np.eye(self.m, dtype=complex)
            offset = np.eye(self.m, dtype=complex)
            for b in self.bricks:
                if b.layer != layer:
                    continue
                t = brick_unitary(b.params.beta, b.params.theta)
                k = _brick_top_mode(self.m, b.row)
                target = aligned if b.row <= self.m // 2 else offset
                target[k : k + 2, k : k + 2] = t
            u = offset @ aligned @ u
        return np.diag(np.exp(1j * self.final_phases)) @ u

    def to_json(self) -> str:
        return json.dumps(
            {
                "M": self.m,
                "bricks": [
                    {
                        "layer": b.layer,
                        "row": b.row,
                        "beta": b.params.beta,
                        "theta": b.params.theta,
                    }
                    for b in self.bricks
                ],
                "final_phases": self.final_phases.tolist(),
            }
        )


def _null_with_right(a: complex, b: complex) -> tuple[float, float]:
    # choose (beta, theta) so that a e^{-i beta} cos(theta) - b sin(theta) = 0
    if abs(a) < DENOM_TOL:
        return 0.0, 0.0
    if abs(b) < DENOM_TOL:
        return 0.0, np.pi / 2
    return float(np.angle(a) - np.angle(b)), float(np.arctan2(abs(a), abs(b)))


def _null_with_left(a: complex, b: complex) -> tuple[float, float]:
    # choose (beta, theta) so that e^{i beta} sin(theta) a + cos(theta) b = 0
    if abs(b) < DENOM_TOL:
        return 0.0, 0.0
    if abs(a) < DENOM_TOL:
        return 0.0, np.pi / 2
    return float(np.angle(-b) - np.angle(a)), float(np.arctan2(abs(b), abs(a)))


def _embed(m: int, k: int, t: np.ndarray) -> np.ndarray:
    out = np.eye(m, dtype=complex)
    out[k : k + 2, k : k + 2] = t
    return out


def clements_decompose(u: np.ndarray) -> SynthesisPlan:
    """Factor a unitary into the rectangular brick mesh plus final phases.

    Off-diagonal elements are nulled alternately from the right (odd
    diagonals) and from the left (even diagonals); the left factors are
    then commuted through the residual phase diagonal, and the resulting
    applied-order brick sequence is packed into mesh layers by as-soon-as-
    possible scheduling on the wires.
    """
    u = check_unitary(u)
    m = u.shape[0]
    if m % 2:
        raise ValueError("mode count must be even")
    v = u.astype(complex).copy()
    right_ops: list[tuple[int, float, float]] = []
    left_ops: list[tuple[int, float, float]] = []
    for i in range(1, m):
        if i % 2 == 1:
            for j in range(i):
                r, c = m - 1 - j, i - 1 - j
                beta, theta = _null_with_right(v[r, c], v[r, c + 1])
                v = v @ _embed(m, c, brick_unitary(beta, theta)).conj().T
                right_ops.append((c, beta, theta))
        else:
            for j in range(1, i + 1):
                r, c = m + j - i - 1, j - 1
                beta, theta = _null_with_left(v[r - 1, c], v[r, c])
                v = _embed(m, r - 1, brick_unitary(beta, theta)) @ v
                left_ops.append((r - 1, beta, theta))
    phases = np.angle(np.diagonal(v)).copy()
    # commute the inverted left factors through the diagonal:
    # T(beta,theta)^dag diag = diag' T(beta',theta)
    transformed: list[tuple[int, float, float]] = []
    for k, beta, theta in reversed(left_ops):
        if theta < DENOM_TOL:
            # a theta=0 brick is a pure phase; fold it into the diagonal
            phases[k] -= beta
            transformed.append((k, 0.0, 0.0))
            continue
        psi1, psi2 = phases[k], phases[k + 1]
        beta_new = psi1 - psi2 + np.pi
        phases[k] = psi2 - beta + np.pi
        phases[k + 1] = psi2
        transformed.append((k, beta_new, theta))
    # applied order: right ops as recorded, then transformed left ops
    applied = right_ops + transformed
    # pack into mesh columns (ASAP scheduling; commuting ops act on
    # disjoint wires, so reordering within a column is exact)
    avail = np.ones(m, dtype=int)
    bricks: list[PlacedBrick] = []
    for k, beta, theta in applied:
        col = int(max(avail[k], avail[k + 1]))
        avail[k] = avail[k + 1] = col + 1
        # odd mesh columns host aligned bricks (even 0-based top wire)
        if (col % 2 == 1) != (k % 2 == 0):
            raise SynthesisError("mesh packing produced a misaligned brick")
        row = k // 2 + 1 if k % 2 == 0 else m // 2 + (k + 1) // 2
        layer = (col + 1) // 2
        bricks.append(
            PlacedBrick(layer, row, BrickParams(float(np.mod(beta, TWO_PI)), theta))
        )
    if len(bricks) != m * (m - 1) // 2 or max(b.layer for b in bricks) > m // 2:
        raise SynthesisError("mesh packing does not tile the expected rectangle")
    bricks.sort(key=lambda b: (b.layer, b.row))
    return SynthesisPlan(m, bricks, np.mod(phases, TWO_PI))


def _guard(value: float, name: str) -> float:
    if abs(value) < DENOM_TOL:
        raise SingularParameterError(f"denominator {name} vanishes")
    return value


def brick_angles_a(theta: float) -> np.ndarray:
    """Nine angles (side rails then ancilla) realizing the plain
    beam-splitter third of a brick."""
    c, s = np.cos(theta), np.sin(theta)
    d1 = _guard(1 - 0.5 * (-c + s), "1 - (sin(theta) - cos(theta))/2")
    d2 = _guard(1 - 0.5 * (c + s), "1 - (sin(theta) + cos(theta))/2")
    tans = [
        -0.5,
        -(1 - (-c + s)) / d1,
        -1 + 0.5 * (-c + s),
        -0.5 / d1,
        -0.5,
        -(1 - (c + s)) / d2,
        -1 + 0.5 * (c + s),
        -0.5 / d2,
        -s,
    ]
    return np.arctan(tans)


def brick_angles_b(theta: float, beta: float) -> np.ndarray:
    """Nine angles realizing the beam-splitter third that also carries the
    brick phase (beta on the first rail, pi on the second)."""
    c, s = np.cos(theta), np.sin(theta)
    w = np.sqrt(2) * np.sin(theta - np.pi / 4)
    c1 = -np.cos(beta) + w * np.sin(beta)
    sign = 1.0 if c1 >= 0 else -1.0
    d = _guard(np.sin(beta) + w * np.cos(beta), "sin(beta) + sqrt2 sin(theta - pi/4) cos(beta)")
    root = np.sqrt(1 + 2 * np.sin(theta - np.pi / 4) ** 2)
    d2 = _guard(1 + 0.5 * (c + s), "1 + (cos(theta) + sin(theta))/2")
    tans = [
        sign * (abs(c1) - root) / d,
        sign * (1 - d) / root,
        sign * root,
        -np.cos(beta) / d - sign * (1 - d) / (d * root),
        0.5,
        (1 + (c + s)) / d2,
        1 + 0.5 * (c + s),
        0.5 / d2,
        -s,
    ]
    return np.arctan(tans)


def _shear_l(s: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [s, 1.0]])


def _four_shear_angles(target: np.ndarray) -> np.ndarray:
    """Four teleport-step angles whose chain implements the 2x2 symplectic
    `target`: the chain is u(-s4) l(s3) u(-s2) l(s1) in shear form, and any
    unit-determinant matrix factors into four finite shears."""
    if abs(np.linalg.det(target) - 1) > 1e-9:
        raise SynthesisError("one-mode chain target must have unit determinant")
    # pick d so that (target . l(-d)) has a well-separated lower-left entry
    d = max((0.0, 1.0, -1.0), key=lambda x: abs(target[1, 0] - x * target[1, 1]))
    mp = target @ _shear_l(-d)
    b = mp[1, 0]
    if abs(b) < 1e-9:
        raise SynthesisError("degenerate one-mode chain target")
    c = (mp[1, 1] - 1.0) / b
    a = (mp[0, 0] - 1.0) / b
    return np.arctan([d, -c, b, -a])


def _side_gate_plain(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, -c, -s], [0, -1, -s, c]], dtype=float
    )


def _phase_pair_gate(beta: float) -> np.ndarray:
    # phase beta on mode 1, pi on mode 2, as a 2-mode xxpp symplectic
    cb, sb = np.cos(beta), np.sin(beta)
    return np.array(
        [[cb, 0, -sb, 0], [0, -1, 0, 0], [sb, 0, cb, 0], [0, 0, 0, -1]], dtype=float
    )


def _brick_angles_b_fallback(theta: float, beta: float) -> np.ndarray:
    """Alternative regular solution for the phase-carrying third, used when
    the closed-form branch degenerates: the second rail and the ancilla keep
    their closed forms, and the first rail's one-mode operation is solved as
    four shears."""
    from .iorel import base_vertical
    from .linalg import interleave_permutation

    c, s = np.cos(theta), np.sin(theta)
    d2 = 1 + 0.5 * (c + s)
    rail2 = np.arctan([0.5, (1 + (c + s)) / d2, 1 + 0.5 * (c + s), 0.5 / d2])
    phi_int = float(np.arctan(-s))
    target = _side_gate_plain(theta) @ _phase_pair_gate(beta)
    r = np.linalg.solve(base_vertical(phi_int).gate, target)
    p = interleave_permutation(1, 1)
    q = p.T @ r @ p  # (q1, p1, q2, p2) block order
    if np.max(np.abs(q[:2, 2:])) > 1e-9 or np.max(np.abs(q[2:, :2])) > 1e-9:
        raise SynthesisError("phase-third target does not split across the rails")
    rail1 = _four_shear_angles(q[:2, :2])
    return np.concatenate([rail1, rail2, [phi_int]])


def _angles_b_robust(theta: float, beta: float) -> np.ndarray:
    try:
        angles = brick_angles_b(theta, beta)
    except SingularParameterError:
        return _brick_angles_b_fallback(theta, beta)
    # switch branches before the closed form loses precision
    if np.max(np.abs(np.tan(angles))) > 1e3:
        return _brick_angles_b_fallback(theta, beta)
    return angles


def brick_schedule(params: BrickParams) -> PhaseSchedule:
    """27-angle schedule turning the brick graph into T(beta, theta)
    (phase-carrying third first, then two plain thirds).

    The phase-carrying third uses the closed-form angles where they are
    regular and the four-shear solution on their singular set."""
    angles = np.concatenate(
        [
            _angles_b_robust(params.theta, params.beta),
            brick_angles_a(params.theta),
            brick_angles_a(params.theta),
        ]
    )
    return schedule_for(brick_graph(), angles)


def _rotation_block(gamma: float) -> list[float]:
    # four teleport steps giving the rotation R(gamma): each step is a
    # Fourier gate times a momentum shear, and three shears make a rotation
    half = np.arctan(np.tan(gamma / 2))
    return [0.0, half, float(np.arctan(np.sin(gamma))), half]


def phase_chain_schedule(beta: float) -> PhaseSchedule:
    """12 angles on a 13-vertex chain implementing the single-mode rotation
    R(beta) exactly; rotations beyond pi/2 are split in two so every angle
    stays safely inside (-pi/2, pi/2)."""
    b = float(np.mod(beta, TWO_PI))
    if b > np.pi:
        b -= TWO_PI
    if abs(b) <= np.pi / 2:
        angles = _rotation_block(b) + [0.0] * 8
    else:
        angles = _rotation_block(b / 2) * 2 + [0.0] * 4
    return schedule_for(chain_h(13), np.asarray(angles))


def _zero_chain_schedule() -> PhaseSchedule:
    return schedule_for(chain_h(13), np.zeros(12))


def _layer_schedule(m: int, layer_bricks: dict[int, BrickParams]) -> PhaseSchedule:
    """Schedule of one unit-depth layer given brick params by row (missing
    rows default to identity bricks)."""
    ident = BrickParams(0.0, 0.0)
    parts = [brick_schedule(layer_bricks.get(row, ident)) for row in range(1, m // 2 + 1)]
    parts.append(_zero_chain_schedule())
    parts.extend(
        brick_schedule(layer_bricks.get(row, ident)) for row in range(m // 2 + 1, m)
    )
    parts.append(_zero_chain_schedule())
    return join_schedules(*parts)


def _phase_layer_schedule(m: int, final_phases: np.ndarray) -> PhaseSchedule:
    """Final layer carrying the diagonal phases: odd modes ride theta=0
    bricks of the aligned rank, even modes up to M-2 ride theta=0 bricks of
    the offset rank, and mode M gets a chain rotation."""
    parts = [
        brick_schedule(BrickParams(float(np.mod(final_phases[2 * i], TWO_PI)), 0.0))
        for i in range(m // 2)
    ]
    parts.append(_zero_chain_schedule())
    parts.extend(
        brick_schedule(BrickParams(float(np.mod(final_phases[2 * i + 1], TWO_PI)), 0.0))
        for i in range(m // 2 - 1)
    )
    parts.append(phase_chain_schedule(float(final_phases[m - 1])))
    return join_schedules(*parts)


def universal_schedule(u: np.ndarray) -> PhaseSchedule:
    """Full schedule for the k = M/2 + 1 layer brickwork graph whose
    evaluated gate is the symplectic image of u."""
    u = check_unitary(u)
    m = u.shape[0]
    if m % 2:
        raise ValueError("mode count must be even")
    plan = clements_decompose(u)
    by_layer: dict[int, dict[int, BrickParams]] = {}
    for b in plan.bricks:
        by_layer.setdefault(b.layer, {})[b.row] = b.params
    parts = [_layer_schedule(m, by_layer.get(j, {})) for j in range(1, m // 2 + 1)]
    parts.append(_phase_layer_schedule(m, plan.final_phases))
    sched = join_schedules(*parts)
    expected = brickwork_graph(m, universal_depth(m)).measured_count
    if len(sched) != expected:
        raise SynthesisError(f"schedule length {len(sched)} != {expected}")
    return sched
