import numpy as np
import pytest

from mblo.graphs import brick_graph, brickwork_graph, chain_h, universal_depth
from mblo.iorel import evaluate, schedule_for
from mblo.linalg import haar_unitary, symplectic_of_unitary
from mblo.synthesis import (
    BrickParams,
    SingularParameterError,
    brick_angles_a,
    brick_angles_b,
    brick_schedule,
    brick_unitary,
    clements_decompose,
    phase_chain_schedule,
    universal_schedule,
)


def test_brick_params_ranges():
    with pytest.raises(ValueError):
        BrickParams(beta=0.0, theta=2.0)
    with pytest.raises(ValueError):
        BrickParams(beta=-0.1, theta=0.5)


def test_brick_angles_a_first_entry():
    # the first rail angle is arctan(-1/2) for every theta
    for theta in (0.0, 0.4, 1.2, np.pi / 2):
        assert np.tan(brick_angles_a(theta)[0]) == pytest.approx(-0.5)


def test_brick_angles_a_theta_zero_third_entry():
    assert np.tan(brick_angles_a(0.0)[2]) == pytest.approx(-1.5)


def test_brick_angles_b_singular_parameter():
    # sin(beta) + sqrt2 sin(theta - pi/4) cos(beta) = 0 at beta=0, theta=pi/4
    with pytest.raises(SingularParameterError):
        brick_angles_b(np.pi / 4, 0.0)


def test_brick_schedule_identity():
    rel = evaluate(brick_graph(), brick_schedule(BrickParams(0.0, 0.0)))
    assert np.max(np.abs(rel.gate - np.eye(4))) < 1e-12


def test_brick_schedule_pure_phase():
    beta = np.pi / 3
    rel = evaluate(brick_graph(), brick_schedule(BrickParams(beta, 0.0)))
    expected = np.array(
        [
            [np.cos(beta), 0, -np.sin(beta), 0],
            [0, 1, 0, 0],
            [np.sin(beta), 0, np.cos(beta), 0],
            [0, 0, 0, 1],
        ]
    )
    assert np.max(np.abs(rel.gate - expected)) < 1e-12


def test_brick_schedule_general():
    beta, theta = 1.2, 0.7
    rel = evaluate(brick_graph(), brick_schedule(BrickParams(beta, theta)))
    target = symplectic_of_unitary(brick_unitary(beta, theta))
    assert np.linalg.norm(rel.gate - target) < 1e-9


def test_brick_schedule_regular_on_singular_branch():
    # closed-form branch diverges here; the four-shear fallback must not
    for beta, theta in [(0.0, np.pi / 4), (np.pi, np.pi / 4), (3 * np.pi / 4, np.pi / 2)]:
        rel = evaluate(brick_graph(), brick_schedule(BrickParams(beta, theta)))
        target = symplectic_of_unitary(brick_unitary(beta, theta))
        assert np.linalg.norm(rel.gate - target) < 1e-9


def test_phase_side_factorization():
    # the phase-carrying third equals the plain third times a phase layer
    from mblo.graphs import brick_side_graph
    from mblo.iorel import evaluate as ev

    beta, theta = 0.9, 0.35
    side = brick_side_graph()
    g_b = ev(side, schedule_for(side, brick_angles_b(theta, beta))).gate
    g_a = ev(side, schedule_for(side, brick_angles_a(theta))).gate
    phase = np.array(
        [
            [np.cos(beta), 0, -np.sin(beta), 0],
            [0, -1, 0, 0],
            [np.sin(beta), 0, np.cos(beta), 0],
            [0, 0, 0, -1],
        ]
    )
    assert np.max(np.abs(g_b - g_a @ phase)) < 1e-12


def test_clements_identity():
    plan = clements_decompose(np.eye(6))
    assert all(b.params.theta == 0.0 and b.params.beta == 0.0 for b in plan.bricks)
    assert np.allclose(plan.final_phases, 0.0)


def test_clements_single_brick_roundtrip():
    u = brick_unitary(1.1, 0.3)
    plan = clements_decompose(u)
    assert len(plan.bricks) == 1
    assert plan.bricks[0].params.theta == pytest.approx(0.3, abs=1e-12)
    assert np.linalg.norm(plan.reconstruct() - u) < 1e-10


@pytest.mark.parametrize("m", [2, 4, 6, 8])
def test_clements_reconstruction(m):
    u = haar_unitary(m, seed=m + 40)
    plan = clements_decompose(u)
    assert len(plan.bricks) == m * (m - 1) // 2
    assert np.linalg.norm(plan.reconstruct() - u) < 1e-8


def test_clements_brick_positions():
    plan = clements_decompose(haar_unitary(6, seed=2))
    seen = {(b.layer, b.row) for b in plan.bricks}
    assert seen == {(j, i) for j in range(1, 4) for i in range(1, 6)}
    for b in plan.bricks:
        assert 0 <= b.params.theta <= np.pi / 2
        assert 0 <= b.params.beta < 2 * np.pi


def test_clements_rejects_non_unitary():
    with pytest.raises(ValueError):
        clements_decompose(np.eye(4) * 1.01)


@pytest.mark.parametrize("beta", [0.0, np.pi / 2, 2.5, np.pi, 5.8])
def test_phase_chain(beta):
    sched = phase_chain_schedule(beta)
    assert len(sched) == 12
    rel = evaluate(chain_h(13), sched)
    target = np.array([[np.cos(beta), -np.sin(beta)], [np.sin(beta), np.cos(beta)]])
    assert np.linalg.norm(rel.gate - target) < 1e-8


def test_universal_identity():
    sched = universal_schedule(np.eye(4))
    term = brickwork_graph(4, 3)
    rel = evaluate(term, sched)
    assert np.max(np.abs(rel.gate - np.eye(8))) < 1e-10


def test_universal_embedded_brick():
    u = np.eye(4, dtype=complex)
    u[:2, :2] = brick_unitary(0.8, 0.4)
    sched = universal_schedule(u)
    rel = evaluate(brickwork_graph(4, 3), sched)
    assert np.linalg.norm(rel.gate - symplectic_of_unitary(u)) < 1e-8


@pytest.mark.parametrize("m", [2, 4, 6, 8])
def test_universal_haar(m):
    u = haar_unitary(m, seed=m + 7)
    sched = universal_schedule(u)
    term = brickwork_graph(m, universal_depth(m))
    rel = evaluate(term, sched)
    assert np.linalg.norm(rel.gate - symplectic_of_unitary(u)) < 1e-7


def test_universal_schedule_length():
    m = 4
    sched = universal_schedule(haar_unitary(m, seed=1))
    term = brickwork_graph(m, universal_depth(m))
    assert len(sched) == term.n_vertices - m


def test_plan_json():
    import json

    plan = clements_decompose(haar_unitary(4, seed=3))
    data = json.loads(plan.to_json())
    assert data["M"] == 4 and len(data["bricks"]) == 6
