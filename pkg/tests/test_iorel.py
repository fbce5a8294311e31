import numpy as np
import pytest

from mblo.graphs import brick_side_graph, brickwork_graph, chain_h, chain_v, concat, gsum
from mblo.iorel import (
    IORelation,
    PhaseSchedule,
    SingularAngleError,
    assemble_mblo,
    base_horizontal,
    base_vertical,
    bell_coupling,
    compose_concat,
    compose_sum,
    evaluate,
    measurement_bases,
    schedule_for,
)
from mblo.linalg import haar_unitary, symplectic_defect, symplectic_of_unitary
from mblo.synthesis import brick_angles_a


def test_base_horizontal_fourier():
    rel = base_horizontal(0.0)
    assert np.allclose(rel.gate, [[0, -1], [1, 0]])
    assert np.allclose(rel.noise, [[0], [1]])
    assert np.allclose(rel.disp, [[1], [0]])


def test_base_horizontal_quarter():
    rel = base_horizontal(np.pi / 4)
    assert np.allclose(rel.gate, [[-1, -1], [1, 0]])
    assert np.allclose(rel.disp, [[np.sqrt(2)], [0]])


def test_base_horizontal_rejects_singular():
    with pytest.raises(SingularAngleError):
        base_horizontal(np.pi / 2)
    with pytest.raises(SingularAngleError):
        base_horizontal(-np.pi / 2 + 1e-8)


def test_base_vertical_zero_angle():
    rel = base_vertical(0.0)
    assert np.allclose(rel.gate, np.eye(4))
    assert np.allclose(rel.noise, np.zeros((4, 1)))
    assert np.allclose(rel.disp, [[0], [0], [1], [1]])


def test_base_vertical_coupling_value():
    # tan(phi) = -sin(theta) at theta = pi/2 couples with strength -1
    phi = np.arctan(-1.0)
    rel = base_vertical(phi)
    assert rel.gate[2, 0] == pytest.approx(-1.0)
    assert rel.gate[3, 1] == pytest.approx(0.0)


def test_base_vertical_symplectic():
    rel = base_vertical(0.6)
    assert symplectic_defect(rel.gate) < 1e-12


def test_concat_two_fourier_steps():
    rel = compose_concat(base_horizontal(0.0), base_horizontal(0.0))
    assert np.allclose(rel.gate, -np.eye(2))
    assert np.allclose(rel.noise, [[-1, 0], [0, 1]])


def test_three_mode_chain_relation():
    # the displayed two-measurement relation on a 3-chain
    p1, p2 = 0.3, -0.8
    rel = evaluate(chain_h(3), schedule_for(chain_h(3), [p1, p2]))
    t1, t2 = np.tan(p1), np.tan(p2)
    assert np.allclose(rel.gate, [[t2 * t1 - 1, t2], [-t1, -1]])
    assert np.allclose(rel.noise, [[-1, 0], [0, 1]])
    d = np.array([[-t2, 1], [1, 0]]) @ np.diag([1 / np.cos(p1), 1 / np.cos(p2)])
    assert np.allclose(rel.disp, d)


def test_chain3_noise_gram_is_identity():
    rng = np.random.default_rng(11)
    for _ in range(50):
        angles = rng.uniform(-1.2, 1.2, size=2)
        rel = evaluate(chain_h(3), schedule_for(chain_h(3), angles))
        assert np.max(np.abs(rel.noise_gram() - np.eye(2))) < 1e-12


def test_sum_of_two_steps_block_structure():
    rel = compose_sum(base_horizontal(0.0), base_horizontal(0.0))
    f = np.array([[0, -1], [1, 0]])
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 2], [0, 2])] = f
    expected[np.ix_([1, 3], [1, 3])] = f
    assert np.allclose(rel.gate, expected)
    assert rel.cols == 2


def test_schedule_length_validation():
    with pytest.raises(ValueError):
        evaluate(chain_h(4), schedule_for(chain_h(3), [0.1, 0.2]))


def test_schedule_basis_tags():
    assert measurement_bases(chain_h(3)) == ("p", "p")
    assert measurement_bases(chain_v(3)) == ("q",)
    assert measurement_bases(brick_side_graph()) == ("p",) * 8 + ("q",)
    with pytest.raises(ValueError):
        PhaseSchedule(np.zeros(2), ("p", "x"))


def test_vertical_chain_eval_support():
    rel = evaluate(chain_v(2), schedule_for(chain_v(2), []))
    cz = np.eye(4)
    cz[2, 1] = cz[3, 0] = 1.0
    assert np.allclose(rel.gate, cz)
    with pytest.raises(ValueError):
        evaluate(chain_v(4), schedule_for(chain_v(4), [0.1, 0.2]))


def test_concat_associativity():
    rng = np.random.default_rng(3)
    a, b, c = chain_h(3), chain_h(4), chain_h(2)
    angles = rng.uniform(-1.0, 1.0, size=6)
    left = concat(concat(a, b), c)
    right = concat(a, concat(b, c))
    r1 = evaluate(left, schedule_for(left, angles))
    r2 = evaluate(right, schedule_for(right, angles))
    assert np.max(np.abs(r1.gate - r2.gate)) < 1e-10
    assert np.max(np.abs(r1.noise - r2.noise)) < 1e-10
    assert np.max(np.abs(r1.disp - r2.disp)) < 1e-10


def test_noise_gram_layer_decomposition():
    # N N^T of a concatenation is the sum of conjugated per-layer grams
    rng = np.random.default_rng(4)
    layers = [chain_h(4), chain_h(3), chain_h(5)]
    angles = [rng.uniform(-1.0, 1.0, size=t.measured_count) for t in layers]
    rels = [evaluate(t, schedule_for(t, a)) for t, a in zip(layers, angles)]
    term = concat(concat(layers[0], layers[1]), layers[2])
    total = evaluate(term, schedule_for(term, np.concatenate(angles)))
    # downstream gates conjugate each layer's gram into the output frame
    bars = [rels[2].gate @ rels[1].gate, rels[2].gate, np.eye(2)]
    acc = np.zeros((2, 2))
    for rel, bar in zip(rels, bars):
        acc += bar @ rel.noise_gram() @ bar.T
    assert np.max(np.abs(acc - total.noise_gram())) < 1e-10


def test_chain13_zero_schedule_identity():
    rel = evaluate(chain_h(13), schedule_for(chain_h(13), np.zeros(12)))
    assert np.allclose(rel.gate, np.eye(2))


def test_bell_coupling_single_mode():
    rel = bell_coupling(1)
    assert np.array_equal(rel.gate, np.eye(2))
    assert np.allclose(rel.noise, np.diag([-1.0, 1.0]))
    assert np.allclose(rel.disp, [[-1, -1], [-1, 1]])


def test_bell_coupling_identity_gate():
    rel = bell_coupling(3)
    assert np.array_equal(rel.gate, np.eye(6))
    assert rel.cols == 6


def test_bell_noise_columns_accumulate():
    m = 2
    inner = evaluate(chain_h(3), schedule_for(chain_h(3), [0.1, 0.2]))
    inner2 = compose_sum(inner, inner)
    combined = compose_concat(bell_coupling(m), inner2)
    assert combined.cols == 2 * m + inner2.cols


def test_assemble_noise_gram_identity_block():
    u = haar_unitary(2, seed=21)
    rel = assemble_mblo(u)
    term = brickwork_graph(2, 2)
    from mblo.synthesis import universal_schedule

    inner = evaluate(term, universal_schedule(u))
    expected = np.eye(4) + inner.noise_gram()
    assert np.max(np.abs(rel.noise_gram() - expected)) < 1e-10


def test_assemble_identity_circuit():
    rel = assemble_mblo(np.eye(2))
    assert np.allclose(rel.gate, np.eye(4))


def test_passive_schedule_gate_is_orthogonal_symplectic():
    from mblo.synthesis import universal_schedule

    u = haar_unitary(4, seed=6)
    term = brickwork_graph(4, 3)
    rel = evaluate(term, universal_schedule(u))
    assert np.linalg.norm(rel.gate.T @ rel.gate - np.eye(8)) < 1e-8
    assert symplectic_defect(rel.gate) < 1e-8


def test_side_block_gate_matches_closed_form():
    theta = 1.234
    side = brick_side_graph()
    rel = evaluate(side, schedule_for(side, brick_angles_a(theta)))
    expected = np.array(
        [
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [-1, 0, -np.cos(theta), -np.sin(theta)],
            [0, -1, -np.sin(theta), np.cos(theta)],
        ]
    )
    assert np.max(np.abs(rel.gate - expected)) < 1e-12


def test_iorelation_json():
    import json

    rel = base_horizontal(0.2)
    data = json.loads(rel.to_json())
    assert data["m"] == 1 and data["c"] == 1
    assert np.allclose(data["G"], rel.gate)
