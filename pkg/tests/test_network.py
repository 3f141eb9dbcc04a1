import json
import math

import numpy as np
import pytest

from drivenbs.errors import ConfigurationError, ConservationError, DimensionError
from drivenbs.linalg import haar_unitary, unitarity_residual
from drivenbs.network import (BeamSplitterLayer, GenerationNetwork, block, blocks,
                              coupling_matrix, evolution_matrix, random_network, submatrix)
from drivenbs.rng import RandomSeed

H = math.sqrt(0.5)


def test_coupling_zero_angles_identity():
    for idx in (1, 2):
        layer = BeamSplitterLayer(idx, [0.0] * (3 if idx == 1 else 2))
        np.testing.assert_array_equal(coupling_matrix(layer, 6), np.eye(6))


def test_coupling_balanced_pair():
    c = coupling_matrix(BeamSplitterLayer(1, [math.pi / 4]), 2)
    np.testing.assert_allclose(c, [[H, H], [-H, H]], atol=1e-15)


def test_coupling_even_layer_corners():
    c = coupling_matrix(BeamSplitterLayer(2, [0.3]), 4).real
    assert c[0, 0] == 1 and c[3, 3] == 1
    assert np.all(c[0, 1:] == 0) and np.all(c[3, :3] == 0)
    np.testing.assert_allclose(c[1:3, 1:3], [[math.cos(.3), math.sin(.3)],
                                             [-math.sin(.3), math.cos(.3)]])


def test_coupling_odd_layer_blocks():
    c = coupling_matrix(BeamSplitterLayer(3, [0.1, 0.2]), 4).real
    assert c[0, 1] == pytest.approx(math.sin(0.1))
    assert c[3, 2] == pytest.approx(-math.sin(0.2))
    assert c[1, 2] == 0


def test_coupling_errors():
    with pytest.raises(ConfigurationError):
        coupling_matrix(BeamSplitterLayer(1, [0.1]), 3)
    with pytest.raises(ConfigurationError):
        coupling_matrix(BeamSplitterLayer(1, [0.1]), 4)
    with pytest.raises(ConfigurationError):
        BeamSplitterLayer(1, [2.0])


def test_random_network_shape_and_determinism():
    net = random_network(4, 3, RandomSeed(8))
    assert [len(layer.angles) for layer in net.layers] == [2, 1, 2]
    again = random_network(4, 3, RandomSeed(8))
    assert net.layers == again.layers
    assert random_network(2, 1, 5).layers == random_network(2, 1, 5).layers
    angles = [a for layer in random_network(16, 8, 1).layers for a in layer.angles]
    assert min(angles) >= 0 and max(angles) < math.pi / 2


def test_random_network_rejects_odd_modes():
    with pytest.raises(ConfigurationError):
        random_network(5, 2, 0)


def test_block_last_is_last_layer():
    net = random_network(6, 4, 2)
    np.testing.assert_array_equal(block(net, 4), coupling_matrix(net.layers[3], 6))


def test_block_identity_network():
    net = GenerationNetwork.uniform(6, 3, 0.0)
    for q in range(1, 4):
        np.testing.assert_array_equal(block(net, q), np.eye(6))


def test_block_order_and_nesting():
    net = random_network(8, 5, 3)
    cs = [coupling_matrix(layer, 8) for layer in net.layers]
    # C_q acts first
    np.testing.assert_allclose(block(net, 2), cs[4] @ cs[3] @ cs[2] @ cs[1], atol=1e-14)
    for q in range(1, 5):
        np.testing.assert_allclose(block(net, q), block(net, q + 1) @ cs[q - 1], atol=1e-10)
    for q, b in enumerate(blocks(net), start=1):
        np.testing.assert_allclose(b, block(net, q), atol=1e-12)


def test_block_range():
    net = random_network(4, 2, 0)
    for q in (0, 3):
        with pytest.raises(IndexError):
            block(net, q)


@pytest.mark.parametrize("m, k", [(2, 1), (4, 3), (16, 8), (32, 16)])
def test_blocks_unitary(m, k):
    net = random_network(m, k, m * k)
    u = haar_unitary(m, RandomSeed(m, k))
    ev = evolution_matrix(net, u)
    for q in range(1, k + 1):
        assert unitarity_residual(block(net, q)) < 1e-10
        assert unitarity_residual(ev.blocks[q - 1]) < 1e-10
    np.testing.assert_allclose(np.linalg.norm(ev.matrix, axis=0), 1, atol=1e-10)


def test_evolution_single_layer():
    net = random_network(4, 1, 0)
    u = haar_unitary(4, 1)
    ev = evolution_matrix(net, u)
    assert ev.shape == (4, 4)
    np.testing.assert_allclose(ev.matrix, u @ coupling_matrix(net.layers[0], 4), atol=1e-14)
    assert unitarity_residual(ev.matrix) < 1e-10


def test_evolution_identity_concatenation():
    ev = evolution_matrix(GenerationNetwork.uniform(4, 3, 0.0), np.eye(4))
    np.testing.assert_array_equal(ev.matrix, np.hstack([np.eye(4)] * 3))
    assert ev.column(2, 3) == 6 and ev.location(6) == (2, 3)


def test_evolution_errors():
    net = random_network(4, 2, 0)
    with pytest.raises(DimensionError):
        evolution_matrix(net, np.eye(6))
    with pytest.raises(ConfigurationError):
        evolution_matrix(net, 2 * np.eye(4))


def test_submatrix_selection():
    net = random_network(4, 2, 3)
    ev = evolution_matrix(net, haar_unitary(4, 4))
    s_in = [0] * 8
    s_in[5] = 1
    out = [0, 0, 1, 0]
    np.testing.assert_array_equal(submatrix(ev, s_in, out), [[ev.matrix[2, 5]]])
    s_in[1] = 1
    sub = submatrix(ev, s_in, [2, 0, 0, 0])
    np.testing.assert_array_equal(sub[0], sub[1])
    np.testing.assert_array_equal(sub[0], ev.matrix[0, [1, 5]])


def test_submatrix_identity_network():
    ev = evolution_matrix(GenerationNetwork.uniform(4, 3, 0.0), np.eye(4))
    s_in = [0] * 12
    s_in[ev.column(2, 3)] = 1
    np.testing.assert_array_equal(submatrix(ev, s_in, [0, 0, 1, 0]), [[1]])


def test_submatrix_conservation():
    ev = evolution_matrix(random_network(4, 1, 0), np.eye(4))
    with pytest.raises(ConservationError):
        submatrix(ev, [1, 1, 0, 0], [1, 0, 0, 0])
    with pytest.raises(ConfigurationError):
        submatrix(ev, [2, 0, 0, 0], [2, 0, 0, 0])


def test_haar_invariance_moment():
    # U_H B_q with fresh Haar U_H has Haar moments: E|entry|^2 = 1/m
    m, draws = 4, 10_000
    net = random_network(m, 3, 17)
    b = block(net, 2)
    vals = np.array([abs((haar_unitary(m, RandomSeed(23, i)) @ b)[1, 2]) ** 2
                     for i in range(draws)])
    assert abs(vals.mean() - 1 / m) < 3 * vals.std(ddof=1) / math.sqrt(draws)


def test_json_roundtrip(tmp_path):
    net = random_network(6, 3, RandomSeed(4, 2))
    path = tmp_path / "net.json"
    net.save(path)
    doc = json.loads(path.read_text())
    assert doc["m"] == 6 and doc["k"] == 3 and doc["seed"] == [4, 2]
    assert len(doc["layers"]) == 3
    assert GenerationNetwork.load(path) == net
