import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from detineq.blocks import (
    BlockPartition,
    block_diag,
    block_inverse_2x2,
    diagonal_blocks,
    extract_blocks,
    fischer_terms,
    identity_residuals,
    reassemble,
    schur_complement,
    sylvester_residual,
    woodbury_residual,
)
from detineq.dense import SymMatrix, invert, is_spd, log_det
from detineq.errors import DimensionMismatch, WoodburySkipped

from .oracles import random_psd, random_spd

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def split_instances(draw, max_n=8):
    seed = draw(seeds)
    n = draw(st.integers(2, max_n))
    split = draw(st.integers(1, n - 1))
    return random_spd(np.random.default_rng(seed), n), split


def test_partition_invariants():
    p = BlockPartition((2, 1, 3))
    assert p.k == 3 and p.total == 6
    assert p.offsets == (0, 2, 3, 6)
    assert p.tail().sizes == (1, 3)
    with pytest.raises(ValueError):
        BlockPartition(())
    with pytest.raises(ValueError):
        BlockPartition((2, 0))


def test_block_diag_examples():
    np.testing.assert_array_equal(block_diag([[[2.0]], [[1.0]]]).entries, np.diag([2.0, 1.0]))
    np.testing.assert_array_equal(block_diag([np.eye(2), np.eye(3)]).entries, np.eye(5))
    b = SymMatrix([[3.0, 1.0], [1.0, 2.0]])
    np.testing.assert_array_equal(block_diag([b]).entries, b.entries)
    with pytest.raises(ValueError):
        block_diag([])


def test_extract_blocks_2x2():
    grid = extract_blocks([[10, 2], [2, 5]], BlockPartition((1, 1)))
    assert grid[0][0].block.tolist() == [[10.0]]
    assert grid[1][1].block.tolist() == [[5.0]]
    assert grid[0][1].block.tolist() == [[2.0]]
    assert grid[1][0].block.tolist() == [[2.0]]


def test_extract_blocks_of_block_diag():
    rng = np.random.default_rng(0)
    m = block_diag([random_spd(rng, 2), random_spd(rng, 3)])
    grid = extract_blocks(m, BlockPartition((2, 3)))
    assert not grid[0][1].block.any() and not grid[1][0].block.any()


def test_extract_blocks_mismatch():
    with pytest.raises(DimensionMismatch):
        extract_blocks(np.eye(4), BlockPartition((2, 3)))


@given(seeds, st.lists(st.integers(1, 4), min_size=1, max_size=4))
def test_reassembly_is_exact(seed, sizes):
    n = sum(sizes)
    g = np.random.default_rng(seed).standard_normal((n, n))
    a = SymMatrix(g + g.T)
    p = BlockPartition(tuple(sizes))
    grid = extract_blocks(a, p)
    np.testing.assert_array_equal(reassemble(grid).entries, a.entries)
    for i, d in enumerate(diagonal_blocks(a, p)):
        np.testing.assert_array_equal(d.entries, grid[i][i].block)
        np.testing.assert_array_equal(grid[i][i].block, grid[i][i].block.T)


def test_schur_examples():
    assert schur_complement([[10, 2], [2, 5]], 1).entries.item() == pytest.approx(4.6, abs=1e-15)
    assert schur_complement([[2, -2], [-2, 4]], 1).entries.item() == pytest.approx(2.0, abs=1e-15)
    rng = np.random.default_rng(1)
    d = random_spd(rng, 3)
    m = block_diag([random_spd(rng, 2), d])
    np.testing.assert_array_equal(schur_complement(m, 2).entries, SymMatrix(d).entries)


def test_split_bounds():
    with pytest.raises(ValueError):
        schur_complement(np.eye(3), 0)
    with pytest.raises(ValueError):
        schur_complement(np.eye(3), 3)


@given(split_instances())
def test_schur_positivity(inst):
    m, split = inst
    assert is_spd(schur_complement(m, split))


def test_block_inverse_examples():
    np.testing.assert_allclose(block_inverse_2x2([[2, -2], [-2, 4]], 1).entries, [[1, 0.5], [0.5, 0.5]], atol=1e-15)
    rng = np.random.default_rng(2)
    a, d = random_spd(rng, 2), random_spd(rng, 2)
    inv = block_inverse_2x2(block_diag([a, d]), 2).entries
    np.testing.assert_allclose(inv[:2, :2], np.linalg.inv(a), atol=1e-12)
    np.testing.assert_allclose(inv[2:, 2:], np.linalg.inv(d), atol=1e-12)
    assert not inv[:2, 2:].any()


@given(split_instances())
def test_block_inverse_matches_dense(inst):
    m, split = inst
    ref = invert(m).entries
    got = block_inverse_2x2(m, split).entries
    assert np.max(np.abs(got - ref)) <= 1e-8 * (1 + np.max(np.abs(ref)))


def test_identity_residuals_scalar():
    res = identity_residuals([[10, 2], [2, 5]], 1)
    assert res.fischer == pytest.approx(abs(math.log(46) - math.log(10) - math.log(4.6)), abs=1e-15)
    assert res.fischer <= 1e-14
    assert res.woodbury <= 1e-15
    assert res.sylvester <= 1e-14


def test_identity_residuals_decoupled():
    res = identity_residuals(np.diag([3.0, 2.0, 5.0]), 1)
    assert res.fischer <= 1e-15
    assert res.woodbury == 0.0
    assert res.sylvester <= 1e-15


@given(seeds, st.integers(2, 6), st.integers(0, 6))
def test_identity_residuals_random(seed, n, rank):
    rng = np.random.default_rng(seed)
    m = random_spd(rng, n)
    aux = random_psd(rng, n, rank=min(rank, n))
    res = identity_residuals(m, n // 2, aux)
    scale = 1 + np.max(np.abs(np.linalg.inv(m)))
    assert res.fischer <= 1e-8 * (1 + abs(log_det(m)))
    assert res.woodbury <= 1e-8 * scale
    _, ref = np.linalg.slogdet(np.eye(n) + m @ aux)
    assert res.sylvester <= 1e-8 * (1 + abs(ref))


def test_woodbury_skipped():
    # A - B D^{-1} B^T = 1 - 4/4 = 0 is not SPD, so the identity is not checked
    with pytest.raises(WoodburySkipped):
        woodbury_residual([[1.0, 2.0], [2.0, 4.0]], 1)


def test_sylvester_default_aux_is_identity():
    m = random_spd(np.random.default_rng(4), 4)
    assert sylvester_residual(m) <= 1e-13
    with pytest.raises(DimensionMismatch):
        sylvester_residual(m, np.eye(3))


@given(split_instances())
def test_fischer_inequality(inst):
    m, split = inst
    t = fischer_terms(m, split)
    assert t["logdet_schur"] <= t["logdet_d"] + 1e-9
    assert t["logdet_m"] <= t["logdet_a"] + t["logdet_d"] + 1e-9
