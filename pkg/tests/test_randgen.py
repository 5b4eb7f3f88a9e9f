import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from detineq.dense import cholesky
from detineq.randgen import (
    GenConfig,
    make_rng,
    mix,
    psd_from_rng,
    random_instance,
    random_partition,
    random_psd,
    random_spd,
    search_counterexample,
    substream_seed,
)


def test_mix_is_64_bit_and_order_sensitive():
    assert 0 <= mix(1, 2) < 2**64
    assert mix(1, 2) != mix(2, 1)
    assert mix(0, 0) == mix(0, 0)
    assert substream_seed(42, "theorem1", 3) != substream_seed(42, "theorem2", 3)
    assert substream_seed(-1, "x", 0) == substream_seed(2**64 - 1, "x", 0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"max_dim": 2, "max_blocks": 3},
        {"max_blocks": 0},
        {"max_dim": 65, "max_blocks": 2},
        {"max_dim": 32, "max_blocks": 9},
        {"cond_cap": 1.0},
        {"psd_rank_deficient_prob": 1.5},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        GenConfig(**kwargs)


def test_random_spd_scalar_floor():
    cfg = GenConfig(seed=3)
    for i in range(50):
        assert random_spd(1, i, cfg).entries.item() >= 0.1


def test_random_spd_deterministic():
    cfg = GenConfig(seed=123)
    a, b = random_spd(6, 9, cfg), random_spd(6, 9, cfg)
    np.testing.assert_array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, random_spd(6, 10, cfg).entries)


def test_random_spd_passes_cholesky():
    cfg = GenConfig(seed=1)
    for i in range(1000):
        cholesky(random_spd(8, i, cfg).entries)


def test_random_spd_respects_cond_cap():
    cfg = GenConfig(seed=5, max_dim=8, max_blocks=2, cond_cap=4.0)
    for i in range(50):
        lam = np.linalg.eigvalsh(random_spd(4, i, cfg).entries)
        assert lam[-1] / lam[0] <= 4.0


def test_random_spd_dim_range():
    with pytest.raises(ValueError):
        random_spd(0, 0, GenConfig())
    with pytest.raises(ValueError):
        random_spd(33, 0, GenConfig())


def test_psd_rank_deficient():
    cfg = GenConfig(psd_rank_deficient_prob=1.0)
    rng = make_rng(0)
    for _ in range(20):
        a = psd_from_rng(rng, 5, cfg)
        assert np.linalg.matrix_rank(a.entries) < 5
    full = GenConfig(psd_rank_deficient_prob=0.0)
    assert np.linalg.matrix_rank(random_psd(5, 0, full).entries) == 5


@given(st.integers(0, 2**32), st.integers(1, 16), st.integers(1, 8))
def test_partition_shape(seed, max_dim, max_blocks):
    max_blocks = min(max_blocks, max_dim)
    p = random_partition(make_rng(seed), max_dim, max_blocks)
    assert min(2, max_blocks) <= p.k <= max_blocks
    assert p.k <= p.total <= max_dim
    assert all(s >= 1 for s in p.sizes)


def test_forced_partition():
    cfg = GenConfig(max_dim=2, max_blocks=2)
    for i in range(10):
        assert random_instance("theorem1", cfg, i).partition.sizes == (1, 1)


def test_instance_determinism():
    cfg = GenConfig(seed=77)
    a = random_instance("theorem2", cfg, 4)
    b = random_instance("theorem2", cfg, 4)
    assert a.fingerprint() == b.fingerprint()
    np.testing.assert_array_equal(a.c.entries, b.c.entries)
    with pytest.raises(ValueError):
        random_instance("theorem3", cfg, 0)


def test_instances_satisfy_invariants():
    cfg = GenConfig(seed=2024)
    for i in range(10_000):
        inst = random_instance("theorem1", cfg, i)
        p = inst.partition
        assert 2 <= p.k <= cfg.max_blocks
        assert p.total == inst.c.n <= cfg.max_dim
        assert [d.n for d in inst.perturbations] == list(p.sizes)


def test_search_with_seeds_returns_known_examples():
    cfg = GenConfig()
    r1 = search_counterexample("theorem1", cfg, 10)
    assert r1.found and r1.trials_used == 1
    assert abs(r1.gap - (math.log(63 / 46) - math.log(36 / 25))) <= 1e-12
    np.testing.assert_array_equal(r1.c.entries, [[10, 2], [2, 5]])
    np.testing.assert_array_equal(r1.d.entries, [[2, 1], [1, 1]])
    r2 = search_counterexample("theorem2", cfg, 10)
    assert r2.found and r2.trials_used == 1
    assert abs(r2.gap - (math.log(4) - math.log(4.25))) <= 1e-12


@pytest.mark.parametrize("variant", ["theorem1", "theorem2"])
def test_random_search_finds_violation(variant):
    cfg = GenConfig(seed=9, max_dim=2, max_blocks=2)
    r = search_counterexample(variant, cfg, 100_000, seeds_enabled=False)
    assert r.found
    assert r.gap < -r.report.tol
    assert r.report.verdict.value == "violated"


def test_search_exhaustion():
    cfg = GenConfig(seed=0, max_dim=2, max_blocks=2)
    r = search_counterexample("theorem1", cfg, 1, seeds_enabled=False)
    assert r.trials_used == 1
    assert r.found == (r.gap < 0)
    with pytest.raises(ValueError):
        search_counterexample("theorem1", cfg, 0)
