"""Loss-chain model: stationary law, burst blocks, sojourn pmf, sampling."""

import numpy as np
import pytest

from peakcov import (
    LossModel,
    NotErgodic,
    PeriodicChainWarning,
    arrivals_to_gaps,
    gaps_to_arrivals,
    sample_gaps,
    sojourn_pmf,
    stationary,
    submatrices,
    truncation_span,
)


def test_stationary_values(chain_burst2, chain_iid, chain_s1):
    np.testing.assert_allclose(chain_burst2.pi_stat, [2 / 3, 1 / 6, 1 / 6],
                               atol=1e-12)
    np.testing.assert_allclose(chain_iid.pi_stat, [0.6, 0.2, 0.2], atol=1e-12)
    np.testing.assert_allclose(chain_s1.pi_stat, [2 / 3, 1 / 3], atol=1e-12)
    for lm in (chain_burst2, chain_iid, chain_s1):
        np.testing.assert_allclose(lm.pi_stat @ lm.Pi, lm.pi_stat, atol=1e-12)


def test_stationary_not_ergodic():
    with pytest.raises(NotErgodic):
        stationary(np.eye(2))
    with pytest.raises(NotErgodic):
        LossModel(Pi=np.eye(3))


def test_loss_model_validation():
    with pytest.raises(ValueError, match="sums to"):
        LossModel(Pi=[[0.5, 0.4], [0.8, 0.2]])
    with pytest.raises(ValueError, match="negative"):
        LossModel(Pi=[[1.1, -0.1], [0.8, 0.2]])
    with pytest.raises(ValueError):
        LossModel(Pi=[[0.6, 0.2, 0.2], [0.8, 0.1, 0.1]])
    with pytest.raises(ValueError):
        LossModel(Pi=[[1.0]])


def test_s_and_immutability(chain_burst2, chain_s1):
    assert chain_burst2.s == 2
    assert chain_s1.s == 1
    with pytest.raises(ValueError):
        chain_burst2.Pi[0, 0] = 0.0


def test_periodic_chain_warns():
    with pytest.warns(PeriodicChainWarning):
        LossModel(Pi=[[0.0, 1.0], [1.0, 0.0]])


def test_submatrices_values(chain_burst2, chain_s1):
    P, Qm = submatrices(chain_burst2)
    np.testing.assert_allclose(P, np.full((2, 2), 0.1), atol=1e-15)
    np.testing.assert_allclose(Qm, np.full((2, 2), 0.16), atol=1e-15)
    P1, Q1 = submatrices(chain_s1)
    np.testing.assert_allclose(P1, [[0.2]], atol=1e-15)
    np.testing.assert_allclose(Q1, [[0.32]], atol=1e-15)


def test_submatrices_rank_one_and_row_decomposition():
    rng = np.random.default_rng(31)
    for _ in range(10):
        M = rng.uniform(0.05, 1.0, (4, 4))
        M /= M.sum(axis=1, keepdims=True)
        lm = LossModel(Pi=M)
        P, Qm = submatrices(lm)
        assert np.linalg.matrix_rank(Qm) <= 1
        for i in range(1, 4):
            assert P[i - 1].sum() + lm.Pi[i, 0] == pytest.approx(1.0, abs=1e-12)


def test_sojourn_pmf_first_pair(chain_burst2):
    assert sojourn_pmf(chain_burst2, [(1, 1)]) == pytest.approx(1 / 6, abs=1e-12)
    # one reception, then a single loss: pi0 * pi_{01}
    assert sojourn_pmf(chain_burst2, [(2, 1)]) == pytest.approx(2 / 15, abs=1e-12)
    assert sojourn_pmf(chain_burst2, [(3, 2)]) == pytest.approx(
        (2 / 3) * 0.6 * 0.2, abs=1e-12
    )


def test_sojourn_pmf_validation(chain_burst2):
    with pytest.raises(ValueError):
        sojourn_pmf(chain_burst2, [])
    with pytest.raises(ValueError):
        sojourn_pmf(chain_burst2, [(0, 1)])
    with pytest.raises(ValueError):
        sojourn_pmf(chain_burst2, [(1, 3)])


def test_sojourn_pmf_mass_accounting(chain_burst2, chain_s1):
    for lm in (chain_burst2, chain_s1):
        a_max = 200
        total = sum(
            sojourn_pmf(lm, [(a, b)])
            for a in range(1, a_max + 1)
            for b in range(1, lm.s + 1)
        )
        tail = lm.pi_stat[0] * lm.Pi[0, 0] ** (a_max - 1)
        assert abs(total - (1.0 - tail)) <= 1e-12


def test_sojourn_pmf_depth_two_recursion(chain_burst2):
    # summing the second pair over a truncated family recovers the first
    # pair's mass times the covered transition mass from state b1
    lm = chain_burst2
    a_max = 120
    for first in [(1, 1), (2, 2), (4, 1)]:
        base = sojourn_pmf(lm, [first])
        total = sum(
            sojourn_pmf(lm, [first, (a, b)])
            for a in range(1, a_max + 1)
            for b in range(1, lm.s + 1)
        )
        covered = 1.0 - lm.Pi[first[1], 0] * lm.Pi[0, 0] ** (a_max - 1)
        assert abs(total - base * covered) <= 1e-12


def test_truncation_span(chain_burst2):
    a = truncation_span(chain_burst2, eps=1e-12)
    p0, p00 = chain_burst2.pi_stat[0], chain_burst2.Pi[0, 0]
    assert p0 * p00 ** (a - 1) < 1e-12
    assert p0 * p00 ** (a - 2) >= 1e-12
    with pytest.raises(ValueError):
        truncation_span(chain_burst2, eps=0.0)


def test_sample_gaps_determinism(chain_burst2):
    a = sample_gaps(chain_burst2, 500, seed=42)
    b = sample_gaps(chain_burst2, 500, seed=42)
    np.testing.assert_array_equal(a, b)
    c = sample_gaps(chain_burst2, 500, seed=43)
    assert not np.array_equal(a, c)
    assert a.min() >= 0 and a.max() <= chain_burst2.s
    with pytest.raises(ValueError):
        sample_gaps(chain_burst2, 0, seed=1)


def test_sample_gaps_prefix_stability(chain_burst2):
    # drawing a longer chain with the same seed extends, not reshuffles
    short = sample_gaps(chain_burst2, 10, seed=9)
    long = sample_gaps(chain_burst2, 50, seed=9)
    np.testing.assert_array_equal(long[:10], short)


def test_chain_state_frequencies_match_stationary(chain_burst2):
    g = sample_gaps(chain_burst2, 1_000_000, seed=77)
    freq = np.bincount(g, minlength=3) / g.size
    sig = np.sqrt(chain_burst2.pi_stat * (1 - chain_burst2.pi_stat) / g.size)
    assert np.all(np.abs(freq - chain_burst2.pi_stat) <= 3 * sig)


def test_empirical_first_sojourn_pair_matches_pmf(chain_burst2):
    # 1e5 independent streams; classify the first (successes, burst) pair
    # from the leading gaps and compare each cell to the exact pmf
    lm = chain_burst2
    n_streams = 100_000
    counts: dict = {}
    for i in range(n_streams):
        gaps = sample_gaps(lm, 8, seed=1_000_000 + i)
        nz = np.flatnonzero(gaps)
        if nz.size == 0:
            continue  # no burst inside the window; outside tested cells
        key = (int(nz[0]) + 1, int(gaps[nz[0]]))
        counts[key] = counts.get(key, 0) + 1
    for a in range(1, 7):
        for b in (1, 2):
            p = sojourn_pmf(lm, [(a, b)])
            emp = counts.get((a, b), 0) / n_streams
            sig = np.sqrt(p * (1 - p) / n_streams)
            assert abs(emp - p) <= 4 * sig, (a, b, emp, p)


def test_gaps_to_arrivals_examples():
    np.testing.assert_array_equal(gaps_to_arrivals([0, 0, 0]), [1, 1, 1])
    np.testing.assert_array_equal(gaps_to_arrivals([2, 0, 1]),
                                  [0, 0, 1, 1, 0, 1])
    np.testing.assert_array_equal(gaps_to_arrivals([]), [])
    with pytest.raises(ValueError):
        gaps_to_arrivals([-1])
    with pytest.raises(ValueError):
        gaps_to_arrivals([[0, 1]])


def test_arrivals_to_gaps_round_trips():
    rng = np.random.default_rng(33)
    for _ in range(20):
        gaps = rng.integers(0, 3, size=30)
        np.testing.assert_array_equal(arrivals_to_gaps(gaps_to_arrivals(gaps)),
                                      gaps)
    # trailing losses after the last reception belong to no completed gap
    np.testing.assert_array_equal(arrivals_to_gaps([1, 0, 1, 0, 0]), [0, 1])
    with pytest.raises(ValueError):
        arrivals_to_gaps([0, 2, 1])
