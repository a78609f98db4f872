import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slopt.bandit import (
    ALGORITHMS,
    AdwinWindow,
    BanditConfig,
    bernoulli_kl,
    create_instance,
    dbe_probabilities,
    exp3pp_probabilities,
    instance_from_state,
    klucb_upper_bound,
    reward,
    select_arm,
    ucb1_index,
)
from slopt.bandit.indices import KLUCB_CEILING
from slopt.rng import RngStream

from reference import REFERENCES


def play(inst, rng, table):
    arms = []
    for row in table:
        a = select_arm(inst, rng)
        reward(inst, a, row[a])
        arms.append(a)
    return arms


def fixed_table(rounds, K, seed=7, means=None):
    g = np.random.default_rng(seed)
    means = np.linspace(0.2, 0.8, K) if means is None else np.asarray(means)
    return (g.random((rounds, K)) < means).astype(int).tolist()


class TestConfig:
    def test_defaults(self):
        cfg = BanditConfig()
        assert cfg.c == 0.5
        assert (cfg.prior_alpha, cfg.prior_beta) == (1.0, 1.0)
        assert cfg.gamma == 1.0 - 1e-8
        assert cfg.adwin_M == 10
        assert cfg.adwin_delta == 1.0 - 1e-7
        assert (cfg.exp3pp_alpha, cfg.exp3pp_beta) == (3.0, 256.0)
        assert cfg.adwin_cut_delta == pytest.approx(1e-7, rel=1e-6)

    @pytest.mark.parametrize("field,value", [
        ("c", 0.0), ("prior_alpha", -1.0), ("gamma", 0.0), ("gamma", 1.5), ("adwin_M", 0),
        ("adwin_delta", 1.0), ("exp3pp_beta", 0.0), ("dbe_temperature", 0.0), ("dbe_gamma", 2.0),
        ("adwin_clock", 0),
    ])
    def test_rejects_invalid(self, field, value):
        with pytest.raises(ValueError):
            BanditConfig(**{field: value})

    def test_aliases(self):
        assert BanditConfig("klucb").algorithm == "KL-UCB"
        assert BanditConfig("exp3pp").algorithm == "EXP3++"
        with pytest.raises(ValueError):
            BanditConfig("greedy")

    def test_dict_round_trip(self):
        cfg = BanditConfig("dBE", dbe_temperature=0.5)
        assert BanditConfig.from_dict(cfg.to_dict()) == cfg
        with pytest.raises(ValueError):
            BanditConfig.from_dict({"algorithm": "TS", "nope": 1})


class TestIndices:
    def test_ucb1_examples(self):
        assert ucb1_index(0.5, math.exp(2), 4, 0.5) == pytest.approx(1.0, abs=1e-12)
        assert ucb1_index(0.0, 1, 1, 0.5) == 0.0
        assert ucb1_index(1.0, math.e, 1, 0.5) == pytest.approx(1.0 + math.sqrt(0.5), abs=1e-12)
        with pytest.raises(ValueError):
            ucb1_index(0.5, 10, 0, 0.5)

    def test_kl_examples(self):
        for p in (0.0, 0.3, 0.999):
            assert bernoulli_kl(p, min(max(p, 1e-9), 1 - 1e-9)) == pytest.approx(0.0, abs=1e-8)
        assert bernoulli_kl(0.5, 0.75) == pytest.approx(0.5 * math.log(2 / 3) + 0.5 * math.log(2), abs=1e-12)
        assert bernoulli_kl(0.0, 0.5) == pytest.approx(math.log(2), abs=1e-12)
        for q in (0.0, 1.0, -0.1):
            with pytest.raises(ValueError):
                bernoulli_kl(0.5, q)

    def test_klucb_boundaries(self):
        assert klucb_upper_bound(5, 5, 1) == KLUCB_CEILING
        assert klucb_upper_bound(2, 5, 1) == pytest.approx(0.4)
        with pytest.raises(ValueError):
            klucb_upper_bound(0, 0, 10)

    def test_klucb_grid_example(self):
        q = klucb_upper_bound(1, 2, math.exp(4))
        grid = np.arange(0.5, 1.0, 1e-7)
        kl = 0.5 * np.log(0.5 / grid) + 0.5 * np.log(0.5 / (1 - grid))
        oracle = grid[np.nonzero(2 * kl <= 4.0)[0].max()]
        assert abs(q - oracle) <= 2e-6

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 500), st.data(), st.integers(1, 10**6))
    def test_klucb_properties(self, pulls, data, t):
        s = data.draw(st.integers(0, pulls))
        q = klucb_upper_bound(s, pulls, t)
        assert min(s / pulls, KLUCB_CEILING) <= q <= KLUCB_CEILING
        assert klucb_upper_bound(s, pulls, t * 10) >= q - 1e-12
        if 0.0 < q < KLUCB_CEILING and s < pulls:
            # q is feasible: pulls * KL(p, q) <= ln t
            assert pulls * bernoulli_kl(s / pulls, q) <= math.log(t) + 1e-9


class TestAdwin:
    def test_constant_stream(self):
        w = AdwinWindow(10, 1e-7)
        cuts = sum(w.insert(0) for _ in range(1000))
        assert cuts == 0 and w.count == 1000 and w.mean == 0.0

    def test_detects_switch(self):
        g = np.random.default_rng(3)
        stream = np.concatenate([g.random(500) < 0.9, g.random(500) < 0.1]).astype(int)
        w = AdwinWindow(10, 1e-7)
        cut_rounds = [i for i, r in enumerate(stream) if w.insert(int(r))]
        assert any(i >= 500 for i in cut_rounds)
        assert w.mean < 0.3

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=600), st.integers(1, 6), st.sampled_from([1, 4, 32]))
    def test_structure_invariants(self, stream, M, clock):
        w = AdwinWindow(M, 1e-3, clock)
        for r in stream:
            before = w.count
            cut = w.insert(r)
            assert all(len(row) <= M for row in w.rows)
            assert w.n_buckets <= M * (int(math.log2(w.count)) + 2)
            assert w.count == sum(len(row) << i for i, row in enumerate(w.rows))
            assert w.total == pytest.approx(sum(sum(row) for row in w.rows))
            if cut:
                assert w.count < before + 1
                assert w.count <= before

    def test_state_round_trip(self):
        w = AdwinWindow(3, 1e-2, 1)
        for r in [1, 1, 0, 1, 0, 0, 0, 1, 1, 1, 1, 0]:
            w.insert(r)
        assert AdwinWindow.from_state(w.to_state()) == w


class TestCreateAndSelect:
    @pytest.mark.parametrize("algo", ALGORITHMS)
    def test_rejects_zero_arms(self, algo):
        with pytest.raises(ValueError):
            create_instance(BanditConfig(algo), 0)

    @pytest.mark.parametrize("algo", ALGORITHMS)
    def test_single_arm(self, algo):
        inst = create_instance(BanditConfig(algo), 1)
        rng = RngStream(1)
        for i in range(50):
            assert select_arm(inst, rng) == 0
            reward(inst, 0, i % 2)
        assert inst.t == 50

    def test_ts_symmetric_prior(self):
        rng = RngStream(5)
        counts = np.zeros(7)
        for _ in range(14000):
            counts[select_arm(create_instance(BanditConfig("TS"), 7), rng)] += 1
        np.testing.assert_allclose(counts / counts.sum(), np.full(7, 1 / 7), atol=0.015)

    def test_ucb1_visits_each_arm_first(self):
        inst = create_instance(BanditConfig("UCB1"), 3)
        rng = RngStream(0)
        seen = []
        for _ in range(3):
            a = select_arm(inst, rng)
            reward(inst, a, 0)
            seen.append(a)
        assert seen == [0, 1, 2]

    def test_ucb1_index_example(self):
        inst = create_instance(BanditConfig("UCB1"), 2)
        inst.successes, inst.failures = [2, 20], [2, 80]
        inst.pulls = [4, 100]
        inst.t = round(math.exp(2))  # ln t close to 2
        idx = inst.indices()
        assert idx[0] > idx[1]
        assert select_arm(inst, RngStream(0)) == 0

    def test_exp3ix_initial_uniform(self):
        inst = create_instance(BanditConfig("EXP3-IX"), 8)
        np.testing.assert_allclose(inst.probabilities(), np.full(8, 1 / 8), atol=1e-15)

    def test_ts_strong_posterior(self):
        inst = create_instance(BanditConfig("TS"), 2)
        inst.successes, inst.failures = [100, 0], [0, 100]
        rng = RngStream(11)
        picks = sum(select_arm(inst, rng) == 0 for _ in range(10000))
        assert picks / 10000 > 0.99

    def test_out_of_range_arm(self):
        inst = create_instance(BanditConfig("TS"), 3)
        with pytest.raises(ValueError):
            reward(inst, 3, 1)

    @pytest.mark.parametrize("algo", ["EXP3-IX", "EXP3++"])
    def test_exp3_requires_matching_select(self, algo):
        inst = create_instance(BanditConfig(algo), 3)
        with pytest.raises(ValueError):
            reward(inst, 0, 1)
        a = select_arm(inst, RngStream(0))
        with pytest.raises(ValueError):
            reward(inst, (a + 1) % 3, 1)


class TestRewardUpdates:
    def test_ts_conjugate_update(self):
        inst = create_instance(BanditConfig("TS"), 2)
        for r in (1, 1, 1, 0):
            reward(inst, 0, r)
        a, b = inst.posterior(0)
        assert (a, b) == (4.0, 2.0)
        assert a / (a + b) == pytest.approx(2 / 3)

    def test_dts_gamma_one_equals_ts(self):
        table = fixed_table(300, 4)
        ts = create_instance(BanditConfig("TS"), 4)
        dts = create_instance(BanditConfig("dTS", gamma=1.0), 4)
        r1, r2 = RngStream(9), RngStream(9)
        for row in table:
            a, b = select_arm(ts, r1), select_arm(dts, r2)
            assert a == b
            reward(ts, a, row[a])
            reward(dts, b, row[b])
            assert ts.successes == dts.successes and ts.failures == dts.failures

    def test_dts_counts_bounded_by_undiscounted(self):
        table = fixed_table(400, 3)
        inst = create_instance(BanditConfig("dTS", gamma=0.99), 3)
        rng = RngStream(2)
        S, F = [0] * 3, [0] * 3
        for row in table:
            a = select_arm(inst, rng)
            reward(inst, a, row[a])
            S[a] += row[a]
            F[a] += 1 - row[a]
            assert all(0.0 <= s <= u + 1e-12 for s, u in zip(inst.successes, S))
            assert all(0.0 <= f <= u + 1e-12 for f, u in zip(inst.failures, F))

    def test_undiscounted_bookkeeping(self):
        for algo in ("UCB1", "KL-UCB", "TS"):
            inst = create_instance(BanditConfig(algo), 5)
            play(inst, RngStream(4), fixed_table(200, 5))
            assert sum(inst.pulls) == inst.t == 200
            assert all(s + f == n for s, f, n in zip(inst.successes, inst.failures, inst.pulls))

    def test_ads_ts_forgets_after_change(self):
        cfg = BanditConfig("ADS-TS", adwin_clock=1)
        inst = create_instance(cfg, 1)
        for r in [1] * 400 + [0] * 400:
            reward(inst, 0, r)
        assert inst.cuts > 0
        a, b = inst.posterior(0)
        assert a / (a + b) < 0.3


class TestProbabilityVectors:
    def test_dbe_examples(self):
        inst = create_instance(BanditConfig("dBE", dbe_temperature=1.0, dbe_gamma=1.0), 2)
        reward(inst, 0, 1)
        reward(inst, 1, 0)
        p = dbe_probabilities(inst)
        np.testing.assert_allclose(p, [math.e / (math.e + 1), 1 / (math.e + 1)], atol=1e-12)
        flat = create_instance(BanditConfig("dBE"), 4)
        np.testing.assert_allclose(dbe_probabilities(flat), np.full(4, 0.25), atol=1e-15)
        hot = create_instance(BanditConfig("dBE", dbe_temperature=1e6), 3)
        reward(hot, 0, 1)
        np.testing.assert_allclose(dbe_probabilities(hot), np.full(3, 1 / 3), atol=1e-4)

    def test_exp3pp_initial_uniform_and_floor_cap(self):
        inst = create_instance(BanditConfig("EXP3++"), 5)
        np.testing.assert_allclose(exp3pp_probabilities(inst), np.full(5, 0.2), atol=1e-15)
        rng = RngStream(3)
        for row in fixed_table(300, 5, means=[0.9, 0.1, 0.1, 0.1, 0.1]):
            floors = inst.exploration_floors()
            probs = inst.probabilities()
            assert all(f <= 1 / 10 + 1e-15 for f in floors)
            assert all(p >= f - 1e-15 for p, f in zip(probs, floors))
            a = select_arm(inst, rng)
            reward(inst, a, row[a])

    def test_type_checks(self):
        with pytest.raises(TypeError):
            dbe_probabilities(create_instance(BanditConfig("TS"), 2))
        with pytest.raises(TypeError):
            exp3pp_probabilities(create_instance(BanditConfig("TS"), 2))

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(["dBE", "EXP3-IX", "EXP3++"]), st.integers(2, 9), st.integers(0, 2**32),
           st.integers(1, 300))
    def test_vectors_are_distributions(self, algo, K, seed, rounds):
        inst = create_instance(BanditConfig(algo), K)
        rng = RngStream(seed)
        for row in fixed_table(rounds, K, seed=seed):
            p = np.array(inst.probabilities())
            assert abs(p.sum() - 1.0) <= 1e-9
            assert (p > 0).all()
            a = select_arm(inst, rng)
            reward(inst, a, row[a])


class TestReferenceTraces:
    """Every algorithm against its straight-line reference on a 3-arm trace."""

    @pytest.mark.parametrize("algo", ALGORITHMS)
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_matches_reference(self, algo, seed):
        table = fixed_table(50, 3, seed=seed)
        inst = create_instance(BanditConfig(algo), 3)
        rng = RngStream(seed)
        ref = REFERENCES[algo](table, 3, seed)
        for row, expect in zip(table, ref):
            if "probs" in expect:
                np.testing.assert_allclose(inst.probabilities(), expect["probs"], rtol=0, atol=1e-12)
            a = select_arm(inst, rng)
            assert a == expect["arm"]
            reward(inst, a, row[a])
            for key, val in expect.items():
                if key in ("arm", "probs"):
                    continue
                np.testing.assert_allclose(getattr(inst, key), val, rtol=0, atol=1e-12)

    def test_ads_ts_with_cuts_matches_reference(self):
        table = [[1, 0, 1]] * 120 + [[0, 1, 0]] * 200
        inst = create_instance(BanditConfig("ADS-TS", adwin_clock=1, adwin_delta=0.99), 3)
        rng = RngStream(4)
        ref = REFERENCES["ADS-TS"](table, 3, 4, delta=inst.config.adwin_cut_delta, clock=1)
        for row, expect in zip(table, ref):
            a = select_arm(inst, rng)
            assert a == expect["arm"]
            reward(inst, a, row[a])
            np.testing.assert_allclose(inst.successes, expect["successes"], atol=1e-12)
            np.testing.assert_allclose(inst.failures, expect["failures"], atol=1e-12)
        assert inst.cuts > 0


class TestDeterminismAndState:
    @pytest.mark.parametrize("algo", ALGORITHMS)
    def test_same_seed_same_choices(self, algo):
        table = fixed_table(200, 4)
        a = play(create_instance(BanditConfig(algo), 4), RngStream(42), table)
        b = play(create_instance(BanditConfig(algo), 4), RngStream(42), table)
        assert a == b

    @pytest.mark.parametrize("algo", ALGORITHMS)
    def test_state_round_trip_continues_identically(self, algo):
        cfg = BanditConfig(algo)
        table = fixed_table(300, 4)
        inst = create_instance(cfg, 4)
        rng = RngStream(8)
        play(inst, rng, table[:150])
        clone = instance_from_state(cfg, inst.to_state())
        rng2 = RngStream.from_state(rng.get_state())
        assert clone == inst
        assert play(inst, rng, table[150:]) == play(clone, rng2, table[150:])
