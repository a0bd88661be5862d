import math

import numpy as np
import pytest

from multirank.data import Instance
from multirank.metrics import auc, c_index_error
from multirank.rankboost import (
    BipartiteRanker,
    BoostRound,
    TrainConfig,
    alpha_from_r,
    pairwise_reference_train,
    score,
    score_instances,
    train_bipartite,
)
from multirank.stump import Stump
from oracles import random_bipartite


def side(values, prefix):
    return [Instance(f"{prefix}{i}", {1: float(v)}) for i, v in enumerate(values)]


def bipartite_auc(model, pos, neg):
    s = score_instances(model, pos + neg)
    return auc(s, [1] * len(pos) + [0] * len(neg))


class TestAlpha:
    def test_zero(self):
        assert alpha_from_r(0.0) == 0.0

    def test_half(self):
        assert alpha_from_r(0.5) == pytest.approx(0.5493061443340549, abs=1e-15)
        assert alpha_from_r(0.5) == pytest.approx(0.5 * math.log(3.0), abs=1e-15)

    def test_clamped(self):
        assert alpha_from_r(1.0) == pytest.approx(0.5 * math.log((2 - 1e-12) / 1e-12), rel=1e-9)
        assert math.isfinite(alpha_from_r(-1.0))
        assert alpha_from_r(-1.0) == -alpha_from_r(1.0)

    def test_sign(self):
        for r in np.linspace(-0.99, 0.99, 23):
            assert np.sign(alpha_from_r(r)) == np.sign(r)

    def test_non_finite(self):
        with pytest.raises(ValueError):
            alpha_from_r(float("nan"))


class TestTrain:
    def test_separable_one_round(self):
        pos, neg = side([2, 2, 2], "p"), side([1, 1], "n")
        model = train_bipartite(pos, neg, TrainConfig(num_rounds=1))
        assert len(model.rounds) == 1
        assert model.rounds[0].r == 1.0
        assert bipartite_auc(model, pos, neg) == 1.0

    def test_identical_sides_stop_early(self):
        feats = [{1: 1.0, 2: 4.0}, {1: 2.0}, {2: 3.0}]
        pos = [Instance(f"p{i}", f) for i, f in enumerate(feats)]
        neg = [Instance(f"n{i}", f) for i, f in enumerate(feats)]
        model = train_bipartite(pos, neg, TrainConfig(num_rounds=10))
        assert model.rounds == ()
        scores = score_instances(model, pos + neg)
        assert np.all(scores == 0.0)
        # every pair tied: no strictly mis-ordered pair
        assert bipartite_auc(model, pos, neg) == 1.0

    def test_early_stop_can_be_disabled(self):
        feats = [{1: 1.0}, {1: 2.0}]
        pos = [Instance(f"p{i}", f) for i, f in enumerate(feats)]
        neg = [Instance(f"n{i}", f) for i, f in enumerate(feats)]
        model = train_bipartite(pos, neg, TrainConfig(num_rounds=4, early_stop_on_zero_r=False))
        assert len(model.rounds) == 4
        assert all(rd.alpha == 0.0 for rd in model.rounds)

    def test_errors(self):
        with pytest.raises(ValueError):
            train_bipartite([], side([1], "n"))
        with pytest.raises(ValueError):
            train_bipartite([Instance("a", {})], [Instance("b", {})])
        with pytest.raises(ValueError):
            TrainConfig(num_rounds=0)

    def test_factorized_distribution_matches_pairwise(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            pos, neg = random_bipartite(rng, 15, 10)
            fast, ref = [], []
            cfg = TrainConfig(num_rounds=5)
            a = train_bipartite(pos, neg, cfg, on_round=lambda rd, z, D: fast.append(D))
            b = pairwise_reference_train(pos, neg, cfg, on_round=lambda rd, z, D: ref.append(D))
            assert [rd.stump for rd in a.rounds] == [rd.stump for rd in b.rounds]
            assert len(fast) == len(ref)
            for Df, Dr in zip(fast, ref):
                np.testing.assert_allclose(Df, Dr, rtol=0, atol=1e-10)

    def test_reference_initial_and_normalized(self):
        rng = np.random.default_rng(13)
        pos, neg = random_bipartite(rng, 4, 3)
        sums = []
        pairwise_reference_train(pos, neg, TrainConfig(num_rounds=3), on_round=lambda rd, z, D: sums.append(D.sum()))
        assert all(abs(s - 1.0) < 1e-12 for s in sums)

    def test_separable_data_reaches_zero_error(self):
        rng = np.random.default_rng(14)
        # separable through a chain of two features, not a single stump
        pos, neg = [], []
        for i in range(30):
            a, b = rng.random(2)
            x = Instance(str(i), {1: float(a), 2: float(b)})
            (pos if a + b > 1.0 else neg).append(x)
        model = train_bipartite(pos, neg, TrainConfig(num_rounds=50))
        s = score_instances(model, pos + neg)
        assert c_index_error(s, [1] * len(pos) + [0] * len(neg)) == 0.0

    def test_deterministic(self):
        rng = np.random.default_rng(15)
        pos, neg = random_bipartite(rng, 12, 12)
        assert train_bipartite(pos, neg, TrainConfig(20)) == train_bipartite(pos, neg, TrainConfig(20))


class TestScore:
    def test_empty(self):
        assert score(BipartiteRanker((), 0), Instance("a", {1: 1.0})) == 0.0

    def test_one_round(self):
        m = BipartiteRanker((BoostRound(Stump(1, 0.0, 0), 0.5, math.tanh(0.5), 1.0),), 1)
        assert score(m, Instance("a", {1: 1.0})) == 0.5

    def test_batch_bit_identical(self):
        rng = np.random.default_rng(16)
        pos, neg = random_bipartite(rng, 20, 20)
        m = train_bipartite(pos, neg, TrainConfig(30))
        batch = score_instances(m, pos + neg)
        single = np.array([score(m, x) for x in pos + neg])
        assert batch.tobytes() == single.tobytes()

    def test_monotone_when_alphas_positive(self):
        pos, neg = side(np.linspace(0.5, 3, 12), "p"), side(np.linspace(0, 2, 12), "n")
        m = train_bipartite(pos, neg, TrainConfig(15))
        if all(rd.alpha >= 0 for rd in m.rounds):
            sweep = side(np.linspace(-1, 4, 200), "s")
            assert np.all(np.diff(score_instances(m, sweep)) >= 0)
