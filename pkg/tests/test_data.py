import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multirank.data import (
    DataError,
    DataWarning,
    Dataset,
    Instance,
    SplitSpec,
    deduplicate,
    parse_dataset,
    serialize_dataset,
    split_holdout,
)


class TestParse:
    def test_single_line(self):
        d = parse_dataset("2 1:0.5 3:1.0")
        (x,) = d.instances
        assert x.rating == 2
        assert x.features == {1: 0.5, 3: 1.0}
        assert x.id == "1"

    def test_max_rating_rule(self):
        d = parse_dataset("0\n1 2:3.5")
        assert d.num_ratings == 2
        assert d.feature_dimension == 2
        assert d.instances[0].features == {}

    def test_malformed_value_reports_line(self):
        with pytest.raises(DataError, match="line 1"):
            parse_dataset("5 1:x")

    def test_comments_ids_and_crlf(self):
        text = "# header\r\nid:a 1 1:2.0 # trailing\r\n\r\nid:b 0 2:1e-3\r\n"
        d = parse_dataset(io.StringIO(text))
        assert d.ids == ["a", "b"]
        assert d.instances[1].features == {2: 1e-3}

    def test_default_id_is_physical_line(self):
        d = parse_dataset("# c\n1 1:1\n\n0 1:2\n")
        assert d.ids == ["2", "4"]

    @pytest.mark.parametrize(
        "text, msg",
        [
            ("3 1:1", "outside"),
            ("1 1:1 1:2", "duplicate feature"),
            ("1 0:1", "index"),
            ("a 1:1", "rating"),
            ("1 1:nan", "non-finite"),
            ("-1 1:1", "negative"),
            ("# nothing\n", "empty"),
            ("id:x 1 1:1\nid:x 0 1:2", "duplicate instance id"),
            ("1 1:1\n2:3", "mix"),
        ],
    )
    def test_errors(self, text, msg):
        with pytest.raises(DataError, match=msg):
            parse_dataset(text, expected_L=3)

    def test_unlabeled(self):
        d = parse_dataset("1:0.5\nid:q 2:1", expected_L=4)
        assert not d.labeled
        assert d.num_ratings == 4
        assert d.ids == ["1", "q"]

    def test_partition_covers(self):
        d = parse_dataset("0 1:1\n2 1:2\n0 1:3\n1 1:4")
        parts = d.partition()
        assert [len(p) for p in parts] == [2, 1, 1]
        assert sum(map(len, parts)) == len(d)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@st.composite
def datasets(draw, max_size=12):
    L = draw(st.integers(2, 5))
    n = draw(st.integers(1, max_size))
    insts = []
    for i in range(n):
        feats = draw(st.dictionaries(st.integers(1, 6), finite, max_size=4))
        insts.append(Instance(f"x{i}", feats, draw(st.integers(0, L - 1))))
    return Dataset(tuple(insts), L)


@settings(max_examples=100, deadline=None)
@given(datasets())
def test_serialize_round_trip(d):
    back = parse_dataset(serialize_dataset(d), expected_L=d.num_ratings)
    assert back == d
    for a, b in zip(back.instances, d.instances):
        for k in a.features:
            assert np.float64(a.features[k]).tobytes() == np.float64(b.features[k]).tobytes()


class TestDeduplicate:
    def test_keeps_high_rating(self):
        d = parse_dataset("id:a 3 1:1 2:2\nid:b 7 2:2 1:1", expected_L=10)
        out = deduplicate(d)
        assert len(out) == 1
        assert out.instances[0].rating == 7
        assert out.instances[0].id == "a"

    def test_identity_without_duplicates(self):
        d = parse_dataset("1 1:1\n0 1:2")
        assert deduplicate(d) == d

    def test_three_way_group(self):
        d = parse_dataset("id:a 1 1:5\nid:m 0 1:6\nid:b 1 1:5\nid:c 9 1:5", expected_L=10)
        out = deduplicate(d)
        assert out.ids == ["a", "m"]
        assert [x.rating for x in out] == [9, 0]

    @settings(max_examples=100, deadline=None)
    @given(datasets())
    def test_idempotent_and_covering(self, d):
        once = deduplicate(d)
        assert deduplicate(once) == once
        assert once.class_sizes().sum() == len(once)
        keys = [frozenset(x.features.items()) for x in once]
        assert len(keys) == len(set(keys))


def _ten_per_class():
    lines = [f"id:{r}_{i} {r} 1:{i}" for r in range(3) for i in range(10)]
    return parse_dataset("\n".join(lines))


class TestSplit:
    def test_ceiling_per_class(self):
        d = _ten_per_class()
        train, hold = split_holdout(d, SplitSpec(0.3, 3, seed=5), 0)
        assert list(hold.class_sizes()) == [3, 3, 3]
        assert list(train.class_sizes()) == [7, 7, 7]

    def test_deterministic(self):
        d = _ten_per_class()
        s = SplitSpec(0.3, 3, seed=11)
        assert split_holdout(d, s, 1) == split_holdout(d, s, 1)

    def test_repetitions_differ(self):
        d = _ten_per_class()
        s = SplitSpec(0.3, 3, seed=11)
        assert set(split_holdout(d, s, 0)[1].ids) != set(split_holdout(d, s, 1)[1].ids)

    def test_is_partition_and_keeps_order(self):
        d = _ten_per_class()
        train, hold = split_holdout(d, SplitSpec(0.5, 1, seed=2), 0)
        assert set(train.ids).isdisjoint(hold.ids)
        assert sorted(train.ids + hold.ids) == sorted(d.ids)
        pos = {i: k for k, i in enumerate(d.ids)}
        assert [pos[i] for i in train.ids] == sorted(pos[i] for i in train.ids)

    def test_train_side_never_emptied(self):
        d = parse_dataset("0 1:1\n0 1:2\n1 1:3\n1 1:4")
        train, hold = split_holdout(d, SplitSpec(0.99, 1), 0)
        assert list(train.class_sizes()) == [1, 1]

    def test_singleton_class_warns(self):
        d = parse_dataset("0 1:1\n0 1:2\n0 1:3\n1 1:4")
        with pytest.warns(DataWarning):
            train, hold = split_holdout(d, SplitSpec(0.5, 1), 0)
        assert "4" in train.ids

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            SplitSpec(1.0)
        with pytest.raises(ValueError):
            split_holdout(_ten_per_class(), SplitSpec(0.3, 2), 2)
