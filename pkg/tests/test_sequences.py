import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cantornormal import (
    ArgumentError,
    ConstantSequence,
    IndexLogSequence,
    PeriodicSequence,
    PointwiseSequence,
    PresetSequence,
    TableSequence,
    parse_sequence_spec,
    sequence_from_json,
)


def test_constant_base_at():
    assert ConstantSequence(2).base_at(7) == 2


def test_periodic_base_at():
    assert PeriodicSequence([2, 3]).base_at(4) == 3


def test_iterated_log_small_index():
    # floor(log2(log2(14))) = 1, clamped up to 2
    assert PresetSequence("iterated-log").base_at(10) == 2


def test_base_lower_bound_rejected():
    with pytest.raises(ArgumentError):
        ConstantSequence(1)
    with pytest.raises(ArgumentError):
        PeriodicSequence([2, 1])


def test_position_validation():
    with pytest.raises(ArgumentError):
        ConstantSequence(2).base_at(0)
    with pytest.raises(ArgumentError):
        PresetSequence("log").base_at(-3)


def test_running_max_examples():
    s = PeriodicSequence([2, 5, 3])
    assert s.running_max(1) == 2
    assert s.running_max(3) == 5
    assert ConstantSequence(10).running_max(10**6) == 10


def test_running_max_monotone():
    s = PeriodicSequence([4, 2, 9, 3])
    values = [s.running_max(n) for n in range(1, 30)]
    assert values == sorted(values)
    brute = []
    top = 0
    for n in range(1, 30):
        top = max(top, s.base_at(n))
        brute.append(top)
    assert values == brute


@pytest.mark.parametrize("name", ["log", "iterated-log"])
def test_preset_bulk_matches_scalar(name):
    s = PresetSequence(name)
    lo, hi = 1, 5000
    assert s.bases(lo, hi).tolist() == [s.base_at(n) for n in range(lo, hi + 1)]
    # spot-check big positions too
    for n in (10**6, 10**7):
        assert s.bases(n, n)[0] == s.base_at(n)


def test_iterated_log_growth_envelope():
    s = PresetSequence("iterated-log")
    ns = np.unique(np.logspace(0, 7, 200).astype(np.int64))
    q = np.array([s.running_max(int(n)) for n in ns], dtype=np.float64)
    envelope = np.log2(np.log2(ns + 4)) + 2
    assert (q <= envelope).all()
    assert s.base_at(10**7) > s.base_at(1)  # unbounded in the limit


def test_index_log_values():
    s = IndexLogSequence()
    assert [s.base_at(i) for i in range(1, 9)] == [2, 2, 3, 3, 3, 3, 3, 4]
    assert s.bases(1, 64).tolist() == [s.base_at(i) for i in range(1, 65)]


def test_pointwise_ops():
    assert PointwiseSequence(ConstantSequence(4), "half-of").base_at(1) == 2
    assert PointwiseSequence(ConstantSequence(9), "half-of").base_at(5) == 4
    # natural log: floor(log 9) = 2
    assert PointwiseSequence(ConstantSequence(9), "log-of").base_at(1) == 2
    assert PointwiseSequence(ConstantSequence(9), "log-of", "2").base_at(1) == 3


def test_table_extension():
    s = TableSequence([3, 4, 2])
    assert [s.base_at(n) for n in (1, 2, 3, 4, 99)] == [3, 4, 2, 2, 2]
    assert s.running_max(99) == 4
    assert s.bases(2, 6).tolist() == [4, 2, 2, 2, 2]


def test_json_round_trip():
    for s in (
        ConstantSequence(5),
        PeriodicSequence([2, 3, 7]),
        TableSequence([2, 9]),
        PresetSequence("log"),
        IndexLogSequence("2"),
        PointwiseSequence(PresetSequence("log"), "half-of"),
    ):
        assert sequence_from_json(s.to_json()) == s


def test_spec_minilanguage(tmp_path):
    assert parse_sequence_spec("constant:2") == ConstantSequence(2)
    assert parse_sequence_spec("periodic:2,3") == PeriodicSequence([2, 3])
    assert parse_sequence_spec("preset:iterated-log") == PresetSequence("iterated-log")
    path = tmp_path / "seq.json"
    path.write_text(json.dumps({"kind": "table", "bases": [2, 3], "extend": "repeat-last"}))
    assert parse_sequence_spec(f"file:{path}") == TableSequence([2, 3])
    with pytest.raises(ArgumentError):
        parse_sequence_spec("bogus:1")
    with pytest.raises(ArgumentError):
        parse_sequence_spec("preset:no-such-preset")


@given(st.lists(st.integers(min_value=2, max_value=50), min_size=1, max_size=8),
       st.integers(min_value=1, max_value=200))
def test_periodic_running_max_is_prefix_max(pattern, n):
    s = PeriodicSequence(pattern)
    assert s.running_max(n) == max(s.base_at(i) for i in range(1, n + 1))
