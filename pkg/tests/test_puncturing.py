from itertools import combinations

import pytest

from errors import CapacityError, InvalidShorteningError, RangeError, ShapeError
from puncturing import (
    Mode,
    PuncturingTable,
    count_equivalent_tables,
    derive_source_puncture_set,
    enumerate_equivalent_tables,
    is_valid_shortening,
    make_table,
    neighbor_distance_bounds_check,
    propagate_flags,
    qup_table,
    realizable_source_sets,
    rqup_table,
    scheme_table,
    table_from_text,
    table_to_text,
    wang_reference_table,
)


def _table_without(N, punctured, mode):
    gone = set(punctured)
    return PuncturingTable(tuple(0 if i in gone else 1 for i in range(1, N + 1)), mode)


def test_qup_table_example():
    t = qup_table(8, 3)
    assert t.punctured == (1, 3, 5)
    assert t.mode is Mode.C0
    assert (t.N, t.M, t.Q) == (8, 5, 3)


def test_rqup_table_example():
    t = rqup_table(8, 3)
    assert t.punctured == (4, 6, 8)
    assert t.mode is Mode.C1


def test_wang_reference_table_punctures_the_tail():
    t = wang_reference_table(8, 3)
    assert t.punctured == (6, 7, 8)
    assert t.mode is Mode.C1
    assert is_valid_shortening(t)


def test_table_constructors_reject_too_many_punctures():
    with pytest.raises(RangeError):
        qup_table(8, 4)
    with pytest.raises(RangeError):
        rqup_table(8, -1)
    with pytest.raises(ShapeError):
        qup_table(12, 1)


def test_make_table_rate_check():
    with pytest.raises(RangeError):
        make_table([0, 1], "C0")
    assert make_table([0, 1], "C0", allow_low_rate=True).M == 1
    with pytest.raises(RangeError):
        make_table([0, 2, 1, 1], "C0")


def test_mode_parse():
    assert Mode.parse("c1") is Mode.C1
    with pytest.raises(RangeError):
        Mode.parse("C2")


def test_scheme_table_mode_override():
    t = scheme_table("qup", 16, 5, "C1")
    assert t.mode is Mode.C1
    assert t.table == qup_table(16, 5).table
    with pytest.raises(RangeError):
        scheme_table("shin", 16, 5)


@pytest.mark.parametrize("n", range(1, 11))
def test_source_sets_of_qup_and_rqup(n):
    N = 1 << n
    for Q in range(1, N // 2):
        assert derive_source_puncture_set(qup_table(N, Q)).indices == tuple(range(1, Q + 1))
        assert derive_source_puncture_set(rqup_table(N, Q)).indices == tuple(range(N - Q + 1, N + 1))


def test_no_puncturing_gives_empty_source_set():
    assert derive_source_puncture_set(qup_table(16, 0)).indices == ()
    assert derive_source_puncture_set(rqup_table(16, 0)).indices == ()


def test_invalid_shortening_is_rejected():
    t = make_table([0, 1, 1, 1], "C1")
    assert not is_valid_shortening(t)
    with pytest.raises(InvalidShorteningError):
        derive_source_puncture_set(t)
    # the same table is fine as C0
    assert derive_source_puncture_set(t, Mode.C0).indices == (1,)


@pytest.mark.parametrize("N", [8, 16, 32, 64])
def test_single_c0_puncture_always_removes_the_first_source_bit(N):
    for position in range(1, N + 1):
        t = _table_without(N, [position], Mode.C0)
        assert derive_source_puncture_set(t).indices == (1,)


def test_c0_source_set_size_matches_puncture_count():
    for Q in range(0, 5):
        for punctured in combinations(range(1, 9), Q):
            t = _table_without(8, punctured, Mode.C0)
            assert len(derive_source_puncture_set(t)) == Q


def test_neighbor_distance_bounds_hold_for_qup():
    for n in range(2, 9):
        N = 1 << n
        for Q in range(1, N // 2):
            assert neighbor_distance_bounds_check(qup_table(N, Q))


def test_neighbor_distance_bounds_flag_clustered_punctures():
    assert not neighbor_distance_bounds_check(_table_without(16, [1, 2, 3, 4], Mode.C0))


def test_count_equivalent_tables_examples():
    assert count_equivalent_tables(8, 3).count == 32
    assert count_equivalent_tables(8, 1).count == 8
    assert count_equivalent_tables(1024, 1).count == 1024


def test_count_equivalent_tables_large_exponent_has_no_integer():
    big = count_equivalent_tables(1024, 300)
    assert big.count is None
    assert big.exponent > 63


def test_count_equivalent_tables_range():
    with pytest.raises(RangeError):
        count_equivalent_tables(8, 0)
    with pytest.raises(RangeError):
        count_equivalent_tables(8, 4)


def test_enumerate_equivalent_tables_example():
    found = enumerate_equivalent_tables(8, 3, (1, 2, 3))
    assert len(found) == 32
    assert (2, 4, 6) in found
    assert (2, 6, 8) in found
    assert (1, 3, 5) in found
    assert found == sorted(found)


def test_enumerate_equivalent_tables_trivial_cases():
    assert enumerate_equivalent_tables(2, 1, [1]) == [(1,), (2,)]
    assert enumerate_equivalent_tables(4, 0, []) == [()]


@pytest.mark.parametrize("N,Q", [(8, 1), (8, 2), (8, 3), (16, 1), (16, 4)])
def test_enumeration_agrees_with_formula(N, Q):
    reference = derive_source_puncture_set(qup_table(N, Q))
    assert len(enumerate_equivalent_tables(N, Q, reference)) == count_equivalent_tables(N, Q).count


def test_enumeration_agrees_with_trellis_propagation():
    reference = (1, 2, 3)
    found = set(enumerate_equivalent_tables(8, 3, reference))
    for punctured in combinations(range(1, 9), 3):
        t = _table_without(8, punctured, Mode.C0)
        assert (derive_source_puncture_set(t).indices == reference) == (punctured in found)


def test_enumeration_capacity():
    with pytest.raises(CapacityError):
        enumerate_equivalent_tables(64, 1, [1])


def test_realizable_source_sets_single_puncture():
    assert realizable_source_sets(8, 1, Mode.C0) == [(1,)]
    assert realizable_source_sets(8, 1, Mode.C1) == [(8,)]


def test_realizable_source_sets_match_brute_force():
    for mode in (Mode.C0, Mode.C1):
        for Q in range(0, 5):
            brute = {
                tuple(int(i) + 1 for i, f in enumerate(propagate_flags(_table_without(8, p, mode), mode)) if f)
                for p in combinations(range(1, 9), Q)
            }
            assert realizable_source_sets(8, Q, mode) == sorted(brute)


def test_table_text_roundtrip():
    t = rqup_table(16, 5)
    text = table_to_text(t)
    assert text.splitlines()[0] == "16 5 C1"
    assert table_from_text(text) == t


def test_table_from_text_rejects_inconsistent_header():
    with pytest.raises(ShapeError):
        table_from_text("8 2 C0\n01010111\n")
    with pytest.raises(ShapeError):
        table_from_text("8 C0\n01010111\n")
