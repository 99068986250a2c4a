import pytest
from hypothesis import given, strategies as st

from bellscan.model import (
    CandidateEvent,
    CountsTable,
    DomainError,
    HeraldFilter,
    StatWithSigma,
    revalidate,
    validate_event,
)

events = st.builds(
    CandidateEvent,
    run_id=st.integers(0, 9),
    sync_index=st.integers(0, 10**9),
    click1_ps=st.integers(-10**6, 10**6),
    click2_ps=st.integers(-10**6, 10**6),
    clean_attempts=st.integers(0, 250),
    setting_a=st.sampled_from([0, 1]),
    setting_b=st.sampled_from([0, 1]),
    outcome_x=st.sampled_from([1, -1]),
    outcome_y=st.sampled_from([1, -1]),
)


def test_clean_attempts_saturate():
    ev = validate_event(0, 0, 0, 0, 300, 0, 1, 1, -1)
    assert ev.clean_attempts == 250


def test_setting_out_of_range_names_field():
    with pytest.raises(DomainError, match="setting_a out of range") as info:
        validate_event(0, 0, 0, 0, 0, 2, 0, 1, 1)
    assert info.value.field == "setting_a"


@pytest.mark.parametrize("field,args", [
    ("setting_b", (0, 0, 0, 0, 0, 0, -1, 1, 1)),
    ("outcome_x", (0, 0, 0, 0, 0, 0, 0, 0, 1)),
    ("outcome_y", (0, 0, 0, 0, 0, 0, 0, 1, 2)),
    ("clean_attempts", (0, 0, 0, 0, -1, 0, 0, 1, 1)),
    ("sync_index", (0, -5, 0, 0, 0, 0, 0, 1, 1)),
    ("run_id", (-1, 0, 0, 0, 0, 0, 0, 1, 1)),
])
def test_domain_errors(field, args):
    with pytest.raises(DomainError) as info:
        validate_event(*args)
    assert info.value.field == field


def test_negative_click_offsets_accepted_verbatim():
    ev = validate_event(0, 0, -1200, 3400, 0, 0, 0, 1, 1)
    assert (ev.click1_ps, ev.click2_ps, ev.clean_attempts) == (-1200, 3400, 0)


def test_non_integer_rejected():
    with pytest.raises(DomainError):
        validate_event(0, 0, 1.5, 0, 0, 0, 0, 1, 1)
    with pytest.raises(DomainError):
        validate_event(0, 0, True, 0, 0, 0, 0, 1, 1)


@given(events)
def test_validate_is_identity_on_valid_events(ev):
    assert revalidate(ev) == ev


@given(st.lists(events, max_size=40))
def test_counts_non_decreasing_under_add(evs):
    table = CountsTable()
    for ev in evs:
        bigger = table.add(ev)
        assert all(n2 >= n1 for n1, n2 in zip(table.cells, bigger.cells))
        assert bigger.grand_total == table.grand_total + 1
        table = bigger


def test_counts_table_layout():
    t = CountsTable.from_pairs({(1, 0): (1, 2, 3, 4)})
    assert t.n(1, 0, 1, 1) == 1
    assert t.n(1, 0, 1, -1) == 2
    assert t.n(1, 0, -1, 1) == 3
    assert t.n(1, 0, -1, -1) == 4
    assert t.total(1, 0) == 10 and t.total(0, 0) == 0


def test_counts_reject_negative():
    with pytest.raises(ValueError):
        CountsTable((-1,) + (0,) * 15)


def test_filter_validation_and_degeneracy():
    assert HeraldFilter(0, 0, 100, 0).degenerate is False
    assert HeraldFilter(0, 100, 100, 0).degenerate is True
    with pytest.raises(DomainError):
        HeraldFilter(0, 0, 100, 251)


def test_stat_invariants():
    with pytest.raises(ValueError):
        StatWithSigma(0.0, -1.0)
    with pytest.raises(ValueError):
        StatWithSigma(0.0, 1.0, z=0.0, p=1.5)
