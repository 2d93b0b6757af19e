"""Shared invariant assertions applied to allocations and snapshots."""

from popalloc import Allocation, Regime, SessionCensus, SystemParams, rank_sessions

CONSERVATION_REL = 1e-9


def assert_allocation_invariants(
    params: SystemParams, census: SessionCensus, allocation: Allocation
) -> None:
    """Everything a popularity allocation must satisfy, by regime."""
    rates = allocation.rates()
    assert set(rates) == {e.session_id for e in census.entries}

    if allocation.regime is Regime.SATURATED:
        assert all(r == params.max_session_rate for r in rates.values())
        return

    assert allocation.regime is Regime.CONSTRAINED
    ranked = rank_sessions(census)
    ordered = [rates[e.session_id] for e in ranked.entries]
    m = len(ordered)
    fair = params.capacity / m

    total = sum(ordered)
    assert abs(total - params.capacity) <= CONSERVATION_REL * params.capacity

    for rate in ordered:
        assert params.min_session_rate <= rate <= params.max_session_rate

    for earlier, later in zip(ordered, ordered[1:]):
        assert earlier >= later
    slack = CONSERVATION_REL * params.capacity
    assert ordered[0] >= fair - slack
    assert ordered[-1] <= fair + slack

    # equal audiences must get exactly equal rates
    by_count: dict[int, float] = {}
    for entry in ranked.entries:
        if entry.users in by_count:
            assert rates[entry.session_id] == by_count[entry.users]
        else:
            by_count[entry.users] = rates[entry.session_id]
