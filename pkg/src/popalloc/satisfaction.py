"""User satisfaction metrics and the head-to-head scheme comparison.

Satisfaction is the linear rate ratio: a session's allocated rate over the
full-quality rate, 1.0 when the demand is fully met. Averages weight each
session by its audience.
"""

from __future__ import annotations

from dataclasses import dataclass

from .allocation import (
    MBPS,
    Allocation,
    Regime,
    Scheme,
    SessionCensus,
    SystemParams,
    equal_share_rate,
    popularity_allocate,
    rank_sessions,
)
from .errors import ZeroAudience

# Rates within this many Mbps count as "unchanged" between schemes: uniform
# censuses make both schemes agree exactly, but float summation order can
# perturb the cascade by a few ulps.
RATE_TIE_TOLERANCE_MBPS = 1e-12


@dataclass(frozen=True)
class SatisfactionReport:
    """Per-session satisfaction plus the audience-weighted average."""

    scheme: Scheme
    per_session: dict[str, float]
    average: float


@dataclass(frozen=True)
class SchemeComparison:
    """Who gains and who loses when popularity allocation replaces equal share."""

    improved_users: int
    degraded_users: int
    unchanged_users: int
    avg_satisfaction_equal: float
    avg_satisfaction_popularity: float

    @property
    def delta_avg(self) -> float:
        return self.avg_satisfaction_popularity - self.avg_satisfaction_equal


def equal_share_satisfaction(params: SystemParams, session_count: int) -> float:
    """Satisfaction of every user under the equal split."""
    if session_count < 1:
        raise ValueError(f"session_count must be >= 1, got {session_count}")
    if params.max_session_rate * session_count <= params.capacity:
        return 1.0
    return params.capacity / (params.max_session_rate * session_count)


def session_satisfaction(
    params: SystemParams, allocation: Allocation
) -> dict[str, float]:
    """Per-session satisfaction: allocated rate over the full-quality rate."""
    if allocation.regime is Regime.SATURATED:
        return {entry.session_id: 1.0 for entry in allocation.entries}
    return {
        entry.session_id: entry.rate / params.max_session_rate
        for entry in allocation.entries
    }


def average_satisfaction(
    params: SystemParams, allocation: Allocation, census: SessionCensus
) -> float:
    """Audience-weighted mean satisfaction across sessions."""
    total_users = census.total_users
    if total_users == 0:
        raise ZeroAudience("average satisfaction is undefined with no users")
    if allocation.regime is Regime.SATURATED:
        return 1.0
    counts = census.counts()
    per_session = session_satisfaction(params, allocation)
    if set(per_session) != set(counts):
        raise ValueError("allocation and census cover different sessions")
    weighted = sum(per_session[sid] * counts[sid] for sid in per_session)
    return weighted / total_users


def satisfaction_report(
    params: SystemParams, allocation: Allocation, census: SessionCensus
) -> SatisfactionReport:
    """Bundle per-session and average satisfaction for one allocation.

    With an all-empty census the weighted average is undefined; every session
    then counts once, which matches the allocator's uniform fallback.
    """
    per_session = session_satisfaction(params, allocation)
    if census.total_users == 0:
        average = sum(per_session.values()) / len(per_session)
    else:
        average = average_satisfaction(params, allocation, census)
    return SatisfactionReport(allocation.scheme, per_session, average)


def compare_schemes(params: SystemParams, census: SessionCensus) -> SchemeComparison:
    """Run both schemes on one census and tally improved/degraded users.

    Each user is classified by the sign of its session's rate change
    (popularity minus equal share), with ties called at
    ``RATE_TIE_TOLERANCE_MBPS``. Propagates :class:`InfeasibleCapacity` when
    the floor does not fit.
    """
    ranked = rank_sessions(census)
    pop_allocation, _ = popularity_allocate(params, ranked)
    eq_rate = equal_share_rate(params, census.session_count)

    improved = degraded = unchanged = 0
    pop_rates = pop_allocation.rates()
    for entry in census.entries:
        delta_mbps = (pop_rates[entry.session_id] - eq_rate) / MBPS
        if abs(delta_mbps) <= RATE_TIE_TOLERANCE_MBPS:
            unchanged += entry.users
        elif delta_mbps > 0:
            improved += entry.users
        else:
            degraded += entry.users

    avg_equal = equal_share_satisfaction(params, census.session_count)
    if census.total_users == 0:
        # Uniform fallback rates equal the even split, so the schemes agree.
        avg_popularity = avg_equal
    else:
        avg_popularity = average_satisfaction(params, pop_allocation, census)
    return SchemeComparison(improved, degraded, unchanged, avg_equal, avg_popularity)
