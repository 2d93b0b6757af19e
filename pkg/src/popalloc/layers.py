"""Whole-layer quantization of continuous session rates.

Receivers subscribe to complete video layers, never fractions, so a
session's continuous rate is realized as one base layer plus as many
uniform enhancement layers as fit underneath the allocated rate.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .allocation import MBPS, Allocation, SystemParams
from .errors import ProfileInfeasible


@dataclass(frozen=True)
class LayerProfile:
    """Layer sizing for a run: base-layer rate, uniform enhancement-layer
    rate, and an optional cap on stacked enhancement layers. The base rate
    must not exceed the system's per-session floor, or the guaranteed
    minimum quality could not be delivered."""

    base_rate: float
    enhancement_rate: float
    max_layers: int | None = None

    def __post_init__(self) -> None:
        if not self.base_rate > 0:
            raise ValueError(f"base_rate must be positive, got {self.base_rate}")
        if not self.enhancement_rate > 0:
            raise ValueError(
                f"enhancement_rate must be positive, got {self.enhancement_rate}"
            )
        if self.max_layers is not None and self.max_layers < 0:
            raise ValueError(f"max_layers must be >= 0, got {self.max_layers}")

    @classmethod
    def from_mbps(
        cls, base_rate: float, enhancement_rate: float, max_layers: int | None = None
    ) -> LayerProfile:
        return cls(base_rate * MBPS, enhancement_rate * MBPS, max_layers)


@dataclass(frozen=True)
class LayeredPlan:
    """Layer subscription for one session: base plus ``enhancement_count``
    enhancements, granting ``granted_rate`` and leaving ``residual_rate`` of
    the allocation unused."""

    session_id: str
    enhancement_count: int
    granted_rate: float
    residual_rate: float


def check_profile_fits(params: SystemParams, profile: LayerProfile) -> None:
    """Reject profiles whose base layer exceeds the guaranteed floor."""
    if profile.base_rate > params.min_session_rate:
        raise ProfileInfeasible(
            f"base layer {profile.base_rate / MBPS:g} Mbps exceeds the session "
            f"floor {params.min_session_rate / MBPS:g} Mbps"
        )


def quantize_allocation(
    allocation: Allocation, profile: LayerProfile
) -> list[LayeredPlan]:
    """Largest whole-layer stack at or below each session's allocated rate.

    Plans come back in the allocation's entry order (rank order for
    popularity allocations). Raises :class:`ProfileInfeasible` if the base
    layer alone exceeds some session's rate.
    """
    plans: list[LayeredPlan] = []
    for entry in allocation.entries:
        if profile.base_rate > entry.rate:
            raise ProfileInfeasible(
                f"base layer {profile.base_rate / MBPS:g} Mbps exceeds the "
                f"{entry.rate / MBPS:g} Mbps allocated to session {entry.session_id!r}"
            )
        count = int((entry.rate - profile.base_rate) // profile.enhancement_rate)
        # Division can land one off at exact-fit boundaries; settle on the
        # true maximum under float evaluation.
        while profile.base_rate + (count + 1) * profile.enhancement_rate <= entry.rate:
            count += 1
        while count > 0 and profile.base_rate + count * profile.enhancement_rate > entry.rate:
            count -= 1
        if profile.max_layers is not None:
            count = min(count, profile.max_layers)
        granted = profile.base_rate + count * profile.enhancement_rate
        plans.append(
            LayeredPlan(entry.session_id, count, granted, entry.rate - granted)
        )
    return plans


def plan_total_rate(plans: Iterable[LayeredPlan] | Sequence[LayeredPlan]) -> float:
    """Aggregate granted rate, reported against capacity for headroom accounting."""
    return sum(plan.granted_rate for plan in plans)
