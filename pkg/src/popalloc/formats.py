"""File formats: scenario documents, trace files, snapshot dumps, sweep CSV.

All documents carry rates in Mbps; conversion to the internal bits/second
happens here and nowhere else. JSON output is sorted and floats use the
shortest round-trip representation, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from .allocation import MBPS, Allocation, SessionCensus, SystemParams
from .errors import DocumentError
from .layers import LayeredPlan
from .simulation import EventKind, SimEvent, Snapshot, TraceResult


def _require(doc: dict, key: str, kind: type, where: str) -> Any:
    if key not in doc:
        raise DocumentError(f"{where}: missing required field {key!r}")
    value = doc[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise DocumentError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def parse_scenario_document(text: str) -> tuple[SystemParams, SessionCensus]:
    """Parse the one-shot input document.

    Expected shape::

        {"capacity_mbps": 30, "beta_max_mbps": 2, "beta_min_mbps": 0.6,
         "sessions": [{"id": "s1", "users": 40}, ...]}
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("scenario document must be a JSON object")
    capacity = _require(doc, "capacity_mbps", float, "scenario")
    beta_max = _require(doc, "beta_max_mbps", float, "scenario")
    beta_min = _require(doc, "beta_min_mbps", float, "scenario")
    sessions = _require(doc, "sessions", list, "scenario")
    if not sessions:
        raise DocumentError("scenario: 'sessions' must not be empty")
    entries = []
    for i, item in enumerate(sessions):
        if not isinstance(item, dict):
            raise DocumentError(f"scenario: sessions[{i}] must be an object")
        sid = _require(item, "id", str, f"sessions[{i}]")
        users = _require(item, "users", int, f"sessions[{i}]")
        entries.append((sid, users))
    try:
        params = SystemParams.from_mbps(capacity, beta_max, beta_min)
        census = SessionCensus.from_counts(entries)
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    return params, census


def load_scenario_document(path: Path | str) -> tuple[SystemParams, SessionCensus]:
    return parse_scenario_document(Path(path).read_text())


def allocation_document(
    params: SystemParams,
    census: SessionCensus,
    allocation: Allocation,
    per_session_satisfaction: dict[str, float],
    plans: Sequence[LayeredPlan],
    extras: dict[str, Any],
) -> dict:
    """One-shot output: the input document mirrored, each session annotated
    with its allocated rate, satisfaction, and layer plan."""
    rates = allocation.rates()
    plan_by_id = {plan.session_id: plan for plan in plans}
    rank_by_id = {entry.session_id: i + 1 for i, entry in enumerate(allocation.entries)}
    sessions = []
    for entry in census.entries:
        plan = plan_by_id[entry.session_id]
        sessions.append(
            {
                "id": entry.session_id,
                "users": entry.users,
                "rank": rank_by_id[entry.session_id],
                "rate_mbps": rates[entry.session_id] / MBPS,
                "satisfaction": per_session_satisfaction[entry.session_id],
                "layers": {
                    "enhancements": plan.enhancement_count,
                    "granted_mbps": plan.granted_rate / MBPS,
                    "residual_mbps": plan.residual_rate / MBPS,
                },
            }
        )
    doc = {
        "capacity_mbps": params.capacity / MBPS,
        "beta_max_mbps": params.max_session_rate / MBPS,
        "beta_min_mbps": params.min_session_rate / MBPS,
        "regime": allocation.regime.value,
        "sessions": sessions,
    }
    doc.update(extras)
    return doc


def parse_trace(text: str) -> list[SimEvent]:
    """Parse a trace file: one JSON object per line.

    Line shape: ``{"t": <seconds>, "ev": "join|leave|switch|start|stop",
    "s": "<id>", "to": "<id, switches only>"}``. Blank lines are ignored.
    """
    kinds = {k.value: k for k in EventKind}
    events: list[SimEvent] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"trace line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise DocumentError(f"trace line {lineno}: must be an object")
        where = f"trace line {lineno}"
        t = _require(doc, "t", float, where)
        ev = _require(doc, "ev", str, where)
        sid = _require(doc, "s", str, where)
        if ev not in kinds:
            raise DocumentError(f"{where}: unknown event kind {ev!r}")
        to = doc.get("to")
        if to is not None and not isinstance(to, str):
            raise DocumentError(f"{where}: field 'to' must be a string")
        try:
            events.append(SimEvent(t, kinds[ev], sid, to))
        except ValueError as exc:
            raise DocumentError(f"{where}: {exc}") from exc
    return events


def load_trace(path: Path | str) -> list[SimEvent]:
    return parse_trace(Path(path).read_text())


def trace_text(events: Iterable[SimEvent]) -> str:
    """Serialize events to the one-object-per-line trace format."""
    lines = []
    for event in events:
        doc: dict[str, Any] = {"t": event.time, "ev": event.kind.value, "s": event.session_id}
        if event.to_session is not None:
            doc["to"] = event.to_session
        lines.append(json.dumps(doc, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


def census_to_list(census: SessionCensus) -> list[dict]:
    return [{"id": e.session_id, "users": e.users} for e in census.entries]


def snapshot_to_dict(snapshot: Snapshot) -> dict:
    """Flatten one snapshot for JSON output, rates in Mbps."""
    pop_sat = snapshot.satisfaction_popularity.per_session
    comparison = snapshot.comparison
    eq_entries = snapshot.equal_share.entries
    return {
        "t": snapshot.time,
        "regime": snapshot.popularity.regime.value,
        "census": census_to_list(snapshot.census),
        "popularity": [
            {
                "id": entry.session_id,
                "rate_mbps": entry.rate / MBPS,
                "satisfaction": pop_sat[entry.session_id],
            }
            for entry in snapshot.popularity.entries
        ],
        "equal_share": {
            "rate_mbps": eq_entries[0].rate / MBPS,
            "satisfaction": snapshot.satisfaction_equal.average,
        },
        "average_satisfaction": {
            "popularity": snapshot.satisfaction_popularity.average,
            "equal_share": snapshot.satisfaction_equal.average,
        },
        "comparison": {
            "improved_users": comparison.improved_users,
            "degraded_users": comparison.degraded_users,
            "unchanged_users": comparison.unchanged_users,
            "delta_avg": comparison.delta_avg,
        },
        "plans": [
            {
                "id": plan.session_id,
                "enhancements": plan.enhancement_count,
                "granted_mbps": plan.granted_rate / MBPS,
                "residual_mbps": plan.residual_rate / MBPS,
            }
            for plan in snapshot.plans
        ],
    }


def trace_result_document(result: TraceResult) -> dict:
    return {
        "snapshots": [snapshot_to_dict(s) for s in result.snapshots],
        "rejections": [
            {
                "t": r.event.time,
                "ev": r.event.kind.value,
                "s": r.event.session_id,
                "to": r.event.to_session,
                "error": r.error,
                "detail": r.detail,
            }
            for r in result.rejections
        ],
    }


def dump_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
