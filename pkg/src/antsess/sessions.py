"""Session reconstruction from page-request streams.

A session is one client's maximal run of requests whose consecutive gaps
stay within the timeout.  Each session carries the full per-page view of
the visit: which pages were touched, when first, how often, and for how
long, plus the raw visit order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .logs import LogRecord, PageCatalog

DEFAULT_TIMEOUT = 1800  # seconds


class EmptyCatalog(Exception):
    """Records were supplied but the page catalog has no pages."""


class LengthMismatch(Exception):
    """History and timestamp sequences differ in length."""


@dataclass(frozen=True)
class Session:
    """One reconstructed visit.

    The four vectors are stored sparsely (page index -> value) but are
    defined over the whole catalog: a missing key means the page was not
    visited.  ``catalog_size`` records the catalog length the indices
    refer to, so sessions from different catalogs cannot be compared by
    accident.
    """

    client_id: str
    identity: str | None
    start_time: int
    history: tuple[int, ...]
    transaction_vector: dict[int, int]
    time_vector: dict[int, int]
    date_vector: dict[int, int]
    hits_vector: dict[int, int]
    total_time: int
    catalog_size: int

    @property
    def visited_pages(self) -> frozenset[int]:
        return frozenset(self.transaction_vector)


def estimate_times(
    history: Sequence[int], timestamps: Sequence[int]
) -> tuple[dict[int, int], int]:
    """Per-page dwell seconds and session total from one visit sequence.

    The dwell time of a visit is the gap to the next request.  The final
    visit has no successor, so its dwell is the mean of the other visits'
    dwells, rounded half-up to whole seconds (1 second for a single-visit
    session).  A zero gap (page loaded too quickly) is bumped to 1 second
    before the mean is taken.
    """
    if len(history) != len(timestamps):
        raise LengthMismatch(
            f"{len(history)} visits but {len(timestamps)} timestamps"
        )
    if not history:
        raise ValueError("a session has at least one visit")
    dwells: list[int] = []
    for earlier, later in zip(timestamps, timestamps[1:]):
        if later < earlier:
            raise ValueError("timestamps must be non-decreasing")
        dwells.append(max(1, later - earlier))
    if dwells:
        total, n = sum(dwells), len(dwells)
        last = (2 * total + n) // (2 * n)  # round-half-up integer mean
    else:
        last = 1
    dwells.append(last)
    time_vector: dict[int, int] = {}
    for page, dwell in zip(history, dwells):
        time_vector[page] = time_vector.get(page, 0) + dwell
    return time_vector, sum(dwells)


def _build_session(run: Sequence[LogRecord], catalog: PageCatalog) -> Session:
    history = tuple(catalog.index[r.resource] for r in run)
    timestamps = [r.timestamp for r in run]
    time_vector, total_time = estimate_times(history, timestamps)
    hits: dict[int, int] = {}
    first_seen: dict[int, int] = {}
    for page, ts in zip(history, timestamps):
        hits[page] = hits.get(page, 0) + 1
        first_seen.setdefault(page, ts)
    pages = sorted(hits)
    return Session(
        client_id=run[0].client_id,
        identity=None,
        start_time=timestamps[0],
        history=history,
        transaction_vector={p: 1 for p in pages},
        time_vector={p: time_vector[p] for p in pages},
        date_vector={p: first_seen[p] for p in pages},
        hits_vector={p: hits[p] for p in pages},
        total_time=total_time,
        catalog_size=catalog.size,
    )


def _sort_key(record: LogRecord) -> tuple:
    # total order => one client's sessions are invariant under input shuffles
    return (
        record.timestamp,
        record.resource,
        record.status,
        record.referrer or "",
        record.user_agent or "",
    )


def sessionize(
    records: Iterable[LogRecord],
    catalog: PageCatalog,
    timeout: int = DEFAULT_TIMEOUT,
) -> list[Session]:
    """Split each client's request stream at gaps exceeding the timeout.

    Clients are emitted in order of first appearance, each client's
    sessions chronologically.  Single-request sessions are kept.
    """
    if timeout <= 0:
        raise ValueError("timeout must be positive")
    by_client: dict[str, list[LogRecord]] = {}
    for record in records:
        by_client.setdefault(record.client_id, []).append(record)
    if by_client and catalog.size == 0:
        raise EmptyCatalog("cannot sessionize against an empty catalog")
    sessions: list[Session] = []
    for rows in by_client.values():
        rows.sort(key=_sort_key)
        run_start = 0
        for i in range(1, len(rows)):
            if rows[i].timestamp - rows[i - 1].timestamp > timeout:
                sessions.append(_build_session(rows[run_start:i], catalog))
                run_start = i
        sessions.append(_build_session(rows[run_start:], catalog))
    return sessions


def session_to_dict(session: Session) -> dict:
    return {
        "client_id": session.client_id,
        "identity": session.identity,
        "start_time": session.start_time,
        "history": list(session.history),
        "transaction_vector": {str(k): v for k, v in session.transaction_vector.items()},
        "time_vector": {str(k): v for k, v in session.time_vector.items()},
        "date_vector": {str(k): v for k, v in session.date_vector.items()},
        "hits_vector": {str(k): v for k, v in session.hits_vector.items()},
        "total_time": session.total_time,
        "catalog_size": session.catalog_size,
    }


def session_from_dict(data: dict) -> Session:
    def intkeys(m: dict) -> dict[int, int]:
        return {int(k): v for k, v in m.items()}

    return Session(
        client_id=data["client_id"],
        identity=data.get("identity"),
        start_time=data["start_time"],
        history=tuple(data["history"]),
        transaction_vector=intkeys(data["transaction_vector"]),
        time_vector=intkeys(data["time_vector"]),
        date_vector=intkeys(data["date_vector"]),
        hits_vector=intkeys(data["hits_vector"]),
        total_time=data["total_time"],
        catalog_size=data["catalog_size"],
    )


def dump_sessions_jsonl(sessions: Iterable[Session]) -> str:
    """The interchange format between pipeline stages: one object per line."""
    return "".join(
        json.dumps(session_to_dict(s), sort_keys=True, separators=(",", ":")) + "\n"
        for s in sessions
    )


def load_sessions_jsonl(source: Iterable[str] | IO[str]) -> list[Session]:
    return [session_from_dict(json.loads(line)) for line in source if line.strip()]
