"""Shared builders for the test suite."""

from __future__ import annotations

import random

from antsess.logs import LogRecord
from antsess.sessions import Session


def make_record(
    client: str = "10.0.0.1",
    ts: int = 1_700_000_000,
    resource: str = "/index.html",
    status: int = 200,
    referrer: str | None = None,
    user_agent: str | None = None,
) -> LogRecord:
    return LogRecord(
        client_id=client,
        timestamp=ts,
        resource=resource,
        status=status,
        referrer=referrer,
        user_agent=user_agent,
    )


def make_session(
    pages: dict[int, int] | set[int] | list[int],
    client: str = "u0",
    start: int = 0,
    catalog_size: int = 64,
    hits: dict[int, int] | None = None,
) -> Session:
    """Internally consistent session over the given visited pages.

    ``pages`` maps page index -> dwell seconds (or is a bare collection,
    giving every page 1 second).
    """
    if not isinstance(pages, dict):
        pages = {p: 1 for p in pages}
    page_list = sorted(pages)
    hits = hits or {p: 1 for p in page_list}
    history: list[int] = []
    for p in page_list:
        history.extend([p] * hits[p])
    return Session(
        client_id=client,
        identity=None,
        start_time=start,
        history=tuple(history),
        transaction_vector={p: 1 for p in page_list},
        time_vector={p: pages[p] for p in page_list},
        date_vector={p: start for p in page_list},
        hits_vector={p: hits[p] for p in page_list},
        total_time=sum(pages.values()),
        catalog_size=catalog_size,
    )


def random_sessions(
    n: int,
    seed: int,
    pool: int = 30,
    k_min: int = 4,
    k_max: int = 18,
) -> list[Session]:
    """Sessions over random page subsets of one shared pool: every pair
    overlaps enough to keep meetings interesting."""
    rng = random.Random(seed)
    sessions = []
    for i in range(n):
        k = rng.randint(k_min, min(k_max, pool))
        chosen = rng.sample(range(pool), k)
        pages = {p: rng.randint(1, 90) for p in chosen}
        hits = {p: rng.randint(1, 4) for p in chosen}
        sessions.append(
            make_session(pages, client=f"u{i}", start=i * 10_000, catalog_size=pool, hits=hits)
        )
    return sessions


def ring_sessions(n: int, seed: int, pool: int = 40, window: int = 12, step: int = 3) -> list[Session]:
    """Sessions on overlapping page windows around a ring: neighbouring
    windows stay similar, so nests keep competing for the whole run."""
    rng = random.Random(seed)
    sessions = []
    for i in range(n):
        start = (i * step) % pool
        base = [(start + k) % pool for k in range(window)]
        chosen = rng.sample(base, rng.randint(window - 4, window))
        pages = {p: rng.randint(1, 90) for p in chosen}
        sessions.append(
            make_session(pages, client=f"u{i}", start=i * 10_000, catalog_size=pool)
        )
    return sessions


def profile_sessions(
    n: int,
    profiles: int,
    seed: int,
    pages_per_profile: int = 5,
    min_visited: int = 4,
) -> tuple[list[Session], list[int]]:
    """Sessions drawn from disjoint page-set profiles, plus planted labels.

    Each session visits at least ``min_visited`` of its profile's pages, so
    same-profile pairs stay similar while cross-profile pairs share nothing.
    """
    rng = random.Random(seed)
    catalog_size = profiles * pages_per_profile
    sessions, labels = [], []
    for i in range(n):
        profile = i % profiles
        base = range(profile * pages_per_profile, (profile + 1) * pages_per_profile)
        k = rng.randint(min_visited, pages_per_profile)
        chosen = rng.sample(list(base), k)
        pages = {p: rng.randint(1, 90) for p in chosen}
        sessions.append(
            make_session(pages, client=f"u{i}", start=i * 10_000, catalog_size=catalog_size)
        )
        labels.append(profile)
    return sessions, labels


def assert_session_invariants(session: Session) -> None:
    """The five structural guarantees every produced session must satisfy."""
    visited = set(session.transaction_vector)
    assert all(v == 1 for v in session.transaction_vector.values())
    assert set(session.hits_vector) == visited
    assert set(session.date_vector) == visited
    assert set(session.time_vector) == visited
    assert all(h >= 1 for h in session.hits_vector.values())
    assert all(t >= 1 for t in session.time_vector.values())
    assert sum(session.hits_vector.values()) == len(session.history)
    assert visited == set(session.history)
    assert session.total_time == sum(session.time_vector.values())
    assert session.start_time <= min(session.date_vector.values(), default=session.start_time)
