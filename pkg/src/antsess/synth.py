"""Synthetic access-log generator with planted ground truth.

Logs are built from a population of users, each belonging to exactly one
behavioural profile (a small personal subset of the site's pages).  The
construction guarantees two properties the evaluation leans on:

* inter-session gaps strictly exceed the session timeout while
  intra-session gaps stay strictly below it, so sessionizing the output
  recovers exactly the planted session boundaries;
* with disjoint profiles, sessions from different profiles share no
  pages at all, so planted cluster structure is unambiguous.

The number of sessions planned for a given transaction volume follows a
piecewise-linear calibration curve anchored at typical university-scale
web-server workloads (about 129 sessions per 5,000 requests, growing to
about 917 per 50,000).  Between anchors the curve interpolates linearly
and outside them it extrapolates with the nearest segment's slope.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import IO, Sequence

from .logs import format_clf_timestamp

# (transactions, planned sessions) calibration anchors
SESSION_PLAN_ANCHORS: tuple[tuple[int, int], ...] = (
    (5000, 129),
    (10000, 231),
    (20000, 396),
    (30000, 582),
    (40000, 761),
    (50000, 917),
)

BASE_EPOCH = 1704067200  # 2024-01-01 00:00:00 UTC

ASSET_PATHS = (
    "/static/site.css",
    "/static/app.js",
    "/img/logo.png",
    "/img/banner.jpg",
    "/img/spacer.gif",
    "/favicon.ico",
)

CONSTANT_USER_AGENT = "Mozilla/5.0 (synthetic)"


class InfeasibleModel(Exception):
    """The requested profile layout cannot be built."""


def planned_sessions(target_transactions: int) -> int:
    """Sessions the calibration curve plans for a transaction volume."""
    if target_transactions < 1:
        raise ValueError("target_transactions must be positive")
    anchors = SESSION_PLAN_ANCHORS
    x = target_transactions
    if x <= anchors[0][0]:
        lo, hi = anchors[0], anchors[1]
    elif x >= anchors[-1][0]:
        lo, hi = anchors[-2], anchors[-1]
    else:
        lo, hi = next(
            (a, b) for a, b in zip(anchors, anchors[1:]) if a[0] <= x <= b[0]
        )
    slope = (hi[1] - lo[1]) / (hi[0] - lo[0])
    return max(1, round(lo[1] + slope * (x - lo[0])))


def transactions_for_sessions(session_count: int) -> int:
    """Smallest transaction volume whose plan is exactly ``session_count``."""
    if session_count < 1:
        raise ValueError("session_count must be positive")
    anchors = SESSION_PLAN_ANCHORS
    if session_count <= anchors[0][1]:
        lo, hi = anchors[0], anchors[1]
    elif session_count >= anchors[-1][1]:
        lo, hi = anchors[-2], anchors[-1]
    else:
        lo, hi = next(
            (a, b) for a, b in zip(anchors, anchors[1:]) if a[1] <= session_count <= b[1]
        )
    slope = (hi[1] - lo[1]) / (hi[0] - lo[0])
    guess = round(lo[0] + (session_count - lo[1]) / slope)
    span = int(1 / slope) + 2
    for candidate in range(max(1, guess - span), guess + span + 1):
        if planned_sessions(candidate) == session_count:
            return candidate
    raise ValueError(f"no transaction volume plans exactly {session_count} sessions")


@dataclass(frozen=True)
class ProfileSpec:
    """One behavioural profile: its pages and how its sessions look."""

    pages: tuple[int, ...]
    length_sigma: float = 0.5  # lognormal spread of session lengths
    dwell_range: tuple[int, int] = (2, 120)


@dataclass(frozen=True)
class TrafficModel:
    site_pages: int = 50
    profiles: tuple[ProfileSpec, ...] = ()
    users_per_profile: int = 20
    inter_session_gap: tuple[int, int] = (1801, 10800)
    session_timeout: int = 1800
    disjoint_profiles: bool = True
    asset_ratio: float = 0.0
    seed: int = 1

    def __post_init__(self) -> None:
        if not self.profiles:
            raise ValueError("a traffic model needs at least one profile")
        if self.users_per_profile < 1:
            raise ValueError("users_per_profile must be positive")
        if not 0.0 <= self.asset_ratio < 1.0:
            raise ValueError("asset_ratio must lie in [0, 1)")
        if self.inter_session_gap[0] <= self.session_timeout:
            raise ValueError("inter-session gaps must strictly exceed the timeout")
        for spec in self.profiles:
            if not spec.pages:
                raise InfeasibleModel("a profile with no pages cannot emit sessions")
            if max(spec.pages) >= self.site_pages:
                raise InfeasibleModel("profile pages exceed the site page count")
            if spec.dwell_range[1] >= self.session_timeout:
                raise ValueError("intra-session gaps must stay below the timeout")
        if self.disjoint_profiles:
            seen: set[int] = set()
            for spec in self.profiles:
                overlap = seen.intersection(spec.pages)
                if overlap:
                    raise InfeasibleModel(
                        f"profiles share pages {sorted(overlap)} but disjointness is required"
                    )
                seen.update(spec.pages)


def default_model(
    profiles: int = 10,
    pages_per_profile: int = 5,
    site_pages: int = 50,
    seed: int = 1,
    asset_ratio: float = 0.0,
    session_timeout: int = 1800,
) -> TrafficModel:
    if profiles * pages_per_profile > site_pages:
        raise InfeasibleModel(
            f"{profiles} disjoint profiles x {pages_per_profile} pages need more "
            f"than {site_pages} site pages"
        )
    specs = tuple(
        ProfileSpec(pages=tuple(range(p * pages_per_profile, (p + 1) * pages_per_profile)))
        for p in range(profiles)
    )
    return TrafficModel(
        site_pages=site_pages,
        profiles=specs,
        seed=seed,
        asset_ratio=asset_ratio,
        session_timeout=session_timeout,
    )


def page_path(page: int) -> str:
    return f"/site/page{page:02d}.html"


@dataclass
class GroundTruth:
    """What the generator planted, keyed by output line number."""

    session_count: int
    record_sessions: list[int]
    record_kinds: list[str]  # "page" | "asset"
    session_profiles: list[int]
    session_keys: list[tuple[str, int]]  # (client ip, session start epoch)
    page_paths: list[str]

    @property
    def transactions(self) -> int:
        return len(self.record_sessions)

    def to_json(self) -> str:
        payload = {
            "session_count": self.session_count,
            "record_sessions": self.record_sessions,
            "record_kinds": self.record_kinds,
            "session_profiles": self.session_profiles,
            "session_keys": [[ip, start] for ip, start in self.session_keys],
            "page_paths": self.page_paths,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str | IO[str]) -> "GroundTruth":
        data = json.loads(text if isinstance(text, str) else text.read())
        return cls(
            session_count=data["session_count"],
            record_sessions=data["record_sessions"],
            record_kinds=data["record_kinds"],
            session_profiles=data["session_profiles"],
            session_keys=[(ip, start) for ip, start in data["session_keys"]],
            page_paths=data["page_paths"],
        )


def _spread_lengths(
    rng: random.Random, sigmas: Sequence[float], total: int
) -> list[int]:
    """Per-session visit counts with the requested spread, summing to total."""
    weights = [rng.lognormvariate(0.0, sigma) for sigma in sigmas]
    scale = total / sum(weights)
    lengths = [max(1, round(w * scale)) for w in weights]
    drift = total - sum(lengths)
    i = 0
    while drift != 0:
        idx = i % len(lengths)
        if drift > 0:
            lengths[idx] += 1
            drift -= 1
        elif lengths[idx] > 1:
            lengths[idx] -= 1
            drift += 1
        i += 1
    return lengths


def generate(model: TrafficModel, target_transactions: int) -> tuple[str, GroundTruth]:
    """Emit ``target_transactions`` CLF lines plus their ground truth.

    Output is globally time-sorted and byte-identical for identical
    (model, target) inputs.
    """
    if target_transactions < 1:
        raise ValueError("target_transactions must be positive")
    rng = random.Random(model.seed)
    n_profiles = len(model.profiles)

    asset_total = round(target_transactions * model.asset_ratio)
    page_total = target_transactions - asset_total
    if page_total < 1:
        raise ValueError("asset_ratio leaves no page transactions")
    n_sessions = min(planned_sessions(target_transactions), page_total)

    session_profiles = [s % n_profiles for s in range(n_sessions)]
    session_users = [rng.randrange(model.users_per_profile) for _ in range(n_sessions)]
    lengths = _spread_lengths(
        rng,
        [model.profiles[p].length_sigma for p in session_profiles],
        page_total,
    )

    by_user: dict[tuple[int, int], list[int]] = {}
    for s in range(n_sessions):
        by_user.setdefault((session_profiles[s], session_users[s]), []).append(s)

    # (epoch, emission seq, ip, path, nbytes, session id, kind)
    rows: list[tuple[int, int, str, str, int, int, str]] = []
    session_keys: list[tuple[str, int] | None] = [None] * n_sessions
    seq = 0
    for (profile_idx, user_idx) in sorted(by_user):
        spec = model.profiles[profile_idx]
        ip = f"10.{profile_idx}.{user_idx // 250}.{user_idx % 250 + 1}"
        clock = BASE_EPOCH + rng.randrange(0, 30 * 86400)
        for s in by_user[(profile_idx, user_idx)]:
            session_keys[s] = (ip, clock)
            for visit in range(lengths[s]):
                page = spec.pages[rng.randrange(len(spec.pages))]
                nbytes = rng.randint(256, 9999)
                rows.append((clock, seq, ip, page_path(page), nbytes, s, "page"))
                seq += 1
                if visit < lengths[s] - 1:
                    clock += rng.randint(*spec.dwell_range)
            clock += rng.randint(*model.inter_session_gap)

    page_rows = list(rows)
    for _ in range(asset_total):
        parent = page_rows[rng.randrange(len(page_rows))]
        path = ASSET_PATHS[rng.randrange(len(ASSET_PATHS))]
        nbytes = rng.randint(128, 4096)
        rows.append((parent[0], seq, parent[2], path, nbytes, parent[5], "asset"))
        seq += 1

    rows.sort(key=lambda r: (r[0], r[1]))
    lines = []
    record_sessions = []
    record_kinds = []
    emitted_pages = set()
    for epoch, _, ip, path, nbytes, sid, kind in rows:
        lines.append(
            f'{ip} - - [{format_clf_timestamp(epoch)}] "GET {path} HTTP/1.1" 200 {nbytes}'
        )
        record_sessions.append(sid)
        record_kinds.append(kind)
        if kind == "page":
            emitted_pages.add(path)

    truth = GroundTruth(
        session_count=n_sessions,
        record_sessions=record_sessions,
        record_kinds=record_kinds,
        session_profiles=session_profiles,
        session_keys=[key for key in session_keys if key is not None],
        page_paths=sorted(emitted_pages),
    )
    return "\n".join(lines) + "\n", truth
