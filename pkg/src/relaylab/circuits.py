"""Circuit lifecycle and stream attachment.

A circuit carries its two metric windows (last five RTTs, last five
congestion times), its great-circle length, and usage state. Attachment
strategies are pure functions of those metrics; ties resolve to the lowest
circuit id so replays are exact.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from statistics import fmean

from .geo import CentroidSet, GeoPoint, closest_centroid, great_circle_km
from .network import NetworkSnapshot
from .selection import PathTriple

WINDOW = 5

STRATEGIES = (
    "vanilla", "car",
    "congestion_only", "length_only", "rtt_only",
    "congestion_then_length", "rtt_then_length",
    "length_then_congestion", "length_then_rtt",
    "rtt_then_congestion", "congestion_then_rtt",
)


@dataclass
class Circuit:
    id: int
    path: PathTriple
    created_at: float
    length_km: float
    last_used_at: float | None = None
    dirty: bool = False
    closed: bool = False
    target_centroid: int | None = None
    rtt_min: float = math.inf
    rtt_samples: deque = field(default_factory=lambda: deque(maxlen=WINDOW))
    congestion_samples: deque = field(default_factory=lambda: deque(maxlen=WINDOW))

    @property
    def last_rtt(self) -> float:
        """Most recent RTT; untested circuits rank last in RTT strategies."""
        return self.rtt_samples[-1] if self.rtt_samples else math.inf


@dataclass(frozen=True)
class PoolConfig:
    n_circuits: int | None = None
    idle_kill_s: float = 300.0
    dirty_age_s: float = 600.0
    tick_s: float = 1.0
    car_threshold_s: float = 0.5

    def __post_init__(self):
        for name in ("idle_kill_s", "dirty_age_s", "tick_s", "car_threshold_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n_circuits is not None and self.n_circuits < 1:
            raise ValueError("n_circuits must be >= 1 when set")


def circuit_length(client: GeoPoint, path: PathTriple, snapshot: NetworkSnapshot,
                   dest: GeoPoint | None = None,
                   centroids: CentroidSet | None = None) -> float:
    """Four-leg great-circle length client->guard->middle->exit->endpoint.

    The endpoint is the destination when known, otherwise the default target
    centroid (the one closest to the client)."""
    g = snapshot.by_id(path.entry).location
    m = snapshot.by_id(path.middle).location
    e = snapshot.by_id(path.exit).location
    if dest is None:
        if centroids is None:
            raise ValueError("circuit_length needs a destination or centroids")
        dest = centroids[closest_centroid(client, centroids)]
    return (great_circle_km(client, g) + great_circle_km(g, m)
            + great_circle_km(m, e) + great_circle_km(e, dest))


def record_rtt(circuit: Circuit, rtt: float) -> Circuit:
    """Append one RTT; congestion time is measured against the running
    minimum after this sample, so a new minimum records as zero."""
    if not (math.isfinite(rtt) and rtt > 0.0):
        raise ValueError(f"rtt must be finite and positive, got {rtt}")
    if rtt < circuit.rtt_min:
        circuit.rtt_min = rtt
    circuit.rtt_samples.append(rtt)
    circuit.congestion_samples.append(rtt - circuit.rtt_min)
    return circuit


def mean_congestion(circuit: Circuit) -> float:
    """Mean of the stored congestion window; untested circuits count as 0."""
    if not circuit.congestion_samples:
        return 0.0
    return fmean(circuit.congestion_samples)


def _two_lowest(candidates: list, metric) -> list:
    return sorted(candidates, key=lambda c: (metric(c), c.id))[:2]


def attach_stream(candidates: list, strategy: str,
                  rng: random.Random | None = None,
                  car_threshold_s: float = 0.5) -> Circuit | None:
    """Pick the circuit a new stream rides on.

    Returns None only for CAR when every sampled circuit is over the
    congestion threshold (or no candidates exist): the caller should build a
    fresh circuit. All other strategies require a nonempty candidate list.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "car":
        if not candidates:
            return None
        if rng is None:
            raise ValueError("car strategy needs an rng")
        sample = (list(candidates) if len(candidates) <= 3
                  else rng.sample(candidates, 3))
        eligible = [c for c in sample if mean_congestion(c) <= car_threshold_s]
        if not eligible:
            return None
        return min(eligible, key=lambda c: (mean_congestion(c), c.id))
    if not candidates:
        raise ValueError("no candidate circuits")
    if strategy == "vanilla":
        return min(candidates, key=lambda c: (-c.created_at, c.id))

    cong = mean_congestion
    length = (lambda c: c.length_km)
    rtt = (lambda c: c.last_rtt)
    single = {"congestion_only": cong, "length_only": length, "rtt_only": rtt}
    if strategy in single:
        metric = single[strategy]
        return min(candidates, key=lambda c: (metric(c), c.id))
    first, second = {
        "congestion_then_length": (cong, length),
        "rtt_then_length": (rtt, length),
        "length_then_congestion": (length, cong),
        "length_then_rtt": (length, rtt),
        "rtt_then_congestion": (rtt, cong),
        "congestion_then_rtt": (cong, rtt),
    }[strategy]
    pair = _two_lowest(candidates, first)
    return min(pair, key=lambda c: (second(c), c.id))


class CircuitPool:
    """One client's circuits plus its in-flight build requests."""

    def __init__(self):
        self.circuits: dict[int, Circuit] = {}
        self.pending: dict = {}

    def add(self, circuit: Circuit) -> None:
        self.circuits[circuit.id] = circuit

    def clean(self) -> list:
        """Circuits able to take a new stream, ordered by id."""
        return [c for _, c in sorted(self.circuits.items())
                if not c.closed and not c.dirty]

    def pending_for(self, target) -> int:
        return self.pending.get(target, 0)

    def note_requested(self, target) -> None:
        self.pending[target] = self.pending.get(target, 0) + 1

    def note_ready(self, target) -> None:
        n = self.pending.get(target, 0)
        if n <= 1:
            self.pending.pop(target, None)
        else:
            self.pending[target] = n - 1


def pool_tick(pool: CircuitPool, now: float, recent_targets: list,
              config: PoolConfig, build_fn,
              all_centroids: range | None = None) -> list:
    """Once-per-second maintenance pass.

    Closes circuits never used within idle_kill_s of creation, marks circuits
    older than dirty_age_s dirty, and (when a target count is configured)
    requests builds until each recent target has n_circuits clean or pending
    circuits. With centroid-targeted pools, every centroid keeps at least one.
    Returns the actions taken, for inspection.
    """
    actions = []
    for cid in sorted(pool.circuits):
        c = pool.circuits[cid]
        if c.closed:
            continue
        if c.last_used_at is None and now - c.created_at >= config.idle_kill_s:
            c.closed = True
            actions.append(("close", cid))
            continue
        if not c.dirty and now - c.created_at >= config.dirty_age_s:
            c.dirty = True
            actions.append(("dirty", cid))
    if config.n_circuits is None:
        return actions
    clean_by_target: dict = {}
    for c in pool.circuits.values():
        if not c.closed and not c.dirty:
            key = c.target_centroid
            clean_by_target[key] = clean_by_target.get(key, 0) + 1
    wanted = {t: config.n_circuits for t in recent_targets}
    if all_centroids is not None:
        for t in all_centroids:
            wanted.setdefault(t, 1)
    for target in wanted:
        have = clean_by_target.get(target, 0) + pool.pending_for(target)
        for _ in range(wanted[target] - have):
            pool.note_requested(target)
            build_fn(target)
            actions.append(("build", target))
    return actions
