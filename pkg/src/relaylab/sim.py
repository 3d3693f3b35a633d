"""Deterministic discrete-event simulator.

Latency model: each of the four legs (client, guard, middle, exit, destination)
costs propagation plus a fixed per-hop delay; each relay adds a queueing delay
linear in its active stream count over its position bandwidth. Throughput is
the bottleneck fair share along the path. All coefficients are config inputs;
one seed fixes the entire run byte-for-byte.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field, replace
from statistics import fmean, median

from .circuits import (Circuit, CircuitPool, PoolConfig, STRATEGIES,
                       attach_stream, circuit_length, pool_tick, record_rtt)
from .geo import (CentroidSet, GeoPoint, closest_centroid, great_circle_km,
                  kmeans)
from .network import NetworkSnapshot
from .security import stream_as_compromised
from .selection import PathBuilder, PathTriple, SelectionParams, select_guard

CSV_HEADER = ("stream_id,client_id,circuit_id,guard,middle,exit,"
              "t_request,t_first_byte,t_last_byte,bytes,"
              "compromised_relay,compromised_as")


@dataclass(frozen=True)
class LatencyParams:
    propagation_s_per_km: float = 5e-6
    base_hop_delay_s: float = 0.005
    congestion_coeff: float = 0.0002

    def __post_init__(self):
        if self.propagation_s_per_km < 0 or self.base_hop_delay_s < 0:
            raise ValueError("latency components must be nonnegative")
        if self.congestion_coeff < 0:
            raise ValueError("congestion_coeff must be nonnegative")


@dataclass(frozen=True)
class WorkloadParams:
    web_bytes: int = 320 * 1024
    bulk_bytes: int = 5 * 1024 * 1024
    think_min_s: float = 1.0
    think_max_s: float = 20.0

    def __post_init__(self):
        if self.web_bytes <= 0 or self.bulk_bytes <= 0:
            raise ValueError("download sizes must be positive")
        if not 0 < self.think_min_s <= self.think_max_s:
            raise ValueError("need 0 < think_min_s <= think_max_s")


@dataclass(frozen=True)
class SimConfig:
    snapshot: NetworkSnapshot
    clients: tuple
    destinations: tuple
    selection: SelectionParams
    pool: PoolConfig
    strategy: str
    duration_s: float
    warmup_s: float
    seed: int
    centroids: CentroidSet | None = None
    latency: LatencyParams = field(default_factory=LatencyParams)
    workload: WorkloadParams = field(default_factory=WorkloadParams)
    pin_guards: bool = True
    as_oracle: object = None

    def __post_init__(self):
        object.__setattr__(self, "clients", tuple(self.clients))
        object.__setattr__(self, "destinations", tuple(self.destinations))
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not self.duration_s > self.warmup_s >= 0:
            raise ValueError("need duration_s > warmup_s >= 0")
        if not self.destinations:
            raise ValueError("need at least one destination")


@dataclass(frozen=True)
class StreamRecord:
    stream_id: int
    client_id: str
    circuit_id: int
    path: PathTriple
    t_request: float
    t_first_byte: float
    t_last_byte: float
    bytes: int
    compromised_relay: bool
    compromised_as: bool


@dataclass(frozen=True)
class RunSummary:
    ttfb: dict
    ttlb: dict
    circuits_created: dict
    circuits_used: dict
    streams_total: int
    streams_counted: int

    def to_json(self) -> dict:
        return {
            "ttfb": self.ttfb, "ttlb": self.ttlb,
            "circuits_created": self.circuits_created,
            "circuits_used": self.circuits_used,
            "streams_total": self.streams_total,
            "streams_counted": self.streams_counted,
        }


class _ClientState:
    __slots__ = ("spec", "pool", "guard_id", "rng_work", "rng_attach",
                 "rng_path", "created", "used_ids")

    def __init__(self, spec, seed):
        self.spec = spec
        self.pool = CircuitPool()
        self.guard_id = None
        self.rng_work = random.Random(f"{seed}/work/{spec.id}")
        self.rng_attach = random.Random(f"{seed}/attach/{spec.id}")
        self.rng_path = random.Random(f"{seed}/path/{spec.id}")
        self.created = 0
        self.used_ids = set()


def _percentile(values: list, q: float) -> float:
    vals = sorted(values)
    idx = max(0, math.ceil(q * len(vals)) - 1)
    return vals[idx]


def _latency_stats(records: list, warmup_s: float, class_of: dict) -> tuple:
    out_ttfb: dict = {}
    out_ttlb: dict = {}
    counted = 0
    groups = {"web": [], "bulk": [], "all": []}
    for rec in records:
        if rec.t_request < warmup_s:
            continue
        counted += 1
        groups[class_of[rec.client_id]].append(rec)
        groups["all"].append(rec)
    for cls, recs in groups.items():
        if not recs:
            out_ttfb[cls] = out_ttlb[cls] = None
            continue
        ttfbs = [r.t_first_byte - r.t_request for r in recs]
        ttlbs = [r.t_last_byte - r.t_request for r in recs]
        out_ttfb[cls] = {"median": median(ttfbs), "p90": _percentile(ttfbs, 0.9),
                         "mean": fmean(ttfbs), "count": len(recs)}
        out_ttlb[cls] = {"median": median(ttlbs), "p90": _percentile(ttlbs, 0.9),
                         "mean": fmean(ttlbs), "count": len(recs)}
    return out_ttfb, out_ttlb, counted


class _Engine:
    def __init__(self, config: SimConfig):
        self.cfg = config
        self.snapshot = config.snapshot
        self.centroids = config.centroids
        if self.centroids is None:
            pts = [d.location for d in config.destinations]
            self.centroids = kmeans(pts, min(4, len(pts)), config.seed)
        self.builder = PathBuilder(self.snapshot, config.selection, self.centroids)
        self.loads: dict = {}
        self.records: list = []
        self.events: list = []
        self.seq = 0
        self.next_circuit_id = 0
        self.next_stream_id = 0
        self.states: dict = {}

    def push(self, t, kind, data=None):
        heapq.heappush(self.events, (t, self.seq, kind, data))
        self.seq += 1

    def _load(self, relay_id, pos) -> int:
        return self.loads.get((relay_id, pos), 0)

    def _shift_load(self, path: PathTriple, delta: int) -> None:
        for relay_id, pos in ((path.entry, "entry"), (path.middle, "middle"),
                              (path.exit, "exit")):
            key = (relay_id, pos)
            n = self.loads.get(key, 0) + delta
            if n:
                self.loads[key] = n
            else:
                self.loads.pop(key, None)

    def _path_descs(self, path: PathTriple):
        by_id = self.snapshot.by_id
        return by_id(path.entry), by_id(path.middle), by_id(path.exit)

    def _rtt(self, client_loc: GeoPoint, path: PathTriple,
             dest_loc: GeoPoint) -> float:
        lat = self.cfg.latency
        g, m, e = self._path_descs(path)
        legs = (great_circle_km(client_loc, g.location),
                great_circle_km(g.location, m.location),
                great_circle_km(m.location, e.location),
                great_circle_km(e.location, dest_loc))
        one_way = sum(lat.propagation_s_per_km * km + lat.base_hop_delay_s
                      for km in legs)
        for desc, pos, bw in ((g, "entry", g.bw_guard), (m, "middle", m.bw_middle),
                              (e, "exit", e.bw_exit)):
            active = self._load(desc.id, pos)
            if active:
                one_way += (lat.congestion_coeff * active
                            / (max(bw, 1.0) / 1e6))
        return 2.0 * one_way

    def _bottleneck(self, path: PathTriple) -> float:
        g, m, e = self._path_descs(path)
        rate = math.inf
        for desc, pos, bw in ((g, "entry", g.bw_guard), (m, "middle", m.bw_middle),
                              (e, "exit", e.bw_exit)):
            active = max(1, self._load(desc.id, pos))
            rate = min(rate, max(bw, 1.0) / active)
        return rate

    def _new_circuit(self, state, path, created_at, length_km, target=None):
        c = Circuit(id=self.next_circuit_id, path=path, created_at=created_at,
                    length_km=length_km, target_centroid=target)
        self.next_circuit_id += 1
        return c

    def _client_default_dest(self, spec) -> GeoPoint:
        return self.centroids[closest_centroid(spec.location, self.centroids)]

    def on_tick(self, t):
        cfg = self.cfg
        for cid in sorted(self.states):
            state = self.states[cid]

            def build_fn(target, state=state):
                spec = state.spec
                path = self.builder.build(spec.id, spec.location, None, None,
                                          state.rng_path,
                                          pinned_guard=state.guard_id)
                dest_loc = self._client_default_dest(spec)
                rtt_est = self._rtt(spec.location, path, dest_loc)
                ready = t + 1.5 * rtt_est
                length = circuit_length(spec.location, path, self.snapshot,
                                        dest=None, centroids=self.centroids)
                circ = self._new_circuit(state, path, ready, length, target)
                self.push(ready, "built", (cid, target, circ))

            pool_tick(state.pool, t, [None], cfg.pool, build_fn)
        if t + cfg.pool.tick_s <= cfg.duration_s:
            self.push(t + cfg.pool.tick_s, "tick")

    def on_built(self, t, data):
        cid, target, circ = data
        state = self.states[cid]
        state.pool.note_ready(target)
        if t <= self.cfg.duration_s:
            state.pool.add(circ)
            state.created += 1

    def on_request(self, t, cid):
        cfg = self.cfg
        state = self.states[cid]
        spec = state.spec
        dest = cfg.destinations[state.rng_work.randrange(len(cfg.destinations))]
        nbytes = (cfg.workload.bulk_bytes if spec.workload == "bulk"
                  else cfg.workload.web_bytes)

        candidates = state.pool.clean()
        chosen = None
        if candidates:
            chosen = attach_stream(candidates, cfg.strategy, state.rng_attach,
                                   cfg.pool.car_threshold_s)
        on_demand = chosen is None
        if on_demand:
            path = self.builder.build(spec.id, spec.location, dest.id,
                                      dest.location, state.rng_path,
                                      pinned_guard=state.guard_id)
            length = circuit_length(spec.location, path, self.snapshot,
                                    dest=dest.location)
            chosen = self._new_circuit(state, path, t, length)
            state.pool.add(chosen)
            state.created += 1

        self._shift_load(chosen.path, +1)
        rtt_now = self._rtt(spec.location, chosen.path, dest.location)
        setup = 1.5 * rtt_now if on_demand else 0.0
        ttfb = t + setup + rtt_now
        ttlb = ttfb + nbytes / self._bottleneck(chosen.path)
        chosen.last_used_at = t
        state.used_ids.add(chosen.id)

        g, m, e = self._path_descs(chosen.path)
        comp_relay = g.malicious and e.malicious
        comp_as = False
        if cfg.as_oracle is not None:
            comp_as = stream_as_compromised(spec.location, g.location,
                                            e.location, dest.location,
                                            cfg.as_oracle)
        rec = StreamRecord(stream_id=self.next_stream_id, client_id=spec.id,
                           circuit_id=chosen.id, path=chosen.path,
                           t_request=t, t_first_byte=ttfb, t_last_byte=ttlb,
                           bytes=nbytes, compromised_relay=comp_relay,
                           compromised_as=comp_as)
        self.next_stream_id += 1
        self.records.append(rec)
        self.push(ttlb, "complete", (cid, chosen.id, rtt_now))

    def on_complete(self, t, data):
        cid, circuit_id, rtt_now = data
        cfg = self.cfg
        state = self.states[cid]
        circ = state.pool.circuits[circuit_id]
        self._shift_load(circ.path, -1)
        if rtt_now > 0.0:
            record_rtt(circ, rtt_now)
        if state.spec.workload == "bulk":
            t_next = t
        else:
            t_next = t + state.rng_work.uniform(cfg.workload.think_min_s,
                                                cfg.workload.think_max_s)
        if t_next <= cfg.duration_s:
            self.push(t_next, "request", cid)

    def run(self):
        cfg = self.cfg
        for spec in sorted(cfg.clients, key=lambda s: s.id):
            state = _ClientState(spec, cfg.seed)
            if cfg.pin_guards:
                rng_guard = random.Random(f"{cfg.seed}/guard/{spec.id}")
                state.guard_id = select_guard(spec.location, self.snapshot,
                                              cfg.selection, self.centroids,
                                              rng_guard).id
            self.states[spec.id] = state
            t0 = state.rng_work.uniform(cfg.workload.think_min_s,
                                        cfg.workload.think_max_s)
            if t0 <= cfg.duration_s:
                self.push(t0, "request", spec.id)
        self.push(0.0, "tick")
        while self.events:
            t, _, kind, data = heapq.heappop(self.events)
            if kind == "tick":
                self.on_tick(t)
            elif kind == "request":
                self.on_request(t, data)
            elif kind == "complete":
                self.on_complete(t, data)
            elif kind == "built":
                self.on_built(t, data)
        return self.records


def run(config: SimConfig) -> tuple:
    """Execute one simulation; returns (records, summary)."""
    engine = _Engine(config)
    records = engine.run()
    class_of = {spec.id: spec.workload for spec in config.clients}
    ttfb, ttlb, counted = _latency_stats(records, config.warmup_s, class_of)
    created = {cid: engine.states[cid].created for cid in sorted(engine.states)}
    used = {cid: len(engine.states[cid].used_ids) for cid in sorted(engine.states)}
    summary = RunSummary(ttfb=ttfb, ttlb=ttlb, circuits_created=created,
                         circuits_used=used, streams_total=len(records),
                         streams_counted=counted)
    return records, summary


def compare_strategies(config: SimConfig, arms: list, seeds: list) -> list:
    """Run each (strategy, n_circuits) arm across seeds; report per-seed and
    across-seed median TTFB/TTLB (pooled over workload classes)."""
    if len(seeds) < 3:
        raise ValueError("need at least 3 seeds")
    rows = []
    for strategy, n_circuits in arms:
        per_seed_ttfb = []
        per_seed_ttlb = []
        for seed in seeds:
            cfg = replace(config, strategy=strategy, seed=seed,
                          pool=replace(config.pool, n_circuits=n_circuits))
            _, summary = run(cfg)
            stats = summary.ttfb["all"]
            if stats is None:
                raise ValueError("run produced no streams after warmup")
            per_seed_ttfb.append(stats["median"])
            per_seed_ttlb.append(summary.ttlb["all"]["median"])
        rows.append({
            "strategy": strategy,
            "n_circuits": n_circuits,
            "per_seed_ttfb": per_seed_ttfb,
            "per_seed_ttlb": per_seed_ttlb,
            "median_ttfb": median(per_seed_ttfb),
            "median_ttlb": median(per_seed_ttlb),
        })
    return rows


def records_to_csv(records: list) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join((
            str(r.stream_id), r.client_id, str(r.circuit_id),
            r.path.entry, r.path.middle, r.path.exit,
            repr(r.t_request), repr(r.t_first_byte), repr(r.t_last_byte),
            str(r.bytes),
            "true" if r.compromised_relay else "false",
            "true" if r.compromised_as else "false",
        )))
    return "\n".join(lines) + "\n"
