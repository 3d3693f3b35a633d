"""Static network model: relay descriptors, snapshots, clients, destinations.

Snapshots are immutable once built; experiments that mark relays malicious
work on copies. Per-position weighted bandwidths are inputs, not derived
from any consensus weighting algebra.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace

from .geo import GeoPoint

GUARD = "guard"
EXIT = "exit"
VALID_FLAGS = frozenset({GUARD, EXIT})


@dataclass(frozen=True)
class RelayDescriptor:
    id: str
    location: GeoPoint
    bw_guard: float
    bw_middle: float
    bw_exit: float
    flags: frozenset = frozenset()
    malicious: bool = False

    def __post_init__(self):
        object.__setattr__(self, "flags", frozenset(self.flags))
        bad = self.flags - VALID_FLAGS
        if bad:
            raise ValueError(f"relay {self.id}: unknown flags {sorted(bad)}")
        for name, bw in (("bw_guard", self.bw_guard), ("bw_middle", self.bw_middle),
                         ("bw_exit", self.bw_exit)):
            if not (math.isfinite(bw) and bw >= 0):
                raise ValueError(f"relay {self.id}: {name} must be finite and >= 0, got {bw}")
        if self.bw_guard > 0 and GUARD not in self.flags:
            raise ValueError(f"relay {self.id}: bw_guard > 0 without guard flag")
        if self.bw_exit > 0 and EXIT not in self.flags:
            raise ValueError(f"relay {self.id}: bw_exit > 0 without exit flag")

    @property
    def is_guard(self) -> bool:
        return GUARD in self.flags

    @property
    def is_exit(self) -> bool:
        return EXIT in self.flags


@dataclass(frozen=True)
class ClientSpec:
    id: str
    location: GeoPoint
    workload: str = "web"

    def __post_init__(self):
        if self.workload not in ("web", "bulk"):
            raise ValueError(f"client {self.id}: unknown workload {self.workload!r}")


@dataclass(frozen=True)
class DestinationSpec:
    id: str
    location: GeoPoint


@dataclass(frozen=True)
class NetworkSnapshot:
    """A validated relay set with per-position bandwidth maxima."""

    relays: tuple[RelayDescriptor, ...]
    bw_max_guard: float = field(init=False)
    bw_max_middle: float = field(init=False)
    bw_max_exit: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "relays", tuple(self.relays))
        seen = set()
        for r in self.relays:
            if r.id in seen:
                raise ValueError(f"duplicate relay id: {r.id}")
            seen.add(r.id)
        if not any(r.is_guard for r in self.relays):
            raise ValueError("snapshot has no guard-flagged relay")
        if not any(r.is_exit for r in self.relays):
            raise ValueError("snapshot has no exit-flagged relay")
        object.__setattr__(self, "bw_max_guard", max(r.bw_guard for r in self.relays))
        object.__setattr__(self, "bw_max_middle", max(r.bw_middle for r in self.relays))
        object.__setattr__(self, "bw_max_exit", max(r.bw_exit for r in self.relays))

    def __len__(self) -> int:
        return len(self.relays)

    def by_id(self, relay_id: str) -> RelayDescriptor:
        try:
            return self._index[relay_id]
        except AttributeError:
            object.__setattr__(self, "_index", {r.id: r for r in self.relays})
            return self._index[relay_id]

    def guards(self) -> list[RelayDescriptor]:
        return [r for r in self.relays if r.is_guard]

    def exits(self) -> list[RelayDescriptor]:
        return [r for r in self.relays if r.is_exit]

    def with_relays(self, relays) -> "NetworkSnapshot":
        """Derived snapshot (e.g. with malicious marks); maxima recomputed."""
        return NetworkSnapshot(tuple(relays))


def _relay_from_record(rec: dict) -> RelayDescriptor:
    return RelayDescriptor(
        id=str(rec["id"]),
        location=GeoPoint(float(rec["lat"]), float(rec["lon"])),
        bw_guard=float(rec.get("bw_guard", 0.0)),
        bw_middle=float(rec.get("bw_middle", 0.0)),
        bw_exit=float(rec.get("bw_exit", 0.0)),
        flags=frozenset(rec.get("flags", [])),
        malicious=bool(rec.get("malicious", False)),
    )


def load_snapshot(path: str) -> NetworkSnapshot:
    """Load a snapshot file: one JSON relay record per line."""
    relays = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                relays.append(_relay_from_record(json.loads(line)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad relay record: {exc}") from exc
    return NetworkSnapshot(tuple(relays))


def save_snapshot(snapshot: NetworkSnapshot, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in snapshot.relays:
            rec = {
                "id": r.id, "lat": r.location.lat, "lon": r.location.lon,
                "bw_guard": r.bw_guard, "bw_middle": r.bw_middle, "bw_exit": r.bw_exit,
                "flags": sorted(r.flags),
            }
            if r.malicious:
                rec["malicious"] = True
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_clients(path: str) -> list[ClientSpec]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                out.append(ClientSpec(str(rec["id"]),
                                      GeoPoint(float(rec["lat"]), float(rec["lon"])),
                                      rec.get("workload", "web")))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad client record: {exc}") from exc
    return out


def load_destinations(path: str) -> list[DestinationSpec]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                out.append(DestinationSpec(str(rec["id"]),
                                           GeoPoint(float(rec["lat"]), float(rec["lon"]))))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad destination record: {exc}") from exc
    return out


def _type_class(r: RelayDescriptor) -> str:
    # Exit class includes exit+guard relays, matching how scaled models bucket them.
    if r.is_exit:
        return "exit"
    if r.is_guard:
        return "guard"
    return "middle"


def sample_scaled(snapshot: NetworkSnapshot, fraction: float, seed: int) -> NetworkSnapshot:
    """Uniformly sample each type class (exit / guard / middle-only) by `fraction`."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    if fraction == 1.0:
        return snapshot
    rng = random.Random(seed)
    classes: dict[str, list[RelayDescriptor]] = {"exit": [], "guard": [], "middle": []}
    for r in snapshot.relays:
        classes[_type_class(r)].append(r)
    keep: set[str] = set()
    for members in classes.values():
        n = round(fraction * len(members))
        keep.update(r.id for r in rng.sample(members, min(n, len(members))))
    chosen = tuple(r for r in snapshot.relays if r.id in keep)
    if not any(r.is_guard for r in chosen) or not any(r.is_exit for r in chosen):
        raise ValueError(f"sample fraction {fraction} leaves no guards or no exits")
    return NetworkSnapshot(chosen)


@dataclass(frozen=True)
class BandwidthSpec:
    """How synthetic relay bandwidths are drawn: fixed value or (log-)uniform range."""

    kind: str  # fixed | uniform | loguniform
    low: float
    high: float = 0.0

    def __post_init__(self):
        if self.kind not in ("fixed", "uniform", "loguniform"):
            raise ValueError(f"unknown bandwidth spec kind: {self.kind!r}")
        if self.kind == "fixed":
            if self.low <= 0:
                raise ValueError("fixed bandwidth must be positive")
        else:
            if not 0 < self.low <= self.high:
                raise ValueError(f"bad bandwidth bounds [{self.low}, {self.high}]")

    def draw(self, rng: random.Random) -> float:
        if self.kind == "fixed":
            return self.low
        if self.kind == "uniform":
            return rng.uniform(self.low, self.high)
        return math.exp(rng.uniform(math.log(self.low), math.log(self.high)))

    @classmethod
    def from_dict(cls, d: dict) -> "BandwidthSpec":
        return cls(kind=d["kind"], low=float(d.get("low", d.get("value", 0.0))),
                   high=float(d.get("high", 0.0)))


#: Rough landmass boxes used when no region list is supplied; keeps synthetic
#: relays off the open ocean without any geodata dependency.
DEFAULT_REGIONS: tuple[tuple[float, float, float, float], ...] = (
    (25.0, 50.0, -125.0, -65.0),   # North America
    (36.0, 60.0, -10.0, 30.0),     # Europe
    (-35.0, 10.0, -80.0, -35.0),   # South America
    (5.0, 45.0, 60.0, 145.0),      # Asia
    (-40.0, -12.0, 113.0, 154.0),  # Australia
)


def _sample_location(rng: random.Random, regions) -> GeoPoint:
    lat_min, lat_max, lon_min, lon_max = regions[rng.randrange(len(regions))]
    return GeoPoint(rng.uniform(lat_min, lat_max), rng.uniform(lon_min, lon_max))


def synth_network(n_guards: int, n_middles: int, n_exits: int,
                  bw_spec: BandwidthSpec, seed: int,
                  regions=DEFAULT_REGIONS) -> NetworkSnapshot:
    """Generate a synthetic snapshot: relays placed uniformly over `regions`,
    bandwidths drawn from `bw_spec`. Deterministic per seed."""
    if n_guards < 1 or n_exits < 1:
        raise ValueError("need at least one guard and one exit")
    if n_middles < 0:
        raise ValueError("n_middles must be >= 0")
    rng = random.Random(seed)
    relays = []
    for i in range(n_guards):
        bw = bw_spec.draw(rng)
        relays.append(RelayDescriptor(f"g{i:04d}", _sample_location(rng, regions),
                                      bw_guard=bw, bw_middle=bw, bw_exit=0.0,
                                      flags=frozenset({GUARD})))
    for i in range(n_middles):
        bw = bw_spec.draw(rng)
        relays.append(RelayDescriptor(f"m{i:04d}", _sample_location(rng, regions),
                                      bw_guard=0.0, bw_middle=bw, bw_exit=0.0))
    for i in range(n_exits):
        bw = bw_spec.draw(rng)
        relays.append(RelayDescriptor(f"x{i:04d}", _sample_location(rng, regions),
                                      bw_guard=0.0, bw_middle=bw, bw_exit=bw,
                                      flags=frozenset({EXIT})))
    return NetworkSnapshot(tuple(relays))


def mark_relay(snapshot: NetworkSnapshot, relay_id: str, malicious: bool = True) -> NetworkSnapshot:
    """Copy of the snapshot with one relay's malicious flag changed."""
    relays = tuple(replace(r, malicious=malicious) if r.id == relay_id else r
                   for r in snapshot.relays)
    return NetworkSnapshot(relays)
