"""Anonymity metrics and adversary experiments.

Gini and entropy are computed over the full feasible guard-exit pair universe
(unseen pairs count as zeros), so concentration on few pairs registers even
when the observed counts are flat. All experiments are seeded jobs over
snapshot copies; the base snapshot is never mutated.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from statistics import fmean, median, pstdev

from .geo import GeoPoint, great_circle_km
from .network import EXIT, GUARD, NetworkSnapshot, RelayDescriptor
from .selection import PathBuilder, SelectionParams

MIB = 1024 * 1024

ATTACK_KINDS = ("targeted_client", "targeted_destination", "targeted_both",
                "nontargeted")

NEARBY_ADVERSARY_BW = {"low": 2_000_000.0, "high": 55_000_000.0}


@dataclass(frozen=True)
class PairCensus:
    """Counts of (guard id, exit id) pairs over generated paths."""

    counts: dict
    universe: int

    def __post_init__(self):
        if self.universe < 1:
            raise ValueError("universe must hold at least one pair")
        if len(self.counts) > self.universe:
            raise ValueError("more observed pairs than the universe allows")
        if any(v < 0 for v in self.counts.values()):
            raise ValueError("counts must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def pair_universe(snapshot: NetworkSnapshot) -> int:
    """Number of feasible guard-exit pairs (same relay twice is not a pair)."""
    guards = sum(1 for r in snapshot.relays if r.is_guard)
    exits = sum(1 for r in snapshot.relays if r.is_exit)
    dual = sum(1 for r in snapshot.relays if r.is_guard and r.is_exit)
    return guards * exits - dual


def gini(census: PairCensus) -> float:
    """Equality of pair selection: 0 for uniform, (n-1)/n for a point mass."""
    total = census.total
    if total <= 0:
        raise ValueError("census holds no paths")
    n = census.universe
    xs = sorted(census.counts.values())
    zeros = n - len(xs)
    weighted = 0.0
    for j, x in enumerate(xs, start=zeros + 1):
        weighted += j * x
    return 2.0 * weighted / (n * total) - (n + 1) / n


def entropy_bits(census: PairCensus) -> float:
    total = census.total
    if total <= 0:
        raise ValueError("census holds no paths")
    h = 0.0
    for x in census.counts.values():
        if x > 0:
            p = x / total
            h -= p * math.log2(p)
    return h


@dataclass
class SecurityReport:
    kind: str
    gini: float | None = None
    entropy_bits: float | None = None
    compromise_rate: float | None = None
    time_to_first_compromise: float | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def clean(v):
            if isinstance(v, float) and math.isinf(v):
                return None
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            return v

        return clean({
            "kind": self.kind, "gini": self.gini,
            "entropy_bits": self.entropy_bits,
            "compromise_rate": self.compromise_rate,
            "time_to_first_compromise": self.time_to_first_compromise,
            "detail": self.detail,
        })


def pathgen_experiment(snapshot: NetworkSnapshot, params: SelectionParams,
                       clients: list, paths_per_client: int,
                       centroids, dests: list, seed: int):
    """Static path generation (no simulator): every client builds
    paths_per_client fresh paths; destinations drawn uniformly per path."""
    builder = PathBuilder(snapshot, params, centroids)
    counts: dict = {}
    for spec in sorted(clients, key=lambda c: c.id):
        rng = random.Random(f"{seed}/pathgen/{spec.id}")
        for _ in range(paths_per_client):
            if dests:
                d = dests[rng.randrange(len(dests))]
                dest_key, dest_loc = d.id, d.location
            else:
                dest_key, dest_loc = None, None
            path = builder.build(spec.id, spec.location, dest_key, dest_loc, rng)
            key = (path.entry, path.exit)
            counts[key] = counts.get(key, 0) + 1
    census = PairCensus(counts=counts, universe=pair_universe(snapshot))
    report = SecurityReport(kind="pathgen", gini=gini(census),
                            entropy_bits=entropy_bits(census),
                            detail={"paths": census.total,
                                    "universe": census.universe,
                                    "observed_pairs": len(counts)})
    return census, report


def mark_malicious_by_bandwidth(snapshot: NetworkSnapshot, guard_frac: float,
                                exit_frac: float,
                                rng: random.Random) -> NetworkSnapshot:
    """Mark uniformly random guards (then exits) malicious until each side's
    cumulative bandwidth first reaches its target fraction."""
    for frac in (guard_frac, exit_frac):
        if not 0.0 <= frac <= 1.0:
            raise ValueError(f"fraction must be in [0, 1], got {frac}")
    marked: set = set()

    def mark_side(members: list, bw_of, frac: float) -> None:
        if frac >= 1.0:
            marked.update(r.id for r in members)
            return
        total = sum(bw_of(r) for r in members)
        target = frac * total
        if target <= 0.0:
            return
        order = list(members)
        rng.shuffle(order)
        acc = 0.0
        for r in order:
            marked.add(r.id)
            acc += bw_of(r)
            if acc >= target - 1e-9:
                break

    mark_side(sorted((r for r in snapshot.relays if r.is_guard),
                     key=lambda r: r.id), lambda r: r.bw_guard, guard_frac)
    mark_side(sorted((r for r in snapshot.relays if r.is_exit),
                     key=lambda r: r.id), lambda r: r.bw_exit, exit_frac)
    return snapshot.with_relays(
        replace(r, malicious=True) if r.id in marked else r
        for r in snapshot.relays)


def compromise_rate(paths: list, snapshot: NetworkSnapshot) -> float:
    """Fraction of paths whose guard AND exit are both marked malicious."""
    if not paths:
        raise ValueError("no paths to evaluate")
    bad = 0
    for p in paths:
        if snapshot.by_id(p.entry).malicious and snapshot.by_id(p.exit).malicious:
            bad += 1
    return bad / len(paths)


def _inject_malicious(snapshot: NetworkSnapshot, kind: str, fraction: float,
                      client_loc: GeoPoint, centroids,
                      rng: random.Random) -> NetworkSnapshot:
    """Add adversary relays (bandwidth uniform in [20, 220] MiB/s, alternating
    guard/exit) until their bandwidth reaches `fraction` of the base guard+exit
    bandwidth. Targeted positions sit exactly at the client / at one randomly
    chosen target centroid; the rest land on existing relay locations."""
    if kind not in ATTACK_KINDS:
        raise ValueError(f"unknown attack kind {kind!r}")
    budget = fraction * (sum(r.bw_guard for r in snapshot.relays)
                         + sum(r.bw_exit for r in snapshot.relays))
    if budget <= 0.0:
        return snapshot
    base_locs = [r.location for r in sorted(snapshot.relays, key=lambda r: r.id)]
    target_centroid = centroids[rng.randrange(len(centroids))]
    added = []
    acc = 0.0
    i = 0
    while acc < budget:
        bw = rng.uniform(20.0, 220.0) * MIB
        as_guard = i % 2 == 0
        if as_guard:
            loc = (client_loc if kind in ("targeted_client", "targeted_both")
                   else base_locs[rng.randrange(len(base_locs))])
            added.append(RelayDescriptor(
                id=f"zadv-g{i:04d}", location=loc, bw_guard=bw, bw_middle=bw,
                bw_exit=0.0, flags=frozenset({GUARD}), malicious=True))
        else:
            loc = (target_centroid
                   if kind in ("targeted_destination", "targeted_both")
                   else base_locs[rng.randrange(len(base_locs))])
            added.append(RelayDescriptor(
                id=f"zadv-e{i:04d}", location=loc, bw_guard=0.0, bw_middle=bw,
                bw_exit=bw, flags=frozenset({EXIT}), malicious=True))
        acc += bw
        i += 1
    return snapshot.with_relays(tuple(snapshot.relays) + tuple(added))


def targeted_attack(snapshot: NetworkSnapshot, kind: str, fraction: float,
                    client_loc: GeoPoint, centroids, params: SelectionParams,
                    paths_n: int, runs: int, seed: int) -> SecurityReport:
    """Repeated adversary-injection runs; the client builds fresh paths to
    uniformly chosen target centroids and we count guard+exit compromises."""
    per_run = []
    for r_i in range(runs):
        rng = random.Random(f"{seed}/attack/{r_i}")
        attacked = _inject_malicious(snapshot, kind, fraction, client_loc,
                                     centroids, rng)
        builder = PathBuilder(attacked, params, centroids)
        bad = 0
        for _ in range(paths_n):
            ci = rng.randrange(len(centroids))
            path = builder.build("client", client_loc, ("centroid", ci),
                                 centroids[ci], rng)
            g = attacked.by_id(path.entry)
            e = attacked.by_id(path.exit)
            if g.malicious and e.malicious:
                bad += 1
        per_run.append(bad / paths_n)
    mean_rate = fmean(per_run)
    std = pstdev(per_run) if len(per_run) > 1 else 0.0
    return SecurityReport(
        kind=f"attack/{kind}", compromise_rate=mean_rate,
        detail={"per_run": per_run, "mean": mean_rate, "std": std,
                "stderr": std / math.sqrt(len(per_run)) if per_run else 0.0,
                "fraction": fraction, "runs": runs, "paths_per_run": paths_n})


def _nearby_guard_weights(client_loc: GeoPoint, guards: list, alpha: float,
                          bw_max: float) -> list:
    """Guard weights with the anchor term removed: distance is client-guard."""
    dists = [great_circle_km(client_loc, g.location) for g in guards]
    d_max = max(dists)
    w_d = [1.0 - d / d_max if d_max > 0.0 else 1.0 for d in dists]
    w_b = [g.bw_guard / bw_max if bw_max > 0.0 else 0.0 for g in guards]
    return [alpha * b + (1.0 - alpha) * d for b, d in zip(w_b, w_d)]


def nearby_guard_experiment(snapshot: NetworkSnapshot, alpha_grid: list,
                            adversary: str, clients: list, months: float,
                            rate_per_month: float, seed: int) -> SecurityReport:
    """Guard-compromise study with one adversary guard per client placed at
    the client's exact location.

    Guard choice uses client-guard distance only (no anchor, no lambda).
    Each client picks a guard at t=0 and re-picks at rotation intervals drawn
    uniformly from [9, 10] months; streams arrive as a Poisson process. All
    randomness is drawn from per-client substreams that do not depend on
    alpha or on the adversary, so runs differing only in those inputs see
    pick-for-pick aligned draws.
    """
    if adversary not in NEARBY_ADVERSARY_BW:
        raise ValueError(f"adversary must be one of {sorted(NEARBY_ADVERSARY_BW)}")
    adv_bw = NEARBY_ADVERSARY_BW[adversary]
    honest = sorted((r for r in snapshot.relays if r.is_guard),
                    key=lambda r: r.id)
    if not honest:
        raise ValueError("snapshot has no guards")
    per_alpha: dict = {}
    for alpha in alpha_grid:
        ttfc = []
        comp_streams = 0
        total_streams = 0
        mal_picks = 0
        for spec in sorted(clients, key=lambda c: c.id):
            pick_rng = random.Random(f"{seed}/pick/{spec.id}")
            rot_rng = random.Random(f"{seed}/rot/{spec.id}")
            stream_rng = random.Random(f"{seed}/stream/{spec.id}")
            mal = RelayDescriptor(id="zadv-guard", location=spec.location,
                                  bw_guard=adv_bw, bw_middle=adv_bw,
                                  bw_exit=0.0, flags=frozenset({GUARD}),
                                  malicious=True)
            candidates = honest + [mal]
            bw_max = max(r.bw_guard for r in candidates)
            weights = _nearby_guard_weights(spec.location, candidates, alpha,
                                            bw_max)
            total_w = sum(weights)
            # Pick events: t=0, then each rotation. One uniform per event;
            # the adversary sits last in the cumulative order.
            pick_times = [0.0]
            t = rot_rng.uniform(9.0, 10.0)
            while t < months:
                pick_times.append(t)
                t += rot_rng.uniform(9.0, 10.0)
            tenure_mal = []
            for k, t0 in enumerate(pick_times):
                u = pick_rng.random() * total_w
                acc = 0.0
                chosen = len(candidates) - 1
                for j, w in enumerate(weights):
                    if w > 0.0:
                        acc += w
                        if acc > u:
                            chosen = j
                            break
                t1 = pick_times[k + 1] if k + 1 < len(pick_times) else months
                is_mal = candidates[chosen].id == mal.id
                if is_mal:
                    mal_picks += 1
                tenure_mal.append((t0, t1, is_mal))
            first = math.inf
            t = stream_rng.expovariate(rate_per_month)
            while t < months:
                total_streams += 1
                for t0, t1, is_mal in tenure_mal:
                    if t0 <= t < t1:
                        if is_mal:
                            comp_streams += 1
                            if t < first:
                                first = t
                        break
                t += stream_rng.expovariate(rate_per_month)
            ttfc.append(first)
        per_alpha[alpha] = {
            "fraction_compromised_streams":
                comp_streams / total_streams if total_streams else 0.0,
            "median_ttfc_months": median(ttfc) if ttfc else math.inf,
            "compromised_clients": sum(1 for t in ttfc if math.isfinite(t)),
            "malicious_picks": mal_picks,
            "ttfc_months": ttfc,
        }
    return SecurityReport(kind=f"nearby_guard/{adversary}",
                          detail={"adversary": adversary,
                                  "adversary_bw": adv_bw,
                                  "months": months,
                                  "rate_per_month": rate_per_month,
                                  "per_alpha": per_alpha})


class GridASOracle:
    """Synthetic AS-path oracle: the globe is cut into lat/lon cells, one AS
    per cell, and a path's AS set is the cells its great-circle segment
    crosses (sampled along the arc)."""

    def __init__(self, cell_deg: float = 30.0, samples_per_cell: float = 4.0):
        if cell_deg <= 0:
            raise ValueError("cell_deg must be positive")
        self.cell_deg = cell_deg
        self.samples_per_cell = samples_per_cell

    def host_as(self, p: GeoPoint) -> str:
        rows = max(1, int(math.ceil(180.0 / self.cell_deg)))
        cols = max(1, int(math.ceil(360.0 / self.cell_deg)))
        row = min(rows - 1, int(math.floor((p.lat + 90.0) / self.cell_deg)))
        col = int(math.floor((p.lon + 180.0) / self.cell_deg)) % cols
        return f"AS{row}_{col}"

    def path_as_sets(self, a: GeoPoint, b: GeoPoint) -> set:
        ax, ay, az = _unit(a)
        bx, by, bz = _unit(b)
        dot = max(-1.0, min(1.0, ax * bx + ay * by + az * bz))
        omega = math.acos(dot)
        arc_deg = math.degrees(omega)
        n = max(2, int(arc_deg / self.cell_deg * self.samples_per_cell) + 1)
        out = set()
        for k in range(n + 1):
            t = k / n
            if omega < 1e-12:
                x, y, z = ax, ay, az
            else:
                s0 = math.sin((1.0 - t) * omega) / math.sin(omega)
                s1 = math.sin(t * omega) / math.sin(omega)
                x = s0 * ax + s1 * bx
                y = s0 * ay + s1 * by
                z = s0 * az + s1 * bz
            norm = math.sqrt(x * x + y * y + z * z)
            lat = math.degrees(math.asin(max(-1.0, min(1.0, z / norm))))
            lon = math.degrees(math.atan2(y, x))
            out.add(self.host_as(GeoPoint(lat, lon)))
        return out


def _unit(p: GeoPoint) -> tuple:
    lat = math.radians(p.lat)
    lon = math.radians(p.lon)
    return (math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon),
            math.sin(lat))


def stream_as_compromised(client_loc: GeoPoint, guard_loc: GeoPoint,
                          exit_loc: GeoPoint, dest_loc: GeoPoint,
                          oracle) -> bool:
    """A stream is AS-compromised when some AS (other than the client's or
    destination's own) sees both the entry side and the exit side, in either
    direction."""
    entry_side = (set(oracle.path_as_sets(client_loc, guard_loc))
                  | set(oracle.path_as_sets(guard_loc, client_loc)))
    exit_side = (set(oracle.path_as_sets(exit_loc, dest_loc))
                 | set(oracle.path_as_sets(dest_loc, exit_loc)))
    own = {oracle.host_as(client_loc), oracle.host_as(dest_loc)}
    return bool((entry_side & exit_side) - own)


def as_compromise(quads: list, oracle) -> float:
    """Fraction of (client, guard, exit, dest) location quadruples whose
    entry-side and exit-side AS sets overlap."""
    if not quads:
        raise ValueError("no streams to evaluate")
    bad = sum(1 for c, g, e, d in quads
              if stream_as_compromised(c, g, e, d, oracle))
    return bad / len(quads)
