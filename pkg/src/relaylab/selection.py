"""Path construction: combined bandwidth/distance weighting, per-position
distances, guard selection, tuning-function and bucket selection, and
shortest-path optimality evaluation.

Conventions shared by the scalar functions and the vectorized PathBuilder:
candidate lists are always ordered by relay id, a single uniform draw decides
each weighted pick, and ties resolve to the lowest id. That keeps the two
implementations pick-for-pick identical under the same rng.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .geo import CentroidSet, GeoPoint, closest_centroid, great_circle_km
from .network import NetworkSnapshot, RelayDescriptor

MODES = ("vanilla", "combined", "tuning", "distance_first", "bandwidth_first")
POSITIONS = ("entry", "middle", "exit")

_BW_ATTR = {"entry": "bw_guard", "middle": "bw_middle", "exit": "bw_exit"}


@dataclass(frozen=True)
class TuningParams:
    """Curve family controlling how sharply selection favors high weights."""

    s: float
    p: float = 2.0
    g_min: float = 0.25
    s_max: float = 1.0

    def __post_init__(self):
        if self.s_max <= 0:
            raise ValueError(f"s_max must be positive, got {self.s_max}")
        if not 0.0 <= self.s <= self.s_max:
            raise ValueError(f"s must be in [0, {self.s_max}], got {self.s}")
        if self.p <= 0 or self.p == 1.0:
            raise ValueError(f"p must be positive and != 1, got {self.p}")
        if not 0.0 <= self.g_min <= 1.0:
            raise ValueError(f"g_min must be in [0, 1], got {self.g_min}")


@dataclass(frozen=True)
class SelectionParams:
    alpha: float = 0.5
    lam: float = 0.5
    mode: str = "combined"
    tuning: TuningParams | None = None

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must be in [0, 1], got {self.lam}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "tuning" and self.tuning is None:
            raise ValueError("tuning mode requires TuningParams")


@dataclass(frozen=True)
class PathTriple:
    entry: str
    middle: str
    exit: str

    def __post_init__(self):
        if len({self.entry, self.middle, self.exit}) != 3:
            raise ValueError(f"path relays must be distinct: "
                             f"{self.entry}, {self.middle}, {self.exit}")


@dataclass(frozen=True)
class MapdReport:
    """Per-lambda mean absolute percentage deviation from the true optimum."""

    lambdas: tuple
    devs: tuple

    def __post_init__(self):
        if len(self.lambdas) != len(self.devs):
            raise ValueError("lambdas and devs length mismatch")
        if any(d < 0 for d in self.devs):
            raise ValueError("deviations must be nonnegative")

    def dev(self, lam: float) -> float:
        return self.devs[self.lambdas.index(lam)]

    def argmin_lambda(self) -> float:
        best = min(range(len(self.devs)), key=lambda i: (self.devs[i], i))
        return self.lambdas[best]


def combined_weight(w_b: float, w_d: float, alpha: float) -> float:
    """Convex mix of a bandwidth score and a distance score, both in [0, 1]."""
    return alpha * w_b + (1.0 - alpha) * w_d


def exit_distance(client: GeoPoint, exit_loc: GeoPoint, dest: GeoPoint,
                  lam: float) -> float:
    return ((1.0 - lam) * great_circle_km(client, exit_loc)
            + lam * great_circle_km(exit_loc, dest))


def entry_distance(client: GeoPoint, entry_loc: GeoPoint, anchor: GeoPoint,
                   lam: float) -> float:
    return (lam * great_circle_km(client, entry_loc)
            + (1.0 - lam) * great_circle_km(entry_loc, anchor))


def middle_distance(entry_loc: GeoPoint, middle_loc: GeoPoint,
                    exit_loc: GeoPoint) -> float:
    return (great_circle_km(entry_loc, middle_loc)
            + great_circle_km(middle_loc, exit_loc))


def bandwidth_weights(candidates: list, position: str,
                      snapshot: NetworkSnapshot) -> list:
    """w_B = B_i / B_max; B_max is the per-position max over the full snapshot."""
    if position not in POSITIONS:
        raise ValueError(f"unknown position {position!r}")
    attr = _BW_ATTR[position]
    b_max = {"entry": snapshot.bw_max_guard, "middle": snapshot.bw_max_middle,
             "exit": snapshot.bw_max_exit}[position]
    if b_max <= 0.0:
        # No bandwidth signal anywhere; the distance term carries selection.
        return [0.0 for _ in candidates]
    return [getattr(r, attr) / b_max for r in candidates]


def distance_weights(distances: list) -> list:
    """w_D = 1 - D_i / D_max; D_max taken over this candidate set."""
    if not distances:
        raise ValueError("empty candidate set")
    d_max = max(distances)
    if d_max <= 0.0:
        # All candidates are equally closest; do not let 0/0 poison weights.
        return [1.0 for _ in distances]
    return [1.0 - d / d_max for d in distances]


def position_weights(candidates: list, position: str, distances: list,
                     snapshot: NetworkSnapshot, alpha: float) -> list:
    """Combined weights for one position's candidate set."""
    if len(candidates) != len(distances):
        raise ValueError("candidates and distances length mismatch")
    if not candidates:
        raise ValueError("empty candidate set")
    w_b = bandwidth_weights(candidates, position, snapshot)
    w_d = distance_weights(distances)
    return [combined_weight(b, d, alpha) for b, d in zip(w_b, w_d)]


def weighted_pick(candidates: list, weights: list, rng: random.Random):
    """Pick one candidate with probability proportional to its weight."""
    if not candidates or len(candidates) != len(weights):
        raise ValueError("candidates and weights must be equal nonempty lengths")
    total = 0.0
    for w in weights:
        if not (math.isfinite(w) and w >= 0.0):
            raise ValueError(f"weights must be finite and nonnegative, got {w}")
        total += w
    if total <= 0.0:
        raise ValueError("no positive weight among candidates")
    threshold = rng.random() * total
    acc = 0.0
    last_positive = None
    for i, w in enumerate(weights):
        if w > 0.0:
            acc += w
            last_positive = i
            if acc > threshold:
                return candidates[i]
    return candidates[last_positive]


def tuning_f(x: float, t: TuningParams) -> float:
    """Selection curve; s = 0 degenerates to the identity (uniform choice)."""
    if t.s == 0.0:
        return x
    scale = 1.0 - (1.0 - t.g_min) / t.s_max * t.s
    return (1.0 - t.p ** (t.s * x)) / (1.0 - t.p ** t.s) * scale


def tuning_select(candidates: list, weights: list, t: TuningParams,
                  rng: random.Random):
    """Rank-based selection: candidates sorted by descending weight, index
    floor(n * f_s(u)). Larger s concentrates choice among top-ranked relays."""
    if not candidates:
        raise ValueError("empty candidate set")
    n = len(candidates)
    order = sorted(range(n), key=lambda i: -weights[i])
    idx = int(n * tuning_f(rng.random(), t))
    if idx >= n:
        idx = n - 1
    return candidates[order[idx]]


def bucket_select(candidates: list, bw_weights_list: list, dist_weights_list: list,
                  order: str, rng: random.Random):
    """Two-stage narrowing: fill a bucket of k = floor(sqrt(n)) relays by
    weighted picks without replacement on the first metric, then one weighted
    pick within the bucket on the second metric."""
    if order not in ("distance_first", "bandwidth_first"):
        raise ValueError(f"unknown bucket order {order!r}")
    n = len(candidates)
    if n == 0:
        raise ValueError("empty candidate set")
    if order == "distance_first":
        first, second = dist_weights_list, bw_weights_list
    else:
        first, second = bw_weights_list, dist_weights_list
    k = max(1, math.isqrt(n))
    remaining = list(range(n))
    bucket = []
    for _ in range(k):
        w = [first[i] for i in remaining]
        if sum(w) > 0.0:
            j = weighted_pick(remaining, w, rng)
        else:
            j = remaining[rng.randrange(len(remaining))]
        bucket.append(j)
        remaining.remove(j)
    w2 = [second[i] for i in bucket]
    if sum(w2) > 0.0:
        return candidates[weighted_pick(bucket, w2, rng)]
    return candidates[bucket[rng.randrange(len(bucket))]]


def _mode_pick(candidates: list, position: str, distances, snapshot,
               params: SelectionParams, rng: random.Random):
    """Dispatch one position's pick according to the selection mode."""
    if params.mode == "vanilla":
        attr = _BW_ATTR[position]
        weights = [getattr(r, attr) for r in candidates]
        if sum(weights) <= 0.0:
            return candidates[rng.randrange(len(candidates))]
        return weighted_pick(candidates, weights, rng)
    w_b = bandwidth_weights(candidates, position, snapshot)
    w_d = distance_weights(distances)
    if params.mode in ("distance_first", "bandwidth_first"):
        return bucket_select(candidates, w_b, w_d, params.mode, rng)
    weights = [combined_weight(b, d, params.alpha) for b, d in zip(w_b, w_d)]
    if params.mode == "tuning":
        return tuning_select(candidates, weights, params.tuning, rng)
    if sum(weights) <= 0.0:
        return candidates[rng.randrange(len(candidates))]
    return weighted_pick(candidates, weights, rng)


def _sorted_candidates(snapshot: NetworkSnapshot, predicate, exclude: set):
    return sorted((r for r in snapshot.relays
                   if predicate(r) and r.id not in exclude),
                  key=lambda r: r.id)


def build_path(client: GeoPoint, dest, snapshot: NetworkSnapshot,
               params: SelectionParams, rng: random.Random,
               pinned_guard: RelayDescriptor | None = None,
               centroids: CentroidSet | None = None) -> PathTriple:
    """Construct a path one relay at a time: exit, then entry, then middle.

    dest may be None; the centroid closest to the client then anchors the
    exit choice. A pinned guard substitutes for the client location in the
    exit distance and is used verbatim as the entry.
    """
    anchor_dest = dest
    if anchor_dest is None and centroids is not None:
        anchor_dest = centroids[closest_centroid(client, centroids)]
    if params.mode != "vanilla" and anchor_dest is None:
        raise ValueError("distance-aware modes need a destination or centroids")

    exclude = {pinned_guard.id} if pinned_guard is not None else set()
    exits = _sorted_candidates(snapshot, lambda r: r.is_exit, exclude)
    if not exits:
        raise ValueError("no exit candidates")
    if params.mode == "vanilla":
        exit_relay = _mode_pick(exits, "exit", None, snapshot, params, rng)
    else:
        origin = pinned_guard.location if pinned_guard is not None else client
        dists = [exit_distance(origin, r.location, anchor_dest, params.lam)
                 for r in exits]
        exit_relay = _mode_pick(exits, "exit", dists, snapshot, params, rng)

    if pinned_guard is not None:
        entry_relay = pinned_guard
    else:
        entries = _sorted_candidates(snapshot, lambda r: r.is_guard,
                                     {exit_relay.id})
        if not entries:
            raise ValueError("no entry candidates")
        if params.mode == "vanilla":
            entry_relay = _mode_pick(entries, "entry", None, snapshot, params, rng)
        else:
            dists = [entry_distance(client, r.location, exit_relay.location,
                                    params.lam) for r in entries]
            entry_relay = _mode_pick(entries, "entry", dists, snapshot, params, rng)

    middles = _sorted_candidates(snapshot, lambda r: True,
                                 {exit_relay.id, entry_relay.id})
    if not middles:
        raise ValueError("no middle candidates")
    if params.mode == "vanilla":
        middle_relay = _mode_pick(middles, "middle", None, snapshot, params, rng)
    else:
        dists = [middle_distance(entry_relay.location, r.location,
                                 exit_relay.location) for r in middles]
        middle_relay = _mode_pick(middles, "middle", dists, snapshot, params, rng)

    return PathTriple(entry=entry_relay.id, middle=middle_relay.id,
                      exit=exit_relay.id)


def select_guard(client: GeoPoint, snapshot: NetworkSnapshot,
                 params: SelectionParams, centroids: CentroidSet | None,
                 rng: random.Random, nearby: bool = False) -> RelayDescriptor:
    """Pick a long-term guard before any exit is known.

    The anchor is the target centroid closest to the client; in nearby mode
    the anchor term is dropped and distance is client-to-guard alone.
    """
    guards = _sorted_candidates(snapshot, lambda r: r.is_guard, set())
    if not guards:
        raise ValueError("no guard candidates")
    if params.mode == "vanilla":
        return _mode_pick(guards, "entry", None, snapshot, params, rng)
    if nearby:
        dists = [great_circle_km(client, g.location) for g in guards]
    else:
        if centroids is None:
            raise ValueError("guard selection needs centroids")
        anchor = centroids[closest_centroid(client, centroids)]
        dists = [entry_distance(client, g.location, anchor, params.lam)
                 for g in guards]
    return _mode_pick(guards, "entry", dists, snapshot, params, rng)


def _pick_idx(weights: np.ndarray, cum: np.ndarray, last_positive: int,
              rng: random.Random) -> int:
    """Vectorized twin of weighted_pick; identical draws and tie behavior."""
    total = float(cum[-1])
    if total <= 0.0:
        return rng.randrange(len(weights))
    threshold = rng.random() * total
    idx = int(np.searchsorted(cum, threshold, side="right"))
    if idx > last_positive:
        idx = last_positive
    return idx


class PathBuilder:
    """Vectorized path constructor over a fixed snapshot and parameters.

    Precomputes the relay-to-relay distance matrix with the same scalar
    haversine as the reference functions, and caches per-position weight
    vectors keyed by the geometry that defines them, so mass path generation
    costs three cumsum picks per path.
    """

    MIDDLE_CACHE_LIMIT = 40000

    def __init__(self, snapshot: NetworkSnapshot, params: SelectionParams,
                 centroids: CentroidSet | None = None):
        self.snapshot = snapshot
        self.params = params
        self.centroids = centroids
        self.relays = sorted(snapshot.relays, key=lambda r: r.id)
        self.ids = [r.id for r in self.relays]
        self.index = {r.id: i for i, r in enumerate(self.relays)}
        self.locs = [r.location for r in self.relays]
        n = len(self.relays)
        self.bw = {
            "entry": np.array([r.bw_guard for r in self.relays]),
            "middle": np.array([r.bw_middle for r in self.relays]),
            "exit": np.array([r.bw_exit for r in self.relays]),
        }
        self.bw_max = {"entry": snapshot.bw_max_guard,
                       "middle": snapshot.bw_max_middle,
                       "exit": snapshot.bw_max_exit}
        self.guard_idx = np.array([i for i, r in enumerate(self.relays)
                                   if r.is_guard], dtype=np.int64)
        self.exit_idx = np.array([i for i, r in enumerate(self.relays)
                                  if r.is_exit], dtype=np.int64)
        self.all_idx = np.arange(n, dtype=np.int64)
        self.dist = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                d = great_circle_km(self.locs[i], self.locs[j])
                self.dist[i, j] = d
                self.dist[j, i] = d
        self._point_vecs: dict = {}
        self._exit_cache: dict = {}
        self._entry_cache: dict = {}
        self._middle_cache: dict = {}

    def point_vec(self, key, point: GeoPoint) -> np.ndarray:
        """Distances from an off-net point to every relay, cached by key."""
        vec = self._point_vecs.get(key)
        if vec is None:
            vec = np.array([great_circle_km(point, loc) for loc in self.locs])
            self._point_vecs[key] = vec
        return vec

    def _finalize(self, weights: np.ndarray):
        cum = np.cumsum(weights)
        positive = np.nonzero(weights > 0.0)[0]
        last_positive = int(positive[-1]) if len(positive) else 0
        order = None
        if self.params.mode == "tuning":
            order = np.argsort(-weights, kind="stable")
        return weights, cum, last_positive, order

    def _weights_for(self, cand_idx: np.ndarray, position: str,
                     dists: np.ndarray | None):
        bw = self.bw[position][cand_idx]
        b_max = self.bw_max[position]
        w_b = bw / b_max if b_max > 0.0 else np.zeros(len(cand_idx))
        if self.params.mode == "vanilla":
            return self._finalize(bw.astype(float))
        d_max = float(dists.max()) if len(dists) else 0.0
        w_d = 1.0 - dists / d_max if d_max > 0.0 else np.ones(len(cand_idx))
        if self.params.mode in ("distance_first", "bandwidth_first"):
            # Bucket modes keep the split metrics; stage weights are combined
            # lazily in _bucket_pick.
            return (w_b, w_d)
        w = self.params.alpha * w_b + (1.0 - self.params.alpha) * w_d
        return self._finalize(w)

    def _pick(self, cand_idx: np.ndarray, entry, rng: random.Random) -> int:
        if self.params.mode in ("distance_first", "bandwidth_first"):
            w_b, w_d = entry
            return self._bucket_pick(cand_idx, w_b, w_d, rng)
        weights, cum, last_positive, order = entry
        if self.params.mode == "tuning":
            n = len(cand_idx)
            pos = int(n * tuning_f(rng.random(), self.params.tuning))
            if pos >= n:
                pos = n - 1
            return int(cand_idx[order[pos]])
        return int(cand_idx[_pick_idx(weights, cum, last_positive, rng)])

    def _bucket_pick(self, cand_idx: np.ndarray, w_b: np.ndarray,
                     w_d: np.ndarray, rng: random.Random) -> int:
        if self.params.mode == "distance_first":
            first, second = w_d, w_b
        else:
            first, second = w_b, w_d
        n = len(cand_idx)
        k = max(1, math.isqrt(n))
        remaining = list(range(n))
        bucket = []
        for _ in range(k):
            w = [float(first[i]) for i in remaining]
            if sum(w) > 0.0:
                j = weighted_pick(remaining, w, rng)
            else:
                j = remaining[rng.randrange(len(remaining))]
            bucket.append(j)
            remaining.remove(j)
        w2 = [float(second[i]) for i in bucket]
        if sum(w2) > 0.0:
            j = weighted_pick(bucket, w2, rng)
        else:
            j = bucket[rng.randrange(len(bucket))]
        return int(cand_idx[j])

    def _exit_entry(self, origin_key, origin_vec, dest_key, dest_vec,
                    exclude_idx: int | None):
        cache_key = (origin_key, dest_key, exclude_idx)
        entry = self._exit_cache.get(cache_key)
        if entry is None:
            cand = self.exit_idx
            if exclude_idx is not None:
                cand = cand[cand != exclude_idx]
            if len(cand) == 0:
                raise ValueError("no exit candidates")
            lam = self.params.lam
            dists = None
            if self.params.mode != "vanilla":
                dists = (1.0 - lam) * origin_vec[cand] + lam * dest_vec[cand]
            entry = (cand, self._weights_for(cand, "exit", dists))
            self._exit_cache[cache_key] = entry
        return entry

    def _entry_entry(self, client_key, client_vec, exit_i: int):
        cache_key = (client_key, exit_i)
        entry = self._entry_cache.get(cache_key)
        if entry is None:
            cand = self.guard_idx[self.guard_idx != exit_i]
            if len(cand) == 0:
                raise ValueError("no entry candidates")
            lam = self.params.lam
            dists = None
            if self.params.mode != "vanilla":
                dists = lam * client_vec[cand] + (1.0 - lam) * self.dist[exit_i][cand]
            entry = (cand, self._weights_for(cand, "entry", dists))
            self._entry_cache[cache_key] = entry
        return entry

    def _middle_entry(self, entry_i: int, exit_i: int):
        cache_key = (entry_i, exit_i)
        entry = self._middle_cache.get(cache_key)
        if entry is None:
            cand = self.all_idx[(self.all_idx != entry_i) & (self.all_idx != exit_i)]
            if len(cand) == 0:
                raise ValueError("no middle candidates")
            dists = None
            if self.params.mode != "vanilla":
                dists = self.dist[entry_i][cand] + self.dist[exit_i][cand]
            entry = (cand, self._weights_for(cand, "middle", dists))
            if len(self._middle_cache) < self.MIDDLE_CACHE_LIMIT:
                self._middle_cache[cache_key] = entry
            else:
                return entry
        return entry

    def build(self, client_key, client: GeoPoint, dest_key, dest: GeoPoint | None,
              rng: random.Random, pinned_guard: str | None = None) -> PathTriple:
        """Build one path; pinned_guard is a relay id or None."""
        if dest is None:
            if self.centroids is None:
                if self.params.mode != "vanilla":
                    raise ValueError("distance-aware modes need a destination "
                                     "or centroids")
                dest_key, dest = "none", client
            else:
                ci = closest_centroid(client, self.centroids)
                dest_key, dest = ("centroid", ci), self.centroids[ci]
        client_vec = self.point_vec(("client", client_key), client)
        dest_vec = self.point_vec(("dest", dest_key), dest)

        if pinned_guard is not None:
            g_i = self.index[pinned_guard]
            origin_key, origin_vec = ("relay", g_i), self.dist[g_i]
            exclude = g_i if self.relays[g_i].is_exit else None
            cand, entry = self._exit_entry(origin_key, origin_vec, dest_key,
                                           dest_vec, exclude)
            e_i = self._pick(cand, entry, rng)
        else:
            cand, entry = self._exit_entry(("client", client_key), client_vec,
                                           dest_key, dest_vec, None)
            e_i = self._pick(cand, entry, rng)
            cand, entry = self._entry_entry(client_key, client_vec, e_i)
            g_i = self._pick(cand, entry, rng)

        cand, entry = self._middle_entry(g_i, e_i)
        m_i = self._pick(cand, entry, rng)
        return PathTriple(entry=self.ids[g_i], middle=self.ids[m_i],
                          exit=self.ids[e_i])


def mapd_eval(client: GeoPoint, dests: list, snapshot: NetworkSnapshot,
              lambda_grid: list, max_triples: int = 50_000_000) -> MapdReport:
    """Compare the deterministic greedy path (max distance weight, ties by
    lowest id) against the exhaustive shortest path, per lambda.

    dev_lambda = mean over destinations of |L_greedy - L_opt| / L_opt.
    Pure distance selection: bandwidth plays no role here (alpha = 0).
    """
    relays = sorted(snapshot.relays, key=lambda r: r.id)
    n = len(relays)
    locs = [r.location for r in relays]
    gidx = np.array([i for i, r in enumerate(relays) if r.is_guard], dtype=np.int64)
    eidx = np.array([i for i, r in enumerate(relays) if r.is_exit], dtype=np.int64)
    if len(gidx) == 0 or len(eidx) == 0:
        raise ValueError("snapshot lacks guards or exits")
    if len(gidx) * len(eidx) * n > max_triples:
        raise ValueError(f"brute-force budget exceeded: "
                         f"{len(gidx) * len(eidx) * n} > {max_triples} triples")

    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = great_circle_km(locs[i], locs[j])
            dist[i, j] = d
            dist[j, i] = d
    c_vec = np.array([great_circle_km(client, loc) for loc in locs])

    # inner[a, b] = min over valid middles of the guard->middle->exit legs.
    inner = dist[np.ix_(gidx, range(n))][:, :, None] + dist[np.ix_(range(n), eidx)][None, :, :]
    for a, gi in enumerate(gidx):
        inner[a, gi, :] = np.inf
    for b, ej in enumerate(eidx):
        inner[:, ej, b] = np.inf
    inner_min = inner.min(axis=1)
    same = gidx[:, None] == eidx[None, :]
    inner_min = np.where(same, np.inf, inner_min)

    dest_locs = [d.location if hasattr(d, "location") else d for d in dests]
    dev_by_lam = []
    for lam in lambda_grid:
        total = 0.0
        for dest in dest_locs:
            d_vec = np.array([great_circle_km(dest, loc) for loc in locs])
            l_opt = float(np.min(c_vec[gidx][:, None] + inner_min
                                 + d_vec[eidx][None, :]))
            # Greedy: max weight is min distance; argmin's first hit is the
            # lowest id because relays are id-sorted.
            e_scores = (1.0 - lam) * c_vec[eidx] + lam * d_vec[eidx]
            e_i = int(eidx[int(np.argmin(e_scores))])
            g_scores = lam * c_vec[gidx] + (1.0 - lam) * dist[gidx, e_i]
            g_scores = np.where(gidx == e_i, np.inf, g_scores)
            g_i = int(gidx[int(np.argmin(g_scores))])
            m_scores = dist[g_i, :] + dist[:, e_i]
            m_scores[g_i] = np.inf
            m_scores[e_i] = np.inf
            m_i = int(np.argmin(m_scores))
            l_greedy = float(c_vec[g_i] + dist[g_i, m_i] + dist[m_i, e_i]
                             + d_vec[e_i])
            if l_opt <= 0.0:
                continue
            total += abs(l_greedy - l_opt) / l_opt
        dev_by_lam.append(total / len(dest_locs))
    return MapdReport(lambdas=tuple(lambda_grid), devs=tuple(dev_by_lam))
