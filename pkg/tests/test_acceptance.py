"""Acceptance gate: thirteen end-to-end checks, one report line each.

Each test prints `ACCEPTANCE <n> PASS|FAIL - <what it checks>` on the real
stdout (bypassing capture) and then asserts, so a plain pytest run shows the
per-criterion verdict lines regardless of verbosity flags.
"""

import json
import math
import random
import sys
import time
from contextlib import contextmanager

import pytest

from relaylab.circuits import (STRATEGIES, Circuit, PoolConfig, attach_stream,
                               mean_congestion, record_rtt)
from relaylab.cli import main as cli_main
from relaylab.geo import GeoPoint, kmeans
from relaylab.network import (EXIT, GUARD, BandwidthSpec, ClientSpec,
                              DestinationSpec, NetworkSnapshot,
                              RelayDescriptor, sample_scaled, save_snapshot,
                              synth_network)
from relaylab.security import (MIB, PairCensus, compromise_rate, entropy_bits,
                               gini, nearby_guard_experiment,
                               pathgen_experiment, targeted_attack)
from relaylab.selection import (PathTriple, SelectionParams, TuningParams,
                                mapd_eval, tuning_f, tuning_select,
                                weighted_pick)
from relaylab.sim import (LatencyParams, SimConfig, WorkloadParams,
                          compare_strategies, run)

from conftest import mk_relay

GIB = 1024.0 * MIB

REGIONS = [(32.0, 49.0, -124.0, -71.0), (36.0, 60.0, -10.0, 30.0),
           (1.0, 46.0, 100.0, 145.0), (-34.0, -8.0, -70.0, -35.0),
           (-38.0, -12.0, 115.0, 153.0)]


def spread_point(rng, i):
    lo_lat, hi_lat, lo_lon, hi_lon = REGIONS[i % len(REGIONS)]
    return GeoPoint(rng.uniform(lo_lat, hi_lat), rng.uniform(lo_lon, hi_lon))


_CAPMAN = None


@pytest.fixture(autouse=True)
def _grab_capture_manager(request):
    global _CAPMAN
    _CAPMAN = request.config.pluginmanager.getplugin("capturemanager")
    yield


def _emit(line):
    """Print past pytest's fd-level capture so verdicts always show."""
    if _CAPMAN is not None:
        with _CAPMAN.global_and_fixture_disabled():
            print(f"\n{line}", flush=True)
    else:
        print(line, file=sys.__stdout__, flush=True)


@contextmanager
def criterion(n, desc):
    """Emit the verdict line even when the body raises."""
    try:
        yield
    except BaseException:
        _emit(f"ACCEPTANCE {n:2d} FAIL - {desc}")
        raise
    _emit(f"ACCEPTANCE {n:2d} PASS - {desc}")


# --- 1: diversity sweep -----------------------------------------------------

def test_01_alpha_sweep_diversity():
    with criterion(1, "alpha sweep: gini nonincreasing, entropy nondecreasing,"
                      " vanilla gap < 0.02"):
        t0 = time.time()
        snap = synth_network(70, 70, 60, BandwidthSpec("loguniform", 1e6, 1e9),
                             seed=11)
        rng = random.Random(0)
        clients = [ClientSpec(f"c{i:03d}", spread_point(rng, i), "web")
                   for i in range(50)]
        dests = [DestinationSpec(f"d{i:03d}", spread_point(rng, i))
                 for i in range(25)]
        centroids = kmeans([d.location for d in dests], 4, 0)
        alphas = [1.0, 0.9, 0.8, 0.7, 0.5, 0.0]
        for seed in range(5):
            ginis, ents = [], []
            for alpha in alphas:
                params = SelectionParams(alpha=alpha, lam=0.97, mode="combined")
                _, rep = pathgen_experiment(snap, params, clients, 1000,
                                            centroids, dests, seed)
                ginis.append(rep.gini)
                ents.append(rep.entropy_bits)
            assert all(ginis[i] >= ginis[i + 1] for i in range(len(ginis) - 1)), \
                f"seed {seed}: gini not nonincreasing {ginis}"
            assert all(ents[i] <= ents[i + 1] for i in range(len(ents) - 1)), \
                f"seed {seed}: entropy not nondecreasing {ents}"
            vparams = SelectionParams(alpha=1.0, lam=0.97, mode="vanilla")
            _, vrep = pathgen_experiment(snap, vparams, clients, 1000,
                                         centroids, dests, seed)
            assert abs(ginis[0] - vrep.gini) < 0.02
        assert time.time() - t0 < 300.0


# --- 2: lambda deviation minimum --------------------------------------------

def test_02_lambda_deviation_minimum():
    with criterion(2, "lambda deviation minimum in [0.4, 0.6] and under 2%"):
        t0 = time.time()
        snap = synth_network(17, 70, 15, BandwidthSpec("fixed", 1e7, 1e7),
                             seed=6)
        client = GeoPoint(48.2, 11.5)
        dest_pts = [
            (37.4, -122.1), (40.7, -74.0), (51.5, -0.1), (48.9, 2.4),
            (52.5, 13.4), (35.7, 139.7), (22.3, 114.2), (1.35, 103.8),
            (-33.9, 151.2), (-23.5, -46.6), (19.4, -99.1), (55.8, 37.6),
            (28.6, 77.2), (-26.2, 28.0), (41.0, 28.9), (59.3, 18.1),
            (45.4, -75.7), (-34.6, -58.4), (31.2, 121.5), (47.6, -122.3)]
        dests = [DestinationSpec(f"d{i}", GeoPoint(a, b))
                 for i, (a, b) in enumerate(dest_pts)]
        rep = mapd_eval(client, dests, snap, [i / 10 for i in range(11)])
        best = rep.argmin_lambda()
        assert 0.4 <= best <= 0.6, f"argmin lambda {best}"
        assert rep.dev(best) < 0.02, f"dev {rep.dev(best)}"
        assert time.time() - t0 < 120.0


# --- 3 + 4: stream-level strategy comparison --------------------------------

def _latency_scenario():
    """220-relay net sampled to 22 relays, 110 spread clients, 30% bulk.

    The dirty epoch is stretched to 120 s and the CAR threshold lowered to
    0.04 s so the strategies separate through how often a request must wait
    for an on-demand build.
    """
    full = synth_network(80, 60, 80, BandwidthSpec("uniform", 1e6, 8e6),
                         seed=22)
    snap = sample_scaled(full, 0.1, seed=5)
    rng = random.Random(3)
    clients = tuple(ClientSpec(f"c{i:04d}", spread_point(rng, i),
                               "bulk" if i % 10 < 3 else "web")
                    for i in range(110))
    dests = tuple(DestinationSpec(f"d{i:02d}", spread_point(rng, 1000 + i))
                  for i in range(20))
    centroids = kmeans([d.location for d in dests], 4, 0)
    return SimConfig(
        snapshot=snap, clients=clients, destinations=dests,
        centroids=centroids,
        selection=SelectionParams(alpha=0.5, lam=0.5, mode="combined"),
        pool=PoolConfig(n_circuits=3, dirty_age_s=120.0,
                        car_threshold_s=0.04),
        strategy="vanilla", duration_s=1500.0, warmup_s=100.0, seed=0,
        latency=LatencyParams(propagation_s_per_km=5e-6,
                              base_hop_delay_s=0.005, congestion_coeff=0.08),
        workload=WorkloadParams(web_bytes=320 * 1024,
                                bulk_bytes=5 * 1024 * 1024,
                                think_min_s=1.0, think_max_s=20.0))


def test_03_strategy_latency_ordering():
    with criterion(3, "median TTFB: rtt_only(3) < car < vanilla and"
                      " rtt_only(5) <= rtt_only(3)"):
        t0 = time.time()
        cfg = _latency_scenario()
        arms = [("vanilla", None), ("car", 3),
                ("rtt_only", 3), ("rtt_only", 5)]
        rows = compare_strategies(cfg, arms, [19, 20, 21, 22, 23])
        by = {(r["strategy"], r["n_circuits"]): r["median_ttfb"]
              for r in rows}
        van, car = by[("vanilla", None)], by[("car", 3)]
        rtt3, rtt5 = by[("rtt_only", 3)], by[("rtt_only", 5)]
        assert rtt3 < car, f"rtt3 {rtt3} !< car {car}"
        assert car < van, f"car {car} !< vanilla {van}"
        assert rtt5 <= rtt3, f"rtt5 {rtt5} !<= rtt3 {rtt3}"
        assert time.time() - t0 < 600.0


def test_04_preemptive_pool_accounting():
    with criterion(4, "rtt_only N in {3,4,5} creates strictly more circuits"
                      " than vanilla; created >= used"):
        import dataclasses
        cfg = _latency_scenario()
        web = [c.id for c in cfg.clients if c.workload == "web"]
        _, vsum = run(dataclasses.replace(
            cfg, strategy="vanilla",
            pool=PoolConfig(n_circuits=None, dirty_age_s=120.0,
                            car_threshold_s=0.04), seed=19))
        assert all(vsum.circuits_created[c.id] >= vsum.circuits_used[c.id]
                   for c in cfg.clients)
        for n in (3, 4, 5):
            _, s = run(dataclasses.replace(
                cfg, strategy="rtt_only",
                pool=PoolConfig(n_circuits=n, dirty_age_s=120.0,
                                car_threshold_s=0.04), seed=19))
            assert all(s.circuits_created[w] > vsum.circuits_created[w]
                       for w in web), f"N={n}"
            assert all(s.circuits_created[c.id] >= s.circuits_used[c.id]
                       for c in cfg.clients), f"N={n}"


# --- 5: congestion estimator ------------------------------------------------

def test_05_congestion_estimator_exact():
    with criterion(5, "congestion worked example exact 0.006; window evicts"
                      " at 6 samples; T_c >= 0"):
        c = Circuit(id=1, path=PathTriple("a", "b", "c"), created_at=0.0,
                    length_km=1000.0)
        for rtt in (0.100, 0.080, 0.090, 0.085, 0.095):
            record_rtt(c, rtt)
        assert list(c.congestion_samples) == [0.0, 0.0, 0.090 - 0.080,
                                              0.085 - 0.080, 0.095 - 0.080]
        assert mean_congestion(c) == 0.006
        record_rtt(c, 0.120)
        assert len(c.rtt_samples) == 5
        assert c.rtt_samples[0] == 0.080
        rng = random.Random(5)
        c2 = Circuit(id=2, path=PathTriple("a", "b", "c"), created_at=0.0,
                     length_km=1.0)
        for _ in range(200):
            record_rtt(c2, rng.uniform(0.01, 0.5))
            assert all(t >= 0.0 for t in c2.congestion_samples)
            assert mean_congestion(c2) >= 0.0


# --- 6: attachment strategy oracle ------------------------------------------

def _oracle_attach(circs, strategy, rng, thr):
    """Brute-force restatement of the attachment rules, written against the
    raw sample deques rather than the library helpers."""

    def mc(c):
        xs = list(c.congestion_samples)
        return sum(xs) / len(xs) if xs else 0.0

    def lr(c):
        xs = list(c.rtt_samples)
        return xs[-1] if xs else math.inf

    def argmin(pool, key):
        best = pool[0]
        for c in pool[1:]:
            if (key(c), c.id) < (key(best), best.id):
                best = c
        return best

    if strategy == "car":
        pool = list(circs)
        if len(pool) > 3:
            pool = rng.sample(pool, 3)
        pool = [c for c in pool if mc(c) <= thr]
        return argmin(pool, mc) if pool else None
    if strategy == "vanilla":
        return argmin(circs, lambda c: -c.created_at)
    metric = {"congestion": mc, "length": lambda c: c.length_km, "rtt": lr}
    if strategy in ("congestion_only", "length_only", "rtt_only"):
        return argmin(circs, metric[strategy.removesuffix("_only")])
    first, second = strategy.split("_then_")
    ranked = sorted(circs, key=lambda c: (metric[first](c), c.id))[:2]
    return argmin(ranked, metric[second])


def test_06_strategy_rule_oracle():
    with criterion(6, "eleven attachment strategies match a brute-force rule"
                      " oracle on 1000 tie-free tables"):
        rng = random.Random(600)

        def fresh(seen):
            while True:
                v = rng.random()
                if v not in seen:
                    seen.add(v)
                    return v

        for i in range(1000):
            n = rng.randint(3, 6)
            created, lengths, rtts, congs = set(), set(), set(), set()
            circs = []
            untested = rng.randrange(n) if rng.random() < 0.3 else None
            for j in range(n):
                c = Circuit(id=j, path=PathTriple("a", "b", "c"),
                            created_at=fresh(created),
                            length_km=1.0 + fresh(lengths))
                if j != untested:
                    c.rtt_samples.append(0.01 + fresh(rtts))
                    c.congestion_samples.append(fresh(congs))
                circs.append(c)
            for strategy in STRATEGIES:
                got = attach_stream(circs, strategy,
                                    rng=random.Random(f"car/{i}"),
                                    car_threshold_s=0.5)
                want = _oracle_attach(circs, strategy,
                                      random.Random(f"car/{i}"), 0.5)
                g = got.id if got is not None else None
                w = want.id if want is not None else None
                assert g == w, f"table {i} {strategy}: {g} != {w}"


# --- 7: compromise rate oracle ----------------------------------------------

def test_07_compromise_rate_exhaustive():
    with criterion(7, "compromise_rate equals exhaustive per-path checking on"
                      " 100 random instances"):
        rng = random.Random(700)
        for _ in range(100):
            m = rng.randint(3, 20)
            relays = tuple(
                mk_relay(f"r{j:02d}", rng.uniform(-60.0, 60.0),
                         rng.uniform(-180.0, 180.0), bw_guard=1e6,
                         bw_middle=1e6, bw_exit=1e6,
                         malicious=rng.random() < 0.35)
                for j in range(m))
            snap = NetworkSnapshot(relays)
            ids = [r.id for r in relays]
            paths = [PathTriple(*rng.sample(ids, 3))
                     for _ in range(rng.randint(1, 40))]
            bad_ids = {r.id for r in relays if r.malicious}
            want = sum(1 for p in paths
                       if p.entry in bad_ids and p.exit in bad_ids)
            assert compromise_rate(paths, snap) == want / len(paths)


# --- 8: concentration metric units ------------------------------------------

def test_08_gini_entropy_units():
    with criterion(8, "gini/entropy unit values exact to 1e-12"):
        uniform = PairCensus({(f"g{i}", f"x{j}"): 7
                              for i in range(4) for j in range(4)}, 16)
        assert abs(gini(uniform)) <= 1e-12
        point = PairCensus({("g0", "x0"): 12345}, 1000)
        assert abs(gini(point) - 0.999) <= 1e-12
        steps = PairCensus({("g0", "x0"): 1, ("g0", "x1"): 2,
                            ("g1", "x0"): 3, ("g1", "x1"): 4}, 4)
        assert abs(gini(steps) - 0.25) <= 1e-12
        flat = PairCensus({(f"g{i}", f"x{j}"): 3
                           for i in range(32) for j in range(32)}, 1024)
        assert abs(entropy_bits(flat) - 10.0) <= 1e-12


# --- 9: tuning curve --------------------------------------------------------

def test_09_tuning_curve_properties():
    with criterion(9, "tuning curve endpoints, strict monotonicity, p=2"
                      " reference equality, rank bound over 1e5 draws"):
        grid = [i / 999 for i in range(1000)]
        for s, p, g_min, s_max in ((0.3, 2.0, 0.25, 1.0), (1.0, 2.0, 0.25, 1.0),
                                   (2.5, 3.0, 0.5, 5.0), (5.0, 0.5, 0.1, 5.0)):
            t = TuningParams(s=s, p=p, g_min=g_min, s_max=s_max)
            assert tuning_f(0.0, t) == 0.0
            assert abs(tuning_f(1.0, t)
                       - (1.0 - (1.0 - g_min) / s_max * s)) <= 1e-12
            vals = [tuning_f(x, t) for x in grid]
            assert all(a < b for a, b in zip(vals, vals[1:]))
        sb = TuningParams(s=5.0, p=2.0, g_min=1.0, s_max=10.0)
        for x in grid:
            ref = (1.0 - 2.0 ** (5.0 * x)) / (1.0 - 2.0 ** 5.0)
            assert abs(tuning_f(x, sb) - ref) <= 1e-12
        n, g_min = 100, 0.25
        t = TuningParams(s=1.0, p=2.0, g_min=g_min, s_max=1.0)
        cands = list(range(n))
        weights = [float(n - i) for i in range(n)]
        rng = random.Random(901)
        pool = math.ceil(n * g_min)
        for _ in range(100_000):
            assert tuning_select(cands, weights, t, rng) < pool


# --- 10: adversary placement ------------------------------------------------

def _attack_snapshot():
    """Honest relays in one far cluster; guards at a flat 1 GiB so distance
    weighting is the only lever a nearby adversary can pull."""
    rng = random.Random(7)

    def spot():
        return GeoPoint(rng.uniform(-33.8, -32.2), rng.uniform(150.2, 151.8))

    relays = []
    for i in range(40):
        relays.append(RelayDescriptor(
            id=f"g{i:02d}", location=spot(), bw_guard=GIB, bw_middle=0.0,
            bw_exit=0.0, flags=frozenset({GUARD})))
    for i in range(40):
        bw = rng.uniform(20.0, 220.0) * MIB
        relays.append(RelayDescriptor(
            id=f"x{i:02d}", location=spot(), bw_guard=0.0, bw_middle=0.0,
            bw_exit=bw, flags=frozenset({EXIT})))
    for i in range(16):
        bw = rng.uniform(20.0, 220.0) * MIB
        relays.append(RelayDescriptor(
            id=f"m{i:02d}", location=spot(), bw_guard=0.0, bw_middle=bw,
            bw_exit=0.0))
    return NetworkSnapshot(tuple(relays))


def test_10_targeted_attack_direction():
    with criterion(10, "targeted attack: compromise(0.5) >= compromise(0.9) >"
                       " vanilla by 2 SE; nontargeted flat"):
        t0 = time.time()
        snap = _attack_snapshot()
        client = GeoPoint(48.2, 11.5)
        centroids = [GeoPoint(-33.86, 151.21), GeoPoint(-33.3, 150.5),
                     GeoPoint(-32.5, 151.0), GeoPoint(-33.0, 151.7)]
        arms = {
            "a05": SelectionParams(alpha=0.5, lam=1.0, mode="combined"),
            "a09": SelectionParams(alpha=0.9, lam=1.0, mode="combined"),
            "van": SelectionParams(alpha=1.0, lam=1.0, mode="vanilla"),
        }
        rep = {(kind, name): targeted_attack(snap, kind, 0.1, client,
                                             centroids, params, 2000, 30, 0)
               for kind in ("targeted_client", "nontargeted")
               for name, params in arms.items()}

        def mean(r):
            return r.detail["mean"]

        def two_se(a, b):
            return 2.0 * math.hypot(a.detail["stderr"], b.detail["stderr"])

        t05, t09, tv = (rep[("targeted_client", k)]
                        for k in ("a05", "a09", "van"))
        n05, n09, nv = (rep[("nontargeted", k)]
                        for k in ("a05", "a09", "van"))
        assert mean(t05) >= mean(t09)
        assert mean(t05) - mean(tv) > two_se(t05, tv)
        assert mean(t09) - mean(tv) > two_se(t09, tv)
        for a, b in ((n05, n09), (n05, nv), (n09, nv)):
            assert abs(mean(a) - mean(b)) <= two_se(a, b)
        assert time.time() - t0 < 900.0


# --- 11: nearby-guard study -------------------------------------------------

def test_11_nearby_guard_direction():
    with criterion(11, "nearby guards: alpha=0 adversary-size-invariant; low"
                       " zero at alpha=1; high median TTFC drops"):
        rng = random.Random(3)
        relays = [RelayDescriptor(
            id=f"g{i:02d}", location=spread_point(rng, i), bw_guard=9e6,
            bw_middle=0.0, bw_exit=0.0, flags=frozenset({GUARD}))
            for i in range(13)]
        relays.append(RelayDescriptor(
            id="xx00", location=spread_point(rng, 2), bw_guard=0.0,
            bw_middle=0.0, bw_exit=1e6, flags=frozenset({EXIT})))
        snap = NetworkSnapshot(tuple(relays))
        clients = [ClientSpec(f"c{i:03d}", spread_point(rng, i))
                   for i in range(100)]
        grid = [0.0, 0.5, 1.0]
        low = nearby_guard_experiment(snap, grid, "low", clients, 10.0, 3.0,
                                      seed=131).detail["per_alpha"]
        high = nearby_guard_experiment(snap, grid, "high", clients, 10.0, 3.0,
                                       seed=131).detail["per_alpha"]
        assert low[0.0] == high[0.0]
        fracs = [low[a]["fraction_compromised_streams"] for a in grid]
        assert fracs[0] >= fracs[1] >= fracs[2]
        assert fracs[2] == 0.0
        assert (high[1.0]["median_ttfc_months"]
                < high[0.0]["median_ttfc_months"])


# --- 12: CLI determinism ----------------------------------------------------

CLI_OUTPUTS = {
    "simulate": ("streams.csv", "summary.json"),
    "compare": ("compare.csv", "compare.json"),
    "pathgen": ("census.csv", "security.json"),
    "mapd": ("mapd.csv", "mapd.json"),
    "attack": ("attack.json",),
    "nearby_guards": ("ttfc.csv", "nearby.json"),
    "cluster": ("centroids.json",),
    "gen_network": ("snapshot.jsonl",),
}


def _cli_workspace(tmp_path):
    relays = tuple(
        [mk_relay(f"g{i}", 10.0 * i, 5.0 * i, bw_guard=(2 + i) * 1e6,
                  bw_middle=(2 + i) * 1e6) for i in range(3)]
        + [mk_relay(f"m{i}", -10.0 * i, 30.0 + 5 * i, bw_middle=(1 + i) * 1e6)
           for i in range(4)]
        + [mk_relay(f"x{i}", 5.0 * i, -40.0 - 5 * i, bw_exit=(2 + i) * 1e6,
                    bw_middle=(2 + i) * 1e6) for i in range(3)])
    save_snapshot(NetworkSnapshot(relays), str(tmp_path / "net.jsonl"))
    (tmp_path / "clients.jsonl").write_text(
        "".join(json.dumps(r) + "\n" for r in (
            {"id": "c0", "lat": 12.0, "lon": 8.0, "workload": "web"},
            {"id": "c1", "lat": -5.0, "lon": 40.0, "workload": "bulk"},
            {"id": "c2", "lat": 30.0, "lon": -20.0, "workload": "web"})),
        encoding="utf-8")
    (tmp_path / "dests.jsonl").write_text(
        "".join(json.dumps({"id": f"d{i}", "lat": 8.0 * i - 20.0,
                            "lon": 15.0 * i - 30.0}) + "\n"
                for i in range(5)), encoding="utf-8")
    scenario = {
        "snapshot": "net.jsonl", "clients": "clients.jsonl",
        "destinations": "dests.jsonl", "seeds": [11, 12, 13],
        "strategy": "rtt_only",
        "selection": {"alpha": 0.5, "lambda": 0.5, "mode": "combined"},
        "pool": {"n_circuits": 2},
        "sim": {"duration_s": 60.0, "warmup_s": 5.0},
        "compare": {"arms": [["vanilla", None], ["rtt_only", 2]]},
        "pathgen": {"paths_per_client": 40},
        "mapd": {"lambda_grid": [0.0, 0.5, 1.0]},
        "attack": {"kind": "targeted_client", "fraction": 0.5,
                   "paths": 30, "runs": 3},
        "nearby": {"alpha_grid": [0.0, 1.0], "adversary": "low",
                   "months": 10.0, "rate_per_month": 3.0},
        "gen": {"guards": 4, "middles": 5, "exits": 3,
                "bw": {"kind": "uniform", "low": 1e6, "high": 9e6}},
    }
    (tmp_path / "scenario.json").write_text(json.dumps(scenario),
                                            encoding="utf-8")
    return tmp_path / "scenario.json"


def test_12_cli_determinism(tmp_path):
    with criterion(12, "every CLI subcommand byte-identical across reruns"):
        scenario = _cli_workspace(tmp_path)
        for command, names in sorted(CLI_OUTPUTS.items()):
            outs = []
            for tag in ("a", "b"):
                out = tmp_path / f"{command}_{tag}"
                rc = cli_main([command, "--scenario", str(scenario),
                               "--out", str(out), "--quiet"])
                assert rc == 0, command
                outs.append(out)
            for name in names:
                assert ((outs[0] / name).read_bytes()
                        == (outs[1] / name).read_bytes()), \
                    f"{command}/{name} differs between reruns"


# --- 13: weighted sampling --------------------------------------------------

def test_13_weighted_pick_frequencies():
    with criterion(13, "weighted_pick frequencies within L1 0.01 of weights"
                       " over 1e6 draws on 10 relays"):
        weights = [float(i + 1) for i in range(10)]
        total = sum(weights)
        cands = list(range(10))
        counts = [0] * 10
        rng = random.Random(1300)
        draws = 1_000_000
        for _ in range(draws):
            counts[weighted_pick(cands, weights, rng)] += 1
        l1 = sum(abs(c / draws - w / total)
                 for c, w in zip(counts, weights))
        assert l1 < 0.01, f"L1 {l1}"
