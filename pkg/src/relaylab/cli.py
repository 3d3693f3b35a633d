"""Batch front-end: one scenario file describes one reproducible experiment.

Every subcommand reads a JSON scenario, runs seeded jobs, and writes its
artifacts atomically (temp file, then rename) into the output directory.
Errors come out as a single machine-parseable line on stderr with a nonzero
exit; no partial files are left behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .circuits import PoolConfig
from .geo import GeoPoint, kmeans, load_locations
from .network import (BandwidthSpec, DEFAULT_REGIONS, NetworkSnapshot,
                      load_clients, load_destinations, load_snapshot,
                      save_snapshot, synth_network)
from .security import (GridASOracle, nearby_guard_experiment,
                       pathgen_experiment, targeted_attack)
from .selection import SelectionParams, TuningParams, mapd_eval
from .sim import (LatencyParams, SimConfig, WorkloadParams, compare_strategies,
                  records_to_csv, run)

SCHEMA_VERSION = 1


def atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_json(path: Path, obj: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(obj)
    atomic_write_text(path, json.dumps(doc, sort_keys=True, indent=2) + "\n")


class ScenarioError(Exception):
    pass


class Scenario:
    """Parsed scenario plus loaded data files."""

    def __init__(self, path: str, seed_override: int | None):
        p = Path(path)
        try:
            raw = json.loads(p.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
        self.raw = raw
        self.base = p.parent
        seeds = raw.get("seeds", [0])
        if not seeds:
            raise ScenarioError("seeds must be a nonempty list")
        self.seeds = [int(s) for s in seeds]
        if seed_override is not None:
            self.seeds[0] = seed_override
        self.out_dir = Path(raw.get("out_dir", "results"))

    def path(self, key: str) -> Path:
        if key not in self.raw:
            raise ScenarioError(f"scenario is missing {key!r}")
        return self.base / self.raw[key]

    def snapshot(self) -> NetworkSnapshot:
        return load_snapshot(str(self.path("snapshot")))

    def clients(self) -> list:
        return load_clients(str(self.path("clients")))

    def destinations(self) -> list:
        return load_destinations(str(self.path("destinations")))

    def selection(self) -> SelectionParams:
        sel = self.raw.get("selection", {})
        tuning = None
        if "tuning" in sel:
            t = sel["tuning"]
            tuning = TuningParams(s=float(t["s"]), p=float(t.get("p", 2.0)),
                                  g_min=float(t.get("g_min", 0.25)),
                                  s_max=float(t.get("s_max", 1.0)))
        return SelectionParams(alpha=float(sel.get("alpha", 0.5)),
                               lam=float(sel.get("lambda", 0.5)),
                               mode=sel.get("mode", "combined"),
                               tuning=tuning)

    def pool(self) -> PoolConfig:
        pool = self.raw.get("pool", {})
        n = pool.get("n_circuits")
        return PoolConfig(n_circuits=None if n is None else int(n),
                          idle_kill_s=float(pool.get("idle_kill_s", 300.0)),
                          dirty_age_s=float(pool.get("dirty_age_s", 600.0)),
                          tick_s=float(pool.get("tick_s", 1.0)),
                          car_threshold_s=float(pool.get("car_threshold_s", 0.5)))

    def centroids(self, dests):
        k = int(self.raw.get("centroids_k", 4))
        k = min(k, len(dests))
        cseed = int(self.raw.get("centroids_seed", 0))
        return kmeans([d.location for d in dests], k, cseed)

    def sim_config(self, seed: int) -> SimConfig:
        sim = self.raw.get("sim", {})
        dests = self.destinations()
        oracle = None
        if "as_oracle" in sim:
            oracle = GridASOracle(cell_deg=float(sim["as_oracle"].get(
                "cell_deg", 30.0)))
        return SimConfig(
            snapshot=self.snapshot(),
            clients=tuple(self.clients()),
            destinations=tuple(dests),
            centroids=self.centroids(dests),
            selection=self.selection(),
            pool=self.pool(),
            strategy=self.raw.get("strategy", "vanilla"),
            duration_s=float(sim.get("duration_s", 600.0)),
            warmup_s=float(sim.get("warmup_s", 60.0)),
            seed=seed,
            latency=LatencyParams(
                propagation_s_per_km=float(sim.get("propagation_s_per_km", 5e-6)),
                base_hop_delay_s=float(sim.get("base_hop_delay_s", 0.005)),
                congestion_coeff=float(sim.get("congestion_coeff", 0.0002))),
            workload=WorkloadParams(
                web_bytes=int(sim.get("web_bytes", 320 * 1024)),
                bulk_bytes=int(sim.get("bulk_bytes", 5 * 1024 * 1024)),
                think_min_s=float(sim.get("think_min_s", 1.0)),
                think_max_s=float(sim.get("think_max_s", 20.0))),
            pin_guards=bool(self.raw.get("pin_guards", True)),
            as_oracle=oracle,
        )


def cmd_simulate(scn: Scenario, out: Path, quiet: bool) -> None:
    config = scn.sim_config(scn.seeds[0])
    records, summary = run(config)
    atomic_write_text(out / "streams.csv", records_to_csv(records))
    write_json(out / "summary.json", {"seed": scn.seeds[0],
                                      "summary": summary.to_json()})


def cmd_compare(scn: Scenario, out: Path, quiet: bool) -> None:
    spec = scn.raw.get("compare")
    if not spec or "arms" not in spec:
        raise ScenarioError("scenario needs compare.arms")
    arms = [(a[0], None if a[1] is None else int(a[1])) for a in spec["arms"]]
    config = scn.sim_config(scn.seeds[0])
    rows = compare_strategies(config, arms, scn.seeds)
    lines = ["strategy,n_circuits,median_ttfb_s,median_ttlb_s"]
    for r in rows:
        n = "" if r["n_circuits"] is None else str(r["n_circuits"])
        lines.append(f"{r['strategy']},{n},{r['median_ttfb']!r},"
                     f"{r['median_ttlb']!r}")
    atomic_write_text(out / "compare.csv", "\n".join(lines) + "\n")
    write_json(out / "compare.json", {"seeds": scn.seeds, "rows": rows})


def cmd_pathgen(scn: Scenario, out: Path, quiet: bool) -> None:
    pg = scn.raw.get("pathgen", {})
    dests = scn.destinations()
    census, report = pathgen_experiment(
        scn.snapshot(), scn.selection(), scn.clients(),
        int(pg.get("paths_per_client", 1000)), scn.centroids(dests), dests,
        scn.seeds[0])
    lines = ["guard,exit,count"]
    for (g, e), c in sorted(census.counts.items()):
        lines.append(f"{g},{e},{c}")
    atomic_write_text(out / "census.csv", "\n".join(lines) + "\n")
    write_json(out / "security.json", {"seed": scn.seeds[0],
                                       "report": report.to_json()})


def cmd_mapd(scn: Scenario, out: Path, quiet: bool) -> None:
    md = scn.raw.get("mapd", {})
    grid = [float(x) for x in md.get(
        "lambda_grid", [i / 10 for i in range(11)])]
    if "client" in md:
        client = GeoPoint(float(md["client"]["lat"]), float(md["client"]["lon"]))
    else:
        clients = scn.clients()
        if not clients:
            raise ScenarioError("mapd needs a client location")
        client = clients[0].location
    report = mapd_eval(client, scn.destinations(), scn.snapshot(), grid,
                       max_triples=int(md.get("max_triples", 50_000_000)))
    lines = ["lambda,dev"]
    for lam, dev in zip(report.lambdas, report.devs):
        lines.append(f"{lam!r},{dev!r}")
    atomic_write_text(out / "mapd.csv", "\n".join(lines) + "\n")
    write_json(out / "mapd.json", {
        "lambdas": list(report.lambdas), "devs": list(report.devs),
        "argmin_lambda": report.argmin_lambda()})


def cmd_attack(scn: Scenario, out: Path, quiet: bool) -> None:
    at = scn.raw.get("attack")
    if not at:
        raise ScenarioError("scenario needs an attack section")
    dests = scn.destinations()
    if "client" in at:
        client = GeoPoint(float(at["client"]["lat"]), float(at["client"]["lon"]))
    else:
        clients = scn.clients()
        if not clients:
            raise ScenarioError("attack needs a client location")
        client = clients[0].location
    report = targeted_attack(
        scn.snapshot(), at.get("kind", "targeted_client"),
        float(at.get("fraction", 0.1)), client, scn.centroids(dests),
        scn.selection(), int(at.get("paths", 2000)), int(at.get("runs", 30)),
        scn.seeds[0])
    write_json(out / "attack.json", {"seed": scn.seeds[0],
                                     "report": report.to_json()})


def cmd_nearby_guards(scn: Scenario, out: Path, quiet: bool) -> None:
    nb = scn.raw.get("nearby", {})
    report = nearby_guard_experiment(
        scn.snapshot(), [float(a) for a in nb.get("alpha_grid", [0.0, 0.5, 1.0])],
        nb.get("adversary", "low"), scn.clients(),
        float(nb.get("months", 10.0)), float(nb.get("rate_per_month", 2.0)),
        scn.seeds[0])
    lines = ["alpha,client_index,ttfc_months"]
    for alpha, stats in report.detail["per_alpha"].items():
        for i, t in enumerate(stats["ttfc_months"]):
            val = "" if t == float("inf") else repr(t)
            lines.append(f"{alpha!r},{i},{val}")
    atomic_write_text(out / "ttfc.csv", "\n".join(lines) + "\n")
    write_json(out / "nearby.json", {"seed": scn.seeds[0],
                                     "report": report.to_json()})


def cmd_cluster(scn: Scenario, out: Path, quiet: bool) -> None:
    k = int(scn.raw.get("centroids_k", 4))
    seed = scn.seeds[0]
    points = [p for _, p in load_locations(str(scn.path("destinations")))]
    cset = kmeans(points, min(k, len(points)), seed)
    write_json(out / "centroids.json", {
        "k": cset.k, "seed": seed,
        "centroids": [{"lat": c.lat, "lon": c.lon} for c in cset.centroids]})


def cmd_gen_network(scn: Scenario, out: Path, quiet: bool) -> None:
    gen = scn.raw.get("gen")
    if not gen:
        raise ScenarioError("scenario needs a gen section")
    bw = BandwidthSpec.from_dict(gen.get("bw", {"kind": "fixed", "value": 1e7}))
    regions = tuple(tuple(r) for r in gen.get("regions", DEFAULT_REGIONS))
    snap = synth_network(int(gen["guards"]), int(gen["middles"]),
                         int(gen["exits"]), bw, scn.seeds[0], regions)
    target = out / gen.get("file", "snapshot.jsonl")
    tmp = target.with_name(target.name + ".tmp")
    save_snapshot(snap, str(tmp))
    os.replace(tmp, target)


COMMANDS = {
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "pathgen": cmd_pathgen,
    "mapd": cmd_mapd,
    "attack": cmd_attack,
    "nearby_guards": cmd_nearby_guards,
    "cluster": cmd_cluster,
    "gen_network": cmd_gen_network,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="relaylab",
        description="Relay and circuit selection laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)
    try:
        scn = Scenario(args.scenario, args.seed)
        out = Path(args.out) if args.out is not None else scn.out_dir
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](scn, out, args.quiet)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(f"{args.command}: wrote {out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
