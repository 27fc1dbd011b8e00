"""Configuration-driven experiment runner.

Each subcommand reads one JSON config file, validates it against the
distribution's moment profile, runs the experiment, and writes CSV results
plus a manifest JSON (full config + code version) next to them, atomically.
Identical configs produce byte-identical CSV bodies.

Exit codes: 0 success, 2 validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
from scipy import stats as scipy_stats

from . import __version__, regen
from .estimators import checks as checks_mod
from .estimators.confinement import confinement_rate
from .estimators.green import green_function_mc_multi
from .estimators.oracle import enumerated_tail, optimal_tilt, tilted_tail_estimate
from .estimators.tails import estimate_from_samples, w_samples
from .localtime import ledger_from_counts
from .replicas import level_sequence, local_time_profile
from .rwrs import decompose_lattice, decompose_tree, summary_from_arrays
from .scenery import MomentError, SceneryDistribution, moment_label
from .walks import LATTICE, TREE, GraphSpec


class ConfigError(ValueError):
    pass


# moment preconditions per deviation-bound target
_TARGET_MOMENTS = {
    "tree_upper": (4, TREE),
    "tree_lower": (6, TREE),
    "lattice_upper": (4, LATTICE),
}


def _require(config: dict, key: str, kind=None):
    if key not in config:
        raise ConfigError(f"missing config key {key!r}")
    val = config[key]
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(f"config key {key!r} has wrong type")
    return val


def _graph(config: dict) -> GraphSpec:
    try:
        return GraphSpec.from_json(_require(config, "graph", dict))
    except (KeyError, ValueError) as e:
        raise ConfigError(f"bad graph descriptor: {e}") from e


def _distribution(config: dict) -> SceneryDistribution:
    try:
        return SceneryDistribution.from_json(_require(config, "distribution", dict))
    except (KeyError, ValueError) as e:
        raise ConfigError(f"bad distribution: {e}") from e


def _check_target(config: dict, graph: GraphSpec, dist: SceneryDistribution) -> None:
    target = config.get("target")
    if target is None:
        return
    if target not in _TARGET_MOMENTS:
        raise ConfigError(f"unknown target {target!r}")
    m, kind = _TARGET_MOMENTS[target]
    if graph.kind != kind:
        raise ConfigError(f"target {target!r} applies to {kind} graphs")
    if not dist.has_moment(m):
        raise ConfigError(
            f"distribution {dist.kind}({dist.param:g}) violates the "
            f"{target!r} precondition {moment_label(m)}"
        )


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".tmp-{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_csv(path: Path, header, rows) -> None:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    _atomic_write(path, buf.getvalue())


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (np.floating,)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _common(config: dict):
    seed = int(_require(config, "seed"))
    replicas = int(_require(config, "replicas"))
    if replicas < 1:
        raise ConfigError("replicas must be positive")
    par = config.get("parallelism")
    par = None if par is None else int(par)
    return seed, replicas, par


# -- experiments --------------------------------------------------------------


def run_simulate(config: dict, outdir: Path):
    graph = _graph(config)
    dist = _distribution(config)
    _check_target(config, graph, dist)
    n = int(_require(config, "n"))
    y = float(_require(config, "y"))
    seed, replicas, _ = _common(config)
    if graph.kind == TREE:
        rate = regen.threshold_rate(graph.d)
        if rate <= 0:
            raise ConfigError(
                "tree decompositions need branching d >= 3 (the threshold rate "
                "vanishes at d = 2; d = 2 supports CLT/tail experiments only)"
            )
    rows = []
    for r in range(replicas):
        counts, _, gen = local_time_profile(graph, n, seed, r)
        xi = dist.sample_from_uniform(gen.random(counts.shape[0]))
        T, V2, silt2, w = summary_from_arrays(counts, xi, n)
        ledger = ledger_from_counts(counts)
        scenery_map = dict(zip(ledger.counts.keys(), xi.tolist()))
        if graph.kind == TREE:
            dec = decompose_tree(ledger, scenery_map, y, rate, n)
        else:
            dec = decompose_lattice(ledger, scenery_map, y, graph.d, n)
        rows.append(
            (r, n, T, V2, int(silt2), w)
            + tuple(dec.t_parts)
            + tuple(dec.v2_parts)
        )
    path = outdir / "simulate.csv"
    _write_csv(
        path,
        ["seed", "n", "T", "V2", "silt2", "W", "T1", "T2", "T3", "V21", "V22", "V23"],
        rows,
    )
    return [path]


def run_tail(config: dict, outdir: Path):
    graph = _graph(config)
    dist = _distribution(config)
    _check_target(config, graph, dist)
    n = int(_require(config, "n"))
    ys = [float(v) for v in _require(config, "ys", list)]
    if not ys:
        raise ConfigError("ys must be a non-empty list")
    seed, replicas, par = _common(config)
    if replicas < 1000:
        raise ConfigError("tail estimation requires at least 10^3 replicas")
    w = w_samples(graph, dist, n, replicas, seed, par)
    ests = [estimate_from_samples(w, y, graph, n) for y in ys]
    path = outdir / "tail.csv"
    _write_csv(
        path,
        ["y", "p_hat", "ci_low", "ci_high", "replicas", "hits", "rate", "rate_lattice"],
        [
            (
                e.y,
                e.p_hat,
                e.ci_low,
                e.ci_high,
                e.replicas,
                e.hits,
                e.rate,
                math.nan if e.rate_lattice is None else e.rate_lattice,
            )
            for e in ests
        ],
    )
    return [path]


_CHECK_RUNNERS = {
    "level_set": lambda p, seed, replicas, par: checks_mod.level_set_bound_check(
        d=int(p["d"]), n=int(p["n"]), t=float(p["t"]), u=float(p["u"]),
        beta=float(p["beta"]), replicas=replicas, seed=seed,
        m_const=float(p.get("m_const", 1.0)), parallelism=par,
    ),
    "heavy_mass": lambda p, seed, replicas, par: checks_mod.heavy_mass_bound_check(
        d=int(p["d"]), n=int(p["n"]), u=float(p["u"]), replicas=replicas,
        seed=seed, m_const=float(p["m_const"]), parallelism=par,
    ),
    "max": lambda p, seed, replicas, par: checks_mod.max_bound_check(
        graph=GraphSpec.from_json(p["graph"]), n=int(p["n"]), x=float(p["x"]),
        replicas=replicas, seed=seed,
        escape_prob=p.get("escape_prob"), parallelism=par,
    ),
    "silt": lambda p, seed, replicas, par: checks_mod.silt_bound_check(
        graph=GraphSpec.from_json(p["graph"]), n=int(p["n"]), q=int(p["q"]),
        b_q=float(p["b_q"]), replicas=replicas, seed=seed,
        c_q=float(p["c_q"]), parallelism=par,
    ),
    "lattice_heavy_mass": lambda p, seed, replicas, par: checks_mod.lattice_heavy_mass_check(
        d=int(p["d"]), n=int(p["n"]), y_n=float(p["y_n"]), replicas=replicas,
        seed=seed, c1=float(p["c1"]), parallelism=par,
    ),
    "scenery_count": lambda p, seed, replicas, par: checks_mod.scenery_count_check(
        dist=SceneryDistribution.from_json(p["distribution"]), n=int(p["n"]),
        y_n=float(p["y_n"]), m=int(p["m"]), x=float(p["x"]),
        replicas=replicas, seed=seed,
    ),
}


def run_bounds(config: dict, outdir: Path):
    points = _require(config, "points", list)
    if not points:
        raise ConfigError("points must be a non-empty list")
    seed, replicas, par = _common(config)
    rows = []
    for p in points:
        kind = p.get("check")
        if kind not in _CHECK_RUNNERS:
            raise ConfigError(f"unknown bound check {kind!r}")
        try:
            bc = _CHECK_RUNNERS[kind](p, seed, replicas, par)
        except (MomentError, ValueError) as e:
            raise ConfigError(str(e)) from e
        rows.append(
            (
                bc.lemma,
                json.dumps(bc.params, sort_keys=True),
                bc.p_hat,
                bc.ci_low,
                bc.ci_high,
                bc.replicas,
                bc.hits,
                bc.rhs,
                bc.holds,
            )
        )
    path = outdir / "bounds.csv"
    _write_csv(
        path,
        ["lemma", "params", "p_hat", "ci_low", "ci_high", "replicas", "hits", "rhs", "holds"],
        rows,
    )
    return [path]


def run_regen(config: dict, outdir: Path):
    graph = _graph(config)
    if graph.kind != TREE:
        raise ConfigError("regeneration experiments run on tree graphs")
    n = int(_require(config, "n"))
    seed, replicas, _ = _common(config)
    epochs = []
    censored_runs = 0
    for r in range(replicas):
        rec = regen.detect_regenerations(level_sequence(graph, n, seed, r))
        epochs.append(rec.epochs)
        censored_runs += int(rec.censored)
    ep = np.concatenate(epochs) if epochs else np.array([], dtype=np.int64)
    hist = regen.epoch_histogram(ep)
    hist_path = outdir / "regen_hist.csv"
    _write_csv(hist_path, ["k", "count"], hist)
    rate = regen.epoch_rate_bound(graph.d)
    lag1 = math.nan
    if ep.size > 2:
        a, b = ep[:-1].astype(float), ep[1:].astype(float)
        lag1 = float(np.corrcoef(a, b)[0, 1])
    summary = {
        "epochs": int(ep.size),
        "mean_epoch": float(ep.mean()) if ep.size else math.nan,
        "censored_runs": censored_runs,
        "epoch_rate_bound": rate,
        "mgf_at_half_rate": regen.empirical_epoch_mgf(ep, rate / 2.0) if ep.size else math.nan,
        "lag1_correlation": lag1,
    }
    summary_path = outdir / "regen_summary.json"
    _atomic_write(summary_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return [hist_path, summary_path]


def run_green(config: dict, outdir: Path):
    d = int(_require(config, "d"))
    horizons = [int(h) for h in _require(config, "horizons", list)]
    seed, replicas, par = _common(config)
    if d < 3:
        raise ConfigError("Green's function estimation requires d >= 3")
    ests = green_function_mc_multi(d, horizons, replicas, seed, par)
    path = outdir / "green.csv"
    _write_csv(
        path,
        ["d", "horizon", "replicas", "value", "se", "ci_low", "ci_high"],
        [(e.d, e.horizon, e.replicas, e.value, e.se, e.ci_low, e.ci_high) for e in ests],
    )
    return [path]


def run_confine(config: dict, outdir: Path):
    radii = [int(r) for r in _require(config, "radii", list)]
    if not radii:
        raise ConfigError("radii must be a non-empty list")
    rows = []
    for R in radii:
        try:
            res = confinement_rate(3, R)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        rows.append(
            (res.R, res.states, res.eigenvalue, res.decay_rate, res.R * res.R * res.decay_rate)
        )
    path = outdir / "confine.csv"
    _write_csv(path, ["R", "states", "eigenvalue", "decay_rate", "R2_rate"], rows)
    return [path]


def run_oracle(config: dict, outdir: Path):
    graph = _graph(config)
    dist = _distribution(config)
    n = int(_require(config, "n"))
    a = float(_require(config, "level"))
    seed, replicas, _ = _common(config)
    if dist.finite_support() is None:
        raise ConfigError("oracle cross-checks need a finite-support scenery")
    counts, _, _ = local_time_profile(graph, n, seed, 0)
    support = dist.finite_support()[0].shape[0]
    if support ** counts.shape[0] > (1 << 24):
        raise ConfigError(
            f"instance too large for enumeration: range {counts.shape[0]} "
            f"with support {support}"
        )
    exact = enumerated_tail(counts, dist, a, "T")
    plain = tilted_tail_estimate(counts, dist, a, 0.0, replicas, seed)
    theta = float(config.get("theta", optimal_tilt(counts, dist, a)))
    tilted = tilted_tail_estimate(counts, dist, a, theta, replicas, seed)
    rows = [
        ("exact", exact, 0.0, exact, exact, 0.0),
        ("plain_mc", plain.p_hat, (plain.ci_high - plain.ci_low) / 2, plain.ci_low, plain.ci_high, 0.0),
        ("tilted", tilted.p_hat, (tilted.ci_high - tilted.ci_low) / 2, tilted.ci_low, tilted.ci_high, theta),
    ]
    path = outdir / "oracle.csv"
    _write_csv(path, ["method", "estimate", "half_ci", "ci_low", "ci_high", "theta"], rows)
    return [path]


def run_clt(config: dict, outdir: Path):
    graph = _graph(config)
    dist = _distribution(config)
    _check_target(config, graph, dist)
    n = int(_require(config, "n"))
    seed, replicas, par = _common(config)
    w = w_samples(graph, dist, n, replicas, seed, par)
    samples_path = outdir / "clt_samples.csv"
    _write_csv(samples_path, ["replica", "w"], list(enumerate(w.tolist())))
    ks = scipy_stats.kstest(w, "norm")
    summary = {
        "replicas": replicas,
        "ks_stat": float(ks.statistic),
        "ks_pvalue": float(ks.pvalue),
        "mean": float(w.mean()),
        "sd": float(w.std(ddof=1)),
    }
    summary_path = outdir / "clt_summary.json"
    _atomic_write(summary_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return [samples_path, summary_path]


def run_plotdata(config: dict, outdir: Path):
    src = Path(_require(config, "input", str))
    if not src.exists():
        raise ConfigError(f"input file {src} does not exist")
    with src.open(encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        raise ConfigError("input tail table is empty")
    out_rows = []
    for row in rows:
        p = float(row["p_hat"])
        out_rows.append(
            (
                float(row["y"]),
                math.log(p) if p > 0 else math.nan,
                float(row["rate"]),
                float(row["ci_low"]),
                float(row["ci_high"]),
            )
        )
    path = outdir / "plot.csv"
    _write_csv(path, ["y", "log_p_hat", "rate", "ci_low", "ci_high"], out_rows)
    return [path]


EXPERIMENTS = {
    "simulate": run_simulate,
    "tail": run_tail,
    "bounds": run_bounds,
    "regen": run_regen,
    "green": run_green,
    "confine": run_confine,
    "oracle": run_oracle,
    "clt": run_clt,
    "plotdata": run_plotdata,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rwrslab",
        description="Reproducible scenery-walk experiments from JSON configs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--replicas", type=int, default=None, help="override replica count")
        p.add_argument("--out", default=None, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    if not isinstance(config, dict):
        print("config error: config must be a JSON object", file=sys.stderr)
        return 2
    declared = config.get("experiment")
    if declared is not None and declared != args.command:
        print(
            f"config error: config declares experiment {declared!r} but "
            f"subcommand is {args.command!r}",
            file=sys.stderr,
        )
        return 2
    config["experiment"] = args.command
    if args.seed is not None:
        config["seed"] = args.seed
    if args.replicas is not None:
        config["replicas"] = args.replicas
    outdir = Path(args.out or config.get("out") or "results")
    try:
        runner = EXPERIMENTS[args.command]
        outdir.mkdir(parents=True, exist_ok=True)
        outputs = runner(config, outdir)
    except (ConfigError, MomentError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 -- runtime failures map to exit 3
        print(f"runtime failure: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    manifest = {
        "version": __version__,
        "experiment": args.command,
        "config": config,
        "outputs": [p.name for p in outputs],
    }
    _atomic_write(outdir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
