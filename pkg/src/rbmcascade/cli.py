"""Command line driver: dataset generation, training, and analysis passes.

    rbmc print-config
    rbmc gen-data  --config FILE --out DIR [--seed N]
    rbmc train     --config FILE --out DIR [--seed N] [--dataset PATH] [--resume STATE]
    rbmc analyze svd-track   --run DIR [--dataset PATH] [--out DIR]
    rbmc analyze anneal-scan --run DIR [--dataset PATH] [--out DIR] [--direction D]
    rbmc analyze fss         --runs DIR [DIR ...] --out DIR
    rbmc analyze hysteresis  --model FILE | --run DIR --at-w1 W  [--out DIR]
    rbmc analyze theory      --config FILE --out DIR [--model FILE]
    rbmc analyze relax-time  --model FILE [FILE ...] | --run DIR --at-w1 LIST [--out DIR]

Every command is deterministic given identical inputs and --seed; outputs
reference files by bare name so reruns into any directory are byte-identical.
Exit codes: 0 ok, 2 config/contract error, 3 numerical abort, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .config import (ConfigError, DEFAULT_CONFIG, config_echo, get_bool,
                     get_choice, get_float, get_int, load_config)
from .dataio import (load_dataset, save_csv01, save_packed,
                     write_manifest)
from .errors import ContractError, NumericalAbort, PhaseError, SchemaError
from .model import (HiddenKind, SpinConvention, map_states)
from .modelio import load_model
from .observables import (anneal_scan, dataset_pca, effective_beta,
                          effective_beta_array, fit_critical_coupling,
                          fss_collapse, mattis_chi_theory, relaxation_time,
                          scan_to_rows, svd_of_weights)
from .hysteresis import LoopProtocol, run_loop
from .synthetic import (MattisSpec, build_correlated_patterns, random_pattern,
                        sample_hopfield_pair, sample_mattis,
                        solve_pair_magnetizations)
from .tables import schema_columns, write_csv
from .theory import (free_energy_surface, integrate_bb_shared_dynamics,
                     integrate_bg_dynamics, integrate_pair_dynamics_full,
                     predict_pair_trajectory)
from .trainer import TrainConfig, init_model, load_manifest, train, write_diagnostics

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("RBMC_WORKERS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"RBMC_WORKERS must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def parallel_map(fn, items, workers: int):
    """Ordered map, threads only (numpy releases the GIL in the hot parts)."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _outdir(args) -> Path:
    out = Path(args.out) if args.out else Path.cwd()
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_print_config(_args) -> int:
    sys.stdout.write(DEFAULT_CONFIG)
    return EXIT_OK


def cmd_gen_data(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args)
    seed = args.seed
    kind = get_choice(cfg, "data", "kind", ("mattis", "pair"))
    n_vis = get_int(cfg, "data", "n_visible")
    beta = get_float(cfg, "data", "beta")
    n_samples = get_int(cfg, "data", "n_samples")
    mode = get_choice(cfg, "data", "mode", ("meanfield", "mcmc"))
    fmt = get_choice(cfg, "data", "format", ("csv01", "packed"))
    steps = get_int(cfg, "data", "mcmc_steps") or None

    extra: dict = {"kind": kind, "beta": beta, "mode": mode, "seed": seed}
    if kind == "mattis":
        spec = MattisSpec(beta, random_pattern(n_vis, seed))
        samples = sample_mattis(spec, n_samples, mode, seed=seed + 1,
                                mcmc_steps=steps)
        extra["magnetization"] = spec.magnetization()
        provenance = f"mattis teacher beta={beta:g} n_visible={n_vis}"
    else:
        kappa = get_float(cfg, "data", "kappa")
        spec = build_correlated_patterns(n_vis, kappa, seed, beta)
        samples = sample_hopfield_pair(spec, n_samples, mode, seed=seed + 1,
                                       mcmc_steps=steps)
        sol = solve_pair_magnetizations(beta, kappa)
        extra.update({"kappa": kappa, "m_plus": sol.m_plus, "m_minus": sol.m_minus,
                      "r": sol.r, "p": sol.p})
        provenance = f"pair teacher beta={beta:g} kappa={kappa:g} n_visible={n_vis}"
    data01 = map_states(samples, SpinConvention.ISING_PM1, SpinConvention.BINARY01)
    name = "dataset.csv" if fmt == "csv01" else "dataset.dset"
    (save_csv01 if fmt == "csv01" else save_packed)(data01, out / name)
    extra["file"] = name
    write_manifest(out / "manifest.json", n_samples, n_vis,
                   provenance=provenance, extra=extra)
    print(f"wrote {out / name} and manifest.json")
    return EXIT_OK


def _dataset_for_training(cfg, args):
    path = args.dataset or cfg.get("train", "dataset").strip()
    if not path:
        raise ConfigError("no dataset: set [train] dataset or pass --dataset")
    data01, _ = load_dataset(path)
    return data01, path


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args)
    data01, data_path = _dataset_for_training(cfg, args)
    convention = SpinConvention(get_choice(cfg, "model", "convention",
                                           ("binary01", "ising_pm1")))
    hidden_kind = HiddenKind(get_choice(cfg, "model", "hidden_kind",
                                        ("binary", "gaussian")))
    data = map_states(data01, SpinConvention.BINARY01, convention)
    if args.resume:
        # resume pairs a state file with its model checkpoint (same stem)
        model_path = Path(args.resume).with_suffix(".rbmc")
        if not model_path.exists():
            raise ConfigError(f"resume needs the matching checkpoint {model_path}")
        model0 = load_model(model_path)
    else:
        model0 = init_model(data.shape[1], get_int(cfg, "model", "n_hidden"),
                            seed=args.seed, convention=convention,
                            hidden_kind=hidden_kind,
                            weight_init_std=get_float(cfg, "model", "weight_init_std"))
    tc = TrainConfig(
        scheme=get_choice(cfg, "train", "scheme", ("pcd", "cd", "rdm")),
        k=get_int(cfg, "train", "k"),
        learning_rate=get_float(cfg, "train", "learning_rate"),
        minibatch_size=get_int(cfg, "train", "minibatch_size"),
        n_chains=get_int(cfg, "train", "n_chains"),
        epochs=get_int(cfg, "train", "epochs"),
        checkpoint_count=get_int(cfg, "train", "checkpoint_count"),
        seed=args.seed,
        update_biases=get_bool(cfg, "train", "update_biases"))
    result = train(data, model0, tc, out_dir=out, resume_state=args.resume)
    write_diagnostics(out, result.grad_norms)
    doc = json.loads((out / "manifest.json").read_text())
    doc["dataset"]["path"] = str(data_path)
    doc["config_echo"] = config_echo(cfg)
    (out / "manifest.json").write_text(json.dumps(doc, sort_keys=True, indent=1))
    print(f"trained {len(result.checkpoints)} checkpoints into {out}")
    return EXIT_OK


def _run_models(run_dir):
    manifest = load_manifest(run_dir)
    entries = sorted(manifest["checkpoints"], key=lambda e: e["update_index"])
    return manifest, entries


def cmd_svd_track(args) -> int:
    cfg = load_config(args.config)
    run_dir = Path(args.run)
    out = _outdir(args) if args.out else run_dir
    n_modes = get_int(cfg, "scan", "n_modes")
    _, entries = _run_models(run_dir)
    reference = None
    if args.dataset:
        data01, _ = load_dataset(args.dataset)
        reference = dataset_pca(data01).directions
    rows = []
    for entry in entries:
        model = load_model(run_dir / entry["model_file"])
        svd = svd_of_weights(model)
        k = min(n_modes, svd.values.shape[0])
        for a in range(k):
            overlap = math.nan
            if reference is not None and a < reference.shape[1]:
                overlap = float(abs(svd.left[:, a] @ reference[:, a]))
            rows.append({"update_index": entry["update_index"],
                         "epoch": entry["epoch"], "alpha": a + 1,
                         "w_alpha": float(svd.values[a]), "overlap_alpha": overlap})
    write_csv(out / "svd_track.csv", schema_columns("svd_track"), rows)
    print(f"wrote {out / 'svd_track.csv'}")
    return EXIT_OK


def cmd_anneal_scan(args) -> int:
    cfg = load_config(args.config)
    run_dir = Path(args.run)
    out = _outdir(args) if args.out else run_dir
    direction = args.direction or get_choice(cfg, "scan", "direction",
                                             ("cooling", "heating"))
    n_chains = get_int(cfg, "scan", "n_chains")
    n_sweeps = get_int(cfg, "scan", "n_sweeps")
    n_modes = get_int(cfg, "scan", "n_modes")
    reference = None
    if args.dataset:
        data01, _ = load_dataset(args.dataset)
        reference = dataset_pca(data01).directions
    records = anneal_scan(run_dir, n_chains=n_chains, n_sweeps=n_sweeps,
                          direction=direction, seed=args.seed, n_modes=n_modes,
                          reference_directions=reference)
    write_csv(out / "scan.csv", schema_columns("scan"), scan_to_rows(records))
    sample_rows = []
    for rec in records:
        if rec.m_samples is None:
            continue
        for chain in range(rec.m_samples.shape[0]):
            sample_rows.append({
                "update_index": rec.update_index, "chain": chain,
                "m_1": float(rec.m_samples[chain, 0]),
                "m_2": float(rec.m_samples[chain, 1])
                       if rec.m_samples.shape[1] > 1 else math.nan})
    write_csv(out / "scan_samples.csv", schema_columns("scan_samples"), sample_rows)
    first = load_model(run_dir / _run_models(run_dir)[1][0]["model_file"])
    doc = {"format": "rbmc-scan", "direction": direction, "n_chains": n_chains,
           "n_sweeps": n_sweeps, "seed": args.seed,
           "n_visible": first.n_visible, "n_hidden": first.n_hidden,
           "n_eff": math.sqrt(first.n_visible * first.n_hidden),
           "files": {"scan": "scan.csv", "samples": "scan_samples.csv"}}
    (out / "scan_manifest.json").write_text(json.dumps(doc, sort_keys=True, indent=1))
    print(f"wrote {out / 'scan.csv'} ({len(records)} checkpoints)")
    return EXIT_OK


def _load_scan_curve(scan_dir):
    scan_dir = Path(scan_dir)
    doc = json.loads((scan_dir / "scan_manifest.json").read_text())
    if doc.get("format") != "rbmc-scan":
        raise ContractError(f"{scan_dir} has no annealed-scan output")
    from .tables import read_csv
    _, rows = read_csv(scan_dir / doc["files"]["scan"])
    w1, chi1 = [], []
    for row in rows:
        if int(row["alpha"]) == 1:
            w1.append(row["w_alpha"])
            chi1.append(row["chi_m_alpha"])
    order = np.argsort(w1)
    return float(doc["n_eff"]), np.asarray(w1)[order], np.asarray(chi1)[order]


def cmd_fss(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args)
    curves_w = [_load_scan_curve(d) for d in args.runs]
    if len(curves_w) < 2:
        raise ContractError("finite-size collapse needs at least two runs")
    grid = np.arange(get_float(cfg, "fss", "wc_grid_lo"),
                     get_float(cfg, "fss", "wc_grid_hi") + 1e-9,
                     get_float(cfg, "fss", "wc_grid_step"))
    w_c, spread = fit_critical_coupling(curves_w, grid)
    beta_c = effective_beta(w_c)
    curves_b = [(n, effective_beta_array(w), chi) for n, w, chi in curves_w]
    res = fss_collapse(curves_b, beta_c, gamma=get_float(cfg, "fss", "gamma"),
                       nu=get_float(cfg, "fss", "nu"),
                       d_u=get_float(cfg, "fss", "d_u"))
    rows = []
    for (n_eff, beta, chi), pts in zip(curves_b, res.points):
        for j in range(len(beta)):
            rows.append({"N": n_eff, "beta": float(beta[j]), "chi": float(chi[j]),
                         "x": float(pts["x"][j]), "y": float(pts["y"][j]),
                         "branch": int(pts["branch"][j])})
    write_csv(out / "fss_collapse.csv", schema_columns("fss_collapse"), rows)
    div_rows = []
    for n_eff, w1, chi in curves_w:
        for j in range(len(w1)):
            theory = math.nan
            if 0 <= w1[j] < 0.995 * w_c:
                theory = mattis_chi_theory(float(w1[j]), w_c)
            div_rows.append({"N": n_eff, "w_alpha": float(w1[j]),
                             "chi_m_alpha": float(chi[j]), "chi_theory": theory})
    write_csv(out / "chi_divergence.csv", schema_columns("chi_divergence"), div_rows)
    summary = {"w_1c": w_c, "beta_c": beta_c, "spread_collapsed": res.spread,
               "spread_raw": res.spread_raw,
               "exponents": {"gamma": get_float(cfg, "fss", "gamma"),
                             "nu": get_float(cfg, "fss", "nu"),
                             "d_u": get_float(cfg, "fss", "d_u")}}
    (out / "fss_summary.json").write_text(json.dumps(summary, sort_keys=True, indent=1))
    print(f"w_1c = {w_c:g}, spread {res.spread_raw:g} -> {res.spread:g}")
    return EXIT_OK


def _model_near_w1(run_dir, target):
    _, entries = _run_models(run_dir)
    best, best_model = None, None
    for entry in entries:
        model = load_model(Path(run_dir) / entry["model_file"])
        w1 = float(svd_of_weights(model).values[0])
        gap = abs(w1 - target)
        if best is None or gap < best:
            best, best_model = gap, model
    return best_model


def cmd_hysteresis(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args)
    if args.model:
        model = load_model(args.model)
    elif args.run and args.at_w1:
        model = _model_near_w1(args.run, float(args.at_w1[0]))
    else:
        raise ConfigError("hysteresis needs --model or --run with --at-w1")
    svd = svd_of_weights(model)
    h_max = get_float(cfg, "hysteresis", "h_max") or None
    protocol = LoopProtocol(direction=svd.left[:, 0], h_max=h_max,
                            n_loop=get_int(cfg, "hysteresis", "n_loop"),
                            k=get_int(cfg, "hysteresis", "k"),
                            n_chains=get_int(cfg, "hysteresis", "n_chains"))
    trace = run_loop(model, protocol, seed=args.seed)
    rows = [{"phase_leg": leg, "h": float(h), "mean_m": float(m), "std_m": float(s)}
            for leg, h, m, s in zip(trace.legs, trace.h, trace.mean_m, trace.std_m)]
    write_csv(out / "hysteresis.csv", schema_columns("hysteresis"), rows)
    summary = {"loop_area": trace.loop_area,
               "loop_area_stderr": trace.loop_area_stderr,
               "w1": float(svd.values[0]),
               "h_max": protocol.resolve_h_max(model.n_visible),
               "n_loop": protocol.n_loop, "k": protocol.k,
               "n_chains": protocol.n_chains, "seed": args.seed}
    (out / "hysteresis_summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=1))
    print(f"loop area {trace.loop_area:g} +- {trace.loop_area_stderr:g}")
    return EXIT_OK


def cmd_relax_time(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args)
    models = []
    if args.model:
        models = [load_model(p) for p in args.model]
    elif args.run and args.at_w1:
        models = [_model_near_w1(args.run, float(t)) for t in args.at_w1]
    else:
        raise ConfigError("relax-time needs --model files or --run with --at-w1")
    n_chains = get_int(cfg, "relax", "n_chains")
    max_sweeps = get_int(cfg, "relax", "max_sweeps")
    burn_in = get_int(cfg, "relax", "burn_in")

    def measure(item):
        idx, model = item
        res = relaxation_time(model, n_chains=n_chains, max_sweeps=max_sweeps,
                              burn_in=burn_in, seed=args.seed + idx)
        w1 = float(svd_of_weights(model).values[0])
        beta = effective_beta(w1, model.convention)
        return {"w1": w1, "beta": beta, "distance": abs(beta - 1.0),
                "tau_exp": res.tau_exp, "flag": res.flag}

    rows = parallel_map(measure, list(enumerate(models)), _workers(args))
    write_csv(out / "relax.csv", schema_columns("relax"), rows)
    print(f"wrote {out / 'relax.csv'} ({len(rows)} models)")
    return EXIT_OK


def cmd_theory(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args)
    kind = get_choice(cfg, "theory", "kind", ("bg", "bb-shared", "pair",
                                              "free-energy"))
    beta = get_float(cfg, "theory", "beta")
    n_vis = get_int(cfg, "theory", "n_visible")
    t_max = get_float(cfg, "theory", "t_max")
    dt = get_float(cfg, "theory", "dt")
    u0 = get_float(cfg, "theory", "u0")
    manifest: dict = {"kind": kind, "beta": beta, "n_visible": n_vis,
                      "t_max": t_max, "dt": dt, "seed": args.seed}

    if kind in ("bg", "bb-shared"):
        spec = MattisSpec(beta, random_pattern(n_vis, args.seed))
        gen = rngmod.make_generator(args.seed, rngmod.TAG_INIT)
        w0 = gen.uniform(-1e-3, 1e-3, n_vis) / math.sqrt(n_vis)
        w0 += (u0 - spec.pattern @ w0 / math.sqrt(n_vis)) * spec.pattern / math.sqrt(n_vis)
        m = spec.magnetization()
        manifest["magnetization"] = m
        if kind == "bg":
            traj = integrate_bg_dynamics(spec, w0, t_max, dt)
            rows = zip(traj.t, traj.u_xi, traj.norm_w, traj.extras["h_star"],
                       traj.extras["chi"], traj.extras["distance"])
            write_csv(out / "theory_bg.csv", schema_columns("theory_bg"),
                      [tuple(float(x) for x in r) for r in rows])
            manifest["expected_rate"] = m * m
            manifest["file"] = "theory_bg.csv"
        else:
            alpha = get_float(cfg, "theory", "alpha")
            traj = integrate_bb_shared_dynamics(spec, alpha, w0, t_max, dt)
            rows = zip(traj.t, traj.u_xi, traj.norm_w, traj.extras["tau"])
            write_csv(out / "theory_bb_shared.csv",
                      schema_columns("theory_bb_shared"),
                      [tuple(float(x) for x in r) for r in rows])
            manifest["alpha"] = alpha
            manifest["expected_rate"] = m * m / alpha
            manifest["file"] = "theory_bb_shared.csv"
    elif kind == "pair":
        kappa = get_float(cfg, "theory", "kappa")
        pair = build_correlated_patterns(n_vis, kappa, args.seed, beta)
        sol = solve_pair_magnetizations(beta, kappa)
        e1 = pair.eta1 / np.linalg.norm(pair.eta1)
        e2 = pair.eta2 / np.linalg.norm(pair.eta2)
        gen = rngmod.make_generator(args.seed, rngmod.TAG_INIT)
        w0 = gen.normal(0.0, 1e-4, (2, n_vis))
        for a, (zf, zs) in enumerate(((u0, 0.7 * u0), (u0, -0.7 * u0))):
            w0[a] += (zf - e1 @ w0[a]) * e1 + (zs - e2 @ w0[a]) * e2
        result = integrate_pair_dynamics_full(pair, sol, w0, t_max, dt)
        rows = zip(result["t"], result["u_eta1"][0], result["u_eta1"][1],
                   result["u_eta2"][0], result["u_eta2"][1],
                   result["sigma1"], result["sigma2"])
        write_csv(out / "pair_growth.csv", schema_columns("pair_growth"),
                  [tuple(float(x) for x in r) for r in rows])
        pred = predict_pair_trajectory(pair, sol, e1 @ w0[0], e1 @ w0[1],
                                       e2 @ w0[0], e2 @ w0[1], t_max)
        manifest.update({"kappa": kappa, "m_plus": sol.m_plus,
                         "m_minus": sol.m_minus, "r": sol.r, "p": sol.p,
                         "rate_fast": pred.rate_fast, "rate_slow": pred.rate_slow,
                         "t_first": pred.t_first, "t_second": pred.t_second,
                         "file": "pair_growth.csv"})
    else:  # free-energy
        if not args.model:
            raise ConfigError("free-energy needs --model with two hidden units")
        model = load_model(args.model)
        if model.n_hidden != 2:
            raise ConfigError("free-energy surface requires exactly 2 hidden units")
        extent = get_float(cfg, "theory", "grid_extent")
        n_pts = get_int(cfg, "theory", "grid_points")
        grid = np.linspace(-extent, extent, n_pts)
        surface, minima = free_energy_surface(model.weights.T, grid, grid)
        rows = []
        for i, h1 in enumerate(grid):
            for j, h2 in enumerate(grid):
                rows.append((float(h1), float(h2), float(surface[i, j])))
        write_csv(out / "free_energy.csv", schema_columns("free_energy"), rows)
        manifest.update({"minima": minima, "file": "free_energy.csv"})
    (out / "theory_manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=1))
    print(f"wrote {out / manifest['file']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbmc", description=__doc__.split("\n")[0])
    parser.add_argument("--config", default=None, help="INI config file")
    parser.add_argument("--seed", type=int, default=0, help="64-bit run seed")
    parser.add_argument("--workers", type=int, default=None,
                        help="parallel worker count (default: cores, or RBMC_WORKERS)")
    parser.add_argument("--out", default=None, help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("print-config", help="print every config key with defaults")
    sub.add_parser("gen-data", help="generate a teacher dataset")

    p_train = sub.add_parser("train", help="train a machine on a dataset file")
    p_train.add_argument("--dataset", default=None)
    p_train.add_argument("--resume", default=None, help="state file to resume from")

    p_an = sub.add_parser("analyze", help="analysis passes over runs/models")
    an = p_an.add_subparsers(dest="analysis", required=True)
    p = an.add_parser("svd-track")
    p.add_argument("--run", required=True)
    p.add_argument("--dataset", default=None)
    p = an.add_parser("anneal-scan")
    p.add_argument("--run", required=True)
    p.add_argument("--dataset", default=None)
    p.add_argument("--direction", choices=("cooling", "heating"), default=None)
    p = an.add_parser("fss")
    p.add_argument("--runs", nargs="+", required=True)
    p = an.add_parser("hysteresis")
    p.add_argument("--model", default=None)
    p.add_argument("--run", default=None)
    p.add_argument("--at-w1", nargs="*", default=None)
    p = an.add_parser("theory")
    p.add_argument("--model", default=None)
    p = an.add_parser("relax-time")
    p.add_argument("--model", nargs="*", default=None)
    p.add_argument("--run", default=None)
    p.add_argument("--at-w1", nargs="*", default=None)
    return parser


_DISPATCH = {
    "print-config": cmd_print_config,
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    ("analyze", "svd-track"): cmd_svd_track,
    ("analyze", "anneal-scan"): cmd_anneal_scan,
    ("analyze", "fss"): cmd_fss,
    ("analyze", "hysteresis"): cmd_hysteresis,
    ("analyze", "theory"): cmd_theory,
    ("analyze", "relax-time"): cmd_relax_time,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    key = (args.command, args.analysis) if args.command == "analyze" else args.command
    try:
        return _DISPATCH[key](args)
    except (ConfigError, PhaseError, ContractError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
