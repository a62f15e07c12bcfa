"""Command-line interface.

Subcommands: analyze, unknot, knot, grow, knot-id, ingest.  Every run is
deterministic given --seed, writes a manifest.json echoing the resolved
configuration, and (for the report paths) renders figures next to the
delimited outputs.  Exit codes: 0 ok, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .complexity import aun, knotoid_spectrum, tun
from .dynamics import ChainParams, ChainState
from .errors import InvalidArgument, KnotsteerError
from .geometry import read_curve, write_curve
from .gsaw import MODEL_NAMES, model_by_name
from .ingest import (AngleDataset, HelicalRegion, angles_from_coordinates,
                     bundled_dataset, parse_calpha, partition_helical, write_dataset)
from .knot_id import stochastic_closure
from .steering import (CrankshaftPropagator, HybridPropagator, LangevinPropagator,
                       SteeringConfig, grow_steered_ensemble, steer)

TRAJECTORY_SCHEMA = "trajectory v1"
KYMOGRAPH_SCHEMA = "kymograph v1"
TWIST_SCHEMA = "twist-proportions v1"


class UsageError(Exception):
    pass


def _bundled_curve(name: str):
    ref = resources.files("knotsteer").joinpath(f"data/curves/{name}")
    with resources.as_file(ref) as path:
        return read_curve(path)


def _load_curve(path_arg: str | None, default_asset: str):
    if path_arg is None:
        return _bundled_curve(default_asset)
    path = Path(path_arg)
    if not path.exists():
        raise UsageError(f"curve file not found: {path}")
    return read_curve(path)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, command: str, resolved: dict) -> None:
    wall = resolved.pop("_wall_time", None)
    config = {}
    for key, value in resolved.items():
        if key == "func" or callable(value):
            continue
        config[key] = value if isinstance(value, (int, float, str, bool, type(None), list)) else str(value)
    manifest = {
        "command": command,
        "config": config,
        "version": __version__,
        "wall_time_s": wall,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_trajectory_csv(path: Path, records, k_candidates: int) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# schema {TRAJECTORY_SCHEMA}\n")
        cand_cols = ",".join(f"candidate_{k}" for k in range(k_candidates))
        fh.write(f"iteration,chosen_value,stderr,aun_value,knot_type,chosen_index,direction_hash,{cand_cols}\n")
        for r in records:
            cands = list(r.candidate_values)
            cands += [""] * (k_candidates - len(cands))
            cand_txt = ",".join("" if c == "" else repr(c) for c in cands)
            fh.write(f"{r.iteration},{r.chosen_value!r},{r.chosen_stderr!r},"
                     f"{r.aun_value!r},{r.knot_type},{r.chosen_index},"
                     f"{r.direction_hash},{cand_txt}\n")


def cmd_analyze(args) -> int:
    curve = _load_curve(args.curve, "deep_trefoil_38.xyz")
    t0 = time.perf_counter()
    if args.functional == "aun":
        est = aun(curve, n_dirs=args.dirs, seed=args.seed)
    else:
        est = tun(curve, stride=args.stride, n_dirs=args.dirs, seed=args.seed)
    spectrum = knotoid_spectrum(curve, n_dirs=args.dirs, seed=args.seed)
    payload = {
        "functional": args.functional,
        "value": est.value,
        "stderr": est.stderr,
        "n_samples": est.n_samples,
        "unclassified_fraction": est.unclassified_fraction,
        "spectrum": spectrum.weights,
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out:
        out = _outdir(args)
        (out / "analysis.json").write_text(text + "\n", encoding="utf-8")
        if args.plot:
            from .plotting import plot_spectrum

            plot_spectrum(spectrum.weights, out / "spectrum.png",
                          title=f"{args.functional.upper()} = {est.value:.3f}")
        _write_manifest(out, "analyze", {**vars(args), "_wall_time": time.perf_counter() - t0})
    return 0


def _run_steering(args, direction: str, default_asset: str, command: str) -> int:
    curve = _load_curve(args.curve, default_asset)
    x = np.array(curve.vertices)
    state = ChainState(positions=x, velocities=np.zeros_like(x),
                       params=ChainParams(), seed=args.seed)
    cfg = SteeringConfig(
        k_candidates=args.k, horizon=args.horizon, direction=direction,
        functional=args.functional, n_dirs=args.dirs, stride=args.stride,
        max_iterations=args.iters,
        stop_threshold=(args.stop_threshold if direction == "minimize" else None),
        master_seed=args.seed, workers=args.threads)
    out = _outdir(args)
    snapshots = out / "snapshots"
    snapshots.mkdir(exist_ok=True)

    def snapshot(iteration: int, config) -> None:
        write_curve(snapshots / f"frame_{iteration:04d}.xyz", config.curve(),
                    header=f"{command} iteration {iteration}")

    propagators = {"langevin": LangevinPropagator(dt=args.dt),
                   "crankshaft": CrankshaftPropagator(),
                   "hybrid": HybridPropagator(dt=args.dt)}
    t0 = time.perf_counter()
    traj = steer(state, propagators[args.propagator], cfg,
                 record_knots=args.knots, knot_closures=args.closures,
                 on_adopt=snapshot)
    _write_trajectory_csv(out / "trajectory.csv", traj.records, cfg.k_candidates)
    if args.plot:
        from .plotting import plot_trajectory

        plot_trajectory(traj.records, out / "trajectory.png", functional=args.functional)
    resolved = {**vars(args), "direction": direction, "stop_reason": traj.stop_reason,
                "_wall_time": time.perf_counter() - t0}
    _write_manifest(out, command, resolved)
    return 0


def cmd_unknot(args) -> int:
    return _run_steering(args, "minimize", "deep_trefoil_38.xyz", "unknot")


def cmd_knot(args) -> int:
    return _run_steering(args, "maximize", "equilibrated_52.xyz", "knot")


def cmd_grow(args) -> int:
    if args.model not in MODEL_NAMES:
        raise UsageError(f"unknown model {args.model!r}; choose from {MODEL_NAMES}")
    dataset = None
    if args.model.startswith("protein"):
        if args.dataset:
            from .ingest import read_dataset

            if not Path(args.dataset).exists():
                raise UsageError(f"dataset file not found: {args.dataset}")
            dataset = read_dataset(args.dataset)
        else:
            try:
                dataset = bundled_dataset()
            except FileNotFoundError as exc:
                raise UsageError(
                    "protein models need the bundled angle dataset; regenerate it "
                    "with scripts/build_angle_dataset.py or pass --dataset") from exc
    model = model_by_name(args.model, dataset)
    cfg = SteeringConfig(k_candidates=args.k, horizon=args.beads_per_step,
                         direction="maximize", functional="aun", n_dirs=args.dirs,
                         max_iterations=10 ** 9, master_seed=args.seed,
                         workers=args.threads)
    out = _outdir(args)
    t0 = time.perf_counter()
    table = grow_steered_ensemble(model, n_walks=args.walks,
                                  target_length=args.length, cfg=cfg,
                                  policy=args.policy, closures=args.closures,
                                  workers=args.threads)
    with open(out / "kymograph.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# schema {KYMOGRAPH_SCHEMA}\n")
        fh.write("length,knot_type,fraction,model\n")
        for row in table.rows():
            fh.write(f"{row['length']},{row['knot_type']},{row['fraction']!r},{row['model']}\n")
    with open(out / "twist_proportions.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# schema {TWIST_SCHEMA}\n")
        fh.write("length,model,twist_fraction,twist_fraction_incl_trefoil,knotted_fraction,n_reached\n")
        for length in table.lengths:
            fh.write(f"{length},{table.model},{table.twist_fraction(length)!r},"
                     f"{table.twist_fraction(length, include_trefoil=True)!r},"
                     f"{table.knotted_fraction(length)!r},{table.reached[length]}\n")
    if args.plot:
        from .plotting import plot_kymograph

        plot_kymograph(table, out / "kymograph.png")
    _write_manifest(out, "grow", {**vars(args), "trapped_walks": table.trapped_walks,
                                  "_wall_time": time.perf_counter() - t0})
    return 0


def cmd_knot_id(args) -> int:
    curve = _load_curve(args.curve, "deep_trefoil_38.xyz")
    dist = stochastic_closure(curve, n_closures=args.closures, seed=args.seed)
    payload = {"closures": dist.n_closures, "dominant": dist.dominant,
               "fractions": dist.fractions}
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out:
        out = _outdir(args)
        (out / "knot_id.json").write_text(text + "\n", encoding="utf-8")
        if args.plot:
            from .plotting import plot_spectrum

            plot_spectrum(dist.fractions, out / "closure_spectrum.png",
                          title=f"dominant {dist.dominant}")
        _write_manifest(out, "knot-id", dict(vars(args)))
    return 0


def cmd_ingest(args) -> int:
    source = Path(args.input)
    if not source.exists():
        raise UsageError(f"input path not found: {source}")
    files = sorted(source.glob("*")) if source.is_dir() else [source]
    theta, phi = [], []
    n_fragments = 0
    warnings = 0
    for f in files:
        if f.is_dir():
            continue
        try:
            fragments, warns = parse_calpha(f)
        except KnotsteerError:
            warnings += 1
            continue
        warnings += warns
        for frag in fragments:
            if frag.shape[0] < 4:
                continue
            pairs, excluded = angles_from_coordinates(frag)
            warnings += excluded
            n_fragments += 1
            theta.extend(p.theta for p in pairs)
            phi.extend(p.phi for p in pairs)
    if not theta:
        raise UsageError(f"no usable alpha-carbon chains under {source}")
    region = HelicalRegion(*args.region) if args.region else HelicalRegion()
    dataset = AngleDataset(theta=np.array(theta), phi=np.array(phi),
                           helical=np.zeros(len(theta), dtype=bool),
                           metadata={"source_files": str(len(files)),
                                     "fragments": str(n_fragments),
                                     "warnings": str(warnings)})
    dataset = partition_helical(dataset, region)
    write_dataset(args.output, dataset)
    print(f"wrote {len(dataset)} angle pairs "
          f"(helical fraction {dataset.helical_fraction():.3f}) to {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="knotsteer",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required: bool):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        if out_required:
            p.add_argument("--out", required=True, help="output directory")
        else:
            p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--plot", dest="plot", action="store_true", default=True)
        p.add_argument("--no-plot", dest="plot", action="store_false")

    p = sub.add_parser("analyze", help="AUN/TUN of a curve file")
    p.add_argument("--curve", required=True)
    p.add_argument("--functional", choices=("aun", "tun"), default="aun")
    p.add_argument("--dirs", type=int, default=500)
    p.add_argument("--stride", type=int, default=4)
    common(p, out_required=False)
    p.set_defaults(func=cmd_analyze)

    for name, helptext in (("unknot", "steered untying of a knotted chain"),
                           ("knot", "steered entangling of an open chain")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--curve", default=None, help="start curve (default: bundled asset)")
        p.add_argument("--k", type=int, default=40, help="candidates per iteration")
        p.add_argument("--horizon", type=int, default=500, help="steps per candidate")
        p.add_argument("--iters", type=int, default=100 if name == "unknot" else 300)
        p.add_argument("--functional", choices=("aun", "tun"), default="aun")
        p.add_argument("--dirs", type=int, default=64)
        p.add_argument("--stride", type=int, default=4)
        p.add_argument("--dt", type=float, default=0.001)
        p.add_argument("--propagator", choices=("langevin", "crankshaft", "hybrid"),
                       default="langevin" if name == "unknot" else "hybrid",
                       help="candidate move generator (hybrid = crankshaft "
                            "sweep + Langevin segment)")
        p.add_argument("--stop-threshold", type=float,
                       default=0.02 if name == "unknot" else None)
        p.add_argument("--knots", action="store_true",
                       help="record closure type each iteration")
        p.add_argument("--closures", type=int, default=30)
        common(p, out_required=True)
        p.set_defaults(func=cmd_unknot if name == "unknot" else cmd_knot)

    p = sub.add_parser("grow", help="steered growing-walk ensemble")
    p.add_argument("--model", required=True, help=f"one of {MODEL_NAMES}")
    p.add_argument("--walks", type=int, default=100)
    p.add_argument("--length", type=int, default=250)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--beads-per-step", type=int, default=10)
    p.add_argument("--dirs", type=int, default=64)
    p.add_argument("--closures", type=int, default=24)
    p.add_argument("--policy", choices=("strict", "weak"), default="strict")
    p.add_argument("--dataset", default=None, help="angle dataset CSV override")
    common(p, out_required=True)
    p.set_defaults(func=cmd_grow)

    p = sub.add_parser("knot-id", help="stochastic-closure knot type of a curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--closures", type=int, default=100)
    common(p, out_required=False)
    p.set_defaults(func=cmd_knot_id)

    p = sub.add_parser("ingest", help="build an angle dataset from coordinate files")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--region", type=float, nargs=4, default=None,
                   metavar=("THETA_MIN", "THETA_MAX", "PHI_MIN", "PHI_MAX"))
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except KnotsteerError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
