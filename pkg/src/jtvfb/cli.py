"""Command-line interface: extend, roundtrip, denoise, simulate.

Every command writes a run manifest (inputs with content hashes, flags,
outputs, tool version, seed) next to its outputs, so a run can be
replayed and checked bit-for-bit. All randomness flows from --seed
through numpy's PCG64 generator; there is no global RNG state.

Exit codes: 0 success, 1 numeric/validation failure, 2 I/O failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .denoise import (
    DenoiseConfig,
    add_gaussian_noise,
    build_pipeline,
    metrics_record,
    mse,
    snr_db,
)
from .errors import JTVError
from .extension import (
    bipartite_double_cover,
    extend_graph,
    greedy_coloring,
    redundancy,
    ring_extend,
)
from .filterbank import joint_two_term, meyer_qmf_kernels
from .graphs import read_edgelist, write_edgelist
from .imaging import image_to_joint, read_pgm, video_to_joint, write_pgm
from .joint import extend_signal, read_signal_csv, write_signal_csv
from .seirs import SCENARIOS, SeirsParams, load_scenario_config, scenario_params, seirs_signal


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(out_prefix, command, inputs, params, outputs, seed) -> Path:
    manifest = {
        "command": command,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "params": params,
        "outputs": {str(p): _sha256(p) for p in outputs},
        "versions": f"jtvfb {__version__}",
        "seed": seed,
    }
    path = Path(f"{out_prefix}_manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _worker_count() -> int:
    raw = os.environ.get("JTV_FBANK_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return min(4, os.cpu_count() or 1)


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _extension_json(ext) -> dict:
    return {
        "n0": ext.n0,
        "n1": ext.n1,
        "low": sorted(ext.bipartition.low),
        "high": sorted(ext.bipartition.high),
        "duplicate_of": {str(k): v for k, v in sorted(ext.duplicate_of.items())},
        "rho": ext.redundancy,
    }


def _is_ring(g) -> bool:
    if g.n < 3 or len(g.edges) != g.n:
        return False
    expected = {(min(i, (i + 1) % g.n), max(i, (i + 1) % g.n)) for i in range(g.n)}
    return {(u, v) for u, v, _ in g.edges} == expected


def cmd_extend(args) -> int:
    g = read_edgelist(args.graph)
    if args.mode == "ring":
        if not _is_ring(g):
            raise JTVError(f"{args.graph}: --mode ring requires a cycle graph")
        ext = ring_extend(g.n, vertical_weight=args.vertical_weight)
    elif args.mode == "double-cover":
        ext = bipartite_double_cover(g)
    else:
        coloring = greedy_coloring(g)
        split = args.split if args.split is not None else coloring.k - 1
        ext = extend_graph(g, coloring, split, vertical_weight=args.vertical_weight)
    rho = redundancy(ext)

    edges_path = Path(f"{args.out}_extended.edges")
    json_path = Path(f"{args.out}_extension.json")
    write_edgelist(edges_path, ext.extended)
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(_extension_json(ext), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(
        f"rho={rho:.6g} low={len(ext.bipartition.low)} "
        f"high={len(ext.bipartition.high)} n0={ext.n0} n1={ext.n1}"
    )
    _write_manifest(
        args.out,
        "extend",
        inputs=[args.graph],
        params={
            "mode": args.mode,
            "split": args.split,
            "vertical_weight": args.vertical_weight,
        },
        outputs=[edges_path, json_path],
        seed=0,
    )
    return 0


def cmd_roundtrip(args) -> int:
    g = read_edgelist(args.graph)
    cfg = DenoiseConfig(
        sigma=0.0,
        tau=0.0,
        seed=args.seed,
        mode=args.mode,
        fill=args.fill,
        split=args.split,
        vertical_weight=args.vertical_weight,
    )
    inputs = [args.graph]
    if args.signal == "random":
        rng = np.random.default_rng(args.seed)
        x = rng.standard_normal((g.n, args.time_length))
    else:
        x = read_signal_csv(args.signal)
        inputs.append(args.signal)
        if x.shape[0] != g.n:
            raise JTVError(
                f"signal has {x.shape[0]} rows, graph has {g.n} nodes"
            )

    pipeline = build_pipeline(g, x.shape[1], cfg)
    y = pipeline.run(x, cfg)
    err = mse(x, y)
    denom = float(np.linalg.norm(x))
    payload = {
        "command": "roundtrip",
        "mode": args.mode,
        "fill": args.fill,
        "mse": err,
        "rel_error": float(np.linalg.norm(x - y)) / denom if denom else 0.0,
        "rho_vertex": pipeline.rho_vertex,
        "rho_time": pipeline.rho_time,
        "seed": args.seed,
    }
    if args.literal:
        lifted = extend_signal(x, pipeline.vertex_ext, pipeline.time_ext, cfg.fill)
        two = joint_two_term(
            lifted,
            pipeline.joint,
            pipeline.vertex_ext.bipartition,
            pipeline.time_ext.bipartition,
            meyer_qmf_kernels(),
        )
        payload["two_term_residual_rel"] = two.residual_rel
        payload["two_term_vec_max_diff"] = two.vec_form_max_diff
    _print_json(payload)
    if args.out:
        metrics_path = Path(f"{args.out}_roundtrip.json")
        with open(metrics_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True)
            fh.write("\n")
        _write_manifest(
            args.out,
            "roundtrip",
            inputs=inputs,
            params={k: v for k, v in payload.items() if k not in ("command",)},
            outputs=[metrics_path],
            seed=args.seed,
        )
    return 0


def _load_denoise_input(args):
    """Returns (clean signal, vertex graph, input paths, kind, frame side)."""
    if args.signal:
        x = read_signal_csv(args.signal)
        inputs = [args.signal]
        if args.graph:
            g = read_edgelist(args.graph)
            inputs.append(args.graph)
        elif args.grid:
            from .graphs import grid_graph

            g = grid_graph(args.grid[0], args.grid[1], 4)
        else:
            raise JTVError("--signal needs --graph or --grid")
        if x.shape[0] != g.n:
            raise JTVError(f"signal has {x.shape[0]} rows, graph has {g.n} nodes")
        return x, g, inputs, "signal", None
    if args.image_a or args.image_b:
        if not (args.image_a and args.image_b):
            raise JTVError("image mode needs both --image-a and --image-b")
        a = read_pgm(args.image_a)
        b = read_pgm(args.image_b)
        x, g = image_to_joint(a, b, args.frames, args.side)
        return x, g, [args.image_a, args.image_b], "image", args.side
    if args.video_dir:
        directory = Path(args.video_dir)
        frame_paths = sorted(directory.glob("*.pgm"))
        if not frame_paths:
            raise FileNotFoundError(f"no .pgm frames in {directory}")
        frames = [read_pgm(p) for p in frame_paths]
        x, g, _ = video_to_joint(frames, args.side)
        return x, g, frame_paths, "video", args.side
    raise JTVError("denoise needs --signal, --image-a/--image-b, or --video-dir")


def _denoise_once(clean, noisy, graph, cfg):
    pipeline = build_pipeline(graph, clean.shape[1], cfg)
    estimate = pipeline.run(noisy, cfg)
    record = metrics_record(
        cfg,
        mse_value=mse(clean, estimate),
        snr_value=snr_db(clean, estimate),
        rho_vertex=pipeline.rho_vertex,
        rho_time=pipeline.rho_time,
    )
    return estimate, record


def cmd_denoise(args) -> int:
    clean, graph, inputs, kind, side = _load_denoise_input(args)
    tau = args.tau if args.tau is not None else 3.0 * args.sigma
    base = dict(
        sigma=args.sigma,
        tau=tau,
        rule=args.rule,
        protect_ll=not args.no_protect_ll,
        seed=args.seed,
        fill=args.fill,
        restrict=args.restrict,
        split=args.split,
        vertical_weight=args.vertical_weight,
    )
    noisy = add_gaussian_noise(clean, args.sigma, args.seed)
    noisy_snr = snr_db(clean, noisy) if args.sigma > 0 else math.inf

    modes = ("oversampled", "critical") if args.compare else (args.mode,)
    if len(modes) > 1 and args.trials > 1:
        raise JTVError("--trials applies to single-mode runs only")

    records = []
    primary = None
    if args.trials > 1:
        seeds = [args.seed + k for k in range(args.trials)]

        def one(seed):
            noisy_k = add_gaussian_noise(clean, args.sigma, seed)
            cfg_k = DenoiseConfig(**{**base, "seed": seed, "mode": modes[0]})
            return _denoise_once(clean, noisy_k, graph, cfg_k)

        with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
            results = list(pool.map(one, seeds))
        primary = results[0][0]
        records = [rec for _, rec in results]
    else:
        for mode in modes:
            cfg = DenoiseConfig(mode=mode, **base)
            estimate, record = _denoise_once(clean, noisy, graph, cfg)
            if mode == modes[0]:
                primary = estimate
            records.append(record)

    out_paths = []
    if primary is not None and args.out:
        csv_path = Path(f"{args.out}_denoised.csv")
        write_signal_csv(csv_path, primary)
        out_paths.append(csv_path)
        if kind == "image":
            first = primary[:, 0].reshape((side, side))
            last = primary[:, -1].reshape((side, side))
            for tag, frame in (("first", first), ("last", last)):
                p = Path(f"{args.out}_{tag}.pgm")
                write_pgm(p, frame)
                out_paths.append(p)
        elif kind == "video":
            for k in range(primary.shape[1]):
                p = Path(f"{args.out}_frame{k:04d}.pgm")
                write_pgm(p, primary[:, k].reshape((side, side)))
                out_paths.append(p)
    for record in records:
        record["noisy_snr_db"] = noisy_snr if math.isfinite(noisy_snr) else "inf"
        _print_json(record)
    if args.out:
        metrics_path = Path(f"{args.out}_metrics.json")
        with open(metrics_path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
        out_paths.append(metrics_path)
        _write_manifest(
            args.out,
            "denoise",
            inputs=inputs,
            params={**base, "mode": args.mode, "compare": args.compare},
            outputs=out_paths,
            seed=args.seed,
        )
    return 0


def cmd_simulate(args) -> int:
    g = read_edgelist(args.graph)
    config = load_scenario_config(args.config) if args.config else {}
    inputs = [args.graph] + ([args.config] if args.config else [])

    preset = args.preset or config.get("preset")
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    steps = args.steps if args.steps is not None else config.get("t_steps", 100)
    if args.patient_zero:
        patient_zero = tuple(int(v) for v in args.patient_zero.split(","))
    elif "patient_zero" in config:
        patient_zero = config["patient_zero"]
    else:
        rng = np.random.default_rng(seed)
        patient_zero = tuple(
            int(v) for v in rng.choice(g.n, size=min(3, g.n), replace=False)
        )

    overrides = {
        k: v
        for k, v in config.items()
        if k in ("beta", "latency_days", "infectious_days", "immunity_days",
                 "pop_per_node")
    }
    if args.beta is not None:
        overrides["beta"] = args.beta
    if args.immunity is not None:
        overrides["immunity_days"] = args.immunity
    if args.latency is not None:
        overrides["latency_days"] = args.latency
    if args.infectious is not None:
        overrides["infectious_days"] = args.infectious
    if args.pop is not None:
        overrides["pop_per_node"] = args.pop
    if preset:
        params = scenario_params(
            preset, steps, patient_zero, seed=seed, **overrides
        )
    else:
        required = {"beta", "latency_days", "infectious_days"}
        if not required <= set(overrides):
            raise JTVError("without a preset, provide --beta, --latency, --infectious")
        params = SeirsParams(
            t_steps=steps,
            patient_zero=patient_zero,
            seed=seed,
            immunity_days=overrides.pop("immunity_days", math.inf),
            **overrides,
        )
    signal = seirs_signal(g, params)
    csv_path = Path(f"{args.out}_seirs.csv")
    write_signal_csv(csv_path, signal)
    _print_json(
        {
            "command": "simulate",
            "preset": preset,
            "nodes": g.n,
            "steps": params.t_steps,
            "patient_zero": list(patient_zero),
            "out": str(csv_path),
        }
    )
    _write_manifest(
        args.out,
        "simulate",
        inputs=inputs,
        params={
            "preset": preset,
            "beta": params.beta,
            "latency_days": params.latency_days,
            "infectious_days": params.infectious_days,
            "immunity_days": (
                "inf" if math.isinf(params.immunity_days) else params.immunity_days
            ),
            "pop_per_node": params.pop_per_node,
            "t_steps": params.t_steps,
            "patient_zero": list(patient_zero),
        },
        outputs=[csv_path],
        seed=seed,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jtvfb",
        description="Joint time-vertex oversampled graph filter banks",
    )
    parser.add_argument("--version", action="version", version=f"jtvfb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extend", help="bipartite extension of a graph")
    p.add_argument("graph", help="edge-list file")
    p.add_argument("out", help="output path prefix")
    p.add_argument("--mode", choices=("kcolor", "double-cover", "ring"), default="kcolor")
    p.add_argument("--split", type=int, default=None, help="color split index l")
    p.add_argument("--vertical-weight", type=float, default=1.0)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("roundtrip", help="analysis-synthesis reconstruction check")
    p.add_argument("graph", help="edge-list file")
    p.add_argument("time_length", type=int, help="number of time steps")
    p.add_argument("--mode", choices=("oversampled", "critical"), default="oversampled")
    p.add_argument("--fill", choices=("zero", "copy"), default="zero")
    p.add_argument("--signal", default="random", help="'random' or a CSV path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", type=int, default=None)
    p.add_argument("--vertical-weight", type=float, default=1.0)
    p.add_argument("--literal", action="store_true", help="also report the two-term form")
    p.add_argument("--out", default=None, help="output path prefix")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("denoise", help="threshold denoising of a joint signal")
    p.add_argument("--signal", default=None, help="CSV joint signal")
    p.add_argument("--graph", default=None, help="edge-list file for --signal")
    p.add_argument("--grid", type=int, nargs=2, metavar=("ROWS", "COLS"), default=None)
    p.add_argument("--image-a", default=None, help="first PGM image")
    p.add_argument("--image-b", default=None, help="second PGM image")
    p.add_argument("--video-dir", default=None, help="directory of PGM frames")
    p.add_argument("--frames", type=int, default=101, help="interpolated frame count")
    p.add_argument("--side", type=int, default=35, help="resize images to side x side")
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=None, help="default 3*sigma")
    p.add_argument("--rule", choices=("hard", "soft"), default="hard")
    p.add_argument("--no-protect-ll", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("oversampled", "critical"), default="oversampled")
    p.add_argument("--fill", choices=("zero", "copy"), default="copy")
    p.add_argument("--restrict", choices=("take", "average"), default=None)
    p.add_argument("--split", type=int, default=None)
    p.add_argument("--vertical-weight", type=float, default=1.0)
    p.add_argument("--compare", action="store_true", help="run both modes, same tau")
    p.add_argument("--trials", type=int, default=1, help="seeded repeats (single mode)")
    p.add_argument("--out", default=None, help="output path prefix")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("simulate", help="SEIRS epidemic joint signal")
    p.add_argument("graph", help="edge-list file")
    p.add_argument("out", help="output path prefix")
    p.add_argument("--preset", choices=sorted(SCENARIOS), default=None)
    p.add_argument("--config", default=None, help="key=value scenario file")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--latency", type=float, default=None)
    p.add_argument("--infectious", type=float, default=None)
    p.add_argument("--immunity", type=float, default=None)
    p.add_argument("--pop", type=int, default=None)
    p.add_argument("--steps", type=int, default=None, help="default 100")
    p.add_argument("--patient-zero", default=None, help="comma-separated node list")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (JTVError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
