"""Command-line entry point: ``meshflow {noise,denoise,compare,bench}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .bench import FILTER_NAMES, BenchPlan, FilterSpec, fmt_float, run_bench, thread_count
from .io import MeshFormat, load_mesh, save_mesh
from .mesh import MeshError, mean_edge_length
from .metrics import build_spatial_index, error_report
from .noise import NoiseDirection, NoiseSpec, add_gaussian_noise
from .normal_filters import NormalFilter, NormalFilterKind, run_normal_filter
from .vertex_filters import (
    DiffusionConfig,
    DiffusivityKind,
    LaplacianConfig,
    run_laplacian_flow,
    run_vertex_diffusion,
)


def _format(value):
    return MeshFormat(value) if value else None


def cmd_noise(args) -> int:
    mesh = load_mesh(args.input, _format(args.format))
    spec = NoiseSpec(args.level, args.seed, NoiseDirection(args.direction))
    l_bar = mean_edge_length(mesh)
    noisy = add_gaussian_noise(mesh, spec)
    save_mesh(noisy, args.output)
    print(f"mean_edge_length={fmt_float(l_bar)} sigma={fmt_float(args.level * l_bar)}")
    return 0


def cmd_denoise(args) -> int:
    mesh = load_mesh(args.input, _format(args.format))
    n = args.iterations
    t0 = time.perf_counter()
    if args.filter == "diffusion":
        params = {"diffusivity": args.diffusivity, "c": args.c, "step": args.step}
        out = run_vertex_diffusion(mesh, DiffusionConfig(DiffusivityKind(args.diffusivity), args.c, n, args.step))
    elif args.filter == "laplacian":
        params = {"lambda": args.lam}
        out = run_laplacian_flow(mesh, LaplacianConfig(args.lam, n))
    else:
        params = {"noise_variance": args.noise_variance, "frame": args.mmse_frame} if args.filter == "mmse" else {}
        kind = NormalFilterKind(NormalFilter(args.filter), args.noise_variance, args.mmse_frame)
        out = run_normal_filter(mesh, kind, n)
    elapsed = time.perf_counter() - t0
    save_mesh(out, args.output)
    fields = [f"filter={args.filter}", *(f"{k}={v}" for k, v in params.items()), f"iterations={n}", f"time={elapsed:.3f}s"]
    print(" ".join(fields))
    return 0


def cmd_compare(args) -> int:
    mesh = load_mesh(args.mesh)
    ref = load_mesh(args.reference)
    report = error_report(mesh, ref, build_spatial_index(ref, workers=thread_count()))
    if report.eps_f is None:
        print("meshflow: warning: connectivity differs from the reference; eps_f reported as null", file=sys.stderr)
    print(json.dumps({"eps_v": report.eps_v, "eps_f": report.eps_f}))
    return 0


def cmd_bench(args) -> int:
    if args.plan:
        plan = BenchPlan.from_json(args.plan)
        if args.output:
            plan.output_dir = Path(args.output)
    else:
        plan = BenchPlan(
            input=Path(args.input),
            output_dir=Path(args.output),
            filters=[FilterSpec.parse(f, args.iterations) for f in args.filter],
            noise_level=args.noise,
            seed=args.seed,
            reference=Path(args.reference) if args.reference else None,
        )
    summary = run_bench(plan)
    failed = [f["name"] for f in summary["filters"] if "error" in f]
    for f in summary["filters"]:
        status = f"error: {f['error']}" if "error" in f else f"argmin_eps_v={f['argmin_eps_v']} argmin_eps_f={f['argmin_eps_f']}"
        print(f"{f['name']} {f['params']}: {status}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meshflow", description="Triangle mesh denoising and error metrics.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("noise", help="add Gaussian noise scaled by the mean edge length")
    p.add_argument("input")
    p.add_argument("--level", type=float, required=True, help="sigma as a multiple of the mean edge length")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--direction", choices=[d.value for d in NoiseDirection], default=NoiseDirection.PER_COORDINATE.value)
    p.add_argument("--format", choices=[f.value for f in MeshFormat])
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("denoise", help="run one smoothing filter")
    p.add_argument("input")
    p.add_argument("--filter", choices=FILTER_NAMES, required=True)
    p.add_argument("--diffusivity", choices=[k.value for k in DiffusivityKind], default="cauchy")
    p.add_argument("--c", type=float, help="diffusivity scale (required for --filter diffusion)")
    p.add_argument("--step", type=float, default=1.0, help="multiplier on the diffusion update")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5, help="Laplacian flow step size")
    p.add_argument("--noise-variance", type=float, default=0.0, help="noise variance for the mmse filter")
    p.add_argument(
        "--mmse-frame",
        choices=["principal", "world"],
        default="principal",
        help="axes of the mmse blend: covariance eigenvectors or fixed x/y/z",
    )
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--format", choices=[f.value for f in MeshFormat])
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("compare", help="print eps_v / eps_f of MESH against a reference as JSON")
    p.add_argument("mesh")
    p.add_argument("--reference", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="per-iteration error curves for several filters")
    p.add_argument("input", nargs="?")
    p.add_argument("--plan", help="JSON plan file instead of flags")
    p.add_argument("--reference", help="clean mesh to measure against (default: INPUT before noise)")
    p.add_argument("--noise", type=float, default=0.0, help="noise level (sigma / mean edge length)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--filter", action="append", help="name[:key=value,...]; repeatable")
    p.add_argument("--iterations", type=int, default=10, help="default max iterations per filter")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.command == "bench" and not args.plan and not (args.input and args.filter and args.output):
        parser.error("bench needs INPUT, at least one --filter and -o, or --plan")
    if args.command == "denoise":
        if args.filter == "diffusion" and args.c is None:
            parser.error("--filter diffusion requires --c")
        if args.iterations < 0:
            parser.error("--iterations must be >= 0")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"meshflow: no such file: {exc.filename}", file=sys.stderr)
    except (MeshError, ValueError, OSError) as exc:
        print(f"meshflow: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
