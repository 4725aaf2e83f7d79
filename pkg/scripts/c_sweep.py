"""Sweep the diffusivity scale c for each diffusivity on a noisy icosphere.

Prints the best eps_v reached within the iteration budget, relative to the
noisy mesh, for every (diffusivity, c / mean edge length) pair.

    python3 scripts/c_sweep.py --level 4 --noise 0.5 --seed 2024
"""
import argparse
import csv
import sys

import numpy as np

from meshflow import (
    DiffusionConfig,
    DiffusivityKind,
    NoiseSpec,
    add_gaussian_noise,
    build_adjacency,
    build_spatial_index,
    icosphere,
    mean_edge_length,
    vertex_position_error,
)
from meshflow.vertex_filters import diffusion_step


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--level", type=int, default=4, help="icosphere subdivision level")
    ap.add_argument("--noise", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--iterations", type=int, default=10)
    ap.add_argument("--grid", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0, 4.0],
                    help="c values as multiples of the mean edge length")
    ap.add_argument("--csv", help="also write the full table here")
    args = ap.parse_args(argv)

    clean = icosphere(args.level)
    noisy = add_gaussian_noise(clean, NoiseSpec(args.noise, args.seed))
    adj = build_adjacency(clean)
    index = build_spatial_index(clean)
    l_bar = mean_edge_length(clean)
    base = vertex_position_error(noisy, clean, index)
    print(f"vertices={clean.n_vertices} mean_edge_length={l_bar:.6g} noisy_eps_v={base:.6g}")

    rows = []
    for kind in DiffusivityKind:
        for f in args.grid:
            cfg = DiffusionConfig(kind, f * l_bar)
            mesh, curve = noisy, []
            for _ in range(args.iterations):
                mesh = diffusion_step(mesh, adj, cfg)
                curve.append(vertex_position_error(mesh, clean, index))
            best = int(np.argmin(curve))
            rows.append((kind.value, f, cfg.c, best + 1, curve[best] / base, curve[-1] / base))
            print(f"{kind.value:9s} c={f:<5g}*l  best_iter={best + 1:3d}  best/base={curve[best] / base:.4f}  final/base={curve[-1] / base:.4f}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["diffusivity", "c_over_l", "c", "best_iteration", "best_ratio", "final_ratio"])
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
