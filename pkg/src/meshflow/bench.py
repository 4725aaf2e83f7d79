"""Noise -> filter -> measure sweeps producing per-iteration error curves."""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .io import load_mesh, save_mesh
from .mesh import Mesh, build_adjacency
from .metrics import ErrorReport, build_spatial_index, error_report
from .noise import NoiseSpec, add_gaussian_noise, noise_sigma
from .normal_filters import NormalFilter, NormalFilterKind, normal_filter_step
from .vertex_filters import (
    DiffusionConfig,
    DiffusivityKind,
    LaplacianConfig,
    diffusion_step,
    laplacian_flow_step,
)

log = logging.getLogger(__name__)

FILTER_NAMES = ("mean", "min", "median", "mmse", "laplacian", "diffusion")


def thread_count() -> int:
    """Worker cap from MESHFLOW_THREADS; unset or 0 means one per CPU."""
    raw = os.environ.get("MESHFLOW_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("MESHFLOW_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


@dataclass(frozen=True)
class FilterSpec:
    name: str
    params: dict = field(default_factory=dict)
    iterations: int = 10

    def __post_init__(self):
        if self.name not in FILTER_NAMES:
            raise ValueError(f"unknown filter {self.name!r}; choose from {', '.join(FILTER_NAMES)}")
        if self.iterations < 1:
            raise ValueError("max iterations must be >= 1")
        object.__setattr__(self, "params", _normalize_params(self.name, dict(self.params)))

    @classmethod
    def parse(cls, text: str, iterations: int = 10) -> "FilterSpec":
        """``name[:key=value,...]``, e.g. ``diffusion:diffusivity=laplace,c=0.08,iterations=10``."""
        name, _, rest = text.partition(":")
        params = {}
        for item in filter(None, rest.split(",")):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"expected key=value in filter spec, got {item!r}")
            params[key.strip()] = value.strip()
        iterations = int(params.pop("iterations", iterations))
        return cls(name.strip(), params, iterations)

    @property
    def label(self) -> str:
        parts = [self.name] + [f"{k}={v}" for k, v in self.params.items()]
        return "_".join(parts)

    def stepper(self, adj) -> Callable[[Mesh], Mesh]:
        p = self.params
        if self.name == "diffusion":
            cfg = DiffusionConfig(DiffusivityKind(p["diffusivity"]), p["c"], 1, p["step"])
            return lambda m: diffusion_step(m, adj, cfg)
        if self.name == "laplacian":
            cfg = LaplacianConfig(p["lambda"], 1)
            return lambda m: laplacian_flow_step(m, adj, cfg)
        kind = NormalFilterKind(NormalFilter(self.name), p.get("noise_variance", 0.0), p.get("frame", "principal"))
        return lambda m: normal_filter_step(m, adj, kind)


def _normalize_params(name, params):
    allowed = {
        "diffusion": {"diffusivity": str, "c": float, "step": float},
        "laplacian": {"lambda": float},
        "mmse": {"noise_variance": float, "frame": str},
    }.get(name, {})
    unknown = set(params) - set(allowed)
    if unknown:
        raise ValueError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    out = {k: allowed[k](v) for k, v in params.items()}
    if name == "diffusion":
        if "c" not in out:
            raise ValueError("diffusion needs c")
        out.setdefault("diffusivity", "cauchy")
        out.setdefault("step", 1.0)
        DiffusionConfig(DiffusivityKind(out["diffusivity"]), out["c"], 1, out["step"])
    elif name == "laplacian":
        out.setdefault("lambda", 0.5)
    elif name == "mmse":
        out.setdefault("noise_variance", 0.0)
        out.setdefault("frame", "principal")
        NormalFilterKind(NormalFilter.MMSE, out["noise_variance"], out["frame"])
    return {k: out[k] for k in sorted(out)}


@dataclass
class BenchPlan:
    input: Path
    output_dir: Path
    filters: list[FilterSpec]
    noise_level: float = 0.0
    seed: int = 0
    reference: Path | None = None

    @classmethod
    def from_json(cls, path) -> "BenchPlan":
        with open(path, encoding="utf-8") as f:
            d = json.load(f)
        default_iters = int(d.get("iterations", 10))
        filters = []
        for item in d["filters"]:
            if isinstance(item, str):
                filters.append(FilterSpec.parse(item, default_iters))
            else:
                item = dict(item)
                filters.append(FilterSpec(item.pop("name"), item.pop("params", {}), int(item.pop("iterations", default_iters))))
        base = Path(path).parent
        ref = d.get("reference")
        return cls(
            input=base / d["input"],
            output_dir=base / d.get("output_dir", "bench_out"),
            filters=filters,
            noise_level=float(d.get("noise_level", 0.0)),
            seed=int(d.get("seed", 0)),
            reference=base / ref if ref else None,
        )


def fmt_float(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def sweep(start: Mesh, reference: Mesh, spec: FilterSpec, index=None) -> list[ErrorReport]:
    """Apply ``spec`` one iteration at a time, measuring after each."""
    index = index or build_spatial_index(reference)
    step = spec.stepper(build_adjacency(start))
    rows, mesh = [], start
    for it in range(1, spec.iterations + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            mesh = step(mesh)
            report = error_report(mesh, reference, index, it)
        if not np.all(np.isfinite(mesh.vertices)) or not np.isfinite(report.eps_v):
            raise FloatingPointError(f"filter diverged at iteration {it}")
        rows.append(report)
    return rows


def _argmin(rows, key):
    vals = [getattr(r, key) for r in rows]
    if not vals or any(v is None for v in vals):
        return None
    return rows[int(np.argmin(vals))].iteration


def write_csv(path, rows) -> None:
    lines = ["iteration,eps_v,eps_f"]
    lines += [f"{r.iteration},{fmt_float(r.eps_v)},{fmt_float(r.eps_f)}" for r in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_bench(plan: BenchPlan, threads: int | None = None) -> dict:
    """Run every filter in the plan; returns the summary (also written as summary.json).

    A failing filter is recorded with its error and skipped; others continue.
    """
    threads = threads or thread_count()
    out = Path(plan.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    clean = load_mesh(plan.input)
    reference = load_mesh(plan.reference) if plan.reference else clean
    noisy = add_gaussian_noise(clean, NoiseSpec(plan.noise_level, plan.seed))
    save_mesh(noisy, out / "noisy.obj")
    index = build_spatial_index(reference)
    baseline = error_report(noisy, reference, index, 0)

    def job(k_spec):
        k, spec = k_spec
        entry = {"name": spec.name, "params": spec.params, "max_iterations": spec.iterations}
        try:
            rows = sweep(noisy, reference, spec, index)
        except Exception as exc:  # one bad filter must not sink the plan
            log.warning("filter %s failed: %s", spec.label, exc)
            entry["error"] = f"{type(exc).__name__}: {exc}"
            return entry
        csv_name = f"{k:02d}_{spec.label}.csv"
        write_csv(out / csv_name, rows)
        entry.update(
            csv=csv_name,
            rows=[{"iteration": r.iteration, "eps_v": r.eps_v, "eps_f": r.eps_f} for r in rows],
            argmin_eps_v=_argmin(rows, "eps_v"),
            argmin_eps_f=_argmin(rows, "eps_f"),
        )
        return entry

    with ThreadPoolExecutor(max_workers=threads) as pool:
        entries = list(pool.map(job, enumerate(plan.filters)))

    summary = {
        "input": str(plan.input),
        "reference": str(plan.reference) if plan.reference else None,
        "noise_level": plan.noise_level,
        "seed": plan.seed,
        "sigma": noise_sigma(clean, plan.noise_level),
        "baseline": {"eps_v": baseline.eps_v, "eps_f": baseline.eps_f},
        "filters": entries,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary
