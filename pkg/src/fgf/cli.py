"""Command-line front end: covariance -> kernel -> samples -> checks.

Subcommands: ``kernel`` (eigenvalues + square-root kernel), ``sample``
(field realizations), ``verify`` (reconstruction / trace / Monte Carlo
report), ``equivalence`` (perturbed kernel and its covariance), ``rkhs``
(membership, norm, inner product). Exit codes: 0 success, 1 validation
failure, 2 numerical or file-format failure, 64 usage error. Every
subcommand is a deterministic function of (config, input files); the env
var FGF_THREADS caps BLAS parallelism without changing any output bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import covariance as cov
from . import equivalence, io, mercer, rkhs, sampling
from .grid import Grid, build_grid

_TOLERANCE_KEYS = ("reconstruction", "trace", "coverage", "membership")
_GENERATORS = ("series", "factor")

_thread_controller = None  # keeps the threadpoolctl limit alive for the process


class UsageError(Exception):
    """Bad command line; maps to exit code 64."""


@dataclass(frozen=True)
class RunConfig:
    """Complete, serializable description of one CLI run."""

    model: dict = field(default_factory=lambda: {"kind": "brownian_sheet"})
    n: int = 1
    N: int = 16
    clip_tol: float = mercer.DEFAULT_CLIP_TOL
    truncation: Optional[int] = None
    basis: str = "trigonometric"
    generator: str = "series"
    count: int = 1
    seed: int = 0
    out: Optional[str] = None
    eigen_out: Optional[str] = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not 0.0 < self.clip_tol < 1.0:
            raise ValueError(f"clip_tol must lie in (0, 1), got {self.clip_tol}")
        if self.truncation is not None and self.truncation < 0:
            raise ValueError(f"truncation must be >= 0, got {self.truncation}")
        if self.basis not in sampling.BASIS_KINDS:
            raise ValueError(
                f"unknown basis {self.basis!r}, expected one of {sampling.BASIS_KINDS}"
            )
        if self.generator not in _GENERATORS:
            raise ValueError(
                f"unknown generator {self.generator!r}, expected one of {_GENERATORS}"
            )
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if not isinstance(self.model, dict) or "kind" not in self.model:
            raise ValueError("model spec must be a dict with a 'kind' entry")
        for key in self.tolerances:
            if key not in _TOLERANCE_KEYS:
                raise ValueError(
                    f"unknown tolerance {key!r}, expected one of {_TOLERANCE_KEYS}"
                )

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "N": self.N,
            "clip_tol": self.clip_tol,
            "truncation": self.truncation,
            "basis": self.basis,
            "generator": self.generator,
            "count": self.count,
            "seed": self.seed,
            "out": self.out,
            "eigen_out": self.eigen_out,
            "tolerances": self.tolerances,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys {unknown}; known keys are {sorted(known)}")
        return cls(**data)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


_MODEL_KEYS = {
    "brownian_sheet": set(),
    "fractional_brownian_sheet": {"hurst"},
    "constant_field": {"variance"},
    "zero_field": set(),
    "tabulated": {"input", "N"},
}


def build_model(config: RunConfig) -> cov.CovarianceModel:
    """Instantiate the covariance model named by a config, fail-closed."""
    spec = dict(config.model)
    kind = spec.pop("kind")
    spec.pop("n", None)  # dimension always comes from the config
    if kind not in _MODEL_KEYS:
        raise ValueError(f"unknown model kind {kind!r}, expected one of {cov.KINDS}")
    unknown = sorted(set(spec) - _MODEL_KEYS[kind])
    if unknown:
        raise ValueError(f"model {kind!r} does not take parameters {unknown}")

    if kind == "brownian_sheet":
        return cov.brownian_sheet(config.n)
    if kind == "zero_field":
        return cov.zero_field(config.n)
    if kind == "constant_field":
        return cov.constant_field(float(spec.get("variance", 1.0)), config.n)
    if kind == "fractional_brownian_sheet":
        if "hurst" not in spec:
            raise ValueError("fractional_brownian_sheet needs a 'hurst' parameter")
        hurst = np.atleast_1d(spec["hurst"]).astype(float)
        if hurst.size == 1:
            hurst = np.repeat(hurst, config.n)
        if hurst.size != config.n:
            raise ValueError(f"got {hurst.size} Hurst indices for dimension {config.n}")
        return cov.fractional_brownian_sheet(hurst)

    if "input" not in spec:
        raise ValueError("tabulated model needs an 'input' file (CSV or binary)")
    path = str(spec["input"])
    if path.endswith(".csv"):
        n, N, matrix = io.read_matrix_csv(path, section="cov")
        grid = build_grid(n, N)
        if matrix.shape != (grid.size, grid.size):
            raise io.FormatError(
                f"covariance payload is {matrix.shape}, grid has {grid.size} nodes"
            )
    else:
        grid, matrix, _ = io.load_covariance(path)
    if grid.n != config.n or grid.N != config.N:
        raise ValueError(
            f"tabulated file is on n={grid.n}, N={grid.N}; config says "
            f"n={config.n}, N={config.N}"
        )
    return cov.tabulated(matrix, grid)


def _prepare(config: RunConfig):
    model = build_model(config)
    grid = build_grid(config.n, config.N)
    decomp = mercer.decompose(model, grid, clip_tol=config.clip_tol)
    kernel = mercer.square_root_kernel(decomp, truncation=config.truncation)
    return model, grid, decomp, kernel


def _csv_twin(path) -> Path:
    return Path(path).with_suffix(".csv")


# ---------------------------------------------------------------------------
# subcommands


def cmd_kernel(config: RunConfig, emit_csv: bool) -> int:
    model, grid, decomp, kernel = _prepare(config)
    out = config.out or "kernel.fgf"
    eigen_out = config.eigen_out or "eigen.fgf"
    io.save_decomposition(eigen_out, decomp, model=model.spec())
    io.save_kernel(out, kernel, model=model.spec())
    if emit_csv:
        io.write_matrix_csv(_csv_twin(out), "ker", kernel.K, n=grid.n, N=grid.N)
    tr = cov.trace(model, grid)
    lead = decomp.eigenvalues[0] if decomp.eigenvalues.size else 0.0
    print(
        f"[kernel] model={model.kind} n={grid.n} N={grid.N} rank={decomp.rank} "
        f"lambda1={lead:.12g} trace={tr.value:.12g} clipped_mass={decomp.clipped_mass:.3e}"
    )
    print(f"[kernel] wrote {eigen_out} and {out}")
    return 0


def cmd_sample(config: RunConfig, emit_csv: bool) -> int:
    model, grid, decomp, kernel = _prepare(config)
    if config.generator == "factor":
        samples = sampling.sample_factor(
            model, grid, count=config.count, seed=config.seed, clip_tol=config.clip_tol
        )
    else:
        basis = sampling.make_basis(config.basis, grid)
        samples = sampling.sample_series(
            kernel, basis, truncation=config.truncation,
            count=config.count, seed=config.seed,
        )
    out = config.out or "samples.fgf"
    io.save_samples(out, samples, model=model.spec())
    if emit_csv:
        io.write_matrix_csv(_csv_twin(out), "smp", samples.data, n=grid.n, N=grid.N)
    print(
        f"[sample] model={model.kind} n={grid.n} N={grid.N} count={config.count} "
        f"generator={samples.meta.generator} truncation={samples.meta.truncation} "
        f"seed={config.seed}"
    )
    print(f"[sample] wrote {out}")
    return 0


def _check(name: str, value: float, tol: float, passed: bool) -> bool:
    status = "PASS" if passed else "FAIL"
    print(f"[verify] {name}: value={value:.6e} tol={tol:.3g} {status}")
    return passed


def cmd_verify(config: RunConfig) -> int:
    model, grid, decomp, kernel = _prepare(config)
    tols = {
        "reconstruction": 1e-8,
        "trace": 1e-8,
        "coverage": 0.99,
        **config.tolerances,
    }

    target = mercer.clipped_gram(decomp)
    recon = mercer.reconstruct_covariance(kernel)
    denom = np.linalg.norm(target)
    err = np.linalg.norm(recon - target)
    rel = err if denom == 0.0 else err / denom
    ok = _check("reconstruction", rel, tols["reconstruction"], rel <= tols["reconstruction"])

    tr = cov.trace(model, grid)
    gap = abs(float(np.sum(decomp.eigenvalues)) - tr.value)
    ok &= _check("trace", gap, tols["trace"], gap <= tols["trace"])

    count = max(config.count, 2000)
    basis = sampling.make_basis(config.basis, grid)
    samples = sampling.sample_series(kernel, basis, count=count, seed=config.seed)
    emp = sampling.empirical_covariance(samples)
    band = sampling.monte_carlo_band(target, count)
    coverage = float(np.mean(np.abs(emp - target) <= band))
    print(f"[verify] monte_carlo: count={count} seed={config.seed}")
    ok &= _check("coverage", coverage, tols["coverage"], coverage >= tols["coverage"])

    print(f"[verify] {'all checks passed' if ok else 'FAILED'}")
    return 0 if ok else 1


def _load_perturbation(args, grid: Grid) -> equivalence.VolterraKernel:
    if args.volterra is not None:
        path = args.volterra
        if path.endswith(".csv"):
            n, N, matrix = io.read_matrix_csv(path, section="vlt")
            if (n, N) != (grid.n, grid.N):
                raise ValueError(
                    f"perturbation file is on n={n}, N={N}; run uses "
                    f"n={grid.n}, N={grid.N}"
                )
            return equivalence.volterra_project(matrix, grid)
        loaded = io.load_volterra(path)
        if (loaded.grid.n, loaded.grid.N) != (grid.n, grid.N):
            raise ValueError(
                f"perturbation file is on n={loaded.grid.n}, N={loaded.grid.N}; "
                f"run uses n={grid.n}, N={grid.N}"
            )
        return loaded
    # catalog spec NAME:SCALE[:WIDTH]
    parts = args.perturbation.split(":")
    try:
        if parts[0] == "constant" and len(parts) == 2:
            return equivalence.constant_perturbation(grid, float(parts[1]))
        if parts[0] == "bump" and len(parts) in (2, 3):
            width = float(parts[2]) if len(parts) == 3 else 0.25
            return equivalence.gaussian_bump_perturbation(grid, float(parts[1]), width)
    except ValueError as exc:
        raise UsageError(f"bad perturbation spec {args.perturbation!r}: {exc}") from exc
    raise UsageError(
        f"bad perturbation spec {args.perturbation!r}; "
        "expected 'constant:SCALE' or 'bump:SCALE[:WIDTH]'"
    )


def cmd_equivalence(config: RunConfig, args) -> int:
    model, grid, decomp, kernel = _prepare(config)
    volterra = _load_perturbation(args, grid)
    ktilde = equivalence.transform_kernel(kernel, volterra)
    rtilde = equivalence.equivalent_covariance(ktilde, grid)
    out = config.out or "ktilde.fgf"
    cov_out = args.cov_out or "rtilde.fgf"
    io.write_matrix(out, "ker", ktilde, n=grid.n, N=grid.N, model=model.spec())
    io.write_matrix(cov_out, "cov", rtilde, n=grid.n, N=grid.N, model=model.spec())
    if args.csv:
        io.write_matrix_csv(_csv_twin(out), "ker", ktilde, n=grid.n, N=grid.N)
        io.write_matrix_csv(_csv_twin(cov_out), "cov", rtilde, n=grid.n, N=grid.N)
    shift = float(np.linalg.norm(ktilde - kernel.K))
    print(
        f"[equivalence] model={model.kind} n={grid.n} N={grid.N} "
        f"zeroed_mass={volterra.zeroed_mass:.3e} kernel_shift={shift:.6e}"
    )
    print(f"[equivalence] wrote {out} and {cov_out}")
    return 0


def cmd_rkhs(config: RunConfig, args) -> int:
    if args.kernel is not None:
        kernel = io.load_kernel(args.kernel)
    else:
        kernel = _prepare(config)[3]
    tol = config.tolerances.get("membership", rkhs.DEFAULT_MEMBERSHIP_TOL)

    f_values = io.read_vector_csv(args.function)
    f_elem = rkhs.project_membership(kernel, f_values, tol=tol)
    print(
        f"[rkhs] f: accepted={f_elem.accepted} residual={f_elem.residual:.6e} "
        f"relative={f_elem.relative_residual:.6e}"
    )
    if f_elem.accepted:
        print(f"[rkhs] f: norm={rkhs.rkhs_norm(f_elem):.12g}")

    if args.other is not None:
        g_values = io.read_vector_csv(args.other)
        g_elem = rkhs.project_membership(kernel, g_values, tol=tol)
        print(
            f"[rkhs] g: accepted={g_elem.accepted} residual={g_elem.residual:.6e} "
            f"relative={g_elem.relative_residual:.6e}"
        )
        if g_elem.accepted:
            print(f"[rkhs] g: norm={rkhs.rkhs_norm(g_elem):.12g}")
        if f_elem.accepted and g_elem.accepted:
            print(f"[rkhs] inner={rkhs.rkhs_inner(f_elem, g_elem):.12g}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON RunConfig file; flags override its fields")
    p.add_argument("--model", help="model kind: " + ", ".join(cov.KINDS))
    p.add_argument("--n", type=int, help="number of parameters (cube dimension)")
    p.add_argument("--N", type=int, help="grid resolution per axis")
    p.add_argument("--hurst", help="Hurst index, scalar or comma-separated per axis")
    p.add_argument("--variance", type=float, help="variance of the constant field")
    p.add_argument("--input", help="covariance file for the tabulated model")
    p.add_argument("--clip-tol", type=float, dest="clip_tol")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--out", help="primary output path")
    p.add_argument("--save-config", help="write the effective RunConfig to this path")


def _build_parser() -> _Parser:
    parser = _Parser(prog="fgf", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("kernel", help="decompose a covariance and emit eigenvalues + kernel")
    _add_common(p)
    p.add_argument("--truncation", type=int)
    p.add_argument("--eigen-out", dest="eigen_out")
    p.add_argument("--csv", action="store_true", help="also write a CSV twin")

    p = sub.add_parser("sample", help="draw field realizations")
    _add_common(p)
    p.add_argument("--truncation", type=int)
    p.add_argument("--basis", choices=sampling.BASIS_KINDS)
    p.add_argument("--generator", choices=_GENERATORS)
    p.add_argument("--count", type=int, help="number of realizations")
    p.add_argument("--csv", action="store_true", help="also write a CSV twin")

    p = sub.add_parser("verify", help="reconstruction, trace, and Monte Carlo report")
    _add_common(p)
    p.add_argument("--basis", choices=sampling.BASIS_KINDS)
    p.add_argument("--count", type=int, help="Monte Carlo draws (min 2000)")
    p.add_argument("--recon-tol", type=float)
    p.add_argument("--trace-tol", type=float)
    p.add_argument("--coverage", type=float)

    p = sub.add_parser("equivalence", help="apply a Volterra perturbation to the kernel")
    _add_common(p)
    p.add_argument("--truncation", type=int)
    p.add_argument("--volterra", help="perturbation matrix file (CSV or binary)")
    p.add_argument("--perturbation", help="catalog spec: constant:SCALE or bump:SCALE[:WIDTH]")
    p.add_argument("--cov-out", dest="cov_out", help="output path for the perturbed covariance")
    p.add_argument("--csv", action="store_true", help="also write CSV twins")

    p = sub.add_parser("rkhs", help="membership, norm, and inner product queries")
    _add_common(p)
    p.add_argument("--truncation", type=int)
    p.add_argument("--kernel", help="stored kernel file; otherwise built from the model flags")
    p.add_argument("--function", required=True, help="CSV vector in canonical flat order")
    p.add_argument("--other", help="second CSV vector for the inner product")
    p.add_argument("--tol", type=float, help="membership tolerance")

    return parser


def _config_from_args(args) -> RunConfig:
    config = RunConfig() if args.config is None else RunConfig.load(args.config)

    model = dict(config.model)
    if args.model is not None:
        model = {"kind": args.model}
    if args.hurst is not None:
        model["hurst"] = [float(h) for h in args.hurst.split(",")]
    if args.variance is not None:
        model["variance"] = args.variance
    if args.input is not None:
        model["input"] = args.input

    updates: dict = {"model": model}
    for name in ("n", "N", "clip_tol", "seed", "out", "count", "basis", "generator"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "truncation", None) is not None:
        updates["truncation"] = args.truncation
    if getattr(args, "eigen_out", None) is not None:
        updates["eigen_out"] = args.eigen_out

    tolerances = dict(config.tolerances)
    for flag, key in (("recon_tol", "reconstruction"), ("trace_tol", "trace"),
                      ("coverage", "coverage"), ("tol", "membership")):
        value = getattr(args, flag, None)
        if value is not None:
            tolerances[key] = value
    updates["tolerances"] = tolerances

    return replace(config, **updates)


def _apply_thread_cap() -> None:
    global _thread_controller
    limit = os.environ.get("FGF_THREADS")
    if not limit:
        return
    try:
        value = int(limit)
    except ValueError:
        raise ValueError(f"FGF_THREADS must be an integer, got {limit!r}") from None
    if value < 1:
        raise ValueError(f"FGF_THREADS must be >= 1, got {value}")
    import threadpoolctl

    _thread_controller = threadpoolctl.threadpool_limits(limits=value)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("fgf: a subcommand is required (see --help)")
        _apply_thread_cap()
        config = _config_from_args(args)
        if args.save_config is not None:
            config.save(args.save_config)

        if args.command == "kernel":
            return cmd_kernel(config, emit_csv=args.csv)
        if args.command == "sample":
            return cmd_sample(config, emit_csv=args.csv)
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "equivalence":
            if (args.volterra is None) == (args.perturbation is None):
                raise UsageError(
                    "fgf equivalence: exactly one of --volterra or --perturbation is required"
                )
            return cmd_equivalence(config, args)
        return cmd_rkhs(config, args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 64
    except (io.FormatError, mercer.NotPositiveSemidefiniteError,
            cov.NonFiniteCovarianceError) as exc:
        print(f"fgf: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, cov.SizeBudgetError, OSError) as exc:
        print(f"fgf: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
