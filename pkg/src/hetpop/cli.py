"""Command-line front end.

Subcommands: ``generate`` synthetic score files, ``detect`` heterogeneity
in CSV data, ``simulate`` full condition grids, ``scatter`` raw plus
component scores for plotting, and ``oracle`` closed-form predictions.

Parameter precedence everywhere: explicit flags beat the JSON config
file (``--config``), which beats the ``HETPOP_SEED`` environment
variable, which beats built-in defaults. All floating-point output is
serialized with 17 significant digits, so files round-trip exactly.

Exit codes: 0 success, 2 usage or parameter error, 3 data error,
4 numeric degeneracy.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from hetpop.analytics import LOADING_BOUND, expected_correlation, expected_loading
from hetpop.errors import DataError, DegenerateDataError, DomainError, HetpopError
from hetpop.experiment import (
    DEFAULT_SEED,
    ConditionGrid,
    emit_raw_csv,
    emit_table,
    quick_grid,
    run_grid,
    table1_grid,
    table2_grid,
)
from hetpop.kappa_detect import detect
from hetpop.model_gen import MODES, BivariateSample, ModelSpec, generate_item_pair, generate_m_items
from hetpop.pca_stats import component_scores, summarize
from hetpop.stochastics import seed_stream

__all__ = ["RunConfig", "main"]

_PRESETS = {"table1": table1_grid, "table2": table2_grid, "quick": quick_grid}


@dataclass(frozen=True)
class RunConfig:
    """Merged parameters for one subcommand invocation."""

    params: dict
    seed: int

    def __getitem__(self, key):
        return self.params[key]

    def require(self, key):
        if self.params.get(key) is None:
            raise DomainError(f"--{key.replace('_', '-')} is required (flag or config)")
        return self.params[key]


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        loaded = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(loaded, dict):
        raise DataError(f"config {path} must hold a JSON object")
    return loaded


def _resolve_seed(args, config: dict) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    if "seed" in config:
        return int(config["seed"])
    env = os.environ.get("HETPOP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise DomainError(f"HETPOP_SEED must be an integer, got {env!r}") from exc
    return DEFAULT_SEED


def _build_config(args, defaults: dict) -> RunConfig:
    config = _load_config(getattr(args, "config", None))
    params = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            params[key] = flag
        elif key in config:
            params[key] = config[key]
        elif key == "lam" and "lambda" in config:
            params[key] = config["lambda"]
        else:
            params[key] = default
    return RunConfig(params=params, seed=_resolve_seed(args, config))


_SPEC_DEFAULTS = {
    "q": None,
    "lam": None,
    "phi": 0.0,
    "omega": 0.0,
    "n": None,
    "mode": "independent_per_item",
}


def _spec_from(run: RunConfig) -> ModelSpec:
    return ModelSpec(
        q=int(run.require("q")),
        lam=float(run.require("lam")),
        phi=float(run["phi"]),
        omega=float(run["omega"]),
        n=int(run.require("n")),
        mode=str(run["mode"]),
    )


def _format_matrix_csv(names, matrix: np.ndarray) -> str:
    lines = [",".join(names)]
    lines += [",".join(f"{value:.17g}" for value in row) for row in matrix]
    return "\n".join(lines) + "\n"


def _read_matrix(path, no_header: bool):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise DataError(f"{path} is empty")
    if no_header:
        names = None
        data_rows = rows
    else:
        names = [cell.strip() for cell in rows[0].split(",")]
        data_rows = rows[1:]
    parsed = []
    for lineno, line in enumerate(data_rows, start=2 - int(no_header)):
        cells = line.split(",")
        try:
            parsed.append([float(cell) for cell in cells])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-numeric cell ({exc})") from exc
    widths = {len(row) for row in parsed}
    if len(widths) != 1:
        raise DataError(f"{path}: ragged rows, widths {sorted(widths)}")
    matrix = np.array(parsed, dtype=np.float64)
    if matrix.shape[1] < 2:
        raise DataError(f"{path}: need at least 2 numeric columns, found {matrix.shape[1]}")
    if names is None:
        names = [f"col{j}" for j in range(1, matrix.shape[1] + 1)]
    if len(names) != matrix.shape[1]:
        raise DataError(f"{path}: header has {len(names)} cells for {matrix.shape[1]} columns")
    return names, matrix


def _column_index(names, token: str) -> int:
    """Resolve a column by header name or 1-based position."""
    if token in names:
        return names.index(token)
    try:
        pos = int(token)
    except ValueError:
        raise DataError(f"unknown column {token!r}; have {names}") from None
    if not 1 <= pos <= len(names):
        raise DataError(f"column index {pos} out of range 1..{len(names)}")
    return pos - 1


def _select_pairs(args, names):
    if getattr(args, "all_pairs", False):
        return list(combinations(range(len(names)), 2))
    col_a, col_b = getattr(args, "col_a", None), getattr(args, "col_b", None)
    if col_a is None and col_b is None:
        if len(names) == 2:
            return [(0, 1)]
        raise DomainError("more than 2 columns: pass --col-a and --col-b, or --all-pairs")
    if col_a is None or col_b is None:
        raise DomainError("--col-a and --col-b must be given together")
    a, b = _column_index(names, col_a), _column_index(names, col_b)
    if a == b:
        raise DomainError("--col-a and --col-b name the same column")
    return [(a, b)]


def cmd_generate(args) -> int:
    run = _build_config(args, dict(_SPEC_DEFAULTS, m=2, out=None))
    spec = _spec_from(run)
    m = int(run["m"])
    out = run.require("out")
    rng = seed_stream(run.seed, 0)
    if m == 2:
        matrix = generate_item_pair(spec, rng).scores
    else:
        matrix = generate_m_items(spec, m, rng)
    names = [f"item{j}" for j in range(1, m + 1)]
    Path(out).write_text(_format_matrix_csv(names, matrix), encoding="utf-8")
    return 0


def cmd_detect(args) -> int:
    run = _build_config(args, {"runs": 500, "method": "parametric"})
    if args.infile is None:
        raise DomainError("--in is required")
    names, matrix = _read_matrix(args.infile, args.no_header)
    pairs = _select_pairs(args, names)
    reports = []
    for pair_index, (a, b) in enumerate(pairs):
        sample = BivariateSample(scores=matrix[:, [a, b]].copy(), provenance="ingested")
        summary = summarize(sample)
        result = detect(
            sample,
            nruns=int(run["runs"]),
            method=str(run["method"]),
            rng=seed_stream(run.seed, pair_index),
        )
        verdict = "heterogeneous" if result.heterogeneous else "homogeneous"
        print(
            f"{names[a]},{names[b]}: n={sample.n} r={summary.r:.4f} "
            f"kappa_x={result.kappa_x:.4f} kappa_y_mean={result.kappa_y_mean:.4f} "
            f"p05={result.p05:.4f} verdict={verdict}"
        )
        reports.append(
            {
                "pair": [names[a], names[b]],
                "n": sample.n,
                "r": summary.r,
                "kappa_x": result.kappa_x,
                "kappa_y_mean": result.kappa_y_mean,
                "p05": result.p05,
                "nruns": result.nruns,
                "method": str(run["method"]),
                "heterogeneous": result.heterogeneous,
            }
        )
    if args.json is not None:
        Path(args.json).write_text(json.dumps(reports, indent=2) + "\n", encoding="utf-8")
    return 0


def _grid_from_config(run: RunConfig, base_seed: int) -> ConditionGrid:
    conditions = run["conditions"]
    if not conditions:
        raise DomainError("config key 'conditions' is missing or empty; or pass --preset")
    specs = []
    for entry in conditions:
        entry = dict(entry)
        if "lambda" in entry:
            entry["lam"] = entry.pop("lambda")
        specs.append(ModelSpec(**entry))
    return ConditionGrid(
        specs=tuple(specs),
        nsamples=int(run["nsamples"]),
        nruns=int(run["nruns"]),
        method=str(run["method"]),
        base_seed=base_seed,
    )


def cmd_simulate(args) -> int:
    run = _build_config(
        args,
        {"preset": None, "out_dir": ".", "nsamples": 1000, "nruns": 500,
         "method": "parametric", "conditions": None, "prefix": None, "threads": None},
    )
    preset = run["preset"]
    if preset is not None:
        if preset not in _PRESETS:
            raise DomainError(f"unknown preset {preset!r}; have {sorted(_PRESETS)}")
        grid = _PRESETS[preset](base_seed=run.seed)
        prefix = run["prefix"] or preset
    else:
        grid = _grid_from_config(run, run.seed)
        prefix = run["prefix"] or "grid"
    threads = run["threads"]
    threads = int(threads) if threads is not None else (os.cpu_count() or 1)
    progress = None if args.quiet else (lambda msg: print(msg, file=sys.stderr, flush=True))
    results = run_grid(grid, threads=threads, progress=progress)
    out_dir = Path(run["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    targets = {
        out_dir / f"{prefix}.csv": emit_table(results, "csv"),
        out_dir / f"{prefix}_raw.csv": emit_raw_csv(results),
        out_dir / f"{prefix}.md": emit_table(results, "markdown"),
    }
    for path, text in targets.items():
        path.write_text(text, encoding="utf-8")
        if not args.quiet:
            print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_scatter(args) -> int:
    run = _build_config(args, dict(_SPEC_DEFAULTS, out=None))
    out = run.require("out")
    if args.infile is not None:
        names, matrix = _read_matrix(args.infile, args.no_header)
        pairs = _select_pairs(args, names)
        a, b = pairs[0]
        scores = matrix[:, [a, b]].copy()
        sample = BivariateSample(scores=scores, provenance="ingested")
    else:
        spec = _spec_from(run)
        sample = generate_item_pair(spec, seed_stream(run.seed, 0))
    summary = summarize(sample)
    cs = component_scores(sample, summary)
    table = np.column_stack([sample.scores[:, 0], sample.scores[:, 1], cs.c1, cs.c2])
    Path(out).write_text(_format_matrix_csv(["x1", "x2", "c1", "c2"], table), encoding="utf-8")
    return 0


def cmd_oracle(args) -> int:
    run = _build_config(args, {"q": None, "lam": None, "phi": 0.0, "omega": 0.0})
    q = int(run.require("q"))
    lam = float(run.require("lam"))
    phi = float(run["phi"])
    omega = float(run["omega"])
    pred = expected_correlation(q, lam, phi, omega)
    loading = expected_loading(q, lam, phi, omega)
    exceeds = bool(loading > LOADING_BOUND)
    if args.json:
        print(
            json.dumps(
                {
                    "q": q,
                    "lambda": lam,
                    "phi": phi,
                    "omega": omega,
                    "rho": pred.rho,
                    "common_part": pred.common_part,
                    "subpopulation_part": pred.subpopulation_part,
                    "loading": loading,
                    "exceeds_bound": exceeds,
                },
                indent=2,
            )
        )
    else:
        print(f"expected_correlation: {pred.rho:.4f}")
        print(f"  common_part: {pred.common_part:.4f}")
        print(f"  subpopulation_part: {pred.subpopulation_part:.4f}")
        print(f"expected_loading: {loading:.4f}")
        print(f"exceeds_single_population_bound: {'true' if exceeds else 'false'}")
    return 0


def _add_spec_flags(parser) -> None:
    parser.add_argument("--q", type=int, help="number of item populations")
    parser.add_argument("--lambda", dest="lam", type=float, help="common loading in (0, 1]")
    parser.add_argument("--phi", type=float, help="factor inter-correlation in [0, 1)")
    parser.add_argument("--omega", type=float, help="item-mean variance, >= 0")
    parser.add_argument("--n", type=int, help="sample size")
    parser.add_argument("--mode", choices=MODES, help="population assignment mode")


def _add_input_flags(parser) -> None:
    parser.add_argument("--in", dest="infile", help="input CSV file")
    parser.add_argument("--no-header", action="store_true", help="input file has no header row")
    parser.add_argument("--col-a", help="first column (name or 1-based index)")
    parser.add_argument("--col-b", help="second column (name or 1-based index)")


def build_parser():
    import argparse

    parser = argparse.ArgumentParser(
        prog="hetpop",
        description="Simulate and detect heterogeneous item populations behind bivariate correlations.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help=f"base seed (default {DEFAULT_SEED})")
    common.add_argument("--config", help="JSON config file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a synthetic score CSV")
    _add_spec_flags(p)
    p.add_argument("--m", type=int, help="number of items (default 2)")
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("detect", parents=[common], help="apply the 5th-percentile rule to CSV data")
    _add_input_flags(p)
    p.add_argument("--all-pairs", action="store_true", help="test every column pair")
    p.add_argument("--runs", type=int, help="reference runs per pair (default 500)")
    p.add_argument("--method", choices=("parametric", "bootstrap"), help="reference sampling method")
    p.add_argument("--json", help="also write a JSON report to this path")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("simulate", parents=[common], help="run a condition grid and write tables")
    p.add_argument("--preset", choices=sorted(_PRESETS), help="built-in condition grid")
    p.add_argument("--out-dir", dest="out_dir", help="directory for the table files (default .)")
    p.add_argument("--prefix", help="output file prefix (default: preset name)")
    p.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p.add_argument("--quiet", action="store_true", help="suppress progress output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scatter", parents=[common], help="write raw and component scores for plotting")
    _add_spec_flags(p)
    _add_input_flags(p)
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("oracle", parents=[common], help="print closed-form predictions")
    p.add_argument("--q", type=int, help="number of item populations")
    p.add_argument("--lambda", dest="lam", type=float, help="common loading in (0, 1]")
    p.add_argument("--phi", type=float, help="factor inter-correlation in [0, 1)")
    p.add_argument("--omega", type=float, help="item-mean variance, >= 0")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DegenerateDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HetpopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
