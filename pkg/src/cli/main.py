"""
Command-line entry point.

    fbsde train --config configs/desk_s2.yaml --set seed=7
    fbsde evaluate --config configs/desk_s2.yaml --checkpoint runs/x/final.npz --radius 0.25
    fbsde convergence --config configs/desk_s2.yaml --n-list 12,48
    fbsde mscale-compare --config configs/desk_osc.yaml
    fbsde paths-dump --config configs/desk_s2.yaml --paths 4
    fbsde table --reference data/table1_reference.csv

Exit codes: 0 success, 2 config error, 3 numeric abort, 4 I/O or checkpoint error.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, List, Optional

import yaml

from src.adapters.base_adapter import ExactSolutionAdapter
from src.adapters.network_adapter import DeepBsdeAdapter, load_adapter
from src.cli.config import RunConfig, load_run_config, parse_overrides
from src.common.artifacts import provenance_comment, write_json
from src.common.errors import (
    EXIT_CONFIG_ERROR,
    EXIT_IO_ERROR,
    EXIT_NUMERIC_ABORT,
    EXIT_OK,
    ConfigError,
    FbsdeError,
)
from src.common.log import create_logger
from src.common.settings import get_settings
from src.evaluation.extrapolation import load_reference_table, render_table, write_table
from src.evaluation.plots import plot_error_reports, plot_series
from src.evaluation.report import neighborhood_study, verify_relative_error, y0_relative_error
from src.evaluation.sample_paths import predict_sample_paths, write_sample_paths
from src.simulate.euler import simulate_exact_pathbatch, simulate_forward_only
from src.simulate.grid import TimeGrid
from src.simulate.rng import SeedDomain, stream_for
from src.training.trainer import Trainer
from src.workflows.convergence_graph import ConvergenceWorkflow
from src.workflows.mscale_compare_graph import MscaleComparisonWorkflow

logger = create_logger("CLI")

DEFAULT_REFERENCE = "data/table1_reference.csv"


# ==================== HELPERS ====================

def _config(args: argparse.Namespace, **extra: Any) -> RunConfig:
    overrides = parse_overrides(args.set or [])
    overrides.update(extra)
    if getattr(args, "output", None):
        overrides["output_dir"] = args.output
    return load_run_config(args.config, overrides)


def _run_dir(config: RunConfig) -> Path:
    directory = config.run_dir(get_settings().output_root)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "config.yaml").write_text(yaml.safe_dump(config.model_dump(mode="json"), sort_keys=True))
    return directory


def _parse_n_list(raw: Optional[str]) -> Optional[List[int]]:
    if not raw:
        return None
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"'{raw}' is not a comma-separated list of integers", field="--n-list") from exc


# ==================== COMMANDS ====================

def cmd_train(args: argparse.Namespace) -> int:
    config = _config(args)
    problem = config.build_problem()
    scheme = config.build_scheme()
    schedule = config.build_schedule()
    adapter = config.build_adapter()
    directory = _run_dir(config)

    trainer = Trainer(
        problem, scheme, schedule,
        seed=config.seed,
        output_dir=directory,
        log_every=config.log_every,
        checkpoint_every=config.checkpoint_every,
        workers=config.workers,
        provenance=config.provenance(),
    )
    result = trainer.train(adapter, resume_from=args.resume)
    if result.aborted:
        logger.error(f"✗ Training aborted: {result.metadata.get('abort')}")
        return EXIT_NUMERIC_ABORT
    if problem.has_exact_solution:
        logger.info(f"Y0 relative error: {y0_relative_error(result.adapter, problem):.3e}")
    logger.info(f"✓ Artifacts in {directory}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _config(args)
    problem = config.build_problem()
    provenance = config.provenance()

    if args.checkpoint == "exact":
        adapter = ExactSolutionAdapter(problem)
    else:
        expected = config.build_adapter().architecture_hash
        adapter, _, _ = load_adapter(args.checkpoint, expected_hash=expected)
        provenance["checkpoint_hash"] = adapter.architecture_hash
    directory = _run_dir(config)

    if isinstance(adapter, DeepBsdeAdapter):
        error = y0_relative_error(adapter, problem)
        write_json(directory / "y0_error.json", {**provenance, "y0_relative_error": error})
        logger.info(f"✓ Deep BSDE Y0 relative error {error:.3e}")
        return EXIT_OK

    if args.radius is None:
        report = verify_relative_error(adapter, problem, n_paths=config.verify_paths,
                                       fine_steps=config.verify_steps, seed=config.seed, label="verification")
        name = "errors"
    else:
        report = neighborhood_study(adapter, problem, args.radius, n_paths=config.verify_paths,
                                    fine_steps=config.verify_steps, seed=config.seed)
        name = f"neighborhood_R{args.radius:g}"
        provenance["radius"] = args.radius
    report.to_csv(directory / f"{name}.csv", provenance)
    plot_error_reports([report], directory / f"{name}.svg", title=f"{problem.name} {name}", provenance=provenance)

    if args.predict_paths:
        rows = predict_sample_paths(adapter, problem, n_paths=config.sample_paths,
                                    fine_steps=config.verify_steps, seed=config.seed)
        write_sample_paths(directory / "sample_paths.csv", rows, provenance)
        first = rows[rows[:, 0] == 0]
        plot_series(first[:, 2], {"exact": first[:, 4], "predicted": first[:, 5]},
                    directory / "sample_paths.svg", xlabel="t", ylabel="u(t, X_t)",
                    title="path 0", provenance=provenance)

    logger.info(f"✓ Max mean error {report.overall_max_mean:.3e}, Y0 error {report.y0_relative_error:.3e}")
    return EXIT_OK


def cmd_convergence(args: argparse.Namespace) -> int:
    n_list = _parse_n_list(args.n_list)
    # hashed with the rest of the config: the N list fixes the noise grid
    config = _config(args, **({"n_list": n_list} if n_list else {}))
    directory = _run_dir(config)
    state = ConvergenceWorkflow(config).run(output_dir=str(directory))
    print(render_table(state["table_rows"]))
    if state.get("aborted"):
        logger.error(f"✗ Training aborted for N in {state['aborted']}")
        return EXIT_NUMERIC_ABORT
    return EXIT_OK


def cmd_mscale_compare(args: argparse.Namespace) -> int:
    config = _config(args)
    directory = _run_dir(config)
    state = MscaleComparisonWorkflow(config).run(output_dir=str(directory))
    for preset in state["architectures"]:
        report = state["reports"][preset]
        print(f"{preset:>12}: max mean {report.overall_max_mean:.3e}, Y0 {state['y0_errors'][preset]:.3e}")
    if state.get("aborted"):
        logger.error(f"✗ Training aborted for {state['aborted']}")
        return EXIT_NUMERIC_ABORT
    return EXIT_OK


def cmd_paths_dump(args: argparse.Namespace) -> int:
    config = _config(args)
    problem = config.build_problem()
    grid = TimeGrid(n_steps=args.steps or config.n_steps, horizon=problem.horizon)
    stream = stream_for(config.seed, SeedDomain.VERIFY)
    if problem.has_exact_solution:
        batch = simulate_exact_pathbatch(problem, grid, stream, args.paths)
    else:
        batch = simulate_forward_only(problem, grid, stream, args.paths)
    directory = _run_dir(config)
    path = batch.to_csv(directory / "paths.csv", header_comment=provenance_comment(config.provenance()))
    logger.info(f"✓ {args.paths} paths written to {path}")
    return EXIT_OK


def cmd_table(args: argparse.Namespace) -> int:
    rows = load_reference_table(args.reference)
    print(render_table(rows))
    if args.output:
        write_table(args.output, rows, {"source": Path(args.reference).name})
    return EXIT_OK


# ==================== PARSER ====================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbsde", description="Deep FBSDE solvers for quasilinear parabolic PDEs")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def with_config(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--config", type=str, default=None, help="Flat YAML run config")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="Override a config key (repeatable)")
        p.add_argument("--output", type=str, default=None, help="Run directory")
        return p

    p_train = with_config(sub.add_parser("train", help="Train one model"))
    p_train.add_argument("--resume", type=str, default=None, help="Checkpoint to resume from")
    p_train.set_defaults(func=cmd_train)

    p_eval = with_config(sub.add_parser("evaluate", help="Error report of a checkpoint"))
    p_eval.add_argument("--checkpoint", type=str, required=True, help="Checkpoint path, or 'exact'")
    p_eval.add_argument("--radius", type=float, default=None, help="Neighborhood radius R for perturbed starts")
    p_eval.add_argument("--predict-paths", action="store_true", help="Also dump exact vs predicted sample paths")
    p_eval.set_defaults(func=cmd_evaluate)

    p_conv = with_config(sub.add_parser("convergence", help="Y0 error table over N with extrapolation"))
    p_conv.add_argument("--n-list", type=str, default=None, help="Comma-separated N values")
    p_conv.set_defaults(func=cmd_convergence)

    p_ms = with_config(sub.add_parser("mscale-compare", help="Plain vs multiscale network on bsb-osc"))
    p_ms.set_defaults(func=cmd_mscale_compare)

    p_paths = with_config(sub.add_parser("paths-dump", help="Write simulated trajectories"))
    p_paths.add_argument("--paths", type=int, default=4, help="Number of paths")
    p_paths.add_argument("--steps", type=int, default=None, help="Time steps (default: n_steps)")
    p_paths.set_defaults(func=cmd_paths_dump)

    p_table = sub.add_parser("table", help="Render a reference error table")
    p_table.add_argument("--reference", type=str, default=DEFAULT_REFERENCE, help="Reference CSV")
    p_table.add_argument("--output", type=str, default=None, help="Also write the table as CSV")
    p_table.set_defaults(func=cmd_table)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FbsdeError as exc:
        logger.error(f"✗ {type(exc).__name__}: {exc}")
        return exc.exit_code
    except ValueError as exc:
        logger.error(f"✗ {exc}")
        return EXIT_CONFIG_ERROR
    except OSError as exc:
        logger.error(f"✗ I/O error: {exc}")
        return EXIT_IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
