"""
LangGraph Convergence Workflow

Trains one model per step count N on coupled noise, measures the Y0 and
path errors, extrapolates between N and 4N and writes the study artifacts.
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from langgraph.graph import END, StateGraph

from src.adapters.network_adapter import DeepBsdeAdapter, load_adapter
from src.common.artifacts import write_json
from src.common.errors import CheckpointError, ConfigError
from src.common.log import create_logger
from src.evaluation.extrapolation import (
    EXTRAPOLATION_RATIO,
    convergence_table,
    field_extrapolation_report,
    validate_n_list,
    write_table,
)
from src.evaluation.plots import plot_error_reports
from src.evaluation.report import verify_relative_error, y0_relative_error
from src.schemes.config import SchemeConfig
from src.state.shared_state import StudyState, create_initial_state
from src.training.trainer import FINAL_CHECKPOINT, Trainer


def run_subdir(output_dir: Optional[str], name: str) -> Optional[Path]:
    return Path(output_dir) / name if output_dir else None


class ConvergenceWorkflow:
    """
    Flow:
    1. START → Validate (N list ratios, exact solution available)
    2. Train next N (loops until every N is trained; all N share the seed
       and the finest noise grid, so their increments are coupled)
    3. Evaluate every model along verification paths
    4. Extrapolate between N and 4N
    5. Write artifacts
    6. END
    """

    def __init__(self, config):
        self.config = config
        self.problem = config.build_problem()
        self.logger = create_logger("ConvergenceWorkflow")
        self.graph = None
        self._build_graph()

    def _build_graph(self) -> None:
        workflow = StateGraph(StudyState)

        workflow.add_node("validate", self._validate)
        workflow.add_node("train_next", self._train_next)
        workflow.add_node("evaluate", self._evaluate)
        workflow.add_node("extrapolate", self._extrapolate)
        workflow.add_node("write_artifacts", self._write_artifacts)

        workflow.set_entry_point("validate")
        workflow.add_conditional_edges(
            "validate",
            self._after_validate,
            {"train": "train_next", "end": END}
        )
        workflow.add_conditional_edges(
            "train_next",
            self._should_train_more,
            {"more": "train_next", "done": "evaluate"}
        )
        workflow.add_edge("evaluate", "extrapolate")
        workflow.add_edge("extrapolate", "write_artifacts")
        workflow.add_edge("write_artifacts", END)

        self.graph = workflow.compile()
        self.logger.info("Convergence workflow compiled")

    # ==================== NODE FUNCTIONS ====================

    def _validate(self, state: StudyState) -> Dict[str, Any]:
        self.logger.info("Validating study...")
        try:
            n_list = validate_n_list(state.get("n_list") or self.config.n_list, self.config.extrapolate)
            if not self.problem.has_exact_solution:
                raise ConfigError(f"problem {self.problem.name} has no exact solution", field="problem")
            if not self.problem.is_decoupled:
                raise ConfigError("path verification needs a decoupled problem", field="problem")
        except ConfigError as exc:
            self.logger.error(f"✗ {exc}")
            return {"errors": [str(exc)]}

        return {
            "n_list": n_list,
            "pending": list(n_list),
            "execution_metadata": {"start_time": datetime.now().isoformat(), "noise_steps": max(n_list)},
        }

    def _train_next(self, state: StudyState) -> Dict[str, Any]:
        pending = list(state["pending"])
        n = pending.pop(0)
        noise_steps = state["execution_metadata"]["noise_steps"]
        directory = run_subdir(state.get("output_dir"), f"N{n}")

        scheme = self.config.build_scheme(n_steps=n, noise_steps=noise_steps)
        adapter = self._load_existing(directory, n, scheme) if directory else None
        history: List[Dict[str, Any]] = []
        aborted = list(state.get("aborted", []))
        if adapter is None:
            self.logger.info(f"Training N={n}...")
            trainer = Trainer(
                self.problem,
                scheme,
                self.config.build_schedule(),
                seed=self.config.seed,
                output_dir=directory,
                log_every=self.config.log_every,
                checkpoint_every=self.config.checkpoint_every,
                workers=self.config.workers,
                provenance={**self.config.provenance(), "n_steps": n},
            )
            result = trainer.train(self.config.build_adapter(n_steps=n))
            adapter = result.adapter
            history = [record.model_dump() for record in result.history]
            if result.aborted:
                aborted.append(n)

        return {
            "pending": pending,
            "adapters": {**state.get("adapters", {}), n: adapter},
            "loss_histories": {**state.get("loss_histories", {}), n: history},
            "aborted": aborted,
        }

    def _evaluate(self, state: StudyState) -> Dict[str, Any]:
        self.logger.info("Evaluating trained models...")
        reports, y0_errors = {}, {}
        for n, adapter in sorted(state["adapters"].items()):
            y0_errors[n] = y0_relative_error(adapter, self.problem)
            if isinstance(adapter, DeepBsdeAdapter):
                continue
            reports[n] = verify_relative_error(
                adapter, self.problem,
                n_paths=self.config.verify_paths,
                fine_steps=self.config.verify_steps,
                seed=self.config.seed,
                label=f"N={n}",
            )
        return {"reports": reports, "y0_errors": y0_errors}

    def _extrapolate(self, state: StudyState) -> Dict[str, Any]:
        self.logger.info("Extrapolating...")
        adapters = state["adapters"]
        rows = convergence_table(self.config.scheme.value, self.problem, adapters)

        field_reports = {}
        if self.config.extrapolate:
            for n in sorted(adapters):
                fine = EXTRAPOLATION_RATIO * n
                if fine not in adapters or isinstance(adapters[n], DeepBsdeAdapter):
                    continue
                field_reports[n] = field_extrapolation_report(
                    adapters[n], adapters[fine], self.problem,
                    t_max=self.config.field_t_max,
                    n_paths=self.config.verify_paths,
                    fine_steps=self.config.verify_steps,
                    seed=self.config.seed,
                )
        for row in rows:
            extrapolated = f"{row.extrapolated_error:.3e}" if row.extrapolated_error is not None else "—"
            self.logger.info(f"N={row.n_steps}: raw {row.raw_error:.3e}, extrapolated {extrapolated}")
        return {"table_rows": rows, "field_reports": field_reports}

    def _write_artifacts(self, state: StudyState) -> Dict[str, Any]:
        output_dir = state.get("output_dir")
        if not output_dir:
            return {}
        root = Path(output_dir)
        provenance = self.config.provenance()
        written = [write_table(root / "convergence.csv", state["table_rows"], provenance)]
        for n, report in sorted(state["reports"].items()):
            written.append(report.to_csv(root / f"errors_N{n}.csv", provenance))
        for n, report in sorted(state["field_reports"].items()):
            written.append(report.to_csv(root / f"field_extrapolation_N{n}.csv", provenance))
        if state["reports"]:
            written.append(plot_error_reports(
                [state["reports"][n] for n in sorted(state["reports"])],
                root / "errors.svg",
                title=f"{self.config.scheme.value} on {self.problem.name}",
                provenance=provenance,
            ))
        metadata = {
            **state["execution_metadata"],
            **provenance,
            "config": self.config.model_dump(mode="json"),
            "n_list": state["n_list"],
            "aborted": state.get("aborted", []),
            "end_time": datetime.now().isoformat(),
        }
        written.append(write_json(root / "study.json", metadata))
        self.logger.info(f"✓ Wrote {len(written)} artifacts to {root}")
        return {"artifacts": [str(p) for p in written]}

    # ==================== CONDITIONAL EDGES ====================

    def _after_validate(self, state: StudyState) -> Literal["train", "end"]:
        return "end" if state.get("errors") else "train"

    def _should_train_more(self, state: StudyState) -> Literal["more", "done"]:
        return "more" if state.get("pending") else "done"

    # ==================== HELPERS ====================

    def _load_existing(self, directory: Path, n: int, scheme: SchemeConfig):
        """Reuse a finished run of the same config, N and noise grid."""
        path = directory / FINAL_CHECKPOINT
        if not path.exists():
            return None
        try:
            adapter, metadata, _ = load_adapter(path)
        except CheckpointError as exc:
            self.logger.warning(f"Ignoring unreadable checkpoint {path}: {exc}")
            return None
        if metadata.get("config_hash") != self.config.config_hash or metadata.get("aborted"):
            return None
        if metadata.get("scheme") != scheme.model_dump(mode="json"):
            self.logger.info(f"Retraining N={n}: checkpoint was trained on another scheme or noise grid")
            return None
        self.logger.info(f"✓ Reusing checkpoint for N={n}")
        return adapter

    # ==================== PUBLIC ====================

    def run(self, n_list: Optional[List[int]] = None, output_dir: Optional[str] = None) -> Dict[str, Any]:
        """
        Run the study.

        Raises:
            ConfigError: The study failed validation
        """
        if n_list and list(n_list) != self.config.n_list:
            # the N list sets the noise grid, so it belongs in the config hash
            self.config = self.config.model_validate({**self.config.model_dump(), "n_list": list(n_list)})
        initial_state = create_initial_state(self.config, n_list=self.config.n_list, output_dir=output_dir)
        recursion = 4 * len(initial_state["n_list"]) + 10
        final_state = self.graph.invoke(initial_state, {"recursion_limit": recursion})
        if final_state.get("errors"):
            raise ConfigError(final_state["errors"][0])
        return final_state


def create_workflow(config) -> ConvergenceWorkflow:
    """Create and return workflow instance."""
    return ConvergenceWorkflow(config)
