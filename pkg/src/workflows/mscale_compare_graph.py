"""
LangGraph Multiscale Comparison Workflow

Trains a plain and a multiscale network on the oscillatory problem with the
same seed, scheme and noise, then compares their path errors.
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from langgraph.graph import END, StateGraph

from src.common.artifacts import write_csv, write_json
from src.common.errors import ConfigError
from src.common.log import create_logger
from src.evaluation.plots import plot_error_reports
from src.evaluation.report import verify_relative_error, y0_relative_error
from src.networks.config import MscaleConfig
from src.schemes.config import SchemeName
from src.state.shared_state import StudyState, create_initial_state
from src.training.trainer import Trainer
from src.workflows.convergence_graph import run_subdir

COMPARISON_COLUMNS = ("architecture", "parameter_count", "overall_max_mean", "final_mean", "y0_relative_error")


def parameter_match(networks: Dict[str, Any], tolerance: Optional[float]) -> Dict[str, Any]:
    """
    Relative gap (largest - smallest) / largest between parameter counts.

    matched is False only when a tolerance is given and the gap exceeds it.
    """
    counts = {preset: net.parameter_count for preset, net in networks.items()}
    largest = max(counts.values())
    gap = (largest - min(counts.values())) / largest
    return {
        "parameter_counts": counts,
        "parameter_gap": gap,
        "tolerance": tolerance,
        "matched": tolerance is None or gap <= tolerance,
    }


class MscaleComparisonWorkflow:
    """
    Flow:
    1. START → Validate (oscillatory problem, network scheme)
    2. Train next architecture (loops over plain, multiscale)
    3. Evaluate architectures on shared verification paths
    4. Write artifacts
    5. END
    """

    def __init__(self, config):
        self.config = config
        self.problem = config.build_problem()
        self.logger = create_logger("MscaleComparisonWorkflow")
        self.graph = None
        self._build_graph()

    def _build_graph(self) -> None:
        workflow = StateGraph(StudyState)

        workflow.add_node("validate", self._validate)
        workflow.add_node("train_next_architecture", self._train_next_architecture)
        workflow.add_node("evaluate_architectures", self._evaluate_architectures)
        workflow.add_node("write_artifacts", self._write_artifacts)

        workflow.set_entry_point("validate")
        workflow.add_conditional_edges(
            "validate",
            lambda state: "end" if state.get("errors") else "train",
            {"train": "train_next_architecture", "end": END}
        )
        workflow.add_conditional_edges(
            "train_next_architecture",
            self._should_train_more,
            {"more": "train_next_architecture", "done": "evaluate_architectures"}
        )
        workflow.add_edge("evaluate_architectures", "write_artifacts")
        workflow.add_edge("write_artifacts", END)

        self.graph = workflow.compile()
        self.logger.info("Multiscale comparison workflow compiled")

    # ==================== NODE FUNCTIONS ====================

    def _validate(self, state: StudyState) -> Dict[str, Any]:
        self.logger.info("Validating comparison...")
        architectures = state.get("architectures") or [self.config.network, self.config.mscale_network]
        try:
            if self.problem.name != "bsb-osc":
                raise ConfigError(f"the comparison runs on bsb-osc, got {self.problem.name}", field="problem")
            if self.config.scheme == SchemeName.DEEP_BSDE:
                raise ConfigError("the comparison needs a network scheme (s1, s2, s3)", field="scheme")
            if len(set(architectures)) != len(architectures):
                raise ConfigError(f"duplicate architectures {architectures}", field="network")
            networks = {preset: self.config.build_network_config(preset) for preset in architectures}
            match = parameter_match(networks, self.config.match_tolerance)
            if not match["matched"]:
                raise ConfigError(
                    f"parameter counts {match['parameter_counts']} differ by {match['parameter_gap']:.1%}, "
                    f"more than match_tolerance={self.config.match_tolerance}",
                    field="mscale_network",
                )
        except ConfigError as exc:
            self.logger.error(f"✗ {exc}")
            return {"errors": [str(exc)]}

        self.logger.info(f"Parameter counts {match['parameter_counts']} (gap {match['parameter_gap']:.1%})")
        time_scales = {p: net.time_scales() for p, net in networks.items() if isinstance(net, MscaleConfig)}
        return {
            "architectures": architectures,
            "pending": list(architectures),
            "execution_metadata": {
                "start_time": datetime.now().isoformat(),
                "time_scales": time_scales,
                "parameter_match": match,
            },
        }

    def _train_next_architecture(self, state: StudyState) -> Dict[str, Any]:
        pending = list(state["pending"])
        preset = pending.pop(0)
        self.logger.info(f"Training {preset}...")

        trainer = Trainer(
            self.problem,
            self.config.build_scheme(),
            self.config.build_schedule(),
            seed=self.config.seed,
            output_dir=run_subdir(state.get("output_dir"), preset),
            log_every=self.config.log_every,
            checkpoint_every=self.config.checkpoint_every,
            workers=self.config.workers,
            provenance={**self.config.provenance(), "network": preset},
        )
        result = trainer.train(self.config.build_adapter(network=preset))
        aborted = list(state.get("aborted", []))
        if result.aborted:
            aborted.append(preset)
        return {
            "pending": pending,
            "adapters": {**state.get("adapters", {}), preset: result.adapter},
            "loss_histories": {**state.get("loss_histories", {}),
                               preset: [r.model_dump() for r in result.history]},
            "aborted": aborted,
        }

    def _evaluate_architectures(self, state: StudyState) -> Dict[str, Any]:
        self.logger.info("Evaluating architectures...")
        reports, y0_errors = {}, {}
        for preset in state["architectures"]:
            adapter = state["adapters"][preset]
            reports[preset] = verify_relative_error(
                adapter, self.problem,
                n_paths=self.config.verify_paths,
                fine_steps=self.config.verify_steps,
                seed=self.config.seed,
                label=preset,
            )
            y0_errors[preset] = y0_relative_error(adapter, self.problem)
        return {"reports": reports, "y0_errors": y0_errors}

    def _write_artifacts(self, state: StudyState) -> Dict[str, Any]:
        output_dir = state.get("output_dir")
        if not output_dir:
            return {}
        root = Path(output_dir)
        provenance = self.config.provenance()
        reports = state["reports"]

        rows = [
            [preset, state["adapters"][preset].parameter_count, reports[preset].overall_max_mean,
             float(reports[preset].mean[-1]), state["y0_errors"][preset]]
            for preset in state["architectures"]
        ]
        written = [write_csv(root / "comparison.csv", COMPARISON_COLUMNS, rows, provenance)]
        for preset in state["architectures"]:
            written.append(reports[preset].to_csv(root / f"errors_{preset}.csv", provenance))
        written.append(plot_error_reports(
            [reports[p] for p in state["architectures"]],
            root / "mscale_compare.svg",
            title=f"{self.config.scheme.value} on {self.problem.name}",
            provenance=provenance,
        ))
        metadata = {
            **state["execution_metadata"],
            **provenance,
            "config": self.config.model_dump(mode="json"),
            "architectures": state["architectures"],
            "aborted": state.get("aborted", []),
            "end_time": datetime.now().isoformat(),
        }
        written.append(write_json(root / "study.json", metadata))
        self.logger.info(f"✓ Wrote {len(written)} artifacts to {root}")
        return {"artifacts": [str(p) for p in written]}

    def _should_train_more(self, state: StudyState) -> Literal["more", "done"]:
        return "more" if state.get("pending") else "done"

    # ==================== PUBLIC ====================

    def run(self, architectures: Optional[List[str]] = None, output_dir: Optional[str] = None) -> Dict[str, Any]:
        """
        Run the comparison.

        Raises:
            ConfigError: The comparison failed validation
        """
        initial_state = create_initial_state(self.config, architectures=architectures, output_dir=output_dir)
        final_state = self.graph.invoke(initial_state, {"recursion_limit": 25})
        if final_state.get("errors"):
            raise ConfigError(final_state["errors"][0])
        return final_state


def create_workflow(config) -> MscaleComparisonWorkflow:
    """Create and return workflow instance."""
    return MscaleComparisonWorkflow(config)
