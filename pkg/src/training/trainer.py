"""
Trainer

Staged Adam training of a solution adapter (or Deep BSDE model) on a scheme
loss. Each step draws fresh increments from the TRAIN seed domain keyed by
the step index, so a run is a pure function of (configs, seed) and a resumed
run replays the uninterrupted one.
"""

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from src import __version__
from src.adapters.network_adapter import TrainableAdapter
from src.autodiff.grad import grad_wrt_leaves
from src.autodiff.tape import AdTape
from src.common.artifacts import write_csv, write_json
from src.common.errors import CheckpointError, NumericAbort
from src.common.log import create_logger
from src.networks.params import INIT_SCHEME
from src.problems.definition import ProblemDefinition
from src.schemes.config import LossRecord, SchemeConfig
from src.schemes.losses import scheme_loss
from src.simulate.paths import aggregate_increments, sample_increments
from src.simulate.rng import SeedDomain, stream_for
from src.training.adam import AdamState, adam_step
from src.training.schedule import TrainSchedule

LOSS_LOG = "loss_log.csv"
FINAL_CHECKPOINT = "final.npz"


def checkpoint_name(step: int) -> str:
    return f"checkpoint_{step:07d}.npz"


@dataclass
class TrainResult:
    """Trained adapter, per-step loss history and run metadata."""

    adapter: TrainableAdapter
    history: List[LossRecord] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)
    optimizer: Optional[AdamState] = None

    @property
    def aborted(self) -> bool:
        return bool(self.metadata.get("aborted", False))

    @property
    def final_loss(self) -> Optional[LossRecord]:
        return self.history[-1] if self.history else None


def training_increments(problem: ProblemDefinition, config: SchemeConfig, seed: int, step: int,
                        workers: int = 1) -> np.ndarray:
    """Increments for one training step, aggregated from the sampling grid."""
    stream = stream_for(seed, SeedDomain.TRAIN).substream(step)
    fine = sample_increments(config.batch, config.sampling_grid(problem.horizon), problem.dim, stream,
                             workers=workers)
    return aggregate_increments(fine, config.n_steps)


class Trainer:
    """
    Owns the parameters for one training run.

    Features:
    - Staged learning rates from a TrainSchedule
    - Loss log every step, console line every log_every steps
    - Checkpoints every checkpoint_every steps and at the end, with optimizer state
    - Resume from any checkpoint it wrote
    """

    def __init__(
            self,
            problem: ProblemDefinition,
            scheme: SchemeConfig,
            schedule: TrainSchedule,
            seed: int,
            output_dir: Optional[Union[str, Path]] = None,
            log_every: int = 100,
            checkpoint_every: int = 0,
            workers: int = 1,
            provenance: Optional[Dict[str, Any]] = None,
    ):
        self.problem = problem
        self.scheme = scheme
        self.schedule = schedule
        self.seed = int(seed)
        self.output_dir = Path(output_dir) if output_dir is not None else None
        self.log_every = max(1, int(log_every))
        self.checkpoint_every = int(checkpoint_every)
        self.workers = workers
        self.provenance = {"seed": self.seed, **(provenance or {})}
        self.logger = create_logger("Trainer")

    # ==================== PUBLIC ====================

    def train(self, adapter: TrainableAdapter, resume_from: Optional[Union[str, Path]] = None) -> TrainResult:
        """
        Run the schedule from step 0, or from the step stored in resume_from.

        A non-finite loss stops training; the last good parameters are
        checkpointed and the result is flagged aborted.
        """
        optimizer = AdamState.zeros_like(adapter.parameters())
        start = 0
        if resume_from is not None:
            adapter, optimizer, start = self._resume(adapter, resume_from)

        total = self.schedule.total_steps
        self.logger.info(
            f"Training {self.scheme.scheme.value} N={self.scheme.n_steps} M={self.scheme.batch} "
            f"for {total - start} steps (seed={self.seed})"
        )
        history: List[LossRecord] = []
        abort: Optional[NumericAbort] = None
        clock = time.perf_counter()

        for step, lr in self.schedule.iter_steps(start):
            try:
                record, adapter, optimizer = self._step(adapter, optimizer, step, lr)
            except NumericAbort as exc:
                exc.step = step
                abort = exc
                self.logger.error(f"✗ Numeric abort at step {step}: {exc}")
                break
            history.append(record)
            self._log_loss(record, append=(step > 0 or resume_from is not None))
            if (step + 1) % self.log_every == 0 or step + 1 == total:
                self.logger.info(
                    f"step {step + 1}/{total} lr={lr:.1e} pathwise={record.pathwise:.4e} "
                    f"tv={record.terminal_value:.4e} tg={record.terminal_grad:.4e} "
                    f"total={record.total:.4e} Y0={record.y0:.6f}"
                )
            if self.checkpoint_every and (step + 1) % self.checkpoint_every == 0 and step + 1 < total:
                self._checkpoint(adapter, optimizer, step + 1, checkpoint_name(step + 1))

        completed = abort.step if abort is not None else total
        metadata = self.run_metadata(adapter, optimizer, completed, time.perf_counter() - clock, abort)
        self._checkpoint(adapter, optimizer, completed, FINAL_CHECKPOINT, metadata)
        if abort is None:
            self.logger.info(f"✓ Training finished after {completed} steps")
        return TrainResult(adapter=adapter, history=history, metadata=metadata, optimizer=optimizer)

    def run_metadata(self, adapter: TrainableAdapter, optimizer: AdamState, step: int,
                     wall_clock: float, abort: Optional[NumericAbort] = None) -> Dict[str, Any]:
        return {
            "step": step,
            "seed": self.seed,
            "scheme": self.scheme.model_dump(mode="json"),
            "schedule": self.schedule.model_dump(mode="json"),
            "problem": {"name": self.problem.name, **self.problem.params},
            "architecture": adapter.params.architecture(),
            "architecture_hash": adapter.architecture_hash,
            "parameter_count": adapter.parameter_count,
            "adam": optimizer.hyperparameters(),
            "initialization": INIT_SCHEME,
            "wall_clock_seconds": round(wall_clock, 3),
            "software_version": __version__,
            "aborted": abort is not None,
            "abort": abort.diagnostics if abort is not None else None,
            **{k: v for k, v in self.provenance.items() if k != "seed"},
        }

    # ==================== INTERNALS ====================

    def _step(self, adapter, optimizer: AdamState, step: int, lr: float):
        dw = training_increments(self.problem, self.scheme, self.seed, step, self.workers)
        tape = AdTape()
        leaves = adapter.bind(tape)
        breakdown = scheme_loss(adapter, tape, self.problem, self.scheme, dw)
        grads = grad_wrt_leaves(breakdown.total, leaves)
        for i, g in enumerate(grads):
            if not np.all(np.isfinite(g)):
                raise NumericAbort("non-finite parameter gradient", quantity=f"grad[{i}]")

        params, optimizer = adam_step(adapter.parameters(), grads, optimizer, lr)
        record = breakdown.values().model_copy(update={"step": step, "lr": lr})
        return record, adapter.with_parameters(params), optimizer

    def _resume(self, adapter, path):
        from src.adapters.network_adapter import load_adapter

        loaded, metadata, extras = load_adapter(path, expected_hash=adapter.architecture_hash)
        if int(metadata.get("seed", self.seed)) != self.seed:
            raise CheckpointError(f"checkpoint seed {metadata.get('seed')} differs from run seed {self.seed}")
        optimizer = AdamState.from_arrays(extras, loaded.parameters())
        start = int(metadata.get("step", optimizer.step))
        self.logger.info(f"Resuming from {path} at step {start}")
        return loaded, optimizer, start

    def _log_loss(self, record: LossRecord, append: bool) -> None:
        if self.output_dir is None:
            return
        write_csv(self.output_dir / LOSS_LOG, LossRecord.CSV_COLUMNS, [record.csv_row()],
                  provenance=self.provenance, append=append)

    def _checkpoint(self, adapter, optimizer: AdamState, step: int, name: str,
                    metadata: Optional[Dict[str, Any]] = None) -> None:
        if self.output_dir is None:
            return
        metadata = metadata or self.run_metadata(adapter, optimizer, step, 0.0)
        adapter.save(self.output_dir / name, metadata=metadata, extras=optimizer.to_arrays())
        write_json(self.output_dir / "metadata.json", metadata)
        self.logger.debug(f"✓ Checkpoint {name} at step {step}")


def train(
        adapter: TrainableAdapter,
        problem: ProblemDefinition,
        scheme: SchemeConfig,
        schedule: TrainSchedule,
        seed: int,
        output_dir: Optional[Union[str, Path]] = None,
        **kwargs: Any,
) -> TrainResult:
    """Functional entry point: build a Trainer and run it."""
    return Trainer(problem, scheme, schedule, seed, output_dir, **kwargs).train(adapter)
