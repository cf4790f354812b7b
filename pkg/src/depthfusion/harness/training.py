# Training Loop
# Loop de Treino

"""
MAE training with AdamW and a one-cycle learning rate.

The step budget is ``min(max_steps, epochs * steps_per_epoch)``; scenes are
shuffled each epoch from a seed derived from the run seed, so a run is
reproducible bit-exactly in a single process. A checkpoint is written at
the end of every epoch and a step-indexed loss log is kept as CSV.

Treino com MAE, AdamW e taxa de aprendizado one-cycle. Um checkpoint por
época e um log de loss em CSV.
"""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from depthfusion.autodiff import AdamW, LrSchedule, one_cycle_lr
from depthfusion.checkpoint import CheckpointInfo, save_checkpoint
from depthfusion.config import RunConfig
from depthfusion.decorators import log_errors, log_execution_time
from depthfusion.exceptions import NonFiniteError, TrainingDivergedError
from depthfusion.metrics import mae_loss
from depthfusion.model import DepthFusionNet, build_model, forward_pipeline
from depthfusion.scenes.dataset import load_dataset
from depthfusion.scenes.synth import SceneSample, derive_seed

logger = logging.getLogger(__name__)

LOSS_LOG_NAME = "loss_log.csv"
CHECKPOINT_DIR = "checkpoints"
FINAL_CHECKPOINT = "model.ckpt"


@dataclass
class TrainingResult:
    model: DepthFusionNet
    checkpoint: Path
    loss_log: Path
    losses: list[float] = field(default_factory=list)
    epoch_checkpoints: list[Path] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.losses)


def step_budget(config: RunConfig, n_samples: int) -> int:
    steps_per_epoch = math.ceil(n_samples / config.batch_size)
    return min(config.max_steps, config.epochs * steps_per_epoch)


def epoch_order(seed: int, epoch: int, n_samples: int) -> np.ndarray:
    rng = np.random.default_rng(derive_seed(seed, "shuffle", epoch))
    return rng.permutation(n_samples)


def _batches(order: np.ndarray, batch_size: int) -> list[np.ndarray]:
    return [order[i : i + batch_size] for i in range(0, len(order), batch_size)]


def train_step(
    model: DepthFusionNet,
    optimizer: AdamW,
    batch: Sequence[SceneSample],
    lr: float,
    step: int,
) -> float:
    """
    One optimizer step on the mean MAE of ``batch``.
    Um passo do otimizador sobre a MAE média de ``batch``.
    """
    optimizer.zero_grad()
    total = 0.0
    try:
        for sample in batch:
            output = forward_pipeline(sample, model)
            loss = mae_loss(output.depth, sample.gt_depth) / float(len(batch))
            loss.backward()
            total += loss.item()
        optimizer.step(lr)
    except NonFiniteError as exc:
        raise TrainingDivergedError(step, str(exc)) from exc
    if not math.isfinite(total):
        raise TrainingDivergedError(step, f"loss is {total}")
    return total


@log_errors
@log_execution_time
def train(
    config: RunConfig,
    out_dir: Path,
    samples: Sequence[SceneSample] | None = None,
) -> TrainingResult:
    """
    Train a model on ``config.dataset`` (or ``samples``) and write its outputs.
    Treina um modelo em ``config.dataset`` (ou ``samples``) e grava as saídas.
    """
    out_dir = Path(out_dir)
    if samples is None:
        samples = load_dataset(Path(config.dataset))
    model = build_model(config.model_config(), config.seed)
    optimizer = AdamW(
        model.named_parameters(), lr=config.lr_max, weight_decay=config.weight_decay
    )
    total_steps = step_budget(config, len(samples))
    schedule = LrSchedule(lr_max=config.lr_max, total_steps=total_steps)
    logger.info(
        f"Training {model!r} on {len(samples)} scenes for {total_steps} steps"
    )

    checkpoint_dir = out_dir / CHECKPOINT_DIR
    checkpoint_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / LOSS_LOG_NAME
    result = TrainingResult(
        model=model, checkpoint=out_dir / FINAL_CHECKPOINT, loss_log=log_path
    )

    step = 0
    epoch = 0
    with log_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "epoch", "loss", "lr"])
        while step < total_steps:
            order = epoch_order(config.seed, epoch, len(samples))
            for indices in _batches(order, config.batch_size):
                if step >= total_steps:
                    break
                lr = one_cycle_lr(schedule, step)
                batch = [samples[i] for i in indices]
                loss = train_step(model, optimizer, batch, lr, step)
                result.losses.append(loss)
                writer.writerow([step, epoch, repr(loss), repr(lr)])
                if step % config.log_every == 0 or step == total_steps - 1:
                    logger.info(f"step {step} loss {loss:.6f} lr {lr:.3e}")
                step += 1
            handle.flush()
            info = CheckpointInfo(
                model=model.config, epoch=epoch, step=step, seed=config.seed
            )
            path = checkpoint_dir / f"epoch_{epoch:03d}.ckpt"
            result.epoch_checkpoints.append(save_checkpoint(path, model, info))
            epoch += 1

    save_checkpoint(
        result.checkpoint,
        model,
        CheckpointInfo(model=model.config, epoch=epoch - 1, step=step, seed=config.seed),
    )
    logger.info(f"Training finished after {step} steps, checkpoint {result.checkpoint}")
    return result
