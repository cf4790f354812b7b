# Training Objective and Evaluation Metrics
# Objetivo de Treino e Métricas de Avaliação

"""
MAE training loss and the depth metrics AbsRel, SqRel, RMSE and the
delta-threshold accuracies. Metrics run on the jointly valid pixel set
(ground truth valid, prediction valid, optionally depth below max_depth).

Loss MAE de treino e métricas de profundidade sobre o conjunto de pixels
conjuntamente válidos.

The delta ratio is max(pred/gt, gt/pred). SqRel defaults to the squared
relative error ((gt - pred) / gt)^2; the ``kitti`` convention divides the
squared error by gt once.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from depthfusion.autodiff import Tensor, absolute
from depthfusion.exceptions import EvaluationError
from depthfusion.head import DepthMap

logger = logging.getLogger(__name__)

DELTA_BASE = 1.25
SQ_REL_CONVENTIONS = ("ratio", "kitti")


def joint_mask(pred: DepthMap, gt: DepthMap, max_depth: float | None = None) -> np.ndarray:
    """Pixels valid in both maps (and below ``max_depth`` in ground truth)."""
    if pred.shape != gt.shape:
        raise EvaluationError(f"prediction {pred.shape} and ground truth {gt.shape} differ")
    mask = pred.valid & gt.valid
    if max_depth is not None:
        mask &= gt.array <= max_depth
    return mask


def _pairs(pred: Any, gt: Any, max_depth: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(pred, DepthMap) and isinstance(gt, DepthMap):
        mask = joint_mask(pred, gt, max_depth)
        p, g = pred.array[mask], gt.array[mask]
    else:
        p = np.asarray(pred, dtype=np.float64).reshape(-1)
        g = np.asarray(gt, dtype=np.float64).reshape(-1)
        if p.shape != g.shape:
            raise EvaluationError(f"prediction {p.shape} and ground truth {g.shape} differ")
        if max_depth is not None:
            keep = g <= max_depth
            p, g = p[keep], g[keep]
    if p.size == 0:
        raise EvaluationError("no jointly valid pixels to evaluate")
    if (g <= 0).any():
        raise EvaluationError("ground-truth depth must be positive")
    return p, g


# Loss / Loss


def mae_loss(pred: DepthMap, gt: DepthMap) -> Tensor:
    """
    Mean absolute depth error over jointly valid pixels, differentiable in pred.
    Erro absoluto médio sobre os pixels conjuntamente válidos.
    """
    mask = joint_mask(pred, gt)
    count = int(mask.sum())
    if count == 0:
        raise EvaluationError("no jointly valid pixels for the loss")
    target = np.where(mask, gt.array, 0.0)
    errors = absolute(pred.values - target) * mask.astype(np.float64)
    return errors.sum() / float(count)


# Metrics / Métricas


def _abs_rel_terms(p: np.ndarray, g: np.ndarray) -> np.ndarray:
    return np.abs(g - p) / g


def _sq_rel_terms(p: np.ndarray, g: np.ndarray, convention: str) -> np.ndarray:
    if convention == "ratio":
        return ((g - p) / g) ** 2
    if convention == "kitti":
        return (g - p) ** 2 / g
    raise EvaluationError(f"unknown sq_rel convention '{convention}'")


def _ratios(p: np.ndarray, g: np.ndarray) -> np.ndarray:
    if (p <= 0).any():
        raise EvaluationError("predicted depth must be positive for delta metrics")
    return np.maximum(p / g, g / p)


def abs_rel(pred: Any, gt: Any, max_depth: float | None = None) -> float:
    p, g = _pairs(pred, gt, max_depth)
    return float(np.sum(_abs_rel_terms(p, g)) / p.size)


def sq_rel(
    pred: Any, gt: Any, max_depth: float | None = None, convention: str = "ratio"
) -> float:
    p, g = _pairs(pred, gt, max_depth)
    return float(np.sum(_sq_rel_terms(p, g, convention)) / p.size)


def rmse(pred: Any, gt: Any, max_depth: float | None = None) -> float:
    p, g = _pairs(pred, gt, max_depth)
    return float(np.sqrt(np.sum((g - p) ** 2) / p.size))


def delta_metrics(
    pred: Any, gt: Any, max_depth: float | None = None
) -> tuple[float, float, float]:
    """Fractions of pixels with max(pred/gt, gt/pred) < 1.25**k, k = 1, 2, 3."""
    p, g = _pairs(pred, gt, max_depth)
    ratio = _ratios(p, g)
    d1, d2, d3 = (float(np.sum(ratio < DELTA_BASE**k) / p.size) for k in (1, 2, 3))
    return d1, d2, d3


# Reports / Relatórios


@dataclass
class MetricsReport:
    """
    All metric families computed on one pixel set.
    Todas as métricas calculadas sobre o mesmo conjunto de pixels.
    """

    abs_rel: float
    sq_rel: float
    rmse: float
    delta1: float
    delta2: float
    delta3: float
    n_pixels: int
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_pixels <= 0:
            raise EvaluationError("metrics report needs at least one pixel")
        if min(self.abs_rel, self.sq_rel, self.rmse) < 0:
            raise EvaluationError("error metrics must be non-negative")
        if not 0 <= self.delta1 <= self.delta2 <= self.delta3 <= 1:
            raise EvaluationError("delta accuracies must be nested in [0, 1]")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.abs_rel, self.sq_rel, self.rmse, self.delta1, self.delta2, self.delta3)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> MetricsReport:
        return cls(**payload)


class MetricsAccumulator:
    """
    Pixel-weighted aggregation of metrics across several depth maps.
    Agregação ponderada por pixels de métricas ao longo de vários mapas.
    """

    def __init__(self, max_depth: float | None = None, sq_rel_convention: str = "ratio"):
        if sq_rel_convention not in SQ_REL_CONVENTIONS:
            raise EvaluationError(f"unknown sq_rel convention '{sq_rel_convention}'")
        self.max_depth = max_depth
        self.sq_rel_convention = sq_rel_convention
        self._abs_rel: list[np.ndarray] = []
        self._sq_rel: list[np.ndarray] = []
        self._sq_err: list[np.ndarray] = []
        self._ratio: list[np.ndarray] = []

    @property
    def n_pixels(self) -> int:
        return int(sum(a.size for a in self._abs_rel))

    def update(self, pred: Any, gt: Any) -> int:
        p, g = _pairs(pred, gt, self.max_depth)
        self._abs_rel.append(_abs_rel_terms(p, g))
        self._sq_rel.append(_sq_rel_terms(p, g, self.sq_rel_convention))
        self._sq_err.append((g - p) ** 2)
        self._ratio.append(_ratios(p, g))
        return p.size

    def report(self, **metadata: Any) -> MetricsReport:
        if not self._abs_rel:
            raise EvaluationError("no predictions were accumulated")
        n = self.n_pixels
        ratio = np.concatenate(self._ratio)
        return MetricsReport(
            abs_rel=float(np.sum(np.concatenate(self._abs_rel)) / n),
            sq_rel=float(np.sum(np.concatenate(self._sq_rel)) / n),
            rmse=float(np.sqrt(np.sum(np.concatenate(self._sq_err)) / n)),
            delta1=float(np.sum(ratio < DELTA_BASE) / n),
            delta2=float(np.sum(ratio < DELTA_BASE**2) / n),
            delta3=float(np.sum(ratio < DELTA_BASE**3) / n),
            n_pixels=n,
            metadata=dict(metadata),
        )


def evaluate_all(
    pred: Any,
    gt: Any,
    max_depth: float | None = None,
    sq_rel_convention: str = "ratio",
    **metadata: Any,
) -> MetricsReport:
    """
    Every metric on the identical jointly valid pixel set.
    Todas as métricas sobre o mesmo conjunto de pixels válidos.
    """
    accumulator = MetricsAccumulator(max_depth, sq_rel_convention)
    accumulator.update(pred, gt)
    return accumulator.report(**metadata)
