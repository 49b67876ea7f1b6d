"""Exact t-distributed stochastic neighbor embedding (no tree approximation).

Pairwise affinities in the input space use Gaussian kernels whose
bandwidths are calibrated per point by binary search so that the
perplexity (2 to the Shannon entropy, bits) matches the configured value.
The low-dimensional map minimizes KL(P || Q) under a Student-t kernel by
gradient descent with momentum and an early exaggeration phase.

Everything is O(n^2); intended corpus sizes are a few hundred documents.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


class NonFiniteInputError(ValueError):
    """Input matrix contains NaN or infinity."""


@dataclass(frozen=True)
class EmbeddingConfig:
    perplexity: float = 15.0
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iterations: int = 250
    momentum_start: float = 0.5
    momentum_final: float = 0.8
    momentum_switch: int = 250
    seed: int = 101
    output_dims: int = 2
    init_std: float = 1e-4
    kl_interval: int = 50


@dataclass(frozen=True)
class EmbeddingResult:
    coordinates: np.ndarray  # (n, output_dims), centroid at origin
    kl_checkpoints: tuple[tuple[int, float], ...]  # (iteration, kl)


def squared_distances(points: np.ndarray) -> np.ndarray:
    """Pairwise squared euclidean distances, exact zeros on the diagonal."""
    sq = np.sum(points * points, axis=1)
    d2 = sq[:, np.newaxis] + sq[np.newaxis, :] - 2.0 * (points @ points.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def _row_entropy_bits(probabilities: np.ndarray) -> float:
    positive = probabilities[probabilities > 0.0]
    return float(-np.sum(positive * np.log2(positive)))


def calibrate_row(
    distances: np.ndarray,
    perplexity: float,
    tolerance: float = 1e-5,
    max_steps: int = 50,
) -> tuple[float, np.ndarray]:
    """Binary-search the precision beta of one point's Gaussian kernel.

    distances holds squared distances to the other n-1 points.  Returns
    (beta, conditional probabilities).  A row whose distances are all zero
    is degenerate; it gets the uniform distribution.
    """
    distances = np.asarray(distances, dtype=np.float64)
    if distances.size == 0:
        raise ValueError("a point needs at least one neighbor")
    if np.all(distances == 0.0):
        return 0.0, np.full(distances.size, 1.0 / distances.size)

    beta = 1.0
    beta_min = -np.inf
    beta_max = np.inf
    probs = np.full(distances.size, 1.0 / distances.size)
    for _ in range(max_steps):
        shifted = distances - distances.min()
        weights = np.exp(-beta * shifted)
        total = weights.sum()
        probs = weights / total
        gap = 2.0 ** _row_entropy_bits(probs) - perplexity
        if abs(gap) <= tolerance:
            break
        if gap > 0.0:  # too flat: raise beta to sharpen
            beta_min = beta
            beta = beta * 2.0 if beta_max == np.inf else (beta + beta_max) / 2.0
        else:
            beta_max = beta
            beta = beta / 2.0 if beta_min == -np.inf else (beta + beta_min) / 2.0
    return beta, probs


def joint_probabilities(points: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized affinity matrix P: zero diagonal, entries sum to one."""
    n = points.shape[0]
    d2 = squared_distances(points)
    conditional = np.zeros((n, n))
    mask = ~np.eye(n, dtype=bool)
    for i in range(n):
        _, row = calibrate_row(d2[i][mask[i]], perplexity)
        conditional[i][mask[i]] = row
    p = (conditional + conditional.T) / (2.0 * n)
    return p


def _student_t_kernel(embedding: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    num = 1.0 / (1.0 + squared_distances(embedding))
    np.fill_diagonal(num, 0.0)
    q = num / num.sum()
    return num, q


def kl_divergence(p: np.ndarray, embedding: np.ndarray) -> float:
    _, q = _student_t_kernel(embedding)
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / np.maximum(q[mask], 1e-300))))


def kl_gradient(p: np.ndarray, embedding: np.ndarray) -> np.ndarray:
    """Analytic gradient of KL(P || Q) with respect to the embedding."""
    num, q = _student_t_kernel(embedding)
    pq = (p - q) * num
    return 4.0 * ((np.diag(pq.sum(axis=1)) - pq) @ embedding)


def tsne(points: np.ndarray, config: EmbeddingConfig | None = None) -> EmbeddingResult:
    cfg = config or EmbeddingConfig()
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-d matrix")
    if not np.all(np.isfinite(points)):
        raise NonFiniteInputError("input contains non-finite values")
    n = points.shape[0]
    if n < 2:
        raise ValueError("need at least two points to embed")
    if cfg.perplexity < 1.0:
        raise ValueError("perplexity must be at least 1")
    if cfg.perplexity >= (n - 1) / 3.0:
        warnings.warn(
            f"perplexity {cfg.perplexity} is large for {n} points; "
            "bandwidth calibration may not reach its target",
            RuntimeWarning,
            stacklevel=2,
        )

    p = joint_probabilities(points, cfg.perplexity)
    rng = np.random.default_rng(cfg.seed)
    embedding = rng.normal(0.0, cfg.init_std, (n, cfg.output_dims))
    velocity = np.zeros_like(embedding)
    checkpoints: list[tuple[int, float]] = []

    for iteration in range(cfg.iterations):
        exaggerating = iteration < cfg.exaggeration_iterations
        p_now = p * cfg.early_exaggeration if exaggerating else p
        momentum = (
            cfg.momentum_start
            if iteration < cfg.momentum_switch
            else cfg.momentum_final
        )
        gradient = kl_gradient(p_now, embedding)
        velocity = momentum * velocity - cfg.learning_rate * gradient
        embedding = embedding + velocity
        embedding = embedding - embedding.mean(axis=0)
        if (iteration + 1) % cfg.kl_interval == 0:
            checkpoints.append((iteration + 1, kl_divergence(p, embedding)))

    embedding = embedding - embedding.mean(axis=0)
    return EmbeddingResult(coordinates=embedding, kl_checkpoints=tuple(checkpoints))
