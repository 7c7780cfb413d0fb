"""Centered Kernel Alignment between representation-layer matrices.

Inputs are n_samples x dim matrices of per-sample layer representations; the
linear variant works in feature space, the RBF variant through explicit
double-centered kernel matrices with a median-heuristic bandwidth. All math
runs in float64.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def _as_matrix(x, name: str) -> np.ndarray:
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if m.shape[0] < 2:
        raise ValueError(f"{name} needs at least 2 samples, got {m.shape[0]}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} contains non-finite values")
    return m


def linear_cka(x, y) -> float:
    """Linear CKA: ||Yc' Xc||_F^2 / (||Xc' Xc||_F * ||Yc' Yc||_F) after column-centering."""
    x = _as_matrix(x, "x")
    y = _as_matrix(y, "y")
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"row-count mismatch: {x.shape[0]} vs {y.shape[0]}")
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    num = np.linalg.norm(yc.T @ xc, "fro") ** 2
    den = np.linalg.norm(xc.T @ xc, "fro") * np.linalg.norm(yc.T @ yc, "fro")
    if den == 0.0:
        raise ValueError("zero denominator: at least one matrix is constant")
    return float(np.clip(num / den, 0.0, 1.0))


def _rbf_kernel(x: np.ndarray, sigma_frac: float, name: str) -> np.ndarray:
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    iu = np.triu_indices(x.shape[0], k=1)
    median = float(np.median(np.sqrt(d2[iu])))
    if median == 0.0:
        raise ValueError(f"{name}: all rows identical, median pairwise distance is 0")
    sigma = sigma_frac * median
    return np.exp(-d2 / (2.0 * sigma * sigma))


def _center(k: np.ndarray) -> np.ndarray:
    # H K H with H = I - 11'/n
    k = k - k.mean(axis=0, keepdims=True)
    return k - k.mean(axis=1, keepdims=True)


def rbf_cka(x, y, sigma_frac: float = 0.5) -> float:
    """RBF CKA with sigma = sigma_frac * median pairwise Euclidean distance.

    The median is taken over the distinct unordered row pairs of each matrix
    separately; kernels are double-centered after evaluation.
    """
    if sigma_frac <= 0:
        raise ValueError("sigma_frac must be > 0")
    x = _as_matrix(x, "x")
    y = _as_matrix(y, "y")
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"row-count mismatch: {x.shape[0]} vs {y.shape[0]}")
    kc = _center(_rbf_kernel(x, sigma_frac, "x"))
    lc = _center(_rbf_kernel(y, sigma_frac, "y"))
    num = float(np.sum(kc * lc))
    den = np.linalg.norm(kc, "fro") * np.linalg.norm(lc, "fro")
    if den == 0.0:
        raise ValueError("zero denominator: degenerate kernel matrix")
    return float(np.clip(num / den, 0.0, 1.0))


def cka_matrix(
    layers_a: Sequence, layers_b: Sequence, kernel: str = "linear", sigma_frac: float = 0.5
) -> np.ndarray:
    """Pairwise CKA grid between two layer lists, shape len(a) x len(b)."""
    if kernel not in ("linear", "rbf"):
        raise ValueError(f"unknown kernel {kernel!r}, expected 'linear' or 'rbf'")
    mats_a = [_as_matrix(m, f"layers_a[{i}]") for i, m in enumerate(layers_a)]
    mats_b = [_as_matrix(m, f"layers_b[{i}]") for i, m in enumerate(layers_b)]
    counts = {m.shape[0] for m in mats_a} | {m.shape[0] for m in mats_b}
    if len(counts) > 1:
        raise ValueError(f"inconsistent sample counts across layers: {sorted(counts)}")
    grid = np.zeros((len(mats_a), len(mats_b)), dtype=np.float64)
    for i, ma in enumerate(mats_a):
        for j, mb in enumerate(mats_b):
            if kernel == "linear":
                grid[i, j] = linear_cka(ma, mb)
            else:
                grid[i, j] = rbf_cka(ma, mb, sigma_frac)
    return grid
