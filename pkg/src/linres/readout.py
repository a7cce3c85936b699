"""Ridge regression readout trained on teacher-forced reservoir states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

_RESIDUAL_TOL = 1e-8


class RidgeSolveError(RuntimeError):
    """Normal equations could not be solved to tolerance."""


@dataclass(frozen=True)
class ReadoutWeights:
    """Linear readout W (N x d) and the regularization it was fit with."""

    w: np.ndarray
    lam: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.w)):
            raise ValueError("readout weights must be finite")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")


@dataclass(frozen=True)
class RegressionProblem:
    """Design matrix X (M x N) and targets Y (M x d)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.x.ndim != 2 or self.y.ndim != 2:
            raise ValueError("X and Y must be 2-d")
        if self.x.shape[0] != self.y.shape[0]:
            raise ValueError("X and Y must have the same number of rows")
        if self.x.shape[0] < 1:
            raise ValueError("need at least one row")


def ridge_fit(prob: RegressionProblem, lam: float) -> ReadoutWeights:
    """Solve W = (X^T X + lam I)^-1 X^T Y via Cholesky.

    One step of iterative refinement keeps the normal-equation residual
    below 1e-8 relative even on ill-conditioned problems.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    n = prob.x.shape[1]
    gram = prob.x.T @ prob.x + lam * np.eye(n)
    xty = prob.x.T @ prob.y
    try:
        factor = cho_factor(gram)
    except np.linalg.LinAlgError as exc:
        raise RidgeSolveError(f"singular normal equations at lambda={lam}") from exc
    w = cho_solve(factor, xty)
    w += cho_solve(factor, xty - gram @ w)  # refinement
    rel = np.linalg.norm(gram @ w - xty) / max(np.linalg.norm(xty), 1e-300)
    if rel > _RESIDUAL_TOL:
        raise RidgeSolveError(f"normal-equation residual {rel:.3e} exceeds {_RESIDUAL_TOL}")
    return ReadoutWeights(w=w, lam=lam)


def predict_one_step(weights: ReadoutWeights, x: np.ndarray) -> np.ndarray:
    """Next-observation prediction W^T x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (weights.w.shape[0],):
        raise ValueError(f"state must have shape ({weights.w.shape[0]},)")
    return weights.w.T @ x
