"""Core multi-objective types, evaluation, and dominance relations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class EvaluationError(RuntimeError):
    """Raised when an objective or gradient evaluates to a non-finite value."""

    def __init__(self, message: str, objective_index: Optional[int] = None):
        super().__init__(message)
        self.objective_index = objective_index


@dataclass(frozen=True)
class Problem:
    """An unconstrained m-objective problem on R^n with analytic Jacobian.

    ``evaluator`` maps a point x (shape (n,)) to a pair ``(f, jac)`` with
    f of shape (m,) and jac of shape (m, n), row i being grad f_i(x).
    ``f_batch``, if given, maps an (N, n) array of points to an (N, m)
    array of objective values; it is an optimization used by the line
    search and must agree with ``evaluator``.
    """

    name: str
    n: int
    m: int
    evaluator: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    domain_box: np.ndarray  # shape (n, 2), columns (lower, upper)
    default_max_iters: int
    f_batch: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("problem dimensions must be >= 1")
        box = np.asarray(self.domain_box, dtype=float)
        if box.shape != (self.n, 2):
            raise ValueError(f"domain_box must have shape ({self.n}, 2)")
        if not np.all(box[:, 0] < box[:, 1]):
            raise ValueError("domain_box lower bounds must be < upper bounds")
        if self.default_max_iters < 1:
            raise ValueError("default_max_iters must be positive")
        object.__setattr__(self, "domain_box", box)

    def eval_f_batch(self, X: np.ndarray) -> np.ndarray:
        """Objective values for a batch of points, shape (N, n) -> (N, m)."""
        X = np.asarray(X, dtype=float)
        if self.f_batch is not None:
            return self.f_batch(X)
        return np.array([self.evaluator(x)[0] for x in X])


@dataclass(frozen=True)
class Evaluation:
    """Objective values and Jacobian of a problem at one point."""

    x: np.ndarray  # (n,)
    f: np.ndarray  # (m,)
    jac: np.ndarray  # (m, n)


def evaluate(problem: Problem, x: np.ndarray) -> Evaluation:
    """Evaluate objectives and analytic Jacobian at ``x``.

    Raises :class:`EvaluationError` naming the first offending objective
    if any output entry is non-finite.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(f"point must have shape ({problem.n},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point coordinates must be finite")
    f, jac = problem.evaluator(x)
    f = np.asarray(f, dtype=float)
    jac = np.asarray(jac, dtype=float)
    if f.shape != (problem.m,) or jac.shape != (problem.m, problem.n):
        raise ValueError("evaluator returned wrongly shaped outputs")
    if not (np.isfinite(f).all() and np.isfinite(jac).all()):
        bad = np.nonzero(~(np.isfinite(f) & np.isfinite(jac).all(axis=1)))[0]
        i = int(bad[0]) if bad.size else 0
        raise EvaluationError(
            f"objective {i} of problem '{problem.name}' produced a "
            f"non-finite value at x={x.tolist()}",
            objective_index=i,
        )
    return Evaluation(x=x, f=f, jac=jac)


def dominates(fa: np.ndarray, fb: np.ndarray) -> bool:
    """True iff fa <= fb componentwise and fa != fb (exact comparisons)."""
    fa = np.asarray(fa, dtype=float)
    fb = np.asarray(fb, dtype=float)
    if fa.shape != fb.shape:
        raise ValueError(f"length mismatch: {fa.shape} vs {fb.shape}")
    return bool(np.all(fa <= fb) and np.any(fa != fb))


def critical_oracle(evaluation: Evaluation, n_samples: int, seed: int) -> bool:
    """Sampling oracle for Pareto criticality (test use only).

    Draws ``n_samples`` unit directions uniformly on the sphere and returns
    False as soon as one is a shared descent direction (jac @ v < 0
    componentwise).  A True answer only means no shared descent direction
    was found among the samples; callers must use instances whose descent
    cones are wide enough for the sample size.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    jac = evaluation.jac
    n = jac.shape[1]
    rng = np.random.default_rng(seed)
    batch = 4096
    remaining = n_samples
    while remaining > 0:
        k = min(batch, remaining)
        V = rng.normal(size=(k, n))
        norms = np.linalg.norm(V, axis=1)
        V = V[norms > 0] / norms[norms > 0, None]
        if np.any(np.all(V @ jac.T < 0, axis=1)):
            return False
        remaining -= k
    return True
