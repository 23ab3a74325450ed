"""Shared-descent-direction subproblems and Pareto-criticality classification.

Two LP formulations are supported: the baseline one (minimize the worst
gradient/direction product over the unit box) and the new one (follow the
anti-gradient sum, with normalized constraint rows and a gradient-scaled
box).  Solutions are classified into one non-critical and three critical
cases according to the geometry of the feasible non-ascent directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .lp import LpSpec, LpStatus, SolverFailure, _simplex_core


class DirectionVariant(Enum):
    LP_BASE = "lp-base"
    LP_NEW = "lp-new"


class CriticalityCase(Enum):
    NOT_CRITICAL = "not-critical"
    CRITICAL_PERPENDICULAR = "critical-perpendicular"
    CRITICAL_ZERO_ONLY = "critical-zero-only"
    CRITICAL_NON_NULL = "critical-non-null"


@dataclass(frozen=True)
class DirectionConfig:
    variant: DirectionVariant = DirectionVariant.LP_NEW
    epsilon: float = 1.0
    tol_grad: float = 1e-12
    tol_zero_dir: float = 1e-9

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.tol_grad <= 0:
            raise ValueError("tol_grad must be positive")


@dataclass(frozen=True)
class DirectionResult:
    p_star: np.ndarray
    beta_star: float
    dropped_rows: tuple[int, ...]
    case: CriticalityCase
    gamma: float
    c_beta: Optional[float] = None

    @property
    def is_critical(self) -> bool:
        return self.case is not CriticalityCase.NOT_CRITICAL


def sum_gradient(jac: np.ndarray) -> np.ndarray:
    """Sum of the gradient rows."""
    return np.asarray(jac, dtype=float).sum(axis=0)


def normalize_rows(jac: np.ndarray, tol_grad: float) -> tuple[np.ndarray, tuple[int, ...]]:
    """Euclidean-normalize rows, dropping those with norm <= tol_grad."""
    if tol_grad <= 0:
        raise ValueError("tol_grad must be positive")
    jac = np.asarray(jac, dtype=float)
    norms = np.linalg.norm(jac, axis=1)
    keep = norms > tol_grad
    dropped = tuple(int(i) for i in np.nonzero(~keep)[0])
    return jac[keep] / norms[keep, None], dropped


def gamma(jac: np.ndarray) -> float:
    """Box radius: max infinity norm over the gradients and their sum."""
    jac = np.asarray(jac, dtype=float)
    if jac.size == 0:
        return 0.0
    row_inf = np.abs(jac).max(axis=1)
    return float(max(row_inf.max(), np.abs(jac.sum(axis=0)).max()))


def build_lp_base(jac: np.ndarray) -> LpSpec:
    """Baseline direction LP over rho = (p, beta)."""
    jac = np.asarray(jac, dtype=float)
    m, n = jac.shape
    c = np.zeros(n + 1)
    c[n] = 1.0
    A = np.hstack([jac, -np.ones((m, 1))])
    lower = np.concatenate([-np.ones(n), [-np.inf]])
    upper = np.concatenate([np.ones(n), [0.0]])
    return LpSpec(c=c, A=A, b=np.zeros(m), lower=lower, upper=upper)


def build_lp_new(jac: np.ndarray, epsilon: float, tol_grad: float) -> LpSpec:
    """New direction LP with normalized constraint rows and scaled box.

    If every gradient row drops (all magnitudes below tol_grad), a sentinel
    spec pinning rho = 0 is returned.
    """
    jac = np.asarray(jac, dtype=float)
    m, n = jac.shape
    gbar, dropped = normalize_rows(jac, tol_grad)
    if gbar.shape[0] == 0:
        zero = np.zeros(n + 1)
        return LpSpec(c=zero, A=np.zeros((0, n + 1)), b=np.zeros(0), lower=zero, upper=zero)
    g = sum_gradient(jac)
    gam = gamma(jac)
    c_beta = float(np.linalg.norm(g)) + epsilon
    c = np.concatenate([g, [c_beta]])
    A = np.hstack([gbar, -np.ones((gbar.shape[0], 1))])
    lower = np.concatenate([np.full(n, -gam), [-np.inf]])
    upper = np.concatenate([np.full(n, gam), [0.0]])
    return LpSpec(c=c, A=A, b=np.zeros(gbar.shape[0]), lower=lower, upper=upper)


def _fast_direction_lp(
    c_p: list, c_beta: float, G: list, gam: float
) -> tuple[float, list, float]:
    """min c_p.p + c_beta*beta  s.t.  G p <= beta e, |p|inf <= gam, beta <= 0.

    Plain-list mirror of the standard-form reduction in the LP module,
    specialized to the direction subproblem's shape so the hot loop skips
    the array plumbing.  Returns (objective value, p, beta).
    """
    n = len(c_p)
    cs = list(c_p) + [-c_beta]  # beta enters as -y with y >= 0
    As, bs = [], []
    for row in G:  # p shifted by +gam onto [0, 2*gam]
        As.append(list(row) + [1.0])
        bs.append(gam * sum(row))
    two = 2.0 * gam
    for j in range(n):
        e = [0.0] * (n + 1)
        e[j] = 1.0
        As.append(e)
        bs.append(two)
    status, y = _simplex_core(cs, As, bs)
    if status is not LpStatus.OPTIMAL:
        raise SolverFailure(f"direction LP ended with status {status.value}")
    p = [y[j] - gam for j in range(n)]
    beta = -y[n]
    value = sum(ci * pi for ci, pi in zip(c_p, p)) + c_beta * beta
    return value, p, beta


def _fast_cone_lp(c_p: list, G: list, box: float) -> float:
    """min c_p.p  s.t.  G p <= 0, |p|inf <= box; returns the optimal value."""
    n = len(c_p)
    As, bs = [], []
    for row in G:
        As.append(list(row))
        bs.append(box * sum(row))
    two = 2.0 * box
    for j in range(n):
        e = [0.0] * n
        e[j] = 1.0
        As.append(e)
        bs.append(two)
    status, y = _simplex_core(list(c_p), As, bs)
    if status is not LpStatus.OPTIMAL:
        raise SolverFailure(f"direction LP ended with status {status.value}")
    return sum(ci * (yj - box) for ci, yj in zip(c_p, y))


def solve_direction(
    jac: np.ndarray,
    variant: DirectionVariant = DirectionVariant.LP_NEW,
    epsilon: float = 1.0,
    tol_grad: float = 1e-12,
    tol_zero_dir: float = 1e-9,
) -> DirectionResult:
    """Solve the chosen direction LP and classify the outcome."""
    jac = np.asarray(jac, dtype=float)
    m, n = jac.shape
    J = jac.tolist()
    g = [sum(col) for col in zip(*J)]

    if variant is DirectionVariant.LP_NEW:
        norms = [math.sqrt(sum(v * v for v in row)) for row in J]
        dropped = tuple(i for i, nm in enumerate(norms) if nm <= tol_grad)
        gam = max(
            max(abs(v) for row in J for v in row),
            max(abs(v) for v in g),
        )
        c_beta = math.sqrt(sum(v * v for v in g)) + epsilon
        if len(dropped) == m:
            return DirectionResult(
                p_star=np.zeros(n),
                beta_star=0.0,
                dropped_rows=dropped,
                case=CriticalityCase.CRITICAL_ZERO_ONLY,
                gamma=gam,
                c_beta=c_beta,
            )
        G = [
            [v / norms[i] for v in J[i]]
            for i in range(m)
            if norms[i] > tol_grad
        ]
        value, p, beta_star = _fast_direction_lp(g, c_beta, G, gam)
        box = gam
    else:
        dropped = ()
        G = J
        value, p, beta_star = _fast_direction_lp([0.0] * n, 1.0, G, 1.0)
        gam = 1.0
        c_beta = None
        box = 1.0

    if beta_star < -tol_zero_dir:
        case = CriticalityCase.NOT_CRITICAL
    else:
        case = _classify_critical(
            g, G, box, p, beta_star, value, variant, c_beta, tol_zero_dir
        )

    return DirectionResult(
        p_star=np.array(p),
        beta_star=beta_star,
        dropped_rows=dropped,
        case=case,
        gamma=gam,
        c_beta=c_beta,
    )


def _classify_critical(
    g: list,
    G: list,
    box: float,
    p_star: list,
    beta_star: float,
    value: float,
    variant: DirectionVariant,
    c_beta: Optional[float],
    tol_zero_dir: float,
) -> CriticalityCase:
    """Distinguish the three critical cases at beta* = 0.

    The discriminator is min g.p over the feasible non-ascent cone: a
    strictly negative minimum means a non-null direction descending for
    at least one objective; otherwise the cone either is {0} or consists
    of directions perpendicular to every gradient.
    """
    n = len(p_star)
    if variant is DirectionVariant.LP_NEW:
        # At a critical point the beta term vanishes, so the solved LP's
        # value already is min g.p over the cone.
        min_gp = value - c_beta * beta_star
    else:
        min_gp = _fast_cone_lp(g, G, box)

    if min_gp < -tol_zero_dir:
        return CriticalityCase.CRITICAL_NON_NULL
    if max(abs(v) for v in p_star) > tol_zero_dir:
        return CriticalityCase.CRITICAL_PERPENDICULAR
    # Returned vertex is 0; probe each coordinate for nonzero feasible
    # directions to tell the {0} cone from a perpendicular one.
    for j in range(n):
        for sign in (1.0, -1.0):
            c = [0.0] * n
            c[j] = sign
            if _fast_cone_lp(c, G, box) < -tol_zero_dir:
                return CriticalityCase.CRITICAL_PERPENDICULAR
    return CriticalityCase.CRITICAL_ZERO_ONLY


def solve_blockwise(
    jacs: Sequence[np.ndarray],
    variant: DirectionVariant = DirectionVariant.LP_NEW,
    epsilon: float = 1.0,
    tol_grad: float = 1e-12,
    tol_zero_dir: float = 1e-9,
) -> list[DirectionResult]:
    """Solve a batch of independent direction subproblems.

    The stacked LP is block diagonal, so the blocks decompose exactly; the
    results match independent per-block solves.
    """
    if len(jacs) == 0:
        raise ValueError("jacs must be non-empty")
    out = []
    for i, jac in enumerate(jacs):
        try:
            out.append(solve_direction(jac, variant, epsilon, tol_grad, tol_zero_dir))
        except SolverFailure as exc:
            raise SolverFailure(f"block {i}: {exc}") from exc
    return out
