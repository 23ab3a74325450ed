"""Tests for backtracking line search and the descent loops."""

import numpy as np
import pytest

from mgdkit import (
    BacktrackParams,
    BacktrackVariant,
    CriticalityCase,
    DirectionConfig,
    DirectionVariant,
    Evaluation,
    Problem,
    SegmentKind,
    Termination,
    armijo_holds,
    backtrack,
    classify_subsequences,
    dominates,
    evaluate,
    get_problem,
    run_mgd,
    sample_starts,
    solve_direction,
    StartSampler,
)
from mgdkit.descent import TraceRecord

LP_NEW = DirectionConfig(variant=DirectionVariant.LP_NEW)
LP_BASE = DirectionConfig(variant=DirectionVariant.LP_BASE)


def _problem_1d_pair():
    # f1 = x^2, f2 = (x - 2)^2 on the line.
    def evaluator(x):
        f = np.array([x[0] ** 2, (x[0] - 2.0) ** 2])
        jac = np.array([[2.0 * x[0]], [2.0 * (x[0] - 2.0)]])
        return f, jac

    return Problem(
        name="quadratic-pair",
        n=1,
        m=2,
        evaluator=evaluator,
        domain_box=np.array([[-5.0, 5.0]]),
        default_max_iters=100,
    )


def _problem_single_quadratic():
    def evaluator(x):
        return np.array([float(x @ x)]), (2.0 * x)[None, :]

    return Problem(
        name="single-quadratic",
        n=2,
        m=1,
        evaluator=evaluator,
        domain_box=np.tile([-2.0, 2.0], (2, 1)),
        default_max_iters=200,
    )


def _problem_opposed_linear():
    # f1 = x1, f2 = -x1: every point is critical with opposed gradients.
    def evaluator(x):
        return np.array([x[0], -x[0]]), np.array([[1.0, 0.0], [-1.0, 0.0]])

    return Problem(
        name="opposed-linear",
        n=2,
        m=2,
        evaluator=evaluator,
        domain_box=np.tile([-1.0, 1.0], (2, 1)),
        default_max_iters=50,
    )


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            BacktrackParams(c1=0.0)
        with pytest.raises(ValueError):
            BacktrackParams(alpha=1.0)
        with pytest.raises(ValueError):
            BacktrackParams(eta0=0.0)
        with pytest.raises(ValueError):
            BacktrackParams(theta=0)
        with pytest.raises(ValueError):
            BacktrackParams(eta_hat=-0.1)

    def test_fallback_default(self):
        params = BacktrackParams(eta0=1.0, alpha=0.8, theta=40)
        assert params.fallback_step == pytest.approx(0.8**40)
        assert BacktrackParams(eta_hat=0.0).fallback_step == 0.0


class TestArmijo:
    def test_quarter_step_passes(self):
        ev = Evaluation(x=np.array([1.0]), f=np.array([1.0]), jac=np.array([[2.0]]))
        assert armijo_holds(ev, np.array([-2.0]), 0.25, 0.1, np.array([0.25]))

    def test_full_step_fails(self):
        ev = Evaluation(x=np.array([1.0]), f=np.array([1.0]), jac=np.array([[2.0]]))
        assert not armijo_holds(ev, np.array([-2.0]), 1.0, 0.1, np.array([1.0]))

    def test_small_steps_pass_for_descent_directions(self):
        prob = _problem_1d_pair()
        ev = evaluate(prob, np.array([3.0]))
        p = np.array([-1.0])  # descent for both objectives at x=3
        for eta in (1e-3, 1e-5, 1e-8):
            f_new, _ = prob.evaluator(ev.x + eta * p)
            assert armijo_holds(ev, p, eta, 0.1, f_new)

    def test_eta_must_be_positive(self):
        ev = Evaluation(x=np.array([0.0]), f=np.array([0.0]), jac=np.array([[1.0]]))
        with pytest.raises(ValueError):
            armijo_holds(ev, np.array([1.0]), 0.0, 0.5, np.array([0.0]))


class TestBacktrack:
    def test_ladder_hits_seventh_step(self):
        prob = _problem_1d_pair()
        ev = evaluate(prob, np.array([3.0]))
        d = solve_direction(ev.jac, DirectionVariant.LP_NEW)
        assert d.p_star == pytest.approx([-8.0], abs=1e-8)
        params = BacktrackParams(c1=1e-9, alpha=0.8, eta0=1.0, theta=40)
        eta, x_new, satisfied = backtrack(prob, ev, d.p_star, params)
        assert satisfied
        assert eta == pytest.approx(0.8**7)
        assert x_new == pytest.approx(ev.x + eta * d.p_star)
        # Cross-check against a direct scan over the ladder.
        for t in range(40):
            cand = 1.0 * 0.8**t
            f_new, _ = prob.evaluator(ev.x + cand * d.p_star)
            if armijo_holds(ev, d.p_star, cand, 1e-9, f_new):
                assert cand == pytest.approx(eta)
                break

    def test_descent_direction_always_satisfiable(self):
        prob = _problem_single_quadratic()
        ev = evaluate(prob, np.array([1.0, -0.5]))
        _, _, satisfied = backtrack(
            prob, ev, -ev.jac[0], BacktrackParams(theta=60)
        )
        assert satisfied

    def test_zero_direction_returns_full_step(self):
        prob = _problem_1d_pair()
        ev = evaluate(prob, np.array([3.0]))
        eta, x_new, satisfied = backtrack(
            prob, ev, np.zeros(1), BacktrackParams()
        )
        assert satisfied
        assert eta == pytest.approx(1.0)
        assert x_new == pytest.approx(ev.x)


def _kursawe_starts(count, seed=5):
    prob = get_problem("kursawe")
    return prob, sample_starts(StartSampler(prob.domain_box, count, seed))


class TestRunMgd:
    def test_single_objective_is_gradient_descent(self):
        prob = _problem_single_quadratic()
        res = run_mgd(
            prob,
            np.array([1.0, 0.0]),
            BacktrackParams(variant=BacktrackVariant.BT_NEW),
            LP_NEW,
            K=100,
        )
        values = [rec.f[0] for rec in res.trace] + [res.f_hat[0]]
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert res.f_hat[0] < 1e-4

    def test_opposed_linear_drifts_along_null_direction(self):
        # Every point is critical with the feasible cone perpendicular to
        # both gradients, so the sequence may move only along directions on
        # which every objective is constant.
        prob = _problem_opposed_linear()
        for variant in BacktrackVariant:
            res = run_mgd(
                prob,
                np.array([0.3, -0.2]),
                BacktrackParams(variant=variant),
                LP_NEW,
                K=50,
            )
            assert res.x_hat[0] == pytest.approx(0.3)
            assert res.f_hat == pytest.approx([0.3, -0.3])
            for rec in res.trace:
                assert rec.critical_case is CriticalityCase.CRITICAL_PERPENDICULAR
                assert rec.f == pytest.approx([0.3, -0.3])

    def test_base_traces_strictly_decrease(self):
        prob, starts = _kursawe_starts(10)
        params = BacktrackParams(variant=BacktrackVariant.BT_BASE)
        for x0 in starts:
            res = run_mgd(prob, x0, params, LP_NEW, K=300)
            fs = [rec.f for rec in res.trace if rec.eta > 0] + [res.f_hat]
            for fa, fb in zip(fs, fs[1:]):
                if np.array_equal(fa, fb):
                    continue
                assert np.all(fb <= fa)
                assert np.any(fb < fa)

    def test_new_steps_never_dominated_by_predecessor(self):
        prob, starts = _kursawe_starts(10, seed=6)
        params = BacktrackParams(variant=BacktrackVariant.BT_NEW)
        for x0 in starts:
            res = run_mgd(prob, x0, params, LP_NEW, K=300)
            fs = [rec.f for rec in res.trace if rec.eta > 0] + [res.f_hat]
            for fa, fb in zip(fs, fs[1:]):
                assert not dominates(fa, fb)

    def test_zero_fallback_matches_base_points(self):
        # With the fallback step forced to zero, the non-domination strategy
        # visits exactly the distinct points of the strict-decrease strategy.
        prob, starts = _kursawe_starts(20, seed=7)
        for x0 in starts:
            base = run_mgd(
                prob,
                x0,
                BacktrackParams(variant=BacktrackVariant.BT_BASE),
                LP_NEW,
                K=300,
            )
            new = run_mgd(
                prob,
                x0,
                BacktrackParams(variant=BacktrackVariant.BT_NEW, eta_hat=0.0),
                LP_NEW,
                K=300,
            )
            pts_base = {tuple(rec.x) for rec in base.trace} | {tuple(base.x_hat)}
            pts_new = {tuple(rec.x) for rec in new.trace} | {tuple(new.x_hat)}
            assert pts_base == pts_new

    def test_stored_set_is_antichain(self):
        prob, starts = _kursawe_starts(10, seed=8)
        params = BacktrackParams(variant=BacktrackVariant.BT_NEW)
        for x0 in starts:
            res = run_mgd(prob, x0, params, LP_NEW, K=500)
            fs = [f for _, f in res.stored_set]
            for i, fa in enumerate(fs):
                for j, fb in enumerate(fs):
                    if i != j:
                        assert not dominates(fa, fb)
                assert not dominates(res.f_hat, fa)

    def test_final_points_critical_on_smooth_problem(self):
        prob = get_problem("fonseca-fleming")
        starts = sample_starts(StartSampler(prob.domain_box, 20, 9))
        params = BacktrackParams(variant=BacktrackVariant.BT_NEW)
        bound = 1.0 / np.sqrt(3.0) + 0.05
        for x0 in starts:
            res = run_mgd(prob, x0, params, LP_NEW, K=250)
            # Terminal point is critical under the raw-gradient LP, up to
            # the spatial resolution of the fallback step: once the sequence
            # is within one fallback step of the critical set, iterates
            # oscillate around it at that scale and the residual optimum is
            # proportional to the remaining distance.
            ev = evaluate(prob, res.x_hat)
            d = solve_direction(ev.jac, DirectionVariant.LP_BASE)
            assert abs(d.beta_star) <= 10.0 * params.fallback_step
            # And it lies on the equal-coordinates optimal segment.
            x = res.x_hat
            assert np.max(np.abs(x[:, None] - x[None, :])) <= 0.05
            assert np.all(np.abs(x) <= bound)

    def test_invalid_budget(self):
        prob = _problem_single_quadratic()
        with pytest.raises(ValueError):
            run_mgd(prob, np.zeros(2), BacktrackParams(), LP_NEW, K=0)


def _rec(k, eta, satisfied, case):
    return TraceRecord(
        k=k,
        x=np.zeros(1),
        f=np.zeros(1),
        p_star=np.zeros(1),
        beta_star=0.0,
        eta=eta,
        armijo_satisfied=satisfied,
        critical_case=case,
    )


class TestClassifySubsequences:
    def test_all_satisfied_single_segment(self):
        trace = [
            _rec(k, 0.5, True, CriticalityCase.NOT_CRITICAL) for k in range(4)
        ]
        assert classify_subsequences(trace) == [(SegmentKind.NPC, 0, 3)]

    def test_fallback_at_critical_closes_segment(self):
        trace = [
            _rec(0, 0.5, True, CriticalityCase.NOT_CRITICAL),
            _rec(1, 1e-4, False, CriticalityCase.CRITICAL_PERPENDICULAR),
            _rec(2, 0.5, True, CriticalityCase.NOT_CRITICAL),
        ]
        segments = classify_subsequences(trace)
        assert segments[0] == (SegmentKind.PC_ETA_HAT, 0, 1)
        assert segments[1] == (SegmentKind.NPC, 2, 2)

    def test_zero_step_at_critical_tail(self):
        trace = [
            _rec(0, 0.5, True, CriticalityCase.NOT_CRITICAL),
            _rec(1, 0.0, True, CriticalityCase.CRITICAL_ZERO_ONLY),
        ]
        assert classify_subsequences(trace) == [(SegmentKind.PC_0, 0, 1)]

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError):
            classify_subsequences([])
