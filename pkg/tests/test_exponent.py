import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sympcode.channels import ErrorDistribution
from sympcode.exponent import (
    entropy,
    entropy_lower_bound_check,
    exponent,
    exponent_both,
    exponent_grid,
    exponent_line,
    kl_divergence,
    padded_rate,
    threshold_rate,
    two_stage_rate,
)
from sympcode.fflin import PreconditionError


def dist(p, d=2, m=1):
    return ErrorDistribution(d, m, np.asarray(p, dtype=float))


def scan_binary(R, a, m=1, d=2):
    """Independent oracle for P = (a, 1-a): dense scan over q, then a zoom around the best q."""

    def f(q):
        H = -(q * np.log(q) + (1 - q) * np.log(1 - q)) / np.log(d)
        D = (q * np.log(q / a) + (1 - q) * np.log((1 - q) / (1 - a))) / np.log(d)
        return D / m + np.maximum(1 - R - H / m, 0.0)

    q = np.linspace(0, 1, 100001)[1:-1]
    for _ in range(3):
        v = f(q)
        i = int(np.argmin(v))
        step = q[1] - q[0]
        q = np.linspace(max(q[i] - step, 1e-15), min(q[i] + step, 1 - 1e-15), 100001)
    return float(f(q).min())


def test_entropy_examples():
    assert entropy(ErrorDistribution.delta(2, 1), 2) == 0
    assert entropy(ErrorDistribution.uniform(3, 2), 3) == pytest.approx(4)
    assert entropy(dist([0.5, 0.25, 0.125, 0.125]), 2) == pytest.approx(1.75)


def test_kl_examples():
    P = dist([0.1, 0.2, 0.3, 0.4])
    assert kl_divergence(P, P, 2) == pytest.approx(0)
    assert kl_divergence(ErrorDistribution.delta(2, 1), ErrorDistribution.uniform(2, 1), 2) == pytest.approx(2)
    assert kl_divergence(P, ErrorDistribution.delta(2, 1), 2) == math.inf


@pytest.mark.parametrize("R", [0.0, 0.3, 0.7, 1.0])
def test_noiseless_exponent(R):
    P = ErrorDistribution.delta(2, 1)
    for method in ("line", "grid"):
        res = exponent(R, P, 1, method)
        assert res.value == pytest.approx(1 - R, abs=1e-9)
        assert res.argmin_Q.probs[0] == pytest.approx(1)


def test_uniform_exponent_is_zero():
    P = ErrorDistribution.uniform(2, 1)
    for R in (0.0, 0.5, 1.0):
        assert exponent(R, P, 1, "line").value == pytest.approx(0, abs=1e-12)


def test_rate_out_of_range():
    with pytest.raises(PreconditionError):
        exponent(1.2, ErrorDistribution.delta(2, 1))
    with pytest.raises(PreconditionError):
        exponent(-0.1, ErrorDistribution.delta(2, 1))


@pytest.mark.parametrize("a,R", [(0.9, 0.2), (0.95, 0.5), (0.7, 0.05), (0.99, 0.8)])
def test_against_binary_scan(a, R):
    P = dist([a, 1 - a, 0, 0])
    want = scan_binary(R, a)
    assert exponent_line(R, P).value == pytest.approx(want, abs=1e-6)
    assert exponent_grid(R, P).value == pytest.approx(want, abs=1e-6)


def test_both_methods_four_points():
    P = dist([0.95, 0.03, 0.015, 0.005])
    assert threshold_rate(P, 1) > 0.5
    out = exponent_both(0.2, P)
    assert out["agree"] and out["gap"] < 1e-3
    assert out["result"].value > 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4), st.sampled_from([1, 2]))
def test_threshold_and_monotonicity(w, m):
    P = dist(np.array(w) / sum(w))
    thr = threshold_rate(P, m)
    vals = [exponent_line(R, P, m).value for R in np.linspace(0, 1, 11)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    for R, v in zip(np.linspace(0, 1, 11), vals):
        if R < thr - 1e-6:
            assert v > 0
        elif R > thr + 1e-6:
            assert v == pytest.approx(0, abs=1e-12)


def test_threshold_examples():
    assert threshold_rate(ErrorDistribution.delta(3, 2), 2) == 1
    assert threshold_rate(ErrorDistribution.uniform(2, 1), 1) == pytest.approx(-1)


def test_entropy_bound():
    rep = entropy_lower_bound_check(ErrorDistribution.delta(2, 1))
    assert rep["lhs"] == pytest.approx(1) and rep["rhs"] == pytest.approx(1)
    gaps = []
    for eps in (1e-2, 1e-4, 1e-6):
        P = dist([1 - eps, eps / 3, eps / 3, eps / 3])
        rep = entropy_lower_bound_check(P)
        assert rep["holds"]
        gaps.append(rep["gap"])
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-4


def test_rates():
    assert two_stage_rate(3, 3, 0.4) == pytest.approx(0.4)
    assert two_stage_rate(2, 3, 0.9) == pytest.approx(0.6)
    assert padded_rate(2, 3, 0.9, blocks=10, extra=0) == pytest.approx(0.6)
    assert padded_rate(2, 3, 0.9, blocks=10, extra=2) < 0.6


def test_kl_joint_convexity():
    rng = np.random.default_rng(3)
    for _ in range(50):
        Q1, Q2, P1, P2 = rng.dirichlet(np.ones(4), size=4)
        lam = rng.random()
        lhs = kl_divergence(lam * Q1 + (1 - lam) * Q2, lam * P1 + (1 - lam) * P2, 2)
        rhs = lam * kl_divergence(Q1, P1, 2) + (1 - lam) * kl_divergence(Q2, P2, 2)
        assert lhs <= rhs + 1e-12
