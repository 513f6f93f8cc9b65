"""Random-coding exponent E_m(R, P) = min_Q D(Q||P)/m + |1 - R - H(Q)/m|^+ and rate bookkeeping.

All logarithms are base d.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .channels import ErrorDistribution
from .fflin import PreconditionError

log = logging.getLogger(__name__)

GRID_RESOLUTION = 400
GRID_MAX_ALPHABET = 4


@dataclass
class ExponentResult:
    value: float
    argmin_Q: ErrorDistribution
    method: str

    def to_dict(self) -> dict:
        return {"value": self.value, "argmin": self.argmin_Q.to_dict(), "method": self.method}


def _xlogx(q: np.ndarray) -> np.ndarray:
    out = np.zeros_like(q, dtype=float)
    mask = q > 0
    out[mask] = q[mask] * np.log(q[mask])
    return out


def entropy(Q, base: int) -> float:
    q = Q.probs if isinstance(Q, ErrorDistribution) else np.asarray(Q, dtype=float)
    return float(-_xlogx(q).sum() / np.log(base))


def kl_divergence(Q, P, base: int) -> float:
    """D(Q||P) in base ``base``; +inf when Q puts mass outside the support of P."""
    q = Q.probs if isinstance(Q, ErrorDistribution) else np.asarray(Q, dtype=float)
    p = P.probs if isinstance(P, ErrorDistribution) else np.asarray(P, dtype=float)
    mask = q > 0
    if np.any(p[mask] <= 0):
        return float("inf")
    return float(np.sum(q[mask] * np.log(q[mask] / p[mask])) / np.log(base))


def binary_entropy(p: float, base: int) -> float:
    return entropy(np.array([p, 1 - p]), base)


def threshold_rate(P: ErrorDistribution, m: int | None = None) -> float:
    """1 - H(P)/m; the exponent is positive exactly below this rate."""
    m = P.m if m is None else m
    return 1 - entropy(P, P.d) / m


def objective(Q: np.ndarray, P: np.ndarray, R: float, m: int, d: int) -> float:
    return kl_divergence(Q, P, d) / m + max(1 - R - entropy(Q, d) / m, 0.0)


def _check(R: float, P: ErrorDistribution):
    if not 0 <= R <= 1:
        raise PreconditionError(f"rate must lie in [0, 1], got {R}")
    if not P.is_normalized(1e-9):
        raise PreconditionError("P is not normalized")


def _grid_objective(Qs: np.ndarray, p: np.ndarray, R: float, m: int, d: int) -> np.ndarray:
    lq = np.where(Qs > 0, np.log(np.where(Qs > 0, Qs, 1.0)), 0.0)
    H = -(Qs * lq).sum(axis=1) / np.log(d)
    Dv = (Qs * (lq - np.log(p))).sum(axis=1) / np.log(d)
    return Dv / m + np.maximum(1 - R - H / m, 0.0)


def exponent_grid(
    R: float,
    P: ErrorDistribution,
    m: int | None = None,
    resolution: int = GRID_RESOLUTION,
    refine: int = 3,
) -> ExponentResult:
    """Brute-force minimum over the simplex grid {Q = c / resolution} on the support of P.

    The objective is convex in Q, so the best grid cell is then re-gridded
    ``refine`` times, each pass ten times finer, in a box around the incumbent.
    Ties are broken by the lexicographically first grid point.
    """
    m = P.m if m is None else m
    _check(R, P)
    supp = np.nonzero(P.probs > 0)[0]
    s = supp.size
    if s > GRID_MAX_ALPHABET:
        raise PreconditionError(f"grid oracle supports at most {GRID_MAX_ALPHABET} support points, got {s}")
    p = P.probs[supp]
    N = resolution
    best_val, best_q = np.inf, None
    blocks = [np.array([[N]])] if s == 1 else _compositions(N, s)
    for block in blocks:
        Qs = block / N
        vals = _grid_objective(Qs, p, R, m, P.d)
        i = int(np.argmin(vals))
        if vals[i] < best_val - 1e-15:
            best_val, best_q = float(vals[i]), Qs[i]
    step = 1.0 / N
    for _ in range(refine if s > 1 else 0):
        fine = step / 10
        offsets = np.arange(-20, 21) * fine
        axes = np.meshgrid(*([offsets] * (s - 1)), indexing="ij")
        free = best_q[: s - 1] + np.stack([a.reshape(-1) for a in axes], axis=1)
        Qs = np.concatenate([free, 1 - free.sum(axis=1, keepdims=True)], axis=1)
        Qs = Qs[np.all(Qs >= -1e-15, axis=1)].clip(0, None)
        vals = _grid_objective(Qs, p, R, m, P.d)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_q = float(vals[i]), Qs[i]
        step = fine
    q = np.zeros_like(P.probs)
    q[supp] = best_q
    return ExponentResult(max(best_val, 0.0), ErrorDistribution(P.d, P.m, q), "brute_grid")


def _compositions(N: int, s: int):
    """Yield blocks of integer vectors with s nonnegative parts summing to N, in lexicographic order."""
    if s == 2:
        a = np.arange(N + 1)
        yield np.stack([a, N - a], axis=1)
        return
    if s == 3:
        for i in range(N + 1):
            b = np.arange(N - i + 1)
            yield np.stack([np.full_like(b, i), b, N - i - b], axis=1)
        return
    for i in range(N + 1):
        rest = N - i
        # pairs (j, k') with j + k' <= rest, ordered lexicographically
        jj = np.repeat(np.arange(rest + 1), np.arange(rest + 1, 0, -1))
        kk = np.concatenate([np.arange(rest - a + 1) for a in range(rest + 1)])
        yield np.stack([np.full_like(jj, i), jj, kk, rest - jj - kk], axis=1)


def _tilted(p: np.ndarray, beta: float) -> np.ndarray:
    lp = beta * np.log(p)
    q = np.exp(lp - lp.max())
    return q / q.sum()


def exponent_line(R: float, P: ErrorDistribution, m: int | None = None, scan: int = 2001) -> ExponentResult:
    """Search the tilted family Q_beta ∝ P^beta, beta in [0, 1], on the support of P.

    beta = 1 is Q = P (zero divergence); beta = 0 is uniform on the support.
    A dense scan is refined by bounded scalar minimization around the best point.
    """
    m = P.m if m is None else m
    _check(R, P)
    supp = np.nonzero(P.probs > 0)[0]
    p = P.probs[supp]

    def f(beta):
        return objective(_tilted(p, beta), p, R, m, P.d)

    betas = np.linspace(0.0, 1.0, scan)
    lq = betas[:, None] * np.log(p)[None, :]
    Qs = np.exp(lq - lq.max(axis=1, keepdims=True))
    vals = _grid_objective(Qs / Qs.sum(axis=1, keepdims=True), p, R, m, P.d)
    i = int(np.argmin(vals))
    best_beta, best_val = float(betas[i]), float(vals[i])
    lo, hi = betas[max(i - 1, 0)], betas[min(i + 1, scan - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        if res.fun < best_val:
            best_beta, best_val = float(res.x), float(res.fun)
    q = np.zeros_like(P.probs)
    q[supp] = _tilted(p, best_beta)
    return ExponentResult(max(best_val, 0.0), ErrorDistribution(P.d, P.m, q), "tilted_line_search")


def exponent(R: float, P: ErrorDistribution, m: int | None = None, method: str = "tilted_line_search") -> ExponentResult:
    if method in ("tilted_line_search", "line"):
        return exponent_line(R, P, m)
    if method in ("brute_grid", "grid"):
        return exponent_grid(R, P, m)
    if method == "both":
        return exponent_both(R, P, m)["result"]
    raise ValueError(f"unknown method {method!r}")


def exponent_both(R: float, P: ErrorDistribution, m: int | None = None, tol: float = 1e-3) -> dict:
    """Run both methods; on disagreement beyond ``tol`` the grid value wins and is logged."""
    line = exponent_line(R, P, m)
    grid = exponent_grid(R, P, m)
    gap = abs(line.value - grid.value)
    agree = gap <= tol
    if not agree:
        log.warning("grid and line search disagree by %.3g at R=%s", gap, R)
    return {"result": line if agree else grid, "line": line, "grid": grid, "gap": gap, "agree": agree}


def entropy_lower_bound_check(P: ErrorDistribution, m: int | None = None) -> dict:
    """1 - H(P)/m >= 1 - [h(P(0)) + (1 - P(0)) 2m]/m, with h the base-d binary entropy."""
    m = P.m if m is None else m
    p0 = float(P.probs[0])
    lhs = threshold_rate(P, m)
    rhs = 1 - (binary_entropy(p0, P.d) + (1 - p0) * 2 * m) / m
    return {"lhs": lhs, "rhs": rhs, "gap": lhs - rhs, "holds": lhs >= rhs - 1e-10}


def two_stage_rate(m: int, n: int, R: float) -> float:
    """Overall rate (m/n) R of an outer code of rate R over inner blocks carrying m of n digits."""
    if m < 1 or n < 1:
        raise PreconditionError("m and n must be positive")
    return m / n * R


def padded_rate(m: int, n: int, R: float, blocks: int, extra: int) -> float:
    """Rate after appending a trivial one-dimensional code on ``extra`` leftover digits."""
    if blocks < 1 or extra < 0:
        raise PreconditionError("need blocks >= 1 and extra >= 0")
    return m * blocks * R / (n * blocks + extra)
