"""Seeded identity suites behind ``sympcode verify``.

Every suite returns a report dict with one entry per check.  Randomness comes
from labelled substreams of a single seed, so adding instances to one suite
never shifts the draws of another.
"""

from __future__ import annotations

import zlib

import numpy as np

from . import channels as ch
from .codes import build_code
from .distill import cat_code, iterate_two_way, one_way_protocol, two_way_round_dense, two_way_round_recurrence
from .distill import werner_distribution
from .exponent import entropy_lower_bound_check, exponent_grid, exponent_line, threshold_rate
from .fflin import random_self_orthogonal, symplectic_form
from .fidelity import WEYL_TOL, CHANNEL_TOL, fe_pauli_closed_form, fidelity_from_kraus, maximally_mixed
from .fidelity import pure_state_fidelity, theorem1_check
from .weyl import bell_basis, omega, weyl

SUITES = (
    "weyl",
    "bell",
    "twirl",
    "choi",
    "lemma2",
    "theorem1",
    "oneway",
    "twoway",
    "exponent",
    "inequalities",
)


def substream(seed: int, label: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(label.encode())]))


def _subseed(rng: np.random.Generator) -> int:
    return int(rng.integers(2**32))


def _check(name: str, discrepancy: float, tolerance: float, **extra) -> dict:
    out = {"check": name, "discrepancy": float(discrepancy), "tolerance": tolerance}
    out["passed"] = bool(discrepancy <= tolerance)
    out.update(extra)
    return out


def _flag(name: str, passed: bool, **extra) -> dict:
    out = {"check": name, "discrepancy": 0.0 if passed else 1.0, "tolerance": 0.0, "passed": bool(passed)}
    out.update(extra)
    return out


def _pick(cases, d, n):
    sel = [c for c in cases if (d is None or c[0] == d) and (n is None or c[1] == n)]
    if sel:
        return sel
    if d is not None and n is not None:
        return [(d, n)]
    raise ValueError(f"no default case matches d={d}, n={n}")


def suite_weyl(seed, d=None, n=None, k=None, count=None):
    """Commutation N_y N_y' = w^<y,y'> N_y' N_y on random label pairs."""
    cases = _pick([(dd, nn) for dd in (2, 3, 5) for nn in (1, 2, 3)], d, n)
    pairs = count or 500
    checks = []
    for dd, nn in cases:
        rng = substream(seed, f"weyl/{dd}/{nn}")
        w = omega(dd)
        worst = 0.0
        for _ in range(pairs):
            y, y2 = rng.integers(0, dd, size=(2, 2 * nn))
            A, B = weyl(y, dd), weyl(y2, dd)
            phase = w ** symplectic_form(y, y2, dd)
            worst = max(worst, float(np.abs(A @ B - phase * (B @ A)).max()))
        checks.append(_check(f"commutation d={dd} n={nn}", worst, 1e-12, pairs=pairs))
    return checks


def suite_bell(seed, d=None, n=None, k=None, count=None):
    """Exhaustive Bell Gram matrix against the identity."""
    checks = []
    for dd, nn in _pick([(2, 1), (2, 2), (3, 1)], d, n):
        Bb = bell_basis(dd, nn)
        err = float(np.abs(Bb.conj().T @ Bb - np.eye(Bb.shape[1])).max())
        checks.append(_check(f"bell gram d={dd} n={nn}", err, 1e-12))
    return checks


def suite_twirl(seed, d=None, n=None, k=None, count=None):
    checks = []
    for dd, nn in _pick([(2, 1), (2, 2), (3, 1)], d, n):
        rng = substream(seed, f"twirl/{dd}/{nn}")
        D2 = dd ** (2 * nn)
        worst = 0.0
        for _ in range(count or 20):
            S = ch.random_density_matrix(D2, rng, rank=int(rng.integers(1, D2 + 1)))
            worst = max(worst, float(np.abs(ch.twirl_choi(S, dd, nn) - ch.bell_diagonal_part(S, dd, nn)).max()))
        checks.append(_check(f"twirl d={dd} n={nn}", worst, WEYL_TOL, states=count or 20))
    return checks


def suite_choi(seed, d=None, n=None, k=None, count=None):
    rng = substream(seed, "choi")
    cases = _pick([(2, 1), (2, 2), (3, 1)], d, n)
    worst = 0.0
    total = count or 50
    for i in range(total):
        dd, nn = cases[i % len(cases)]
        D = dd**nn
        B = ch.random_tpcp(dd, nn, int(rng.integers(1, D * D + 1)), _subseed(rng))
        S = ch.choi(B)
        worst = max(worst, float(np.abs(ch.choi(ch.channel_from_choi(S, dd, nn)) - S).max()))
    return [_check("choi round trip", worst, CHANNEL_TOL, channels=total)]


def _random_code(rng, d, n, k, P=None):
    L = random_self_orthogonal(n, k, d, _subseed(rng))
    policy = "most_likely" if P is not None and rng.random() < 0.5 else "lexicographic"
    return build_code(L, seed=_subseed(rng), transversal=policy, distribution=P)


def suite_lemma2(seed, d=None, n=None, k=None, count=None):
    """Dense fidelity of every (s, t) component under a Weyl channel against the coset mass."""
    rng = substream(seed, "lemma2")
    worst, worst_case = 0.0, None
    total = count or 50
    shapes = [(dd, nn) for dd in (2, 3) for nn in (1, 2, 3)]
    for i in range(total):
        dd, nn = shapes[i % len(shapes)]
        dd, nn = d or dd, n or nn
        kk = k if k is not None else int(rng.integers(0, nn + 1))
        P = ch.random_distribution(dd, nn, rng, sparsity=float(rng.choice([0.0, 0.5, 0.9])))
        code = _random_code(rng, dd, nn, kk, P)
        rep = fe_pauli_closed_form(code, P)
        if rep.discrepancy >= worst:
            worst, worst_case = rep.discrepancy, {"instance": i, "d": dd, "n": nn, "k": kk}
    checks = [_check("coset sum, every s and t", worst, WEYL_TOL, instances=total, worst_case=worst_case)]
    cat = cat_code()
    for p in (0.0, 0.1, 0.3):
        rep = fe_pauli_closed_form(cat, ch.bit_flip_distribution(2, p))
        err = max(abs(v - (1 - p)) for v in rep.per_syndrome.values())
        checks.append(_check(f"cat code bit-flip p={p}", max(err, rep.discrepancy), WEYL_TOL, fidelity=rep.formula))
    return checks


def suite_theorem1(seed, d=None, n=None, k=None, count=None):
    """Syndrome-averaged fidelity of a general channel against the P_B coset sum."""
    dd = d or 2
    if n is not None:
        plans = [(n, k if k is not None else 1, count or 20)]
    else:
        plans = [(2, 1, count or 20), (3, None, count or 10)]
    checks = []
    for nn, kk, total in plans:
        rng = substream(seed, f"theorem1/{dd}/{nn}/{kk}")
        D = dd**nn
        worst, sums = 0.0, 0.0
        for i in range(total):
            k_i = kk if kk is not None else 1 + i % 2
            code = _random_code(rng, dd, nn, k_i)
            B = ch.random_tpcp(dd, nn, int(rng.integers(1, min(D * D, 8) + 1)), _subseed(rng))
            rep = theorem1_check(code, B)
            worst = max(worst, rep.discrepancy)
            sums = max(sums, abs(rep.simulated - rep.formula))
        label = f"d={dd} n={nn} k={'1,2' if kk is None else kk}"
        checks.append(_check(f"per-t coset sum {label}", worst, CHANNEL_TOL, channels=total))
        checks.append(_check(f"summed over t {label}", sums, CHANNEL_TOL, channels=total))
    return checks


def suite_oneway(seed, d=None, n=None, k=None, count=None):
    dd, nn = d or 2, n or 2
    kk = 1 if k is None else k
    rng = substream(seed, f"oneway/{dd}/{nn}/{kk}")
    D = dd**nn
    worst = 0.0
    total = count or 10
    for _ in range(total):
        code = _random_code(rng, dd, nn, kk)
        B = ch.random_tpcp(dd, nn, int(rng.integers(1, min(D * D, 8) + 1)), _subseed(rng))
        worst = max(worst, abs(one_way_protocol(B, code) - theorem1_check(code, B).formula))
    return [_check("bipartite protocol vs coset average", worst, CHANNEL_TOL, channels=total)]


def suite_twoway(seed, d=None, n=None, k=None, count=None):
    rng = substream(seed, "twoway")
    code = cat_code()
    worst = 0.0
    total = count or 100
    for i in range(total):
        P = ch.random_distribution(2, 1, rng, sparsity=float(rng.choice([0.0, 0.3])))
        P2 = ch.random_distribution(2, 1, rng) if i % 2 else None
        accept = [(0,), (1,), (0, 1)][int(rng.integers(3))]
        a = two_way_round_dense(P, accept, code, P2)
        b = two_way_round_recurrence(P, accept, code, P2)
        err = abs(a.success_probability - b.success_probability) + a.off_diagonal
        if a.output is not None and b.output is not None:
            err += float(np.abs(a.output.probs - b.output.probs).max())
        elif (a.output is None) != (b.output is None):
            err = 1.0
        worst = max(worst, err)
    checks = [_check("dense round vs recurrence", worst, WEYL_TOL, inputs=total)]
    for F, want in ((0.75, True), (0.25, False)):
        traj = iterate_two_way(werner_distribution(F), 3)
        fid = [t["fidelity"] for t in traj]
        increasing = all(b > a for a, b in zip(fid, fid[1:]))
        checks.append(
            _flag(f"werner F={F} strictly increasing is {want}", increasing == want, trajectory=fid)
        )
    return checks


def _random_simplex(rng, size):
    alpha = float(rng.choice([0.3, 1.0, 3.0]))
    p = rng.dirichlet(np.full(size, alpha))
    p = np.clip(p, 1e-12, None)
    return p / p.sum()


def suite_exponent(seed, d=None, n=None, k=None, count=None):
    checks = []
    rng = substream(seed, "exponent/agree")
    worst = 0.0
    agree_total = count or 6
    for _ in range(agree_total):
        P = ch.ErrorDistribution(2, 1, _random_simplex(rng, 4))
        for R in (0.1, 0.5, 0.9):
            worst = max(worst, abs(exponent_grid(R, P).value - exponent_line(R, P).value))
    checks.append(_check("grid vs line search, 4-point alphabet", worst, 1e-3, instances=agree_total * 3))

    rng = substream(seed, "exponent/threshold")
    bad = 0
    for _ in range(50):
        while True:
            dd, mm = [(2, 1), (3, 1), (2, 2)][int(rng.integers(3))]
            P = ch.ErrorDistribution(dd, mm, _random_simplex(rng, dd ** (2 * mm)))
            thr = threshold_rate(P)
            if 0.1 < thr < 0.9:
                break
        below = exponent_line(thr - 0.05, P).value
        above = exponent_line(thr + 0.05, P).value
        bad += int(not (below > 0 and above <= 1e-12))
    checks.append(_flag("positive exactly below 1 - H(P)/m (margin 0.05)", bad == 0, instances=50, violations=bad))

    rng = substream(seed, "exponent/monotone")
    worst = 0.0
    for _ in range(10):
        P = ch.ErrorDistribution(2, 1, _random_simplex(rng, 4))
        vals = [exponent_line(R, P).value for R in np.linspace(0, 1, 11)]
        worst = max(worst, max(b - a for a, b in zip(vals, vals[1:])))
    checks.append(_check("nonincreasing in R on 11 rates", max(worst, 0.0), 1e-12, instances=10))
    return checks


def suite_inequalities(seed, d=None, n=None, k=None, count=None):
    total = count or 100
    rng = substream(seed, "inequalities/entropy")
    worst = 0.0
    for _ in range(total):
        dd, mm = [(2, 1), (3, 1), (2, 2)][int(rng.integers(3))]
        P = ch.random_distribution(dd, mm, rng, sparsity=float(rng.choice([0.0, 0.5])))
        worst = max(worst, -entropy_lower_bound_check(P)["gap"])
    checks = [_check("threshold >= binary-entropy bound", max(worst, 0.0), WEYL_TOL, instances=total)]

    rng = substream(seed, "inequalities/fidelity")
    dd, nn = d or 2, n or 2
    D = dd**nn
    worst = 0.0
    for _ in range(total):
        B = ch.random_tpcp(dd, nn, int(rng.integers(1, D * D + 1)), _subseed(rng))
        dim = int(rng.integers(1, D + 1))
        H = ch.random_unitary(D, rng)[:, :dim]
        Fe = fidelity_from_kraus(maximally_mixed(H), B.kraus)
        avg = float(np.mean([pure_state_fidelity(H[:, j], B) for j in range(dim)]))
        worst = max(worst, Fe - avg)
    checks.append(_check("F_e <= mean basis fidelity", max(worst, 0.0), WEYL_TOL, instances=total))
    return checks


_RUNNERS = {name: globals()[f"suite_{name}"] for name in SUITES}


def run_suite(name: str, seed: int, d=None, n=None, k=None, count=None) -> dict:
    checks = _RUNNERS[name](seed, d=d, n=n, k=k, count=count)
    return {
        "suite": name,
        "passed": all(c["passed"] for c in checks),
        "max_discrepancy": max(c["discrepancy"] for c in checks),
        "checks": checks,
    }


def run(suite: str, seed: int, d=None, n=None, k=None, count=None) -> dict:
    names = SUITES if suite == "all" else (suite,)
    reports = [run_suite(s, seed, d, n, k, count) for s in names]
    return {
        "seed": seed,
        "config": {"suite": suite, "d": d, "n": n, "k": k, "seeds": count},
        "passed": all(r["passed"] for r in reports),
        "suites": reports,
    }
