"""One-way symplectic distillation and the recursive two-way cat-code protocol."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ErrorDistribution, KrausChannel, bell_coefficients, choi, twirl_choi, weyl_channel
from .codes import SymplecticCodeFamily, build_code, recovery
from .fflin import FSubspace, HyperbolicFrame, PreconditionError, expand_in_frame, vector_to_index
from .fidelity import fe_pauli_closed_form
from .weyl import bell_basis

CAT_STABILIZER = (0, 1, 0, 1)
CAT_FRAME_G = ((0, 1, 0, 1), (0, 0, 0, 1))
CAT_FRAME_H = ((1, 0, 0, 0), (1, 0, 1, 0))
ZERO_PROB = 1e-14


def cat_code() -> SymplecticCodeFamily:
    """The [[2,1]] code with stabilizer Z (x) Z, built on a fixed frame so labels are canonical."""
    L = FSubspace(2, 2, [CAT_STABILIZER])
    frame = HyperbolicFrame(
        d=2, g=np.array(CAT_FRAME_G, dtype=np.int64), h=np.array(CAT_FRAME_H, dtype=np.int64), code_k=1
    )
    return build_code(L, frame=frame, transversal="lexicographic")


def _syndrome_shift(code: SymplecticCodeFamily, s: int) -> np.ndarray:
    """Permutation matrix sending basis index (s', u) to (s' - s, u)."""
    d, r, k = code.d, code.n - code.k, code.k
    D = d**code.n
    w = d**k
    P = np.zeros((D, D))
    for sp in range(d**r):
        sv = np.array([(sp // d**j) % d for j in range(r - 1, -1, -1)])
        ss = np.array([(s // d**j) % d for j in range(r - 1, -1, -1)])
        target = vector_to_index((sv - ss) % d, d) if r else 0
        for u in range(w):
            P[target * w + u, sp * w + u] = 1
    return P


def relabeling_unitaries(code: SymplecticCodeFamily, s: int) -> tuple[np.ndarray, np.ndarray]:
    """(U_A, U_B) taking Alice's conj-basis and Bob's code basis from syndrome s to syndrome 0."""
    V = code.basis
    P = _syndrome_shift(code, s)
    U_B = V @ P @ V.conj().T
    return U_B.conj(), U_B


def relabeling_defect(code: SymplecticCodeFamily) -> float:
    """max |(conj(U) (x) U)|Psi> - |Psi>| for U the code-basis change."""
    V = code.basis
    D = V.shape[0]
    psi = np.eye(D).reshape(-1) / np.sqrt(D)
    return float(np.abs(np.kron(V.conj(), V) @ psi - psi).max())


def _target_state(code: SymplecticCodeFamily) -> np.ndarray:
    V0 = code.code_basis(0)
    W = np.kron(V0.conj(), V0)
    k = V0.shape[1]
    return W @ (np.eye(k).reshape(-1) / np.sqrt(k))


def _protocol_branches(code: SymplecticCodeFamily, state: np.ndarray, accept=None):
    """Yield the unnormalized state after Alice's outcome s, Bob's D^(s,t) (t in accept), and relabeling."""
    V = code.basis
    D = V.shape[0]
    I = np.eye(D)
    for s in range(code.num_syndromes):
        Vs = code.code_basis(s).conj()
        PA = np.kron(Vs @ Vs.conj().T, I)
        rho = PA @ state @ PA
        comps = recovery(code, s).components
        ts = range(len(comps)) if accept is None else accept
        out = np.zeros_like(rho)
        for t in ts:
            R = np.kron(I, comps[t])
            out += R @ rho @ R.conj().T
        UA, UB = relabeling_unitaries(code, s)
        U = np.kron(UA, UB)
        yield s, U @ out @ U.conj().T


def one_way_protocol(B: KrausChannel, code: SymplecticCodeFamily) -> float:
    """Fidelity of the one-way protocol on choi(B) to the d^k-dimensional maximally entangled target."""
    if code.transversal is None:
        raise PreconditionError("code has no transversal")
    if (B.d, B.n) != (code.d, code.n):
        raise PreconditionError("channel and code dimensions differ")
    state = choi(B)
    target = _target_state(code)
    total = 0.0
    for _, rho in _protocol_branches(code, state):
        total += float(np.real(target.conj() @ rho @ target))
    return total


@dataclass
class TwoWayRound:
    accept: tuple
    input: ErrorDistribution
    output: ErrorDistribution | None
    success_probability: float
    off_diagonal: float = 0.0


def _pair_distribution(P: ErrorDistribution, P2: ErrorDistribution | None) -> ErrorDistribution:
    if P.m != 1 or (P2 is not None and (P2.m != 1 or P2.d != P.d)):
        raise PreconditionError("two-way rounds act on single-pair distributions")
    return P.product(P if P2 is None else P2)


def _check_accept(code: SymplecticCodeFamily, accept) -> tuple:
    T = tuple(sorted({int(t) for t in accept}))
    if not T:
        raise PreconditionError("accept set is empty")
    if any(t < 0 or t >= code.num_syndromes for t in T):
        raise PreconditionError("accept set contains an invalid syndrome")
    return T


def two_way_round_dense(
    P: ErrorDistribution, accept=(0,), code: SymplecticCodeFamily | None = None, P2: ErrorDistribution | None = None
) -> TwoWayRound:
    """One post-selected round, simulated on the full bipartite density matrix of two pairs."""
    code = cat_code() if code is None else code
    if code.n != 2 or code.k != 1:
        raise PreconditionError("two-way rounds use a two-digit code with one logical digit")
    T = _check_accept(code, accept)
    pair = _pair_distribution(P, P2)
    state = choi(weyl_channel(pair))
    V0 = code.code_basis(0)
    W = np.kron(V0.conj(), V0)
    sigma = np.zeros((W.shape[1], W.shape[1]), dtype=complex)
    for _, rho in _protocol_branches(code, state, accept=T):
        sigma += W.conj().T @ rho @ W
    p = float(np.real(np.trace(sigma)))
    if p <= ZERO_PROB:  # round-off from annihilated branches
        return TwoWayRound(T, P, None, 0.0)
    Bb = bell_basis(code.d, 1)
    coeffs = Bb.conj().T @ (sigma / p) @ Bb
    diag = np.real(np.diag(coeffs))
    off = float(np.abs(coeffs - np.diag(np.diag(coeffs))).max())
    out = ErrorDistribution(code.d, 1, np.clip(diag, 0, None) / np.clip(diag, 0, None).sum())
    return TwoWayRound(T, P, out, p, off)


def two_way_round_recurrence(
    P: ErrorDistribution, accept=(0,), code: SymplecticCodeFamily | None = None, P2: ErrorDistribution | None = None
) -> TwoWayRound:
    """The same round by coset bookkeeping on the 4-vector of Bell weights.

    A two-pair error x with relative syndrome t in ``accept`` leaves the residual
    x - x_hat(t) in L^perp, whose logical coordinates (w, z) act on the kept
    pair as X^{-z} Z^{w}, i.e. the Bell label (-z, w).
    """
    code = cat_code() if code is None else code
    T = _check_accept(code, accept)
    pair = _pair_distribution(P, P2)
    d, r = code.d, code.n - code.k
    Q = np.zeros(d * d)
    syn = code.syndromes(pair.labels())
    for x, sv, px in zip(pair.labels(), syn, pair.probs):
        if px == 0:
            continue
        t = vector_to_index(sv, d)
        if t not in T:
            continue
        w, z = expand_in_frame((x - code.transversal[t]) % d, code.frame)
        Q[vector_to_index([(-z[r]) % d, w[r]], d)] += px
    p = float(Q.sum())
    out = ErrorDistribution(d, 1, Q / p) if p > 0 else None
    return TwoWayRound(T, P, out, p)


def two_way_cat_round(P: ErrorDistribution, accept=(0,), method: str = "dense", **kw) -> TwoWayRound:
    if method == "dense":
        return two_way_round_dense(P, accept, **kw)
    if method == "recurrence":
        return two_way_round_recurrence(P, accept, **kw)
    raise ValueError(f"unknown method {method!r}")


def werner_distribution(F: float, d: int = 2) -> ErrorDistribution:
    """Isotropic Bell-diagonal weights: F on the identity label, the rest shared equally."""
    p = np.full(d * d, (1 - F) / (d * d - 1))
    p[0] = F
    return ErrorDistribution(d, 1, p)


def bell_diagonal_input(S: np.ndarray, d: int = 2) -> ErrorDistribution:
    """Twirl a general two-party state of one pair and return its Bell weights."""
    T = twirl_choi(S, d, 1)
    w = np.real(np.diag(bell_coefficients(T, d, 1)))
    return ErrorDistribution(d, 1, np.clip(w, 0, None) / np.clip(w, 0, None).sum())


def isotropic_twirl(P: ErrorDistribution) -> ErrorDistribution:
    """Average over U (x) conj(U): keeps P(0) and equalizes the other labels."""
    return werner_distribution(float(P.probs[0]), P.d)


def iterate_two_way(
    P0: ErrorDistribution,
    rounds: int,
    accept=(0,),
    twirl: str = "isotropic",
    final_code: SymplecticCodeFamily | None = None,
    method: str = "recurrence",
    code: SymplecticCodeFamily | None = None,
) -> list[dict]:
    """Trajectory of repeated two-way rounds on adjacent pairs.

    ``twirl`` is applied between rounds: ``isotropic`` re-symmetrizes to a
    Werner/isotropic state; ``weyl`` is the discrete twirl, a no-op on the
    Bell-diagonal states tracked here.  An optional ``final_code`` runs the
    one-way protocol on its block length of surviving pairs.
    """
    if rounds < 0:
        raise PreconditionError("rounds must be >= 0")
    if twirl not in ("isotropic", "weyl"):
        raise ValueError(f"unknown twirl {twirl!r}")
    code = cat_code() if code is None else code
    P = P0
    yld = 1.0
    traj = [{"round": 0, "fidelity": float(P.probs[0]), "success_prob": 1.0, "yield": 1.0}]
    for r in range(1, rounds + 1):
        res = two_way_cat_round(P, accept, method=method, code=code)
        if res.output is None:
            traj.append({"round": r, "fidelity": 0.0, "success_prob": 0.0, "yield": 0.0})
            return traj
        yld *= res.success_probability / 2
        P = isotropic_twirl(res.output) if twirl == "isotropic" else res.output
        traj.append(
            {"round": r, "fidelity": float(P.probs[0]), "success_prob": res.success_probability, "yield": yld}
        )
    if final_code is not None:
        if final_code.d != P.d:
            raise PreconditionError("final code has the wrong modulus")
        block = P.power(final_code.n)
        rep = fe_pauli_closed_form(final_code, block)
        traj.append(
            {
                "round": "final",
                "fidelity": rep.formula,
                "success_prob": 1.0,
                "yield": yld * final_code.k / final_code.n,
            }
        )
    return traj
