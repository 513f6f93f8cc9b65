"""Symplectic (stabilizer) code families: code subspaces, projectors, transversals, recoveries."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .channels import ErrorDistribution, KrausChannel
from .fflin import (
    FSubspace,
    HyperbolicFrame,
    PreconditionError,
    all_vectors,
    check_prime,
    hyperbolic_complete,
    is_self_orthogonal,
    symplectic_dual,
    syndromes_of_all,
    vector_to_index,
)
from .weyl import omega, weyl


class ConstructionError(RuntimeError):
    pass


def _power(M: np.ndarray, e: int) -> np.ndarray:
    return np.linalg.matrix_power(M, int(e))


@dataclass(frozen=True, eq=False)
class SymplecticCodeFamily:
    """The d^{n-k} joint eigenspaces C^(s) of {N_g : g in L}.

    ``basis`` has the vectors |s_1..s_n> as columns, indexed lexicographically
    by (s, u) with s in F^{n-k} the syndrome and u in F^k the logical label,
    so C^(s) is the contiguous column block s * d^k ... (s+1) * d^k - 1.
    ``transversal[t]`` is the representative x_hat(t) of syndrome t.
    """

    L: FSubspace
    frame: HyperbolicFrame
    basis: np.ndarray = field(repr=False)
    transversal: np.ndarray | None = None

    @property
    def d(self) -> int:
        return self.L.d

    @property
    def n(self) -> int:
        return self.L.n

    @property
    def k(self) -> int:
        return self.frame.code_k

    @property
    def num_syndromes(self) -> int:
        return self.d ** (self.n - self.k)

    @property
    def stabilizer(self) -> np.ndarray:
        return self.frame.stabilizer()

    def syndrome_labels(self) -> np.ndarray:
        return all_vectors(self.n - self.k, self.d)

    def syndrome_index(self, s) -> int:
        return vector_to_index(s, self.d)

    def code_basis(self, s) -> np.ndarray:
        """Orthonormal columns |s, u>, u in F^k, spanning C^(s)."""
        i = s if isinstance(s, (int, np.integer)) else self.syndrome_index(s)
        w = self.d**self.k
        return self.basis[:, i * w : (i + 1) * w]

    def syndromes(self, X) -> np.ndarray:
        return syndromes_of_all(X, self.stabilizer, self.d)

    def with_transversal(self, transversal) -> SymplecticCodeFamily:
        T = np.asarray(transversal, dtype=np.int64) % self.d
        if T.shape != (self.num_syndromes, 2 * self.n):
            raise ValueError("transversal has wrong shape")
        syn = self.syndromes(T)
        if not np.array_equal(syn, self.syndrome_labels()):
            raise ValueError("transversal entry t does not have syndrome t")
        T.setflags(write=False)
        return replace(self, transversal=T)


def logical_x(frame: HyperbolicFrame, z, d: int) -> np.ndarray:
    """prod_i (N_{h_i})^{z_i}."""
    D = d**frame.n
    out = np.eye(D, dtype=complex)
    for hi, zi in zip(frame.h, z):
        if zi % d:
            out = out @ _power(weyl(hi, d), zi % d)
    return out


def logical_z(frame: HyperbolicFrame, w, d: int) -> np.ndarray:
    """prod_i (N_{g_i})^{w_i}."""
    D = d**frame.n
    out = np.eye(D, dtype=complex)
    for gi, wi in zip(frame.g, w):
        if wi % d:
            out = out @ _power(weyl(gi, d), wi % d)
    return out


def _fix_phase(v: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(v) > 1e-9))
    return v * (abs(v[j]) / v[j])


def build_code(
    L: FSubspace,
    seed: int = 0,
    frame: HyperbolicFrame | None = None,
    transversal="auto",
    distribution: ErrorDistribution | None = None,
) -> SymplecticCodeFamily:
    """Construct the code family of a self-orthogonal L.

    |0..0> is the image of a seeded random vector under the group-average
    projector prod_i d^{-1} sum_c (N_{g_i})^c, which fixes every eigenvalue
    mu_i to one; the remaining basis vectors are |s> = prod_i (N_{h_i})^{s_i} |0..0>.
    """
    if not is_self_orthogonal(L):
        raise PreconditionError("subspace is not self-orthogonal")
    d, n = L.d, L.n
    check_prime(d)
    if frame is None:
        frame = hyperbolic_complete(L, seed)
    elif not frame.is_valid() or FSubspace(d, n, frame.stabilizer()) != L:
        raise PreconditionError("frame is not a hyperbolic completion of L")
    D = d**n

    P = np.eye(D, dtype=complex)
    for g in frame.g:
        N = weyl(g, d)
        avg = np.zeros((D, D), dtype=complex)
        M = np.eye(D, dtype=complex)
        for _ in range(d):
            avg += M
            M = M @ N
        P = P @ (avg / d)

    rng = np.random.default_rng(seed)
    for _ in range(32):
        v = rng.standard_normal(D) + 1j * rng.standard_normal(D)
        psi = P @ v
        norm = np.linalg.norm(psi)
        if norm > 1e-6:
            break
    else:
        raise ConstructionError("joint eigenspace with all eigenvalues one is empty")
    psi0 = _fix_phase(psi / norm)

    cols = np.empty((D, D), dtype=complex)
    for idx, s in enumerate(all_vectors(n, d)):
        cols[:, idx] = logical_x(frame, s, d) @ psi0
    cols.setflags(write=False)
    code = SymplecticCodeFamily(L=L, frame=frame, basis=cols)
    if transversal is None:
        return code
    if isinstance(transversal, str):
        policy = transversal
        if policy == "auto":
            policy = "most_likely" if distribution is not None else "lexicographic"
        return choose_transversal(code, policy, distribution)
    return code.with_transversal(transversal)


def projector(code: SymplecticCodeFamily, s) -> np.ndarray:
    V = code.code_basis(s)
    return V @ V.conj().T


def error_order_key(x: np.ndarray, d: int) -> tuple[int, int]:
    """Sort key used for deterministic tie-breaking among error patterns.

    Fewer non-identity digits first, then colexicographic order (the first
    coordinate is the least significant), so X on digit 1 precedes X on digit 2.
    """
    x = np.asarray(x)
    weight = int(np.count_nonzero(x.reshape(-1, 2).any(axis=1)))
    colex = sum(int(c) * d**i for i, c in enumerate(x))
    return weight, colex


def choose_transversal(
    code: SymplecticCodeFamily, policy: str = "lexicographic", distribution: ErrorDistribution | None = None
) -> SymplecticCodeFamily:
    """Pick x_hat(t) in each syndrome class.

    ``lexicographic``: the first vector of the class under ``error_order_key``.
    ``most_likely``: the argmax of P over the class, ties broken by the same order.
    """
    d, n = code.d, code.n
    X = all_vectors(2 * n, d)
    syn = code.syndromes(X)
    w = d ** np.arange(syn.shape[1] - 1, -1, -1)
    syn_idx = syn @ w if syn.shape[1] else np.zeros(len(X), dtype=np.int64)
    keys = [error_order_key(x, d) for x in X]
    if policy == "lexicographic":
        score = np.zeros(len(X))
    elif policy == "most_likely":
        if distribution is None or distribution.m != n or distribution.d != d:
            raise PreconditionError("most_likely needs an ErrorDistribution on F^{2n}")
        score = -distribution.probs
    else:
        raise ValueError(f"unknown transversal policy {policy!r}")
    T = np.empty((code.num_syndromes, 2 * n), dtype=np.int64)
    for t in range(code.num_syndromes):
        members = np.nonzero(syn_idx == t)[0]
        best = min(members, key=lambda i: (score[i], keys[i]))
        T[t] = X[best]
    return code.with_transversal(T)


@dataclass(frozen=True, eq=False)
class RecoveryOperator:
    """Kraus components R_t = N_{x_hat(t)}^dag Pi_{t+s}, indexed by relative syndrome t."""

    syndrome: int
    components: np.ndarray = field(repr=False)
    d: int = 2
    n: int = 1

    def channel(self, accept=None) -> KrausChannel:
        """D^(s), or sum over t in ``accept`` of D^(s,t)."""
        idx = range(len(self.components)) if accept is None else list(accept)
        return KrausChannel(self.d, self.n, self.components[list(idx)])

    def component(self, t: int) -> KrausChannel:
        return KrausChannel(self.d, self.n, self.components[t])


def _add_syndromes(a: int, b: int, d: int, r: int) -> int:
    va = np.array([(a // d**j) % d for j in range(r - 1, -1, -1)])
    vb = np.array([(b // d**j) % d for j in range(r - 1, -1, -1)])
    return vector_to_index((va + vb) % d, d)


def recovery(code: SymplecticCodeFamily, s) -> RecoveryOperator:
    if code.transversal is None:
        raise PreconditionError("choose a transversal before building recoveries")
    d, r = code.d, code.n - code.k
    si = s if isinstance(s, (int, np.integer)) else code.syndrome_index(s)
    comps = []
    for t in range(code.num_syndromes):
        Pi = projector(code, _add_syndromes(t, si, d, r))
        comps.append(weyl(code.transversal[t], d).conj().T @ Pi)
    return RecoveryOperator(syndrome=int(si), components=np.array(comps), d=d, n=code.n)


def shift_syndrome(code: SymplecticCodeFamily, a: int, b: int) -> int:
    """Index of syndrome a + b."""
    return _add_syndromes(a, b, code.d, code.n - code.k)


def measured_eigenvalues(code: SymplecticCodeFamily, s) -> np.ndarray:
    """Eigenvalue of each stabilizer generator N_{g_i} on C^(s)."""
    V = code.code_basis(s)
    vals = []
    for g in code.stabilizer:
        M = V.conj().T @ weyl(g, code.d) @ V
        vals.append(np.trace(M) / V.shape[1])
    return np.array(vals)


def logical_actions(code: SymplecticCodeFamily, atol: float = 1e-9) -> dict:
    """Check the shift/phase laws of prod N_{h_i}^{z_i} and prod N_{g_i}^{w_i} on every basis vector."""
    d, n = code.d, code.n
    labels = all_vectors(n, d)
    index = {tuple(l): i for i, l in enumerate(labels)}
    w_ = omega(d)
    x_err = z_err = 0.0
    for e in np.eye(n, dtype=np.int64):
        Xbar = logical_x(code.frame, e, d)
        Zbar = logical_z(code.frame, e, d)
        for i, l in enumerate(labels):
            target = code.basis[:, index[tuple((l + e) % d)]]
            x_err = max(x_err, float(np.abs(Xbar @ code.basis[:, i] - target).max()))
            phase = w_ ** int(e @ l)
            z_err = max(z_err, float(np.abs(Zbar @ code.basis[:, i] - phase * code.basis[:, i]).max()))
    gram_err = float(np.abs(code.basis.conj().T @ code.basis - np.eye(d**n)).max())
    report = {"x_shift_error": x_err, "z_phase_error": z_err, "gram_error": gram_err}
    report["ok"] = max(x_err, z_err, gram_err) <= atol
    return report


def check_correctable_set(code: SymplecticCodeFamily, J) -> list[np.ndarray]:
    """Validate J = J_0 + L with J_0 meeting each L^perp coset at most once.

    Returns one representative per L-coset in J; raises PreconditionError naming
    the offending pair otherwise.
    """
    d = code.d
    J = np.atleast_2d(np.asarray(J, dtype=np.int64)) % d
    members = {tuple(x) for x in J}
    Lel = code.L.elements()
    for x in J:
        for l in Lel:
            y = tuple((x + l) % d)
            if y not in members:
                raise PreconditionError(f"J is not a union of L-cosets: {tuple(x)} in J but {y} is not")
    dual = symplectic_dual(code.L)
    reps: list[np.ndarray] = []
    for x in J:
        if any(code.L.contains((x - r) % d) for r in reps):
            continue
        for r in reps:
            if dual.contains((x - r) % d):
                raise PreconditionError(
                    f"{tuple(r)} and {tuple(x)} differ by an element of L^perp outside L"
                )
        reps.append(x)
    return reps


def verify_correctable(code: SymplecticCodeFamily, J, atol: float = 1e-9) -> bool:
    """True iff every N_x, x in J, is undone by D^(s) for every syndrome s (F_e = 1)."""
    from .fidelity import entanglement_fidelity  # local import, fidelity depends on codes

    check_correctable_set(code, J)
    J = np.atleast_2d(np.asarray(J, dtype=np.int64)) % code.d
    for s in range(code.num_syndromes):
        Dch = recovery(code, s).channel()
        V = code.code_basis(s)
        rho = V @ V.conj().T / V.shape[1]
        for x in J:
            err = KrausChannel(code.d, code.n, weyl(x, code.d))
            if entanglement_fidelity(rho, Dch.compose(err)) < 1 - atol:
                return False
    return True
