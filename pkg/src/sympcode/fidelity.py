"""Entanglement fidelity of codes under channels and the coset-sum identities it obeys."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from .channels import ErrorDistribution, KrausChannel, weyl_error_distribution
from .codes import SymplecticCodeFamily, recovery
from .fflin import PreconditionError
from .weyl import weyl_stack

WEYL_TOL = 1e-10
CHANNEL_TOL = 1e-9


def _check_state(rho: np.ndarray, tol: float = 1e-9) -> None:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise PreconditionError("state must be a square matrix")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise PreconditionError("state is not Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise PreconditionError("state does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise PreconditionError("state is not positive semi-definite")


def fidelity_from_kraus(rho: np.ndarray, kraus: np.ndarray) -> float:
    """sum_K |tr(rho K)|^2 (no input validation)."""
    amps = np.einsum("ij,kji->k", rho, kraus)
    return float(np.sum(np.abs(amps) ** 2))


def fidelity_by_purification(rho: np.ndarray, B: KrausChannel) -> float:
    """<Phi| [Id (x) B](|Phi><Phi|) |Phi> with Phi = sum_i sqrt(l_i) |i> (x) |e_i>."""
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 0, None)
    D = rho.shape[0]
    # Phi as a D x D matrix: rows index the reference system.
    Phi = (np.sqrt(vals)[:, None] * vecs.T).astype(complex)
    phi = Phi.reshape(-1)
    out = np.zeros((D * D, D * D), dtype=complex)
    for K in B.kraus:
        v = (Phi @ K.T).reshape(-1)  # (I (x) K) Phi
        out += np.outer(v, v.conj())
    return float(np.real(phi.conj() @ out @ phi))


def entanglement_fidelity(rho, B: KrausChannel, cross_check: bool = False) -> float:
    """Entanglement fidelity of rho under B; unnormalized if B is trace decreasing."""
    rho = np.asarray(rho, dtype=complex)
    _check_state(rho)
    if rho.shape[0] != B.dim:
        raise PreconditionError("state and channel dimensions differ")
    f = fidelity_from_kraus(rho, B.kraus)
    if cross_check:
        g = fidelity_by_purification(rho, B)
        if abs(f - g) > 1e-12:
            raise AssertionError(f"fidelity routes disagree: {f} vs {g}")
    return f


def maximally_mixed(V: np.ndarray) -> np.ndarray:
    """Projector onto the column span of the orthonormal V, divided by its rank."""
    return V @ V.conj().T / V.shape[1]


@dataclass
class FidelityReport:
    simulated: float
    formula: float
    discrepancy: float
    per_syndrome: dict = field(default_factory=dict)
    per_component: dict = field(default_factory=dict)
    per_t: dict = field(default_factory=dict)
    worst_t: int | None = None

    def ok(self, tol: float) -> bool:
        return self.discrepancy <= tol

    def to_dict(self) -> dict:
        return asdict(self)


def _component_amplitudes(code: SymplecticCodeFamily, s: int, kraus: np.ndarray) -> np.ndarray:
    """a[t, K] = tr(pi_s R_t^(s) K) for every relative syndrome t."""
    rho = maximally_mixed(code.code_basis(s))
    R = recovery(code, s).components
    M = np.einsum("ij,tjk->tik", rho, R)
    # tr(M K) = vec(M) . vec(K^T)
    Kt = np.transpose(kraus, (0, 2, 1)).reshape(kraus.shape[0], -1)
    return M.reshape(M.shape[0], -1) @ Kt.T


def coset_mass(code: SymplecticCodeFamily, P: ErrorDistribution, t: int) -> float:
    """P(x_hat(t) + L)."""
    return P.mass((code.transversal[t] + code.L.elements()) % code.d)


def correctable_set(code: SymplecticCodeFamily) -> np.ndarray:
    """J = union_t (x_hat(t) + L)."""
    Lel = code.L.elements()
    return np.vstack([(x + Lel) % code.d for x in code.transversal])


def fe_pauli_closed_form(code: SymplecticCodeFamily, P: ErrorDistribution) -> FidelityReport:
    """Compare dense F_e(pi_{C(s)}, D^(s,t) W_P) with the coset sum P(x_hat(t) + L) for all s, t."""
    if code.transversal is None:
        raise PreconditionError("code has no transversal")
    if (P.d, P.m) != (code.d, code.n):
        raise PreconditionError("distribution lives on the wrong space")
    support = np.nonzero(P.probs > 0)[0]
    N = weyl_stack(code.d, code.n)[support]
    formula_t = np.array([coset_mass(code, P, t) for t in range(code.num_syndromes)])
    per_component = {}
    per_syndrome = {}
    disc = 0.0
    worst = 0
    for s in range(code.num_syndromes):
        a = _component_amplitudes(code, s, N)
        f = (np.abs(a) ** 2) @ P.probs[support]
        for t, val in enumerate(f):
            per_component[f"{s},{t}"] = float(val)
            err = abs(val - formula_t[t])
            if err > disc:
                disc, worst = float(err), t
        per_syndrome[str(s)] = float(f.sum())
    simulated = float(np.mean(list(per_syndrome.values())))
    formula = float(formula_t.sum())
    disc = max(disc, max(abs(v - formula) for v in per_syndrome.values()))
    return FidelityReport(
        simulated=simulated,
        formula=formula,
        discrepancy=float(disc),
        per_syndrome=per_syndrome,
        per_component=per_component,
        per_t={str(t): float(v) for t, v in enumerate(formula_t)},
        worst_t=worst,
    )


def theorem1_check(code: SymplecticCodeFamily, B: KrausChannel) -> FidelityReport:
    """Syndrome-averaged F_e(pi_{C(s)}, D^(s,t) B) against the P_B coset sum, per t and summed."""
    if code.transversal is None:
        raise PreconditionError("code has no transversal")
    if (B.d, B.n) != (code.d, code.n):
        raise PreconditionError("channel and code dimensions differ")
    PB = weyl_error_distribution(B)
    T = code.num_syndromes
    F = np.zeros((T, T))  # F[s, t]
    for s in range(T):
        F[s] = (np.abs(_component_amplitudes(code, s, B.kraus)) ** 2).sum(axis=1)
    lhs = F.mean(axis=0)
    rhs = np.array([coset_mass(code, PB, t) for t in range(T)])
    errs = np.abs(lhs - rhs)
    simulated = float(lhs.sum())
    formula = PB.mass(correctable_set(code))
    disc = max(float(errs.max()), abs(simulated - formula))
    return FidelityReport(
        simulated=simulated,
        formula=float(formula),
        discrepancy=float(disc),
        per_syndrome={str(s): float(F[s].sum()) for s in range(T)},
        per_component={f"{s},{t}": float(F[s, t]) for s in range(T) for t in range(T)},
        per_t={str(t): float(lhs[t]) for t in range(T)},
        worst_t=int(errs.argmax()),
    )


def pure_state_fidelity(phi: np.ndarray, B: KrausChannel) -> float:
    """<phi| B(|phi><phi|) |phi> = sum_K |<phi|K|phi>|^2."""
    amps = np.einsum("i,kij,j->k", phi.conj(), B.kraus, phi)
    return float(np.sum(np.abs(amps) ** 2))


def min_pure_fidelity_estimate(H, B: KrausChannel, restarts: int = 8, seed: int = 0) -> float:
    """Upper bound on min_phi <phi|B(phi)|phi> over unit phi in span(H), by multi-start descent.

    Restart i always starts from the same point, so more restarts never raise the value.
    """
    H = np.asarray(H, dtype=complex)
    m = H.shape[1]
    Ks = np.einsum("ai,kab,bj->kij", H.conj(), B.kraus, H)

    def objective(c):
        v = c[:m] + 1j * c[m:]
        nrm = np.vdot(v, v).real
        Kv = Ks @ v
        amps = Kv @ v.conj()
        f = np.sum(np.abs(amps) ** 2) / nrm**2
        # gradient of sum |v^dag K v|^2 / |v|^4 w.r.t. real and imaginary parts
        Kdv = np.einsum("kji,j->ki", Ks.conj(), v)
        g = 2 * (np.einsum("k,ki->i", amps.conj(), Kv) + np.einsum("k,ki->i", amps, Kdv)) / nrm**2
        g = g - 4 * f * v / nrm
        return f, np.concatenate([g.real, g.imag])

    best = 1.0
    for i in range(restarts):
        rng = np.random.default_rng([seed, i])
        x0 = rng.standard_normal(2 * m)
        res = optimize.minimize(objective, x0, jac=True, method="L-BFGS-B")
        v = res.x[:m] + 1j * res.x[m:]
        val = pure_state_fidelity(H @ (v / np.linalg.norm(v)), B)
        best = min(best, val)
    return float(best)


def min_pure_fidelity_grid(B: KrausChannel, points: int = 400) -> float:
    """Minimum pure-state fidelity of a one-qubit channel over a Bloch-sphere grid."""
    if B.dim != 2:
        raise PreconditionError("grid oracle is for a single qubit")
    theta = np.linspace(0, np.pi, points)
    phi = np.linspace(0, 2 * np.pi, 2 * points, endpoint=False)
    T, Ph = np.meshgrid(theta, phi, indexing="ij")
    psi = np.stack([np.cos(T / 2), np.exp(1j * Ph) * np.sin(T / 2)], axis=-1).reshape(-1, 2)
    amps = np.einsum("pi,kij,pj->pk", psi.conj(), B.kraus, psi)
    return float(np.min(np.sum(np.abs(amps) ** 2, axis=1)))


def fidelity_inequalities_check(H, B: KrausChannel, restarts: int = 8, seed: int = 0) -> dict:
    """F_e(pi_H, B) <= mean pure fidelity over the columns of H (asserted); the 3/2 bound reported.

    The 3/2 bound is only asserted for a full one-qubit space, where the grid
    oracle pins F_p to about 1e-3.
    """
    H = np.asarray(H, dtype=complex)
    Fe = fidelity_from_kraus(maximally_mixed(H), B.kraus)
    basis_avg = float(np.mean([pure_state_fidelity(H[:, j], B) for j in range(H.shape[1])]))
    Fp = min_pure_fidelity_estimate(H, B, restarts, seed)
    report = {
        "entanglement_fidelity": Fe,
        "basis_average_fidelity": basis_avg,
        "average_bound_holds": Fe <= basis_avg + WEYL_TOL,
        "pure_fidelity_estimate": Fp,
        "one_minus_fe": 1 - Fe,
        "three_halves_one_minus_fp": 1.5 * (1 - Fp),
        "three_halves_asserted": False,
    }
    if B.dim == 2 and H.shape[1] == 2:
        Fp_grid = min_pure_fidelity_grid(B)
        report["pure_fidelity_grid"] = Fp_grid
        report["three_halves_asserted"] = True
        report["three_halves_holds"] = 1 - Fe <= 1.5 * (1 - Fp_grid) + 1e-3
    return report
