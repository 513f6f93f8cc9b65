"""Channels as Kraus lists, Choi states, discrete twirling and Weyl-error distributions."""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .fflin import all_vectors, check_prime, vector_to_index
from .weyl import bell_basis, weyl_stack

DEFAULT_MAX_DIM = 4096


class NotCPError(ValueError):
    """Matrix has an eigenvalue below the CP tolerance."""


class DimensionGuardError(ValueError):
    """Requested Choi dimension exceeds the configured limit."""


def max_dim() -> int:
    return int(os.environ.get("SYMPCODE_MAX_DIM", DEFAULT_MAX_DIM))


def guard(d: int, n: int, allow_large: bool = False) -> None:
    if not allow_large and d ** (2 * n) > max_dim():
        raise DimensionGuardError(
            f"d^(2n) = {d ** (2 * n)} exceeds limit {max_dim()}; set SYMPCODE_MAX_DIM to override"
        )


@dataclass(frozen=True, eq=False)
class KrausChannel:
    d: int
    n: int
    kraus: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_prime(self.d)
        K = np.asarray(self.kraus, dtype=complex)
        if K.ndim == 2:
            K = K[None]
        D = self.d**self.n
        if K.shape[1:] != (D, D):
            raise ValueError(f"Kraus operators must be {D}x{D}, got {K.shape[1:]}")
        K.setflags(write=False)
        object.__setattr__(self, "kraus", K)

    @property
    def dim(self) -> int:
        return self.d**self.n

    def completeness_defect(self) -> float:
        S = np.einsum("kji,kjl->il", self.kraus.conj(), self.kraus)
        return float(np.abs(S - np.eye(self.dim)).max())

    @property
    def trace_preserving(self) -> bool:
        return self.completeness_defect() < 1e-10

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def compose(self, first: KrausChannel) -> KrausChannel:
        """The map rho -> self(first(rho))."""
        if (first.d, first.n) != (self.d, self.n):
            raise ValueError("dimension mismatch")
        K = np.einsum("aij,bjk->abik", self.kraus, first.kraus).reshape(-1, self.dim, self.dim)
        return KrausChannel(self.d, self.n, K)

    def tensor(self, other: KrausChannel) -> KrausChannel:
        if other.d != self.d:
            raise ValueError("moduli differ")
        K = np.array([np.kron(a, b) for a in self.kraus for b in other.kraus])
        return KrausChannel(self.d, self.n + other.n, K)


def identity_channel(d: int, n: int) -> KrausChannel:
    return KrausChannel(d, n, np.eye(d**n, dtype=complex))


def unitary_channel(U, d: int, n: int) -> KrausChannel:
    return KrausChannel(d, n, np.asarray(U, dtype=complex))


def apply(B: KrausChannel, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (B.dim, B.dim):
        raise ValueError(f"state is {rho.shape}, channel acts on {B.dim}x{B.dim}")
    return np.einsum("kij,jl,kml->im", B.kraus, rho, B.kraus.conj())


@dataclass(frozen=True, eq=False)
class ErrorDistribution:
    """Probability mass on F_d^{2m}, stored densely in lexicographic label order."""

    d: int
    m: int
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_prime(self.d)
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.size != self.d ** (2 * self.m):
            raise ValueError(f"expected {self.d ** (2 * self.m)} probabilities, got {p.size}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_dict(cls, d: int, m: int, table: dict) -> ErrorDistribution:
        p = np.zeros(d ** (2 * m))
        for key, val in table.items():
            label = [int(c) for c in key.split(",")] if isinstance(key, str) else list(key)
            if len(label) != 2 * m:
                raise ValueError(f"label {key!r} does not have length {2 * m}")
            p[vector_to_index(label, d)] += float(val)
        return cls(d, m, p)

    @classmethod
    def delta(cls, d: int, m: int, x=None) -> ErrorDistribution:
        p = np.zeros(d ** (2 * m))
        p[0 if x is None else vector_to_index(x, d)] = 1.0
        return cls(d, m, p)

    @classmethod
    def uniform(cls, d: int, m: int) -> ErrorDistribution:
        N = d ** (2 * m)
        return cls(d, m, np.full(N, 1.0 / N))

    def labels(self) -> np.ndarray:
        return all_vectors(2 * self.m, self.d)

    def prob(self, x) -> float:
        return float(self.probs[vector_to_index(x, self.d)])

    def mass(self, X) -> float:
        """Total probability of the rows of X (assumed distinct)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64)) % self.d
        w = self.d ** np.arange(X.shape[1] - 1, -1, -1)
        return float(self.probs[X @ w].sum())

    def to_dict(self) -> dict[str, float]:
        return {
            ",".join(str(int(c)) for c in y): float(p)
            for y, p in zip(self.labels(), self.probs)
            if p != 0
        }

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return bool(np.all(self.probs >= -tol) and abs(self.probs.sum() - 1) <= tol)

    def product(self, other: ErrorDistribution) -> ErrorDistribution:
        """Distribution of the concatenated label (x, x')."""
        if other.d != self.d:
            raise ValueError("moduli differ")
        return ErrorDistribution(self.d, self.m + other.m, np.outer(self.probs, other.probs).reshape(-1))

    def power(self, nu: int) -> ErrorDistribution:
        out = ErrorDistribution.delta(self.d, 0)
        for _ in range(nu):
            out = out.product(self)
        return out


def product_distribution(dists) -> ErrorDistribution:
    dists = list(dists)
    out = ErrorDistribution.delta(dists[0].d, 0)
    for P in dists:
        out = out.product(P)
    return out


def single_digit_distribution(d: int, table: dict) -> ErrorDistribution:
    return ErrorDistribution.from_dict(d, 1, {tuple(k): v for k, v in table.items()})


def bit_flip_distribution(n: int, p: float) -> ErrorDistribution:
    """Independent X errors with probability p on each of n qubits."""
    one = ErrorDistribution.from_dict(2, 1, {"0,0": 1 - p, "1,0": p})
    return one.power(n)


def depolarizing_distribution(d: int, p: float) -> ErrorDistribution:
    """Single digit: no error with probability 1 - p, each of the d^2 - 1 others p/(d^2 - 1)."""
    N = d * d
    probs = np.full(N, p / (N - 1))
    probs[0] = 1 - p
    return ErrorDistribution(d, 1, probs)


def choi(B: KrausChannel, allow_large: bool = False) -> np.ndarray:
    """[Id (x) B](|Psi><Psi|), trace one for trace-preserving B."""
    guard(B.d, B.n, allow_large)
    D = B.dim
    V = np.transpose(B.kraus, (0, 2, 1)).reshape(B.kraus.shape[0], D * D) / np.sqrt(D)
    return V.T @ V.conj()


def channel_from_choi(S, d: int, n: int, tol: float = 1e-8) -> KrausChannel:
    """Kraus operators from the spectral decomposition of the (trace-one) Choi state."""
    S = np.asarray(S, dtype=complex)
    D = d**n
    if S.shape != (D * D, D * D):
        raise ValueError("Choi matrix has wrong shape")
    S = (S + S.conj().T) / 2
    vals, vecs = np.linalg.eigh(S)
    if vals.min() < -tol:
        raise NotCPError(f"Choi matrix has eigenvalue {vals.min():.3e}")
    keep = vals > tol * 1e-4
    vals = np.clip(vals[keep], 0, None)
    vecs = vecs[:, keep]
    if vals.size == 0:
        return KrausChannel(d, n, np.zeros((1, D, D), dtype=complex))
    # column v = vec(K^T) / sqrt(D)
    K = np.sqrt(vals * D)[:, None, None] * np.transpose(vecs.T.reshape(-1, D, D), (0, 2, 1))
    return KrausChannel(d, n, K)


def bell_coefficients(S, d: int, n: int) -> np.ndarray:
    """alpha_{y,z} = <Psi_y| S |Psi_z>."""
    B = bell_basis(d, n)
    return B.conj().T @ S @ B


def bell_diagonal_part(S, d: int, n: int) -> np.ndarray:
    """sum_y alpha_{y,y} |Psi_y><Psi_y|."""
    B = bell_basis(d, n)
    diag = np.real(np.einsum("iy,ij,jy->y", B.conj(), S, B))
    return (B * diag) @ B.conj().T


def twirl_choi(S, d: int, n: int) -> np.ndarray:
    """d^{-2n} sum_x (conj(N_x) (x) N_x) S (conj(N_x) (x) N_x)^dagger, summed term by term."""
    S = np.asarray(S, dtype=complex)
    out = np.zeros_like(S)
    for N in weyl_stack(d, n):
        U = np.kron(N.conj(), N)
        out += U @ S @ U.conj().T
    return out / d ** (2 * n)


def weyl_error_distribution(B: KrausChannel) -> ErrorDistribution:
    """P_B(x) = <Psi_x| choi(B) |Psi_x>, via |<Psi_x|(I (x) K)|Psi>|^2 = |tr(N_x^dag K)|^2 / D^2."""
    if not B.trace_preserving:
        warnings.warn("channel is not trace preserving; P_B will not sum to one", stacklevel=2)
    S = weyl_stack(B.d, B.n)
    amps = np.einsum("xji,kji->xk", S.conj(), B.kraus) / B.dim
    return ErrorDistribution(B.d, B.n, (np.abs(amps) ** 2).sum(axis=1))


def weyl_channel(P: ErrorDistribution, tol: float = 1e-12) -> KrausChannel:
    """sigma -> sum_x P(x) N_x sigma N_x^dagger."""
    if not P.is_normalized(tol=max(tol, 1e-10)):
        raise ValueError("error distribution is not normalized")
    S = weyl_stack(P.d, P.m)
    support = np.nonzero(P.probs > 0)[0]
    K = np.sqrt(P.probs[support])[:, None, None] * S[support]
    return KrausChannel(P.d, P.m, K)


def twirled_channel(B: KrausChannel) -> KrausChannel:
    return weyl_channel(weyl_error_distribution(B))


def twirled_channel_by_average(B: KrausChannel) -> KrausChannel:
    """d^{-2n} sum_x N_x B(N_x^dag . N_x) N_x^dag, built from d^{2n} conjugated Kraus lists."""
    S = weyl_stack(B.d, B.n)
    K = np.einsum("xij,kjl,xml->xkim", S, B.kraus, S.conj()) / B.d**B.n
    return KrausChannel(B.d, B.n, K.reshape(-1, B.dim, B.dim))


def random_unitary(D: int, rng: np.random.Generator) -> np.ndarray:
    Z = (rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_tpcp(d: int, n: int, kraus_rank: int, seed) -> KrausChannel:
    """Random isometry C^D -> C^{rank*D} cut into ``kraus_rank`` Kraus operators."""
    if kraus_rank < 1:
        raise ValueError("kraus_rank must be >= 1")
    rng = np.random.default_rng(seed)
    D = d**n
    U = random_unitary(kraus_rank * D, rng)
    V = U[:, :D]
    return KrausChannel(d, n, V.reshape(kraus_rank, D, D))


def random_density_matrix(D: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    r = D if rank is None else rank
    G = rng.standard_normal((D, r)) + 1j * rng.standard_normal((D, r))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_distribution(d: int, m: int, rng: np.random.Generator, sparsity: float = 0.0) -> ErrorDistribution:
    p = rng.exponential(size=d ** (2 * m))
    if sparsity:
        p[rng.random(p.size) < sparsity] = 0.0
        if not p.any():
            p[0] = 1.0
    return ErrorDistribution(d, m, p / p.sum())
