"""Exact linear algebra over the prime field F_d and the symplectic space F_d^{2n}.

Vectors are integer numpy arrays of length ``2n`` in interleaved order
``(x_1, z_1, ..., x_n, z_n)``.  All arithmetic is reduced mod ``d``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

MAX_PRIME = 13
_PRIMES = (2, 3, 5, 7, 11, 13)


class DimensionError(ValueError):
    """Operands have mismatched lengths or moduli."""


class PreconditionError(ValueError):
    """An operation was called on input violating its documented precondition."""


def check_prime(d: int) -> int:
    d = int(d)
    if d not in _PRIMES:
        raise ValueError(f"d must be a prime <= {MAX_PRIME}, got {d}")
    return d


def as_vector(y, d: int) -> np.ndarray:
    v = np.asarray(y, dtype=np.int64) % d
    if v.ndim != 1 or v.size % 2:
        raise DimensionError(f"expected a vector of even length, got shape {v.shape}")
    return v


def as_matrix(rows, d: int, width: int | None = None) -> np.ndarray:
    m = np.asarray(rows, dtype=np.int64)
    if m.size == 0:
        if width is None:
            raise DimensionError("cannot infer width of an empty matrix")
        return np.zeros((0, width), dtype=np.int64)
    m = np.atleast_2d(m) % d
    if width is not None and m.shape[1] != width:
        raise DimensionError(f"expected rows of length {width}, got {m.shape[1]}")
    return m


def inv_mod(a: int, d: int) -> int:
    a = int(a) % d
    if a == 0:
        raise ZeroDivisionError("0 has no inverse")
    return pow(a, d - 2, d)


def omega_matrix(n: int) -> np.ndarray:
    """Gram matrix of the symplectic form: <y, y'> = y @ J @ y'."""
    J = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for i in range(n):
        J[2 * i, 2 * i + 1] = 1
        J[2 * i + 1, 2 * i] = -1
    return J


def symplectic_form(y, y2, d: int) -> int:
    """Return sum_i (x_i z'_i - z_i x'_i) mod d."""
    a = np.asarray(y, dtype=np.int64)
    b = np.asarray(y2, dtype=np.int64)
    if a.shape != b.shape or a.ndim != 1 or a.size % 2:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    val = np.dot(a[0::2], b[1::2]) - np.dot(a[1::2], b[0::2])
    return int(val % d)


def symplectic_gram(A, B, d: int) -> np.ndarray:
    """Matrix of <A_i, B_j> for the rows of A and B."""
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    B = np.atleast_2d(np.asarray(B, dtype=np.int64))
    if A.shape[1] != B.shape[1]:
        raise DimensionError("row lengths differ")
    J = omega_matrix(A.shape[1] // 2)
    return (A @ J @ B.T) % d


def rref(M, d: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form mod d. Returns (R, pivot columns); zero rows are dropped."""
    R = np.array(M, dtype=np.int64) % d
    if R.ndim != 2:
        raise DimensionError("rref expects a 2-d array")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = (R[r] * inv_mod(R[r, c], d)) % d
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % d
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(M, d: int) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(M, d)[1])


def nullspace(M, d: int, width: int | None = None) -> np.ndarray:
    """Basis (rows) of {v : M v = 0 mod d}."""
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        if width is None:
            width = M.shape[1] if M.ndim == 2 else 0
        return np.eye(width, dtype=np.int64)
    R, pivots = rref(M, d)
    cols = R.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for j, f in enumerate(free):
        basis[j, f] = 1
        for i, p in enumerate(pivots):
            basis[j, p] = (-R[i, f]) % d
    return basis


def solve(A, b, d: int) -> np.ndarray | None:
    """One solution of A x = b mod d (free variables zero), or None if inconsistent."""
    A = np.atleast_2d(np.asarray(A, dtype=np.int64)) % d
    b = np.asarray(b, dtype=np.int64).reshape(-1) % d
    aug = np.concatenate([A, b[:, None]], axis=1)
    R, pivots = rref(aug, d)
    if pivots and pivots[-1] == A.shape[1]:
        return None
    x = np.zeros(A.shape[1], dtype=np.int64)
    for i, p in enumerate(pivots):
        x[p] = R[i, -1]
    return x


def index_to_vector(index: int, length: int, d: int) -> np.ndarray:
    """Big-endian base-d digits: index 0 <-> zero vector, matching itertools.product order."""
    out = np.zeros(length, dtype=np.int64)
    for j in range(length - 1, -1, -1):
        index, out[j] = divmod(index, d)
    return out


def vector_to_index(v, d: int) -> int:
    idx = 0
    for c in np.asarray(v, dtype=np.int64).reshape(-1):
        idx = idx * d + int(c % d)
    return idx


def all_vectors(length: int, d: int) -> np.ndarray:
    """Every vector of F_d^length, one per row, in lexicographic order."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(d), repeat=length)), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class FSubspace:
    """Subspace of F_d^{2n} stored by its reduced row-echelon basis."""

    d: int
    n: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_prime(self.d)
        B = as_matrix(self.basis, self.d, 2 * self.n)
        R = rref(B, self.d)[0] if B.shape[0] else B
        R.setflags(write=False)
        object.__setattr__(self, "basis", R)

    @classmethod
    def span(cls, vectors, d: int, n: int | None = None) -> FSubspace:
        V = np.asarray(vectors, dtype=np.int64)
        if n is None:
            if V.size == 0:
                raise DimensionError("n is required for an empty spanning set")
            n = np.atleast_2d(V).shape[1] // 2
        return cls(d, n, V)

    @classmethod
    def zero(cls, d: int, n: int) -> FSubspace:
        return cls(d, n, np.zeros((0, 2 * n), dtype=np.int64))

    @classmethod
    def full(cls, d: int, n: int) -> FSubspace:
        return cls(d, n, np.eye(2 * n, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, y) -> bool:
        v = as_vector(y, self.d)
        if v.size != 2 * self.n:
            raise DimensionError("vector length does not match ambient space")
        if self.dim == 0:
            return not v.any()
        return rank(np.vstack([self.basis, v]), self.d) == self.dim

    def elements(self) -> np.ndarray:
        """All d^dim vectors of the subspace (rows)."""
        coeffs = all_vectors(self.dim, self.d)
        if self.dim == 0:
            return np.zeros((1, 2 * self.n), dtype=np.int64)
        return (coeffs @ self.basis) % self.d

    def __eq__(self, other) -> bool:
        if not isinstance(other, FSubspace):
            return NotImplemented
        return (
            self.d == other.d
            and self.n == other.n
            and self.basis.shape == other.basis.shape
            and bool(np.all(self.basis == other.basis))
        )

    def __hash__(self):
        return hash((self.d, self.n, self.basis.tobytes()))

    def issubspace(self, other: FSubspace) -> bool:
        return all(other.contains(b) for b in self.basis)


def symplectic_dual(L: FSubspace) -> FSubspace:
    """{y : <x, y> = 0 for every x in L}."""
    if L.dim == 0:
        return FSubspace.full(L.d, L.n)
    # <x, y> = x J y, so the constraints are the rows of B J.
    constraints = (L.basis @ omega_matrix(L.n)) % L.d
    return FSubspace(L.d, L.n, nullspace(constraints, L.d))


def is_self_orthogonal(L: FSubspace) -> bool:
    if L.dim == 0:
        return True
    return not symplectic_gram(L.basis, L.basis, L.d).any()


@dataclass(frozen=True, eq=False)
class HyperbolicFrame:
    """Hyperbolic pairs (g_i, h_i) with <g_i,h_j> = delta_ij and <g,g> = <h,h> = 0.

    ``g[:n-k]`` spans the self-orthogonal subspace the frame was built from.
    """

    d: int
    g: np.ndarray
    h: np.ndarray
    code_k: int

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def relation_defects(self) -> dict[str, int]:
        n = self.n
        gh = symplectic_gram(self.g, self.h, self.d)
        gg = symplectic_gram(self.g, self.g, self.d)
        hh = symplectic_gram(self.h, self.h, self.d)
        return {
            "gh": int(np.count_nonzero(gh != np.eye(n, dtype=np.int64))),
            "gg": int(np.count_nonzero(gg)),
            "hh": int(np.count_nonzero(hh)),
        }

    def is_valid(self) -> bool:
        return not any(self.relation_defects().values())

    def stabilizer(self) -> np.ndarray:
        return self.g[: self.n - self.code_k]


def _solve_or_fail(A, b, d):
    x = solve(A, b, d)
    if x is None:
        raise RuntimeError("inconsistent system during hyperbolic completion")
    return x


def hyperbolic_complete(L: FSubspace, seed: int = 0, stabilizer_basis=None) -> HyperbolicFrame:
    """Extend a basis of a self-orthogonal L to a full hyperbolic frame.

    Partners h_1..h_r for the given g's come from solving the linear system
    <g_i, h> = delta_ij, <h_i, h> = 0; the remaining pairs are found by
    symplectic Gram-Schmidt inside the symplectic complement, choosing the new
    g at random (seeded).  ``stabilizer_basis`` fixes g_1..g_{n-k}; by default
    the reduced row-echelon basis of L is used.
    """
    if not is_self_orthogonal(L):
        raise PreconditionError("subspace is not self-orthogonal")
    d, n = L.d, L.n
    G0 = L.basis if stabilizer_basis is None else as_matrix(stabilizer_basis, d, 2 * n)
    if rank(G0, d) != L.dim or G0.shape[0] != L.dim or not all(L.contains(v) for v in G0):
        raise PreconditionError("stabilizer_basis is not a basis of L")
    r = L.dim
    if r > n:
        raise PreconditionError("dim L exceeds n")
    J = omega_matrix(n)
    rng = np.random.default_rng(seed)

    gs = [np.array(v, dtype=np.int64) for v in G0]
    hs: list[np.ndarray] = []
    for j in range(r):
        # <v, h> = (v J) . h
        rows = [(v @ J) % d for v in gs] + [(v @ J) % d for v in hs]
        rhs = [1 if i == j else 0 for i in range(len(gs))] + [0] * len(hs)
        hs.append(_solve_or_fail(np.array(rows), rhs, d))

    while len(gs) < n:
        constraints = np.array([(v @ J) % d for v in gs + hs]) if gs else np.zeros((0, 2 * n), np.int64)
        W = nullspace(constraints, d, width=2 * n)
        g_new = np.zeros(2 * n, dtype=np.int64)
        while not g_new.any():
            g_new = (rng.integers(0, d, size=W.shape[0]) @ W) % d
        rows = np.vstack([constraints, (g_new @ J) % d]) if len(constraints) else ((g_new @ J) % d)[None]
        rhs = [0] * len(constraints) + [1]
        h_new = _solve_or_fail(rows, rhs, d)
        gs.append(g_new)
        hs.append(h_new)

    g = np.array(gs, dtype=np.int64).reshape(n, 2 * n)
    h = np.array(hs, dtype=np.int64).reshape(n, 2 * n)
    g.setflags(write=False)
    h.setflags(write=False)
    return HyperbolicFrame(d=d, g=g, h=h, code_k=n - r)


def expand_in_frame(x, frame: HyperbolicFrame) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients (w, z) with x = sum_i w_i g_i + z_i h_i.

    z_i = <g_i, x> and w_i = <x, h_i>.
    """
    d = frame.d
    v = as_vector(x, d)
    z = symplectic_gram(frame.g, v[None], d)[:, 0]
    w = symplectic_gram(v[None], frame.h, d)[0]
    return w, z


def assemble_from_frame(w, z, frame: HyperbolicFrame) -> np.ndarray:
    return (np.asarray(w) @ frame.g + np.asarray(z) @ frame.h) % frame.d


def syndrome_of(x, L_basis, d: int) -> np.ndarray:
    """s_i = <g_i, x> for the ordered basis rows g_i."""
    G = np.asarray(L_basis, dtype=np.int64)
    v = as_vector(x, d)
    if G.size == 0:
        return np.zeros(0, dtype=np.int64)
    return symplectic_gram(G, v[None], d)[:, 0]


def syndromes_of_all(X, L_basis, d: int) -> np.ndarray:
    """Row-wise syndromes for a stack of vectors."""
    G = np.asarray(L_basis, dtype=np.int64)
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    if G.size == 0:
        return np.zeros((X.shape[0], 0), dtype=np.int64)
    return symplectic_gram(X, G, d) * (d - 1) % d  # <g, x> = -<x, g>


@dataclass(frozen=True, eq=False)
class CosetArray:
    """Rows are cosets y_s + L^perp; entry (s, u) is y_s + x_u + L."""

    L: FSubspace
    frame: HyperbolicFrame
    x_reps: np.ndarray
    y_reps: np.ndarray

    def entry(self, s: int, u: int) -> np.ndarray:
        base = (self.y_reps[s] + self.x_reps[u]) % self.L.d
        return (base + self.L.elements()) % self.L.d

    def row(self, s: int) -> np.ndarray:
        return np.vstack([self.entry(s, u) for u in range(self.x_reps.shape[0])])

    @property
    def shape(self) -> tuple[int, int]:
        return self.y_reps.shape[0], self.x_reps.shape[0]


def coset_array(L: FSubspace, seed: int = 0, frame: HyperbolicFrame | None = None) -> CosetArray:
    """Coset array of L, representatives ordered lexicographically by their labels.

    Row s is labeled by the syndrome s in F^{n-k}; column u by the logical
    coordinates (w_{n-k+1}, z_{n-k+1}, ..., w_n, z_n) in F^{2k}.
    """
    if frame is None:
        frame = hyperbolic_complete(L, seed)
    d, n, k = L.d, L.n, frame.code_k
    r = n - k
    Hs = frame.h[:r]
    y_reps = (all_vectors(r, d) @ Hs) % d if r else np.zeros((1, 2 * n), dtype=np.int64)
    logical = np.empty((2 * k, 2 * n), dtype=np.int64)
    logical[0::2] = frame.g[r:]
    logical[1::2] = frame.h[r:]
    x_reps = (all_vectors(2 * k, d) @ logical) % d if k else np.zeros((1, 2 * n), dtype=np.int64)
    return CosetArray(L=L, frame=frame, x_reps=x_reps, y_reps=y_reps)


def random_self_orthogonal(n: int, k: int, d: int, seed: int) -> FSubspace:
    """Seeded random self-orthogonal subspace of dimension n - k."""
    check_prime(d)
    if not 0 <= k <= n or n < 1:
        raise PreconditionError(f"need 0 <= k <= n and n >= 1, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    L = FSubspace.zero(d, n)
    while L.dim < n - k:
        dual = symplectic_dual(L)
        v = (rng.integers(0, d, size=dual.dim) @ dual.basis) % d
        if L.contains(v):
            continue
        L = FSubspace(d, n, np.vstack([L.basis, v]))
    return L
