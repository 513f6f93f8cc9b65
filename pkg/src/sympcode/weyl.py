"""Dense Weyl unitaries N_y on (C^d)^{tensor n} and the generalized Bell basis.

Digit 1 is the leftmost tensor factor.  For d = 2 the operators carry the
i^{ab} phase so that N_{(1,1)} is the Hermitian Pauli Y.
"""

from __future__ import annotations

import functools

import numpy as np

from .fflin import all_vectors, as_vector, check_prime, symplectic_form


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


@functools.lru_cache(maxsize=None)
def _shift_clock(d: int) -> tuple[np.ndarray, np.ndarray]:
    X = np.zeros((d, d), dtype=complex)
    for a in range(d):
        X[(a - 1) % d, a] = 1.0  # X|a> = |a-1>
    Z = np.diag(omega(d) ** np.arange(d))
    return X, Z


@functools.lru_cache(maxsize=None)
def _single(a: int, b: int, d: int, pauli_phase: bool) -> np.ndarray:
    X, Z = _shift_clock(d)
    M = np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)
    if d == 2 and pauli_phase:
        M = (1j) ** (a * b) * M
    M.setflags(write=False)
    return M


def single_weyl(a: int, b: int, d: int, pauli_phase: bool = True) -> np.ndarray:
    """N_{(a,b)} = X^a Z^b, times i^{ab} when d = 2 and ``pauli_phase`` is set.

    ``pauli_phase=False`` gives the bare X^a Z^b convention at d = 2; codes are
    never built from it because XZ has eigenvalues +-i.
    """
    check_prime(d)
    return _single(int(a) % d, int(b) % d, d, pauli_phase).copy()


def weyl(y, d: int, pauli_phase: bool = True) -> np.ndarray:
    v = as_vector(y, d)
    out = np.ones((1, 1), dtype=complex)
    for i in range(v.size // 2):
        out = np.kron(out, _single(int(v[2 * i]), int(v[2 * i + 1]), d, pauli_phase))
    return out


@functools.lru_cache(maxsize=16)
def _weyl_stack(d: int, n: int) -> np.ndarray:
    labels = all_vectors(2 * n, d)
    S = np.array([weyl(y, d) for y in labels])
    S.setflags(write=False)
    return S


def weyl_stack(d: int, n: int) -> np.ndarray:
    """All N_y, y in F^{2n}, in lexicographic label order, shape (d^{2n}, d^n, d^n). Cached, read-only."""
    check_prime(d)
    return _weyl_stack(d, n)


def commutation_phase(y, y2, d: int) -> int:
    """Exponent c with N_y N_y2 = omega^c N_y2 N_y."""
    return symplectic_form(y, y2, d)


def product_phase(y, y2, d: int, atol: float = 1e-10) -> complex:
    """The unit c with N_y N_y2 = c N_{y+y2}, read off the dense matrices."""
    A = weyl(y, d) @ weyl(y2, d)
    B = weyl((np.asarray(y) + np.asarray(y2)) % d, d)
    c = np.vdot(B, A) / B.shape[0]
    if abs(abs(c) - 1) > atol or np.abs(A - c * B).max() > atol:
        raise RuntimeError("Weyl product is not proportional to N_{y+y'}")
    return complex(c)


def bell_vector(y, d: int) -> np.ndarray:
    """|Psi_y> = d^{-n/2} sum_l |l> (x) N_y |l>."""
    N = weyl(y, d)
    return N.T.reshape(-1) / np.sqrt(N.shape[0])


@functools.lru_cache(maxsize=16)
def _bell_basis(d: int, n: int) -> np.ndarray:
    S = _weyl_stack(d, n)
    D = S.shape[1]
    B = np.transpose(S, (0, 2, 1)).reshape(S.shape[0], D * D).T / np.sqrt(D)
    B = np.ascontiguousarray(B)
    B.setflags(write=False)
    return B


def bell_basis(d: int, n: int) -> np.ndarray:
    """Columns are |Psi_y> for y in lexicographic order. Cached, read-only."""
    check_prime(d)
    return _bell_basis(d, n)
