import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sympcode.channels import bit_flip_distribution
from sympcode.codes import (
    build_code,
    choose_transversal,
    logical_actions,
    measured_eigenvalues,
    projector,
    recovery,
    verify_correctable,
)
from sympcode.fflin import FSubspace, PreconditionError, random_self_orthogonal
from sympcode.weyl import omega, weyl


def test_cat_projector(cat):
    assert np.allclose(projector(cat, 0), np.diag([1, 0, 0, 1]))
    assert np.allclose(projector(cat, 1), np.diag([0, 1, 1, 0]))


def test_cat_lexicographic_transversal(cat):
    assert cat.transversal.tolist() == [[0, 0, 0, 0], [1, 0, 0, 0]]


def test_most_likely_under_bit_flip(cat):
    code = choose_transversal(cat, "most_likely", bit_flip_distribution(2, 0.1))
    assert not code.transversal[:, 1::2].any()
    # repetition code: stabilizers Z1Z2, Z2Z3
    L = FSubspace(2, 3, [[0, 1, 0, 1, 0, 0], [0, 0, 0, 1, 0, 1]])
    rep = build_code(L, distribution=bit_flip_distribution(3, 0.1))
    assert not rep.transversal[:, 1::2].any()
    weights = sorted(int(x[0::2].sum()) for x in rep.transversal)
    assert weights == [0, 1, 1, 1]


def test_build_rejects_non_self_orthogonal():
    with pytest.raises(PreconditionError):
        build_code(FSubspace(2, 1, [[1, 0], [0, 1]]))


def test_transversal_must_match_syndromes(cat):
    with pytest.raises(ValueError):
        cat.with_transversal([[1, 0, 0, 0], [0, 0, 0, 0]])


def test_recovery_trivial_component(cat):
    R = recovery(cat, 0)
    assert np.allclose(R.components[0], projector(cat, 0))
    assert R.channel().trace_preserving


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(1, 3), st.data())
def test_random_codes_are_well_formed(d, n, data):
    k = data.draw(st.integers(0, n))
    seed = data.draw(st.integers(0, 10**6))
    code = build_code(random_self_orthogonal(n, k, d, seed), seed=seed)
    rep = logical_actions(code)
    assert rep["ok"], rep
    D = d**n
    total = sum(projector(code, s) for s in range(code.num_syndromes))
    assert np.allclose(total, np.eye(D))
    for s, label in enumerate(code.syndrome_labels()):
        assert np.allclose(measured_eigenvalues(code, s), omega(d) ** label)
        V = code.code_basis(s)
        for g in code.stabilizer:
            N = weyl(g, d)
            assert np.allclose(N @ V, V @ (V.conj().T @ N @ V))
    for s in range(code.num_syndromes):
        assert recovery(code, s).channel().trace_preserving


def test_build_is_deterministic():
    L = random_self_orthogonal(3, 1, 3, 11)
    a, b = build_code(L, seed=5), build_code(L, seed=5)
    assert np.array_equal(a.basis, b.basis)
    assert np.array_equal(a.transversal, b.transversal)


def test_verify_correctable_examples(cat):
    assert verify_correctable(cat, cat.L.elements())
    assert verify_correctable(cat, [[0, 0, 0, 0], [0, 1, 0, 1], [1, 0, 0, 0], [1, 1, 0, 1]])
    J = [[0, 0, 0, 0], [0, 1, 0, 1], [1, 0, 0, 0], [1, 1, 0, 1], [1, 0, 1, 0]]
    with pytest.raises(PreconditionError):
        verify_correctable(cat, J)
    # closed under L but two representatives in one L^perp coset
    J = [[0, 0, 0, 0], [0, 1, 0, 1], [1, 0, 1, 0], [1, 1, 1, 1]]
    with pytest.raises(PreconditionError, match="outside L"):
        verify_correctable(cat, J)


def test_eigenspaces_are_weyl_translates():
    code = build_code(random_self_orthogonal(3, 1, 3, 6), seed=6)
    Pi0 = projector(code, 0)
    X = np.array(list(np.ndindex(*(3,) * 6)))
    syn = code.syndromes(X)
    rng = np.random.default_rng(0)
    for i in rng.choice(len(X), 20, replace=False):
        s = code.syndrome_index(syn[i])
        N = weyl(X[i], 3)
        assert np.allclose(N @ Pi0 @ N.conj().T, projector(code, s))
    for s in range(code.num_syndromes):
        for s2 in range(s + 1, code.num_syndromes):
            assert np.abs(projector(code, s) @ projector(code, s2)).max() < 1e-10


def test_trivial_L_single_subspace():
    code = build_code(FSubspace.zero(2, 2))
    assert code.num_syndromes == 1
    assert np.allclose(projector(code, 0), np.eye(4))
    assert np.allclose(recovery(code, 0).components[0], np.eye(4))
