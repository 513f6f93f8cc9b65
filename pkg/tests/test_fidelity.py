import numpy as np
import pytest

from sympcode import channels as ch
from sympcode.codes import build_code
from sympcode.fflin import PreconditionError, random_self_orthogonal
from sympcode.fidelity import (
    entanglement_fidelity,
    fe_pauli_closed_form,
    fidelity_inequalities_check,
    min_pure_fidelity_estimate,
    min_pure_fidelity_grid,
    theorem1_check,
)

X = np.array([[0, 1], [1, 0]])


def bit_flip_channel(p):
    return ch.KrausChannel(2, 1, np.array([np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * X]))


def amplitude_damping(g):
    return ch.KrausChannel(2, 1, np.array([[[1, 0], [0, np.sqrt(1 - g)]], [[0, np.sqrt(g)], [0, 0]]]))


def test_identity_channel(rng):
    rho = ch.random_density_matrix(4, rng, rank=1)
    assert entanglement_fidelity(rho, ch.identity_channel(2, 2)) == pytest.approx(1)


def test_bit_flip_on_maximally_mixed():
    assert entanglement_fidelity(np.eye(2) / 2, bit_flip_channel(0.3), cross_check=True) == pytest.approx(0.7)


def test_full_space_gives_pb_zero():
    B = ch.random_tpcp(2, 2, 3, seed=9)
    want = ch.weyl_error_distribution(B).prob([0, 0, 0, 0])
    assert entanglement_fidelity(np.eye(4) / 4, B, cross_check=True) == pytest.approx(want, abs=1e-12)


def test_routes_agree(rng):
    for i in range(5):
        B = ch.random_tpcp(3, 1, 1 + i, seed=i)
        rho = ch.random_density_matrix(3, rng)
        entanglement_fidelity(rho, B, cross_check=True)


def test_rejects_bad_states():
    B = ch.identity_channel(2, 1)
    with pytest.raises(PreconditionError):
        entanglement_fidelity(np.diag([1.2, -0.2]), B)
    with pytest.raises(PreconditionError):
        entanglement_fidelity(np.eye(2), B)


@pytest.mark.parametrize("p", [0.0, 0.1, 0.3, 0.5])
def test_cat_bit_flip(cat, p):
    rep = fe_pauli_closed_form(cat, ch.bit_flip_distribution(2, p))
    assert rep.formula == pytest.approx(1 - p, abs=1e-12)
    for v in rep.per_syndrome.values():
        assert v == pytest.approx(1 - p, abs=1e-10)
    # P(0000)+P(0101) and P(1000)+P(1101)
    assert rep.per_t["0"] == pytest.approx((1 - p) ** 2, abs=1e-12)
    assert rep.per_t["1"] == pytest.approx(p * (1 - p), abs=1e-12)


def test_noiseless_distribution(cat):
    rep = fe_pauli_closed_form(cat, ch.ErrorDistribution.delta(2, 2))
    for s in range(2):
        assert rep.per_component[f"{s},0"] == pytest.approx(1)
        assert rep.per_component[f"{s},1"] == pytest.approx(0, abs=1e-12)


def test_stabilizer_errors_are_harmless():
    code = build_code(random_self_orthogonal(3, 1, 3, 4), seed=4)
    Lel = code.L.elements()
    probs = np.random.default_rng(0).dirichlet(np.ones(len(Lel)))
    P = ch.ErrorDistribution.from_dict(3, 3, {tuple(x): q for x, q in zip(Lel, probs)})
    rep = fe_pauli_closed_form(code, P)
    assert rep.per_t["0"] == pytest.approx(1)
    assert rep.discrepancy < 1e-10


def test_general_check_reduces_to_weyl_case(rng):
    code = build_code(random_self_orthogonal(2, 1, 2, 3), seed=3)
    P = ch.random_distribution(2, 2, rng)
    a = theorem1_check(code, ch.weyl_channel(P))
    b = fe_pauli_closed_form(code, P)
    assert a.formula == pytest.approx(b.formula, abs=1e-12)
    vals = list(a.per_syndrome.values())
    assert max(vals) - min(vals) < 1e-10


def test_general_check_random_channels():
    for i in range(5):
        code = build_code(random_self_orthogonal(3, 1 + i % 2, 2, i), seed=i)
        rep = theorem1_check(code, ch.random_tpcp(2, 3, 2, seed=100 + i))
        assert rep.discrepancy < 1e-9


def test_min_pure_fidelity_identity():
    assert min_pure_fidelity_estimate(np.eye(2), ch.identity_channel(2, 1), restarts=1) == pytest.approx(1)
    assert min_pure_fidelity_estimate(np.eye(4), ch.identity_channel(2, 2), restarts=4) == pytest.approx(1)


def test_min_pure_fidelity_matches_grid():
    B = amplitude_damping(0.3)
    # minimum at |1>: 1 - g
    assert min_pure_fidelity_grid(B) == pytest.approx(0.7, abs=1e-3)
    assert min_pure_fidelity_estimate(np.eye(2), B, restarts=6) == pytest.approx(0.7, abs=1e-6)


def test_inequalities_report():
    for i in range(5):
        B = ch.random_tpcp(2, 1, 1 + i % 4, seed=i)
        rep = fidelity_inequalities_check(np.eye(2), B, restarts=4, seed=i)
        assert rep["average_bound_holds"]
        assert rep["three_halves_asserted"] and rep["three_halves_holds"]
    rep = fidelity_inequalities_check(np.eye(4)[:, :2], ch.random_tpcp(2, 2, 2, seed=1), restarts=2)
    assert rep["average_bound_holds"] and not rep["three_halves_asserted"]


def test_additive_over_components_and_linear(rng):
    from sympcode.codes import recovery
    from sympcode.fidelity import maximally_mixed

    code = build_code(random_self_orthogonal(2, 1, 2, 1), seed=1)
    B1, B2 = ch.random_tpcp(2, 2, 2, seed=3), ch.random_tpcp(2, 2, 1, seed=4)
    rho = maximally_mixed(code.code_basis(1))
    R = recovery(code, 1)
    whole = entanglement_fidelity(rho, R.channel().compose(B1))
    parts = sum(entanglement_fidelity(rho, R.component(t).compose(B1)) for t in range(code.num_syndromes))
    assert whole == pytest.approx(parts, abs=1e-12)
    lam = 0.3
    mix = ch.KrausChannel(2, 2, np.concatenate([np.sqrt(lam) * B1.kraus, np.sqrt(1 - lam) * B2.kraus]))
    assert entanglement_fidelity(rho, mix) == pytest.approx(
        lam * entanglement_fidelity(rho, B1) + (1 - lam) * entanglement_fidelity(rho, B2), abs=1e-12
    )
