from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpo_qet import lcu
from mpo_qet.circuit import block_encode, circuit_unitary
from mpo_qet.mpo import build_ising, build_pauli_product
import oracles as O


def close(a, b, tol):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol


def test_ising_terms():
    t = lcu.ising_terms(3, 1.0, 0.5)
    assert t.M == 5
    assert {x.word for x in t.terms} == {"ZZI", "IZZ", "XII", "IXI", "IIX"}
    assert t.lam == pytest.approx(3.5)
    assert close(t.matrix(), O.ising(3, 1.0, 0.5), 1e-14)


def test_heisenberg_terms_match_oracle():
    t = lcu.heisenberg_terms(3, 1.0, 0.8, 0.6, 0.1, 0.0, 0.3)
    assert t.M == 3 * 2 + 2 * 3
    assert close(t.matrix(), O.heisenberg(3, 1.0, 0.8, 0.6, 0.1, 0.0, 0.3), 1e-14)


def test_pauli_product_terms():
    coeffs = [[0.7, -1.0, 0.0, 0.1], [1.2, 0.4, 0.3, 0.0]]
    t = lcu.pauli_product_terms(coeffs, 1.7)
    assert t.M <= 16
    assert close(t.matrix(), O.pauli_product(coeffs, 1.7), 1e-14)


def test_single_term():
    t = lcu.PauliTermList.from_pairs([(-2.5, "ZZ")])
    assert t.lam == 2.5
    blk, lam = lcu.lcu_block(t)
    assert lam * blk == pytest.approx(-2.5 * np.kron(O.Z, O.Z))
    c, layout, _ = lcu.build_lcu_circuit(lcu.PauliTermList.from_pairs([(1.0, "X")]))
    assert layout.ancillas == () and len(c) == 1
    assert close(circuit_unitary(c), O.X, 0)


def test_from_pairs_merges_and_drops():
    t = lcu.PauliTermList.from_pairs([(1.0, "XI"), (0.5, "XI"), (0.0, "ZZ")])
    assert t.M == 1 and t.terms[0].coeff == 1.5
    with pytest.raises(ValueError):
        lcu.PauliTermList.from_pairs([(1.0, "XI"), (1.0, "Z")])
    with pytest.raises(ValueError):
        lcu.PauliTerm(1.0, "XA")


def test_prep_and_select_structure():
    t = lcu.ising_terms(3, 1.0, -0.5)
    amps = lcu.prep_amplitudes(t)
    assert amps.shape == (8,)
    assert np.linalg.norm(amps) == pytest.approx(1.0)
    sel = lcu.select_matrix(t)
    assert close(sel @ sel.conj().T, np.eye(sel.shape[0]), 1e-14)
    # a phased permutation: one unit-modulus entry per row
    nz = np.abs(sel) > 1e-14
    assert np.all(nz.sum(axis=1) == 1)
    assert close(np.abs(sel[nz]), 1.0, 1e-14)


@pytest.mark.parametrize("L", [2, 3])
def test_lcu_block_identity(L):
    t = lcu.ising_terms(L, 1.0, 0.5)
    blk, lam = lcu.lcu_block(t)
    assert close(lam * blk, O.ising(L, 1.0, 0.5), 1e-10)


def test_cross_method_agreement():
    t = lcu.ising_terms(3, 1.0, 0.5)
    blk, lam = lcu.lcu_block(t)
    be = block_encode(build_ising(3, 1.0, 0.5))
    h = O.ising(3, 1.0, 0.5)
    assert close(lam * blk, h, 1e-10)
    assert close(be.eta * be.block(), h, 1e-10)
    coeffs = O.FILTER_COEFFS[:2]
    t = lcu.pauli_product_terms(coeffs)
    blk, lam = lcu.lcu_block(t)
    be = block_encode(build_pauli_product(coeffs))
    assert close(lam * blk, be.eta * be.block(), 1e-10)


@given(st.integers(1, 3), st.integers(1, 6), st.integers(0, 2**31))
def test_random_term_lists(n, M, seed):
    rng = np.random.default_rng(seed)
    pairs = [(complex(*rng.normal(size=2)), "".join(rng.choice(list("IXYZ"), n))) for _ in range(M)]
    t = lcu.PauliTermList.from_pairs(pairs)
    blk, lam = lcu.lcu_block(t)
    assert close(lam * blk, t.matrix(), 1e-10)


def test_term_records(tmp_path):
    t = lcu.terms_from_records([{"coeff": 1.0, "word": "ZZ"}, {"coeff": [0.0, 2.0], "word": "XI"}])
    assert t.M == 2 and t.terms[1].coeff == 2j
    with pytest.raises(ValueError, match="coeff"):
        lcu.terms_from_records([{"word": "ZZ"}])
    p = tmp_path / "t.json"
    p.write_text('[{"coeff": 0.5, "word": "X"}]')
    assert lcu.load_terms(p).lam == 0.5


def test_pauli_terms_from_spec_dict():
    t = lcu.pauli_terms({"model": "ising", "L": 2, "J": 1.0, "g": 0.25})
    assert {x.word for x in t.terms} == {"ZZ", "XI", "IX"}
    assert lcu.lcu_ancillas(t.M) == 2
    with pytest.raises(ValueError):
        lcu.pauli_terms({"model": "custom", "sites": [[[0]]], "R": [1], "C": [1]})
