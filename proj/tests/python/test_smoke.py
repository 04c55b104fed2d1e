import cmath

import numpy as np
import pytest

import xxzbethe as xb


def test_representation_counts():
    assert xb.count_generic(7, 3) == 14
    assert xb.p2_count(9, 4) == 16
    assert xb.tl_dim_d0(9, 5, 2) == 27
    for N in range(1, 9):
        for p in (0, 2, 3):
            assert sum(m * d for _, m, d in xb.decomposition(N, p)) == 2**N


def test_singlet():
    sols = xb.solve(2, 1, "xxx")
    assert len(sols) == 1
    assert abs(sols[0]["roots"][0] - 0.5) < 1e-12
    assert sols[0]["verdict"] == "Admissible"


def test_solutions_match_tabulated_roots():
    sols = xb.solve(5, 2, "xxx")
    ref = xb.reference_solutions("xxx", 5, 2)
    assert len(sols) == len(ref) == 5
    for r in ref:
        assert any(
            all(min(abs(x - y) for y in s["roots"]) < 1e-8 for x in r) for s in sols
        )


def test_root_of_unity_root():
    (s,) = xb.solve(2, 1, "p=5")
    assert abs(s["roots"][0] - 1.962610505505151) < 1e-12


def test_rows():
    assert xb.counts(6, "eta=0.1")["row"] == "1 5 9 5"
    assert xb.counts(5, "p=3", budget=0)["counts"] == xb.predicted_counts(5, "p=3")
    assert xb.degeneracies(6, "p=2")["degeneracies"][0] == 16


def test_hamiltonian_and_on_shell():
    H = xb.hamiltonian(4, "eta=0.1")
    assert H.shape == (16, 16)
    assert np.allclose(H, H.T)
    for s in xb.solve(4, 2, "eta=0.1"):
        rep = xb.verify_on_shell(s["roots"], 4, "eta=0.1")
        assert rep["ok"], rep["failure"]
        e = xb.energy(s["roots"], 4, "eta=0.1")
        assert np.min(np.abs(np.linalg.eigvals(H) - e)) < 1e-9


def test_transfer_matrices_commute():
    a = xb.transfer_matrix(0.3 + 0.1j, 4, "p=3")
    b = xb.transfer_matrix(-0.2 + 0.4j, 4, "p=3")
    assert np.linalg.norm(a @ b - b @ a) < 1e-12 * np.linalg.norm(a) * np.linalg.norm(b)
    assert max(xb.structural_residuals(4, "p=3").values()) < 1e-10


def test_tq_census_and_spectrum():
    c = xb.tq(4, "p=3")
    assert c["N"] == 4 and not c["problems"]
    rep = xb.hamiltonian_spectrum(5, "p=2")
    zero = [e for e in rep["eigenvalues"] if abs(complex(e["re"], e["im"])) < 1e-8]
    assert zero[0]["alg"] == 8


def test_errors():
    with pytest.raises(ValueError):
        xb.solve(4, 1, "p=1")
    with pytest.raises(xb.BudgetExceeded):
        xb.solve(11, 5, "xxx", budget=0)
