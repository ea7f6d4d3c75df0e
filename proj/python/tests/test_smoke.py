import numpy as np
import pytest

import qsg


def test_registry_lists_fixtures_and_checks():
    names = {f["name"] for f in qsg.fixtures()}
    assert {"amm-su2", "cotangent-su2", "zero-form-negative"} <= names
    assert all(anchor for _, _, anchor in qsg.checks())
    assert "axioms" in qsg.suite_names()


def test_amm_axioms_pass():
    reports = qsg.run(["axioms"], ["amm-su2"], samples=40)
    assert reports
    assert all(r["verdict"] == "pass" for r in reports)


def test_zero_form_negative_fails_nondegeneracy():
    reports = qsg.run(["axioms"], ["zero-form-negative"], samples=20)
    verdicts = {r["check"]: r["verdict"] for r in reports}
    assert verdicts["nondegeneracy"] == "fail"


def test_unknown_fixture_is_a_value_error():
    with pytest.raises(ValueError):
        qsg.run(["axioms"], ["no-such-groupoid"])


def test_zero_form_anchor_kernel_at_origin():
    d = qsg.unit_kernel_dims("zero-form-negative", [], np.zeros(3))
    assert d["anchor_kernel"] == 3
    assert not d["nondegenerate"]


def test_emap_reconstructs():
    rng = np.random.default_rng(0)
    mu = rng.normal(size=3)
    l = qsg.emap(mu, 2)
    X = sum(c * E for c, E in zip(mu, qsg.su_basis(2)))
    w, V = np.linalg.eigh(1j * X)
    target = V @ np.diag(np.exp(w)) @ V.conj().T
    assert np.allclose(l @ l.conj().T, target, atol=1e-10)
    assert np.allclose(np.triu(l, 1), 0)


def test_expm_is_special_unitary():
    X = qsg.su_basis(3)[0] * 0.7
    g = qsg.expm(X)
    assert np.allclose(g.conj().T @ g, np.eye(3), atol=1e-12)
    assert abs(np.linalg.det(g) - 1) < 1e-12
