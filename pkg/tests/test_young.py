"""Tableau symmetrizer: calibration, eigenvalues, membership, numeric bases."""

import numpy as np
import pytest

from curvjet.curvature import jacobi_form, kn_pair, kulkarni
from curvjet.spaces import Space, Tensor, random_tensor, sym_product, tensor_product
from curvjet.young import (
    basis_Ck,
    ck_residuals,
    is_member_Ck,
    random_ck,
    young_apply,
    young_eigenvalue,
)

E3 = Space(3)
E4 = Space(4)


def rel(a: Tensor, b: Tensor) -> float:
    return (a - b).norm() / max(a.norm(), b.norm(), 1.0)


def test_eigenvalue_constants():
    assert young_eigenvalue(0) == 12.0
    assert young_eigenvalue(1) == 24.0
    assert young_eigenvalue(2) == 80.0


def test_zero_maps_to_zero():
    z = Tensor(E3, np.zeros((3,) * 4))
    assert young_apply(z, 0).norm() == 0.0


def test_wrong_valence_rejected():
    with pytest.raises(ValueError):
        young_apply(random_tensor(E3, 4, 0), 1)


def test_calibration_constant_curvature():
    """The shipped composition order gives factor 12 on g kn g at k=0."""
    for sp in (E3, E4, Space(4, (1, 1, 1, -1))):
        g = sp.metric_tensor()
        gg = kn_pair(g, g)
        assert rel(young_apply(gg, 0), 12.0 * gg) < 1e-13


def test_quasi_idempotent_k0():
    for seed in range(5):
        t = random_tensor(E4, 4, seed)
        once = young_apply(t, 0)
        twice = young_apply(once, 0)
        assert rel(twice, 12.0 * once) < 1e-12


@pytest.mark.parametrize("sp", [E3, E4])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_eigenvalue_on_members(sp, k):
    lam = young_eigenvalue(k)
    for seed in range(10):
        t = random_ck(sp, k, seed)
        assert rel(young_apply(t, k), lam * t) < 1e-10


@pytest.mark.parametrize("k", [0, 1, 2])
def test_image_passes_membership(k):
    for seed in range(5):
        t = random_tensor(E3, k + 4, 100 + seed)
        y = young_apply(t, k)
        assert is_member_Ck(y, k, tol=1e-9)


def test_unprojected_random_fails_membership():
    hits = sum(
        is_member_Ck(random_tensor(E3, 4, s), 0, tol=1e-9) for s in range(100)
    )
    assert hits == 0


def test_members_are_fixed_up_to_factor():
    # membership predicate and projector image agree in both directions
    for k in (0, 1, 2):
        t = random_ck(E3, k, 7)
        assert rel(young_apply(t, k), young_eigenvalue(k) * t) < 1e-10


def test_residual_report_keys():
    t = random_ck(E3, 1, 3)
    res = ck_residuals(t, 1)
    assert set(res) >= {"antisym_12", "antisym_34", "pair_symmetry", "first_bianchi"}
    assert all(v < 1e-10 for v in res.values())


def test_second_bianchi_detects_violation():
    # a C_0 tensor padded with a derivative slot generically breaks the
    # derivative-cycle condition while keeping the pointwise ones
    R = random_ck(E3, 0, 11)
    vec = random_tensor(E3, 1, 12)
    padded = tensor_product(vec, R)
    res = ck_residuals(padded, 1)
    assert res["antisym_12"] < 1e-12
    assert res["second_bianchi"] > 1e-3


@pytest.mark.parametrize(
    "n,k,expected",
    [
        (2, 0, 1),
        (3, 0, 6),
        (4, 0, 20),
        (3, 1, 15),
        (4, 1, 60),
        (3, 2, 27),
        (4, 2, 126),
    ],
)
def test_basis_dimensions(n, k, expected):
    # k=0 column checked against n^2(n^2-1)/12
    sp = Space(n)
    basis = basis_Ck(sp, k)
    assert len(basis) == expected
    if k == 0:
        assert expected == n * n * (n * n - 1) // 12


def test_basis_is_orthonormal_and_member():
    basis = basis_Ck(E3, 0)
    M = np.stack([b.data.ravel() for b in basis])
    assert np.allclose(M @ M.T, np.eye(len(basis)), atol=1e-10)
    assert all(is_member_Ck(b, 0, tol=1e-8) for b in basis)


def test_random_ck_deterministic_and_member():
    a = random_ck(E4, 1, 5)
    b = random_ck(E4, 1, 5)
    assert np.array_equal(a.data, b.data)
    assert is_member_Ck(a, 1, tol=1e-9)


def test_resource_limit():
    with pytest.raises(RuntimeError):
        basis_Ck(Space(8), 2)  # 8^6 coefficients exceeds the ambient budget


def test_mixed_product_eigenvalue():
    """g (x) R in the leading slots maps to -2(k+2)! times the completed
    symmetric product; the opposite arrangement is annihilated."""
    for sp in (E3, E4):
        g = sp.metric_tensor()
        for seed in (5, 6):
            R = random_ck(sp, 0, seed)
            lhs = young_apply(tensor_product(g, R), 2)
            rhs = kulkarni(sym_product(jacobi_form(R), g))
            assert rel(lhs, -48.0 * rhs) < 1e-10
            dead = young_apply(tensor_product(R, g), 2)
            assert dead.norm() < 1e-10 * max(lhs.norm(), 1.0)
