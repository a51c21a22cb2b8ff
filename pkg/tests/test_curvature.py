"""Curvature operators: traces, products, derivation and star actions."""

import numpy as np
import pytest

from curvjet.curvature import (
    decompose,
    divergence,
    exterior_ricci_derivative,
    is_member_Nk,
    jacobi_form,
    kn_pair,
    kulkarni,
    nk_basis,
    one_form_star_factor,
    pair_derivation,
    random_nk,
    ricci,
    ricci_derivative,
    ricci_of_star,
    skew_action,
    star_action,
    star_identity_residuals,
)
from curvjet.spaces import (
    Space,
    SymBiform,
    Tensor,
    metric_trace,
    permute,
    random_tensor,
    tensor_product,
)
from curvjet.young import basis_Ck, is_member_Ck, random_ck, young_apply

E3 = Space(3)
E4 = Space(4)


def rel(a: Tensor, b: Tensor) -> float:
    return (a - b).norm() / max(a.norm(), b.norm(), 1.0)


def random_skew(sp: Space, seed: int) -> Tensor:
    t = random_tensor(sp, 2, seed)
    return t - permute(t, (2, 1))


def einstein_tensor(sp: Space, seed: int, lam: float = 2.5) -> Tensor:
    g = sp.metric_tensor()
    W = decompose(random_ck(sp, 0, seed)).weyl_part
    return W + lam * kn_pair(g, g)


class TestRicci:
    def test_zero(self):
        z = Tensor(E3, np.zeros((3,) * 4))
        out = ricci(z)
        assert out.ric.norm() == 0.0 and out.scalar == 0.0

    def test_constant_curvature_value(self):
        # magnitude 2(n-1) on g kn g; the sign follows the trace convention
        g = E3.metric_tensor()
        out = ricci(kn_pair(g, g))
        assert rel(out.ric, -4.0 * g) < 1e-14
        assert out.scalar == pytest.approx(-12.0)

    def test_ric_symmetric_and_scalar_consistent(self):
        out = ricci(random_ck(E4, 0, 3))
        assert rel(out.ric, permute(out.ric, (2, 1))) < 1e-13
        assert out.scalar == pytest.approx(
            float(metric_trace(out.ric, 1, 2).data), rel=1e-12
        )

    def test_weyl_part_is_ricci_flat(self):
        W = decompose(random_ck(E4, 0, 4)).weyl_part
        out = ricci(W)
        assert out.ric.norm() < 1e-10 * max(W.norm(), 1.0)


class TestKulkarni:
    def test_metric_pair_hand_oracle(self):
        # h(u,v;x,y) = g(u,v) g(x,y) completes to the constant-curvature
        # tensor 2(g_ac g_bd - g_ad g_bc)
        g = E4.metric_tensor()
        hg = SymBiform(E4, 2, tensor_product(g, g))
        out = kulkarni(hg)
        gd = g.data
        expect = 2.0 * (
            np.einsum("ac,bd->abcd", gd, gd) - np.einsum("ad,bc->abcd", gd, gd)
        )
        assert np.allclose(out.data, expect, atol=1e-14)
        assert rel(out, kn_pair(g, g)) < 1e-14

    def test_zero(self):
        h = SymBiform(E3, 2, Tensor(E3, np.zeros((3,) * 4)))
        assert kulkarni(h).norm() == 0.0

    @pytest.mark.parametrize("m,k", [(2, 0), (3, 1), (4, 2)])
    def test_image_in_Ck(self, m, k):
        h = SymBiform(E3, m, random_tensor(E3, m + 2, 50 + m))
        assert is_member_Ck(kulkarni(h), k, tol=1e-9)

    def test_trivial_kernel_on_N4(self):
        basis = nk_basis(E3, 4)
        cols = np.stack([kulkarni(b).data.ravel() for b in basis], axis=1)
        rank = np.linalg.matrix_rank(cols, tol=1e-8)
        assert rank == len(basis)
        smin = np.linalg.svd(cols, compute_uv=False)[-1]
        for seed in range(50):
            h = random_nk(E3, 4, seed)
            assert kulkarni(h).norm() >= 0.5 * smin * h.norm() > 0.0


class TestDecompose:
    def test_constant_curvature_is_pure_scalar(self):
        g = E3.metric_tensor()
        R = kn_pair(g, g)
        d = decompose(R)
        assert rel(d.scalar_part, R) < 1e-13
        assert d.ricci_part.norm() < 1e-13 * R.norm()
        assert d.weyl_part.norm() < 1e-13 * R.norm()

    def test_zero(self):
        d = decompose(Tensor(E4, np.zeros((4,) * 4)))
        assert d.scalar_part.norm() == d.ricci_part.norm() == d.weyl_part.norm() == 0.0

    def test_round_trip(self):
        R = random_ck(E4, 0, 6)
        d = decompose(R)
        assert rel(d.scalar_part + d.ricci_part + d.weyl_part, R) < 1e-10

    def test_parts_have_expected_traces(self):
        R = random_ck(E4, 0, 7)
        d = decompose(R)
        assert ricci(d.weyl_part).ric.norm() < 1e-10 * max(R.norm(), 1.0)
        ric_mid = ricci(d.ricci_part).ric
        assert abs(float(metric_trace(ric_mid, 1, 2).data)) < 1e-10

    def test_low_dimension_unsupported(self):
        g = Space(2).metric_tensor()
        with pytest.raises(NotImplementedError):
            decompose(kn_pair(g, g))


class TestSkewAction:
    def test_kills_metric(self):
        B = random_skew(E4, 8)
        assert skew_action(B, E4.metric_tensor()).norm() < 1e-13

    def test_leibniz_over_tensor_product(self):
        B = random_skew(E3, 9)
        a = random_tensor(E3, 2, 10)
        b = random_tensor(E3, 1, 11)
        lhs = skew_action(B, tensor_product(a, b))
        rhs = tensor_product(skew_action(B, a), b) + tensor_product(
            a, skew_action(B, b)
        )
        assert rel(lhs, rhs) < 1e-13

    def test_kills_constant_curvature(self):
        g = E4.metric_tensor()
        B = random_skew(E4, 12)
        gg = kn_pair(g, g)
        assert skew_action(B, gg).norm() < 1e-12 * gg.norm()

    def test_rejects_non_skew(self):
        sym = E3.metric_tensor()
        with pytest.raises(ValueError):
            skew_action(sym, random_tensor(E3, 2, 0))


class TestStarAction:
    def test_one_form_is_ricci_composition(self):
        R = random_ck(E4, 0, 13)
        alpha = random_tensor(E4, 1, 14)
        out = star_action(R, alpha)
        ric = ricci(R).ric.data
        expect = np.einsum("ab,b,b->a", ric, E4.eps, alpha.data)
        assert np.allclose(out.data, expect, atol=1e-12)

    def test_scalar_trace_vanishes(self):
        for seed in range(5):
            R = random_ck(E4, 0, 20 + seed)
            Rp = random_ck(E4, 0, 30 + seed)
            st = star_action(R, ricci(Rp).ric)
            tr = abs(float(metric_trace(st, 1, 2).data))
            assert tr < 1e-12 * max(st.norm(), 1.0)

    def test_constant_curvature_star_itself_is_zero(self):
        # every derivation kills g kn g, so anything star g kn g vanishes
        g = E4.metric_tensor()
        gg = kn_pair(g, g)
        assert star_action(gg, gg).norm() < 1e-12 * gg.norm() ** 2
        R = random_ck(E4, 0, 15)
        assert star_action(R, gg).norm() < 1e-12 * max(R.norm() * gg.norm(), 1.0)

    def test_preserves_curvature_symmetries(self):
        R = random_ck(E3, 0, 16)
        Rp = random_ck(E3, 0, 17)
        assert is_member_Ck(star_action(R, Rp), 0, tol=1e-9)

    def test_preserves_plain_symmetry(self):
        R = random_ck(E3, 0, 18)
        sym = E3.metric_tensor() * 0.0 + (
            random_tensor(E3, 2, 19) + permute(random_tensor(E3, 2, 19), (2, 1))
        )
        out = star_action(R, sym)
        assert rel(out, permute(out, (2, 1))) < 1e-13


class TestStarIdentities:
    @pytest.mark.parametrize("sp", [E3, E4])
    def test_residuals_small(self, sp):
        for seed in range(15):
            R = random_ck(sp, 0, 100 + seed)
            Rp = random_ck(sp, 0, 200 + seed)
            res = star_identity_residuals(R, Rp, seed=seed)
            assert set(res) == {"six_term", "jacobi", "ricci_trace", "scalar_trace"}
            for name, v in res.items():
                assert v < 1e-12, (name, v)

    def test_ricci_of_star_contract(self):
        for seed in range(10):
            R = random_ck(E4, 0, 300 + seed)
            Rp = random_ck(E4, 0, 400 + seed)
            lhs, rhs, d = ricci_of_star(R, Rp)
            assert d < 1e-10

    def test_ricci_of_star_zero_input(self):
        z = Tensor(E4, np.zeros((4,) * 4))
        lhs, rhs, d = ricci_of_star(z, z)
        assert lhs.norm() == rhs.norm() == 0.0 and d == 0.0

    def test_star_against_weyl_is_ricci_flat(self):
        R = random_ck(E4, 0, 21)
        W = decompose(random_ck(E4, 0, 22)).weyl_part
        out = star_action(R, W)
        assert ricci(out).ric.norm() < 1e-10 * max(out.norm(), 1.0)

    def test_einstein_jacobi_corollary(self):
        R = einstein_tensor(E4, 23)
        SS = star_action(R, R)
        assert ricci(SS).ric.norm() < 1e-10 * max(SS.norm(), 1.0)
        T1 = np.einsum("aiiqrs,i->aqrs", pair_derivation(R, R), E4.eps)
        rng = np.random.default_rng(24)
        for _ in range(10):
            x, y = rng.standard_normal(4), rng.standard_normal(4)
            lhs = float(np.einsum("abcd,a,b,c,d->", SS.data, x, y, y, x))
            rhs = -4.0 * float(np.einsum("aqrs,a,q,r,s->", T1, x, y, y, x))
            assert abs(lhs - rhs) < 1e-10 * max(abs(lhs), abs(rhs), 1.0)

    @pytest.mark.parametrize("part", ["scalar_part", "ricci_part", "weyl_part"])
    def test_type_preservation(self, part):
        R = random_ck(E4, 0, 25)
        d = decompose(random_ck(E4, 0, 26))
        Rp = getattr(d, part)
        out = star_action(R, Rp)
        if out.norm() < 1e-10 * max(Rp.norm(), 1.0):
            return  # the scalar summand is annihilated
        od = decompose(out)
        off = sum(
            getattr(od, q).norm()
            for q in ("scalar_part", "ricci_part", "weyl_part")
            if q != part
        )
        assert off < 1e-9 * out.norm()

    def test_rotation_ricci_combination_projects_to_zero(self):
        # the (2,2) symmetrizer annihilates rotation-of-ricci 4-tensors
        for seed in range(5):
            R = random_ck(E4, 0, 500 + seed)
            ricp = ricci(random_ck(E4, 0, 600 + seed)).ric
            K = Tensor(E4, pair_derivation(R, ricp))
            assert young_apply(K, 0).norm() < 1e-10 * max(K.norm(), 1.0)


class TestDivergence:
    def test_zero(self):
        z = Tensor(E4, np.zeros((4,) * 5))
        assert divergence(z).norm() == 0.0

    def test_rejects_non_member(self):
        with pytest.raises(ValueError):
            divergence(random_tensor(E4, 5, 27))

    def test_contracted_second_bianchi(self):
        for seed in range(10):
            dR = random_ck(E4, 1, 700 + seed)
            div = divergence(dR)
            dric = exterior_ricci_derivative(dR)
            # div(z; x, y) = dric(x, y, z)
            lhs = div.data
            rhs = np.transpose(dric.data, (2, 0, 1))
            assert np.linalg.norm(lhs - rhs) < 1e-10 * max(
                np.linalg.norm(lhs), 1.0
            )

    def test_trace_free_slice_has_zero_divergence(self):
        basis = basis_Ck(E4, 1)
        M = np.stack([ricci_derivative(b).data.ravel() for b in basis], axis=1)
        u, s, vt = np.linalg.svd(M)
        rank = int(np.sum(s > 1e-10 * s[0]))
        null = vt[rank:]
        assert null.shape[0] > 0  # the slice is nonempty at n=4
        coeff = null[0]
        dR = Tensor(E4, sum(c * b.data for c, b in zip(coeff, basis)))
        assert ricci_derivative(dR).norm() < 1e-10
        assert divergence(dR).norm() < 1e-10 * max(dR.norm(), 1.0)


class TestNk:
    def test_jacobi_form_of_curvature_is_member(self):
        for seed in range(50):
            R = random_ck(E3, 0, 800 + seed)
            assert is_member_Nk(jacobi_form(R), tol=1e-9)

    def test_metric_is_not_member(self):
        h = SymBiform(E3, 0, E3.metric_tensor())
        assert not is_member_Nk(h)

    def test_zero_is_member(self):
        h = SymBiform(E3, 2, Tensor(E3, np.zeros((3,) * 4)))
        assert is_member_Nk(h)

    @pytest.mark.parametrize(
        "n,m,expected",
        [(3, 2, 6), (3, 3, 15), (3, 4, 27), (4, 2, 20)],
    )
    def test_dimension_matches_curvature_space(self, n, m, expected):
        # dim N_{k+2} = dim C_k
        sp = Space(n)
        assert len(nk_basis(sp, m)) == expected
        assert len(basis_Ck(sp, m - 2)) == expected

    def test_random_nk_members(self):
        for seed in range(5):
            h = random_nk(E3, 3, seed)
            assert is_member_Nk(h, tol=1e-9)


def test_sphere_factor_report():
    """Neither unit-curvature normalization reproduces the n-fold factor; the
    measured values are +-(n-1). Both candidates are reported."""
    out = one_form_star_factor(E4)
    assert out["target_factor"] == 4.0
    assert out["minus_half_kn"] == pytest.approx(3.0, abs=1e-12)
    assert out["plus_half_kn"] == pytest.approx(-3.0, abs=1e-12)
    assert out["match"] is None
