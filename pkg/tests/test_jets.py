"""Two-jet constraints, trace operators, Einstein criterion and extension."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvjet.curvature import (
    is_member_Nk,
    kn_pair,
    pair_derivation,
    ricci,
    star_action,
)
from curvjet.jets import (
    JacobiFit,
    SectionTwoJet,
    TwoJet,
    einstein_check,
    einstein_extend,
    extension_solution_dim,
    fit_jacobi_relation,
    hat_embed,
    jet_traces,
    random_einstein_one_jet,
    random_two_jet,
    sym_jacobi,
    tilde_ops,
    two_jet_from_dict,
    two_jet_to_dict,
    validate_section_jet,
    validate_two_jet,
    weitzenbock_check,
    weitzenbock_special,
)
from curvjet.spaces import Space, Tensor, random_tensor
from curvjet.young import basis_Ck, random_ck, young_apply

E3 = Space(3)
E4 = Space(4)


def rel(a: np.ndarray, b: np.ndarray) -> float:
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1.0)


def zero_jet(sp: Space) -> TwoJet:
    n = sp.dim
    return TwoJet(
        Tensor(sp, np.zeros((n,) * 4)),
        Tensor(sp, np.zeros((n,) * 5)),
        Tensor(sp, np.zeros((n,) * 6)),
    )


def constant_curvature_jet(sp: Space, lam: float = 1.0) -> TwoJet:
    # g owedge g is annihilated by its own rotations, so d2R = 0 is consistent
    g = sp.metric_tensor()
    n = sp.dim
    return TwoJet(
        lam * kn_pair(g, g),
        Tensor(sp, np.zeros((n,) * 5)),
        Tensor(sp, np.zeros((n,) * 6)),
    )


def hess_kernel_c2(sp: Space, seed: int) -> Tensor:
    """A C_2 element with vanishing second Ricci derivative; needs dim >= 4."""
    basis = basis_Ck(sp, 2)
    cols = [
        (-np.einsum("abuivi,i->abuv", b.data, sp.eps)).ravel() for b in basis
    ]
    M = np.array(cols).T
    u, s, vt = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > 1e-10 * s[0]))
    null = vt[rank:]
    assert null.shape[0] > 0
    rng = np.random.default_rng(seed)
    coeff = null.T @ rng.standard_normal(null.shape[0])
    return Tensor(sp, sum(c * b.data for c, b in zip(coeff, basis)))


class TestValidate:
    def test_zero_jet_passes(self):
        ok, res = validate_two_jet(zero_jet(E3))
        assert ok and max(res.values()) == 0.0

    @pytest.mark.parametrize("sp", [E3, E4])
    def test_constant_curvature_passes(self, sp):
        ok, res = validate_two_jet(constant_curvature_jet(sp, 2.0))
        assert ok, res

    def test_generic_curvature_alone_fails_ricci_identity(self):
        # a generic R rotates itself, so d2R = 0 breaks the commutator
        n = E4.dim
        j = TwoJet(
            random_ck(E4, 0, 0),
            Tensor(E4, np.zeros((n,) * 5)),
            Tensor(E4, np.zeros((n,) * 6)),
        )
        ok, res = validate_two_jet(j)
        assert not ok
        assert res["ricci_identity"] > 1e-3
        assert res["curvature"] < 1e-12 and res["derivative"] < 1e-12

    def test_reports_bad_derivative(self):
        j = random_two_jet(E3, 0)
        bad = TwoJet(j.R, random_tensor(E3, 5, 1), j.d2R)
        ok, res = validate_two_jet(bad)
        assert not ok and res["derivative"] > 1e-3

    def test_rejects_wrong_valence(self):
        with pytest.raises(ValueError):
            TwoJet(random_tensor(E3, 3, 0), random_tensor(E3, 5, 1), random_tensor(E3, 6, 2))

    def test_rejects_mixed_spaces(self):
        j3, j4 = random_two_jet(E3, 0), random_two_jet(E4, 0)
        with pytest.raises(ValueError):
            TwoJet(j3.R, j3.dR, j4.d2R)


class TestRandomTwoJet:
    @pytest.mark.parametrize("sp", [E3, E4, Space(4, (1, 1, 1, -1))])
    def test_valid(self, sp):
        for seed in range(5):
            ok, res = validate_two_jet(random_two_jet(sp, seed))
            assert ok, res

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=10, deadline=None)
    def test_deterministic(self, seed):
        a = random_two_jet(E3, seed)
        b = random_two_jet(E3, seed)
        assert np.array_equal(a.d2R.data, b.d2R.data)
        assert np.array_equal(a.R.data, b.R.data)

    def test_seeds_differ(self):
        a, b = random_two_jet(E3, 0), random_two_jet(E3, 1)
        assert not np.allclose(a.R.data, b.R.data)

    def test_unsupported_dimension(self):
        with pytest.raises(ValueError):
            random_two_jet(Space(6), 0)

    def test_section_path(self):
        bg = random_ck(E4, 0, 10)
        sj = random_two_jet(E4, 3, background=bg)
        assert isinstance(sj, SectionTwoJet)
        ok, res = validate_section_jet(sj)
        assert ok, res


class TestTracesAndJacobi:
    def test_hessian_ricci_symmetric_in_form_slots(self):
        j = random_two_jet(E4, 2)
        hess = jet_traces(j)[0].data
        assert rel(hess, np.transpose(hess, (0, 1, 3, 2))) < 1e-13

    def test_sym_jacobi_constant_curvature_oracle(self):
        # R^(0)(xi, xi; x, x) = 2 (g(x, xi)^2 - g(x, x) g(xi, xi)) on g owedge g
        g = E4.metric_tensor()
        form = sym_jacobi(constant_curvature_jet(E4), 0)
        rng = np.random.default_rng(3)
        for _ in range(10):
            xi, x = rng.standard_normal(4), rng.standard_normal(4)
            val = float(np.einsum("abcd,a,b,c,d->", form.tensor.data, xi, xi, x, x))
            expect = 2.0 * (float(x @ xi) ** 2 - float(x @ x) * float(xi @ xi))
            assert val == pytest.approx(expect, rel=1e-11, abs=1e-11)

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_sym_jacobi_lands_in_Nk(self, k):
        for seed in range(5):
            j = random_two_jet(E4, 40 + seed)
            assert is_member_Nk(sym_jacobi(j, k), tol=1e-8)

    def test_rough_laplacian_tilde_trace(self):
        # the contracted tableau of d2R equals 80 nabla*nabla R + 16 R*R
        for seed in range(10):
            j = random_two_jet(E4, 60 + seed)
            lap = jet_traces(j)[2].data
            SS = star_action(j.R, j.R).data
            tilde_lap = tilde_ops(j)[1].data
            assert rel(tilde_lap, 80.0 * lap + 16.0 * SS) < 1e-12

    def test_hat_embed_lands_in_C2(self):
        from curvjet.young import is_member_Ck

        S = random_ck(E4, 0, 70)
        assert is_member_Ck(hat_embed(S), 2, tol=1e-9)


class TestWeitzenbock:
    @pytest.mark.parametrize("sp", [E3, E4])
    def test_special_form_on_random_jets(self, sp):
        for seed in range(10):
            res = weitzenbock_special(random_two_jet(sp, seed))
            assert res["special"] < 1e-12, (seed, res)

    def test_einstein_form_needs_flat_hessian(self):
        # on the kernel of the second Ricci derivative the tableau term drops
        d2 = hess_kernel_c2(E4, 5)
        n = E4.dim
        j = TwoJet(
            Tensor(E4, np.zeros((n,) * 4)), Tensor(E4, np.zeros((n,) * 5)), d2
        )
        res = weitzenbock_special(j)
        assert res["hessian_ricci"] < 1e-12
        assert res["einstein_form"] < 1e-12

    def test_section_calibrated_and_projected(self):
        for seed in range(5):
            sj = random_two_jet(E4, 80 + seed, background=random_ck(E4, 0, seed))
            res = weitzenbock_check(sj)
            assert res["calibrated"] < 1e-12
            assert res["strict"] < 1e-12
            assert res["displayed_projected"] < 1e-12
            assert np.isfinite(res["displayed_raw"])

    def test_zero_section(self):
        n = E4.dim
        sj = SectionTwoJet(
            random_ck(E4, 0, 90),
            Tensor(E4, np.zeros((n,) * 4)),
            Tensor(E4, np.zeros((n,) * 5)),
            Tensor(E4, np.zeros((n,) * 6)),
        )
        res = weitzenbock_check(sj)
        assert res["calibrated"] == res["strict"] == 0.0


class TestHierarchy:
    @staticmethod
    def traces_of(sp: Space, d2: np.ndarray):
        eps = sp.eps
        hess = -np.einsum("abuivi,i->abuv", d2, eps)
        div_der = -np.einsum("aiizuv,i->azuv", d2, eps)
        lap = -np.einsum("iiabcd,i->abcd", d2, eps)
        return hess, div_der, lap

    @pytest.mark.parametrize("sp", [E3, E4])
    def test_divergence_derivative_from_hessian(self, sp):
        # first relation: nabla delta nabla R is the alternated Ricci hessian
        for seed in range(10):
            d2 = random_ck(sp, 2, seed).data
            hess, div_der, _ = self.traces_of(sp, d2)
            expect = np.transpose(hess, (0, 2, 1, 3)) - np.transpose(hess, (0, 2, 3, 1))
            assert rel(div_der, expect) < 1e-12

    @pytest.mark.parametrize("sp", [E3, E4])
    def test_rough_laplacian_from_hessian_tableau(self, sp):
        for seed in range(10):
            d2 = random_ck(sp, 2, 100 + seed).data
            hess, _, lap = self.traces_of(sp, d2)
            tab = young_apply(Tensor(sp, np.transpose(hess, (0, 2, 1, 3))), 0).data
            assert rel(lap, 0.25 * tab) < 1e-12

    @pytest.mark.parametrize("sp", [E3, E4])
    def test_rough_laplacian_from_divergence(self, sp):
        for seed in range(10):
            d2 = random_ck(sp, 2, 200 + seed).data
            _, div_der, lap = self.traces_of(sp, d2)
            assert rel(lap, div_der - np.transpose(div_der, (1, 0, 2, 3))) < 1e-12

    def test_vanishing_chain(self):
        # hessian kernel forces both downstream traces to vanish
        for seed in range(5):
            d2 = hess_kernel_c2(E4, 300 + seed).data
            hess, div_der, lap = self.traces_of(E4, d2)
            scale = max(np.linalg.norm(d2), 1.0)
            assert np.linalg.norm(hess) < 1e-10 * scale
            assert np.linalg.norm(div_der) < 1e-10 * scale
            assert np.linalg.norm(lap) < 1e-10 * scale


class TestEinsteinCheck:
    def test_constant_curvature_is_einstein(self):
        ok, report = einstein_check(constant_curvature_jet(E3, -1.5))
        assert ok
        assert max(report.values()) < 1e-10

    def test_generic_jet_is_not(self):
        ok, report = einstein_check(random_two_jet(E4, 7))
        assert not ok
        assert report["ricci_proportional"] > 1e-3

    def test_report_keys(self):
        _, report = einstein_check(zero_jet(E3))
        assert set(report) == {
            "ricci_proportional",
            "ricci_derivative",
            "hessian_ricci",
            "tableau_trace_defect",
            "form_trace_defect",
        }

    def test_verdicts_agree_on_extended_and_perturbed(self):
        for seed in range(5):
            R, dR = random_einstein_one_jet(E4, seed)
            j = einstein_extend(R, dR)
            ok, rep = einstein_check(j)
            assert ok, rep
            assert rep["tableau_trace_defect"] < 1e-8
            assert rep["form_trace_defect"] < 1e-8
            # pushing the jet off the kernel flips all three formulations
            bad = TwoJet(j.R, j.dR, j.d2R + 1e-2 * random_ck(E4, 2, seed))
            ok2, rep2 = einstein_check(bad)
            assert not ok2
            assert rep2["tableau_trace_defect"] > 1e-8
            assert rep2["form_trace_defect"] > 1e-8

    def test_einstein_display_of_tilde_trace(self):
        # on Einstein jets the projected trace collapses to the pair-symmetric
        # curvature action
        for seed in range(5):
            R, dR = random_einstein_one_jet(E4, 20 + seed)
            j = einstein_extend(R, dR)
            tilde_hess = tilde_ops(j)[0].data
            SS = star_action(j.R, j.R).data
            expect = -4.0 * (
                np.transpose(SS, (0, 2, 1, 3)) + np.transpose(SS, (0, 2, 3, 1))
            )
            assert rel(tilde_hess, expect) < 1e-9


class TestFit:
    def test_zero_curvature_rejected(self):
        with pytest.raises(ValueError):
            fit_jacobi_relation(zero_jet(E3))

    def test_constant_curvature_family_fits_zero(self):
        for lam in (1.0, -3.0, 0.25):
            fit = fit_jacobi_relation(constant_curvature_jet(E4, lam))
            assert fit == JacobiFit(0.0, 0.0)

    def test_generic_jet_has_large_residual(self):
        fit = fit_jacobi_relation(random_two_jet(E4, 11))
        assert fit.residual > 1e-2

    def test_residual_is_scale_free(self):
        j = random_two_jet(E4, 12)
        scaled = TwoJet(j.R, j.dR, 2.0 * j.d2R)
        a, b = fit_jacobi_relation(j), fit_jacobi_relation(scaled)
        assert b.c == pytest.approx(2.0 * a.c, rel=1e-12)


class TestExtend:
    def test_rejects_non_einstein_curvature(self):
        R = random_ck(E4, 0, 13)
        dR = Tensor(E4, np.zeros((4,) * 5))
        with pytest.raises(ValueError, match="not Einstein"):
            einstein_extend(R, dR)

    def test_rejects_nonparallel_derivative(self):
        R, _ = random_einstein_one_jet(E4, 14)
        with pytest.raises(ValueError, match="nonparallel"):
            einstein_extend(R, random_ck(E4, 1, 15))

    @pytest.mark.parametrize("sp", [E3, E4])
    def test_round_trip(self, sp):
        for seed in range(3):
            R, dR = random_einstein_one_jet(sp, seed)
            j = einstein_extend(R, dR)
            assert rel(j.R.data, R.data) < 1e-12
            assert np.linalg.norm(j.dR.data - dR.data) < 1e-8 * max(dR.norm(), 1.0)
            ok, res = validate_two_jet(j)
            assert ok, res
            assert einstein_check(j)[0]

    def test_solution_dim_reported(self):
        dim = extension_solution_dim(E4)
        assert dim >= 0
        assert extension_solution_dim(E4) == dim  # cached and stable


class TestSerialization:
    def test_round_trip(self):
        import json

        j = random_two_jet(E4, 16)
        doc = two_jet_to_dict(j)
        back = two_jet_from_dict(json.loads(json.dumps(doc)))
        assert np.array_equal(back.R.data, j.R.data)
        assert np.array_equal(back.dR.data, j.dR.data)
        assert np.array_equal(back.d2R.data, j.d2R.data)

    def test_rejects_inconsistent_document(self):
        doc = two_jet_to_dict(random_two_jet(E3, 17))
        doc["dim"] = 4
        with pytest.raises(ValueError):
            two_jet_from_dict(doc)
