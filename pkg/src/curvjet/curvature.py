"""Curvature algebra: Ricci traces, Kulkarni products, and curvature actions.

Sign conventions in force throughout the package:
  ric(x,y)  = -sum_i eps_i R(x,e_i,y,e_i)
  (B . A)(y_1,...) = -sum_m A(..., B y_m, ...)          for skew B
  R*A       = -sum_i sum_j eps_j (R_{x_i,e_j} . A)(..., e_j at i, ...)
With these, sum_j eps_j R_{x,e_j}e_j = Ric x, and the star action on a
1-form is alpha o Ric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spaces import Space, SymBiform, Tensor, metric_trace, symmetrize
from .young import _group_sum, basis_Ck, is_member_Ck, young_apply

__all__ = [
    "RicciData",
    "ricci",
    "kn_pair",
    "kulkarni",
    "decompose",
    "Decomposition",
    "skew_action",
    "star_action",
    "pair_derivation",
    "star_identity_residuals",
    "ricci_of_star",
    "divergence",
    "ricci_derivative",
    "exterior_ricci_derivative",
    "jacobi_form",
    "is_member_Nk",
    "nk_basis",
    "random_nk",
    "one_form_star_factor",
]


@dataclass(frozen=True)
class RicciData:
    """Ricci form and scalar curvature of an algebraic curvature tensor."""

    ric: Tensor
    scalar: float


def ricci(R: Tensor) -> RicciData:
    if R.valence != 4:
        raise ValueError("ricci needs a valence-4 tensor")
    ric = -1.0 * metric_trace(R, 2, 4)
    scalar = float(metric_trace(ric, 1, 2).data)
    return RicciData(ric, scalar)


def kn_pair(a: Tensor, b: Tensor) -> Tensor:
    """Kulkarni-Nomizu product of two symmetric bilinear forms."""
    if a.valence != 2 or b.valence != 2:
        raise ValueError("kn_pair needs two valence-2 tensors")
    A, B = a.data, b.data
    out = (
        np.einsum("ac,bd->abcd", A, B)
        + np.einsum("bd,ac->abcd", A, B)
        - np.einsum("ad,bc->abcd", A, B)
        - np.einsum("bc,ad->abcd", A, B)
    )
    return Tensor(a.space, out)


def kulkarni(h: SymBiform) -> Tensor:
    """Generalized Kulkarni-Nomizu product of a degree-m SymBiform (m >= 2).

    The last two symmetric slots and the bilinear pair are interleaved into
    four curvature slots; the remaining m-2 symmetric slots stay in front.
    The image always satisfies the curvature symmetries (and the differential
    Bianchi identity when leading symmetric slots are present).
    """
    if h.m < 2:
        raise ValueError("kulkarni needs degree m >= 2")
    k = h.m - 2
    d = h.tensor.data
    # input layout (y_1..y_k, u, v, p, q) -> terms h(y.., x_a, x_b; x_c, x_d)
    def term(qa, qb, qc, qd):
        # out axis k+lab-1 reads the input axis holding x_lab
        full = list(range(k)) + [0, 0, 0, 0]
        for in_off, lab in enumerate((qa, qb, qc, qd)):
            full[k + lab - 1] = k + in_off
        return np.transpose(d, axes=full)

    out = term(1, 3, 2, 4) + term(2, 4, 1, 3) - term(1, 4, 2, 3) - term(2, 3, 1, 4)
    return Tensor(h.space, out)


@dataclass(frozen=True)
class Decomposition:
    scalar_part: Tensor
    ricci_part: Tensor
    weyl_part: Tensor


def decompose(R: Tensor) -> Decomposition:
    """Orthogonal split of an algebraic curvature tensor into scalar, trace-free
    Ricci, and totally trace-free (Weyl) parts.

    Normalized so that R = g KN g has scalar_part = R.
    """
    sp = R.space
    n = sp.dim
    if n < 3:
        raise NotImplementedError("decompose needs dim >= 3")
    rd = ricci(R)
    g = sp.metric_tensor()
    s = rd.scalar
    ric0 = rd.ric - (s / n) * g
    scalar_part = (-s / (2.0 * n * (n - 1))) * kn_pair(g, g)
    ricci_part = (-1.0 / (n - 2)) * kn_pair(g, ric0)
    weyl_part = R - scalar_part - ricci_part
    return Decomposition(scalar_part, ricci_part, weyl_part)


def skew_action(B: Tensor, A: Tensor, tol: float = 1e-8) -> Tensor:
    """Derivation action of a skew endomorphism: (B.A) = -sum_m A(.., B y_m, ..)."""
    if B.valence != 2:
        raise ValueError("skew_action needs a valence-2 form")
    if float(np.linalg.norm(B.data + B.data.T)) > tol * max(B.norm(), 1e-300):
        raise ValueError("form is not antisymmetric")
    if A.valence == 0:
        return Tensor(A.space, np.zeros(()))
    eps = A.space.eps
    W = B.data * eps[None, :]  # W[b,a] = eps_a B(e_b, e_a) = (B e_b)^a
    out = np.zeros_like(A.data)
    for m in range(A.valence):
        term = np.tensordot(A.data, W, axes=([m], [1]))
        out += np.moveaxis(term, -1, m)
    return Tensor(A.space, -out)


def _endo_kernel(R: Tensor) -> np.ndarray:
    """M[a,d,j,c] = eps_j eps_c R[a,j,d,c]; contracting A's slots (j,c) against
    M yields sum_j eps_j A(.., e_j, .., R_{x_a, e_j} x_d, ..)."""
    eps = R.space.eps
    M = np.einsum("ajdc,j,c->adjc", R.data, eps, eps)
    return M


def _ric_endo(R: Tensor) -> np.ndarray:
    """E[a,b] = (Ric e_a)^b."""
    rd = ricci(R)
    return rd.ric.data * R.space.eps[None, :]


_LETTERS = "abcdefghijklmnop"


def star_action(R: Tensor, A: Tensor) -> Tensor:
    """Curvature action R*A = -sum_i sum_j eps_j (R_{x_i,e_j}.A)(.., e_j at i, ..).

    Expanded form: Ricci endomorphism applied in each slot, plus the pairwise
    rotation terms; a 1-form maps to alpha o Ric.
    """
    if R.valence != 4:
        raise ValueError("star_action needs a valence-4 curvature tensor")
    if R.space != A.space:
        raise ValueError("mismatched spaces")
    v = A.valence
    if v == 0:
        return Tensor(A.space, np.zeros(()))
    E = _ric_endo(R)
    M = _endo_kernel(R)
    out = np.zeros_like(A.data)
    # Ricci terms: out[.., b at i, ..] = sum_a A[.., a at i, ..] E[b, a]
    for i in range(v):
        term = np.tensordot(A.data, E, axes=([i], [1]))
        out += np.moveaxis(term, -1, i)
    # pairwise terms over ordered (i, m), i != m
    base = list(_LETTERS[:v])
    for i in range(v):
        for m in range(v):
            if m == i:
                continue
            sub_in = list(base)
            sub_in[i] = "q"
            sub_in[m] = "r"
            sub_out = list(base)
            spec = f"{''.join(sub_in)},{base[i]}{base[m]}qr->{''.join(sub_out)}"
            out += np.einsum(spec, A.data, M)
    return Tensor(A.space, out)


def pair_derivation(R: Tensor, T: Tensor) -> np.ndarray:
    """D[a, b, ...] = (R_{e_a, e_b} . T)(...), batched over all plane pairs."""
    if R.valence != 4:
        raise ValueError("pair_derivation needs a valence-4 curvature tensor")
    v = T.valence
    eps = R.space.eps
    K = R.data * eps[None, None, None, :]  # K[a,b,u,c] = (R_{e_a,e_b} e_u)^c
    n = R.space.dim
    out = np.zeros((n, n) + T.data.shape)
    for m in range(v):
        res = np.tensordot(T.data, K, axes=([m], [3]))
        # res axes: (T axes without m) + (a, b, u)
        out += np.moveaxis(res, [-3, -2, -1], [0, 1, m + 2])
    return -out


def star_identity_residuals(R: Tensor, Rp: Tensor, seed: int = 0) -> dict[str, float]:
    """Relative residuals of the four trace/expansion identities of the star action.

    Keys: six_term (alternating derivation/rotation expansion), jacobi
    (sampled Jacobi-diagonal expansion), ricci_trace, scalar_trace.

    The six-term expansion and R*R' agree through their curvature-tensor
    component only (equivalently: on the Jacobi diagonal, which determines
    that component), so the expansion is projected before comparing.  The
    rotation terms are killed by the projection; the derivation terms are
    not.  Raw 4-tensor equality fails by O(1).
    """
    sp = R.space
    SS = star_action(R, Rp)
    ricR = ricci(R).ric
    Dp = pair_derivation(R, Rp)  # (R_{ab} . R')
    Gp = pair_derivation(Rp, ricR)  # (R'_{ab} . ric)
    eps = sp.eps
    T1 = np.einsum("aiiqrs,i->aqrs", Dp, eps)
    T2 = np.transpose(T1, (1, 0, 2, 3))
    U1 = np.transpose(Gp, (2, 0, 3, 1))  # (R'_{x2,x4}.ric)(x1,x3)
    U2 = np.transpose(Gp, (2, 0, 1, 3))  # (R'_{x2,x3}.ric)(x1,x4)
    U3 = np.transpose(Gp, (0, 2, 1, 3))  # (R'_{x1,x3}.ric)(x2,x4)
    U4 = np.transpose(Gp, (0, 2, 3, 1))  # (R'_{x1,x4}.ric)(x2,x3)
    rhs = -(2.0 * T1 - 2.0 * T2) - (U1 - U2 + U3 - U4)
    proj = young_apply(Tensor(sp, rhs), 0).data / 12.0
    scale = max(np.linalg.norm(SS.data), 1.0)
    res: dict[str, float] = {}
    res["six_term"] = float(np.linalg.norm(proj - SS.data)) / scale
    # Jacobi diagonal: R*R'(x,y,x,y) doubles the derivation terms alone.
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(8):
        x = rng.standard_normal(sp.dim)
        y = rng.standard_normal(sp.dim)
        lhs_val = float(np.einsum("abcd,a,b,c,d->", SS.data, x, y, x, y))
        rhs_val = -2.0 * (
            float(np.einsum("aqrs,a,q,r,s->", T1, x, y, x, y))
            + float(np.einsum("aqrs,a,q,r,s->", T1, y, x, y, x))
        )
        den = max(abs(lhs_val), abs(rhs_val), scale)
        worst = max(worst, abs(lhs_val - rhs_val) / den)
    res["jacobi"] = worst
    _, _, d = ricci_of_star(R, Rp)
    res["ricci_trace"] = d
    st = star_action(R, ricci(Rp).ric)
    res["scalar_trace"] = abs(float(metric_trace(st, 1, 2).data)) / max(
        np.linalg.norm(st.data), 1.0
    )
    return res


def ricci_of_star(R: Tensor, Rp: Tensor) -> tuple[Tensor, Tensor, float]:
    """Both sides of the trace identity sum_i (R*R')(x,e_i,y,e_i) = -(R*ric')(x,y).

    Returns (lhs, rhs, relative difference).
    """
    star = star_action(R, Rp)
    lhs = metric_trace(star, 2, 4)
    ricp = ricci(Rp).ric
    rhs = -1.0 * star_action(R, ricp)
    scale = max(lhs.norm(), rhs.norm(), 1.0)
    return lhs, rhs, (lhs - rhs).norm() / scale


def divergence(dR: Tensor, tol: float = 1e-8) -> Tensor:
    """delta R(x; y, z) = -sum_a eps_a grad_{e_a} R(e_a, x, y, z)."""
    if dR.valence != 5:
        raise ValueError("divergence needs a valence-5 tensor")
    if not is_member_Ck(dR, 1, tol):
        raise ValueError("input does not satisfy the first-derivative symmetries")
    return -1.0 * metric_trace(dR, 1, 2)


def ricci_derivative(dR: Tensor) -> Tensor:
    """grad ric as a valence-3 tensor (a; x, y) from a first derivative of R."""
    if dR.valence != 5:
        raise ValueError("needs a valence-5 tensor")
    return -1.0 * metric_trace(dR, 3, 5)


def exterior_ricci_derivative(dR: Tensor) -> Tensor:
    """d ric(x,y,z) = grad_x ric(y,z) - grad_y ric(x,z)."""
    dr = ricci_derivative(dR).data
    return Tensor(dR.space, dr - np.transpose(dr, (1, 0, 2)))


def jacobi_form(T: Tensor) -> SymBiform:
    """Degree-2 SymBiform h(u,v;x,y) from the slot pattern T(x,u,v,y)."""
    if T.valence != 4:
        raise ValueError("jacobi_form needs a valence-4 tensor")
    arranged = np.transpose(T.data, axes=(1, 2, 0, 3))
    return SymBiform(T.space, 2, Tensor(T.space, arranged))


def is_member_Nk(h: SymBiform, tol: float = 1e-8) -> bool:
    """Test the defining property: symmetrization over the first m+1 slots vanishes."""
    t = h.tensor
    m = h.m
    sym = symmetrize(t, tuple(range(1, m + 2)))
    return sym.norm() <= tol * max(t.norm(), 1e-300)


_NK_CACHE: dict[tuple, list[SymBiform]] = {}


def _sym_multi_indices(n: int, m: int) -> list[tuple[int, ...]]:
    """Non-decreasing index tuples of length m over range(n)."""
    import itertools

    return list(itertools.combinations_with_replacement(range(n), m))


def nk_basis(space: Space, m: int) -> list[SymBiform]:
    """Orthonormal basis (in coefficient space) of the subspace of degree-m
    SymBiforms killed by symmetrization over the first m+1 slots."""
    key = (space.dim, space.signature, m)
    cached = _NK_CACHE.get(key)
    if cached is not None:
        return cached
    n = space.dim
    v = m + 2
    sym_idx = _sym_multi_indices(n, m)
    bi_idx = _sym_multi_indices(n, 2)
    cols = []
    col_tensors = []
    for I in sym_idx:
        for pq in bi_idx:
            arr = np.zeros((n,) * v)
            arr[I + pq] = 1.0
            t = SymBiform(space, m, Tensor(space, arr)).tensor.data
            col_tensors.append(t)
            sym = _group_sum(t, list(range(m + 1)))
            cols.append(sym.ravel())
    Cmat = np.array(cols).T  # (n^v, ncols)
    # full vt is only needed when rows < cols; economy mode keeps m=4 cheap
    u, s, vt = np.linalg.svd(Cmat, full_matrices=Cmat.shape[0] < Cmat.shape[1])
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > 1e-10 * max(smax, 1e-300)))
    null = vt[rank:]
    basis = []
    for row in null:
        arr = sum(c * t for c, t in zip(row, col_tensors))
        basis.append(SymBiform(space, m, Tensor(space, arr)))
    _NK_CACHE[key] = basis
    return basis


def random_nk(space: Space, m: int, seed: int) -> SymBiform:
    basis = nk_basis(space, m)
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal(len(basis))
    arr = sum(c * b.tensor.data for c, b in zip(coeff, basis))
    return SymBiform(space, m, Tensor(space, arr))


def one_form_star_factor(space: Space) -> dict:
    """Measured star-action factor on 1-forms for both unit-curvature candidates.

    For R = c * (g KN g) the action on a 1-form is multiplication by
    -2c(n-1); the report records both c = +-1/2 against the target factor n.
    """
    n = space.dim
    g = space.metric_tensor()
    gg = kn_pair(g, g)
    out: dict = {"target_factor": float(n)}
    match = None
    for name, c in (("minus_half_kn", -0.5), ("plus_half_kn", 0.5)):
        R = c * gg
        factors = []
        for a in range(n):
            alpha = np.zeros(n)
            alpha[a] = 1.0
            res = star_action(R, Tensor(space, alpha))
            factors.append(res.data[a] / 1.0)
        fac = float(np.mean(factors))
        out[name] = fac
        if abs(fac - n) < 1e-9:
            match = name
    out["match"] = match
    return out
