"""Young symmetrizer for the two-row shape (k+2, 2) and numeric bases of its image.

The operator acts on valence k+4 tensors stored derivative-first:
slots (d_1, ..., d_k, c_1, c_2, c_3, c_4).  The tableau is labelled
curvature-first: labels 1..4 are the curvature slots c_1..c_4 and labels
5..k+4 are the derivative slots d_1..d_k.  Row 1 holds labels {1,3,5,...,k+4},
row 2 holds {2,4}; the columns are {1,2} and {3,4}.  Row and column sums are
unnormalized group sums (no 1/|group| factors).
"""

from __future__ import annotations

import numpy as np

from .spaces import Space, Tensor, metric_trace, symmetrize

__all__ = [
    "young_apply",
    "tableau_apply",
    "young_eigenvalue",
    "is_member_Ck",
    "ck_residuals",
    "basis_Ck",
    "random_ck",
    "DEFAULT_ORDER",
]

# Row-then-column is the calibrated composition order: it reproduces the
# eigenvalue 12 on g KN g at k=0.  The other order is kept selectable for
# experiments but is not used by the library itself.
DEFAULT_ORDER = "row_first"


def _group_sum(data: np.ndarray, axes: list[int]) -> np.ndarray:
    """Unnormalized sum over all permutations of the given (0-based) axes.

    Uses the coset recursion  S_m = S_{m-1} ∘ (e + Σ_{j<m} (j m)), applying the
    transposition layer for the largest m first; m! terms cost O(m²) passes.
    """
    out = data
    for m in range(len(axes), 1, -1):
        acc = out.copy()
        for j in range(m - 1):
            acc += np.swapaxes(out, axes[j], axes[m - 1])
        out = acc
    return out


def _alt_sum(data: np.ndarray, i: int, j: int) -> np.ndarray:
    return data - np.swapaxes(data, i, j)


def tableau_sum(
    data: np.ndarray,
    row1: list[int],
    row2: list[int],
    order: str = DEFAULT_ORDER,
) -> np.ndarray:
    """Apply the unnormalized two-row tableau symmetrizer on the given axes.

    Columns are the leading pairs of (row1, row2).
    """
    cols = list(zip(row1, row2))
    if order == "row_first":
        out = _group_sum(data, row1)
        out = _group_sum(out, row2)
        for i, j in cols:
            out = _alt_sum(out, i, j)
        return out
    if order == "column_first":
        out = data
        for i, j in cols:
            out = _alt_sum(out, i, j)
        out = _group_sum(out, row1)
        return _group_sum(out, row2)
    raise ValueError(f"unknown order {order!r}")


def _label_axes(k: int) -> tuple[list[int], list[int]]:
    """Axes for the (k+2,2) tableau under the label/storage dictionary."""
    # label l in 1..4 -> storage axis k+l-1; label l >= 5 -> axis l-5
    row1 = [k, k + 2] + list(range(k))
    row2 = [k + 1, k + 3]
    return row1, row2


def young_apply(t: Tensor, k: int, order: str = DEFAULT_ORDER) -> Tensor:
    """Young symmetrizer of shape (k+2, 2) on a valence k+4 tensor."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if t.valence != k + 4:
        raise ValueError(f"need valence {k + 4} for k={k}, got {t.valence}")
    row1, row2 = _label_axes(k)
    return Tensor(t.space, tableau_sum(t.data, row1, row2, order))


def tableau_apply(
    t: Tensor, row1_slots, row2_slots, order: str = DEFAULT_ORDER
) -> Tensor:
    """Tableau symmetrizer with explicit 1-based slot lists (slots = axes+1)."""
    r1 = [s - 1 for s in row1_slots]
    r2 = [s - 1 for s in row2_slots]
    return Tensor(t.space, tableau_sum(t.data, r1, r2, order))


def young_eigenvalue(k: int) -> float:
    """Scale by which the shape (k+2,2) symmetrizer acts on its own image."""
    import math

    return 2.0 * (k + 3) * (k + 2) * math.factorial(k)


def _pair_antisym_residual(d: np.ndarray, i: int, j: int) -> float:
    return float(np.linalg.norm(d + np.swapaxes(d, i, j)))


def _second_bianchi_cycle(d: np.ndarray, a: int, c: int) -> np.ndarray:
    """d plus its two cyclic images over axes (a, c, c+1)."""
    v = d.ndim
    ax = list(range(v))
    ax1 = list(ax)
    ax1[a], ax1[c], ax1[c + 1] = ax[c], ax[c + 1], ax[a]
    ax2 = list(ax)
    ax2[a], ax2[c], ax2[c + 1] = ax[c + 1], ax[a], ax[c]
    return d + np.transpose(d, ax1) + np.transpose(d, ax2)


def ck_residuals(t: Tensor, k: int) -> dict[str, float]:
    """Absolute residuals of the defining symmetries of C_k, keyed by name."""
    if k not in (0, 1, 2):
        raise NotImplementedError(f"k={k} not supported (need 0, 1 or 2)")
    if t.valence != k + 4:
        raise ValueError(f"need valence {k + 4} for k={k}, got {t.valence}")
    d = t.data
    res: dict[str, float] = {}
    c = k  # axis of curvature slot 1
    res["antisym_12"] = _pair_antisym_residual(d, c, c + 1)
    res["antisym_34"] = _pair_antisym_residual(d, c + 2, c + 3)
    pair = np.transpose(
        d, axes=list(range(k)) + [c + 2, c + 3, c, c + 1]
    )
    res["pair_symmetry"] = float(np.linalg.norm(d - pair))
    # first Bianchi: cyclic sum over curvature slots (2,3,4)
    cyc1 = np.transpose(d, axes=list(range(k)) + [c, c + 2, c + 3, c + 1])
    cyc2 = np.transpose(d, axes=list(range(k)) + [c, c + 3, c + 1, c + 2])
    res["first_bianchi"] = float(np.linalg.norm(d + cyc1 + cyc2))
    if k >= 1:
        # second Bianchi: cyclic sum over (last derivative slot, c_1, c_2)
        res["second_bianchi"] = float(
            np.linalg.norm(_second_bianchi_cycle(d, k - 1, c))
        )
    if k == 2:
        sym = symmetrize(t, (1, 2))
        res["derivative_symmetry"] = float(np.linalg.norm(d - sym.data))
    return res


def is_member_Ck(t: Tensor, k: int, tol: float = 1e-9) -> bool:
    """Check membership in the curvature space C_k by its defining symmetries.

    C_0: pair-antisymmetric, pair-symmetric, first Bianchi.
    C_1: trailing four slots in C_0, plus the differential Bianchi cycle.
    C_2: symmetric derivative pair, each contraction in C_1.
    """
    scale = max(t.norm(), 1.0)
    res = ck_residuals(t, k)
    return all(v <= tol * scale for v in res.values())


_BASIS_CACHE: dict[tuple, list[Tensor]] = {}

# Hard cap on the ambient dimension n**(k+4) of the projection problem.
_BASIS_AMBIENT_LIMIT = 100_000


def basis_Ck(space: Space, k: int) -> list[Tensor]:
    """Orthonormal numeric basis of C_k, built by projecting unit tensors.

    Unit tensors are swept in lexicographic order; images are filtered by
    Gram-Schmidt against the accepted rows with a relative 1e-8 cutoff and
    consolidated by chunked SVD.  The result is cached per (dim, signature, k).
    """
    key = (space.dim, space.signature, k)
    cached = _BASIS_CACHE.get(key)
    if cached is not None:
        return cached
    if k not in (0, 1, 2):
        raise NotImplementedError(f"k={k} not supported (need 0, 1 or 2)")
    n = space.dim
    v = k + 4
    N = n**v
    if N > _BASIS_AMBIENT_LIMIT:
        raise RuntimeError(
            f"basis_Ck ambient dimension {N} exceeds the supported limit"
        )
    row1, row2 = _label_axes(k)
    q_rows: list[np.ndarray] = []
    Q = np.zeros((0, N))
    sigma_max = 0.0
    chunk = 256
    for start in range(0, N, chunk):
        idx = np.arange(start, min(start + chunk, N))
        batch = np.zeros((len(idx), N))
        batch[np.arange(len(idx)), idx] = 1.0
        batch = batch.reshape((len(idx),) + (n,) * v)
        # batched symmetrizer: same tableau on axes shifted by the batch axis
        img = tableau_sum(batch, [a + 1 for a in row1], [a + 1 for a in row2])
        M = img.reshape(len(idx), N)
        if Q.shape[0]:
            M = M - (M @ Q.T) @ Q
            M = M - (M @ Q.T) @ Q  # second pass kills rounding drift
        u, s, vt = np.linalg.svd(M, full_matrices=False)
        sigma_max = max(sigma_max, float(s[0]) if s.size else 0.0)
        keep = s > 1e-8 * max(sigma_max, 1e-300)
        if np.any(keep):
            Q = np.vstack([Q, vt[keep]])
    # final consolidation for strict orthonormality
    u, s, vt = np.linalg.svd(Q, full_matrices=False)
    Q = vt[s > 1e-8 * s[0]]
    basis = [Tensor(space, Q[i].reshape((n,) * v)) for i in range(Q.shape[0])]
    for b in basis:
        if not is_member_Ck(b, k, tol=1e-7):
            raise RuntimeError("projected basis vector fails the symmetry checks")
    _BASIS_CACHE[key] = basis
    return basis


def random_ck(space: Space, k: int, seed: int) -> Tensor:
    """Random element of C_k: normal coefficients against the cached basis."""
    basis = basis_Ck(space, k)
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal(len(basis))
    data = sum(c * b.data for c, b in zip(coeff, basis))
    return Tensor(space, data)
