"""Dense tensor arithmetic over a finite-dimensional pseudo-euclidean space.

Tensors are stored as dense numpy arrays of shape (n,)*valence, row-major
with slot 1 slowest.  All slot arguments in the public API are 1-based.
Metric traces carry the signature signs, so the Euclidean case reduces to
plain orthonormal-basis sums.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Space",
    "Tensor",
    "SymBiform",
    "permute",
    "symmetrize",
    "metric_trace",
    "sym_product",
    "tensor_product",
    "random_tensor",
    "tensor_to_dict",
    "tensor_from_dict",
    "space_to_dict",
    "space_from_dict",
]


@dataclass(frozen=True)
class Space:
    """A pseudo-euclidean vector space: dimension plus a diagonal ±1 signature."""

    dim: int
    signature: tuple[int, ...] = ()

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        sig = self.signature or tuple([1] * self.dim)
        if len(sig) != self.dim or any(s not in (1, -1) for s in sig):
            raise ValueError(f"signature must be {self.dim} entries of +-1, got {sig}")
        object.__setattr__(self, "signature", tuple(int(s) for s in sig))

    @property
    def eps(self) -> np.ndarray:
        return np.array(self.signature, dtype=float)

    def metric_matrix(self) -> np.ndarray:
        return np.diag(self.eps)

    def metric_tensor(self) -> "Tensor":
        return Tensor(self, np.diag(self.eps))


@dataclass(frozen=True)
class Tensor:
    """A dense covariant tensor over a Space."""

    space: Space
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        n = self.space.dim
        if arr.shape != (n,) * arr.ndim:
            raise ValueError(f"data shape {arr.shape} is not ({n},)*valence")
        object.__setattr__(self, "data", arr)

    @property
    def valence(self) -> int:
        return self.data.ndim

    def norm(self) -> float:
        return float(np.linalg.norm(self.data.ravel()))

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_same(other)
        return Tensor(self.space, self.data + other.data)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_same(other)
        return Tensor(self.space, self.data - other.data)

    def __mul__(self, c: float) -> "Tensor":
        return Tensor(self.space, self.data * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "Tensor":
        return Tensor(self.space, -self.data)

    def _check_same(self, other: "Tensor"):
        if other.space != self.space or other.valence != self.valence:
            raise ValueError("tensors live on different spaces or valences")


class SymBiform:
    """Valence m+2 tensor, symmetric in the first m slots and in the last two.

    Symmetry is enforced on construction by averaging, so instances are exact
    fixed points of the two symmetrizations.
    """

    def __init__(self, space: Space, m: int, tensor: Tensor):
        if m < 0 or tensor.valence != m + 2:
            raise ValueError(f"need valence m+2 = {m + 2}, got {tensor.valence}")
        t = tensor
        if m > 1:
            t = symmetrize(t, tuple(range(1, m + 1)))
        t = symmetrize(t, (m + 1, m + 2))
        self.space = space
        self.m = m
        self.tensor = t

    @property
    def valence(self) -> int:
        return self.m + 2

    def norm(self) -> float:
        return self.tensor.norm()

    def __add__(self, other: "SymBiform") -> "SymBiform":
        if other.m != self.m:
            raise ValueError("degree mismatch")
        return SymBiform(self.space, self.m, self.tensor + other.tensor)

    def __sub__(self, other: "SymBiform") -> "SymBiform":
        if other.m != self.m:
            raise ValueError("degree mismatch")
        return SymBiform(self.space, self.m, self.tensor - other.tensor)

    def __mul__(self, c: float) -> "SymBiform":
        return SymBiform(self.space, self.m, self.tensor * c)

    __rmul__ = __mul__


def _check_slots(v: int, slots) -> list[int]:
    out = []
    for s in slots:
        if not (1 <= s <= v):
            raise ValueError(f"slot {s} out of range for valence {v}")
        out.append(int(s))
    if len(set(out)) != len(out):
        raise ValueError(f"repeated slot in {slots}")
    return out


def permute(t: Tensor, perm) -> Tensor:
    """Relabel slots: output(x_perm(1), ..., x_perm(v)) = input(x_1, ..., x_v)."""
    v = t.valence
    p = list(perm)
    if sorted(p) != list(range(1, v + 1)):
        raise ValueError(f"perm {perm} is not a permutation of 1..{v}")
    # out[j_1..j_v] = in[j_{p^-1(1)}, ...]; with numpy semantics this is
    # axes[q] = p(q+1) - 1.
    return Tensor(t.space, np.transpose(t.data, axes=[k - 1 for k in p]))


def symmetrize(t: Tensor, slots) -> Tensor:
    """Average over all permutations of the listed (1-based) slots."""
    sl = _check_slots(t.valence, slots)
    if not sl:
        raise ValueError("slots must be non-empty")
    acc = np.zeros_like(t.data)
    base = list(range(t.valence))
    for sigma in itertools.permutations(sl):
        axes = list(base)
        for a, b in zip(sl, sigma):
            axes[a - 1] = b - 1
        acc += np.transpose(t.data, axes=axes)
    import math

    return Tensor(t.space, acc / math.factorial(len(sl)))


def metric_trace(t: Tensor, i: int, j: int) -> Tensor:
    """Signed contraction sum_a eps_a t(..., e_a, ..., e_a, ...) over slots i, j."""
    if t.valence < 2:
        raise ValueError("need valence >= 2 to trace")
    if i == j:
        raise ValueError("trace slots must differ")
    _check_slots(t.valence, (i, j))
    diag = np.diagonal(t.data, axis1=i - 1, axis2=j - 1)
    return Tensor(t.space, diag @ t.space.eps)


def tensor_product(a: Tensor, b: Tensor) -> Tensor:
    if a.space != b.space:
        raise ValueError("mismatched spaces")
    return Tensor(a.space, np.multiply.outer(a.data, b.data))


def sym_product(a, b):
    """Symmetric product: on diagonals it multiplies the two polynomial values.

    Fully symmetric Tensor x Tensor gives the fully symmetrized outer product.
    SymBiform x symmetric Tensor (either order) symmetrizes over the combined
    leading slots and keeps the trailing bilinear pair, returning a SymBiform.
    """
    if isinstance(a, SymBiform) and isinstance(b, SymBiform):
        raise ValueError("product of two SymBiforms is not defined")
    if isinstance(b, SymBiform):
        a, b = b, a
    if isinstance(a, SymBiform):
        if a.space != b.space:
            raise ValueError("mismatched spaces")
        # layout (a-sym slots, b slots, bilinear pair)
        raw = np.multiply.outer(a.tensor.data, b.data)
        m = a.m + b.valence
        axes = (
            list(range(a.m))
            + list(range(a.m + 2, a.m + 2 + b.valence))
            + [a.m, a.m + 1]
        )
        arranged = Tensor(a.space, np.transpose(raw, axes=axes))
        return SymBiform(a.space, m, arranged)
    out = tensor_product(a, b)
    if out.valence > 1:
        out = symmetrize(out, tuple(range(1, out.valence + 1)))
    return out


def random_tensor(space: Space, valence: int, seed: int) -> Tensor:
    """Deterministic i.i.d. standard-normal entries for the given seed."""
    rng = np.random.default_rng(seed)
    return Tensor(space, rng.standard_normal((space.dim,) * valence))


def space_to_dict(space: Space) -> dict:
    return {"dim": space.dim, "signature": list(space.signature)}


def space_from_dict(doc: dict) -> Space:
    return Space(int(doc["dim"]), tuple(int(s) for s in doc["signature"]))


def tensor_to_dict(t: Tensor) -> dict:
    return {
        "dim": t.space.dim,
        "signature": list(t.space.signature),
        "valence": t.valence,
        "data": [float(x) for x in t.data.ravel()],
    }


def tensor_from_dict(doc: dict) -> Tensor:
    space = Space(int(doc["dim"]), tuple(int(s) for s in doc["signature"]))
    v = int(doc["valence"])
    data = np.array(doc["data"], dtype=float).reshape((space.dim,) * v)
    return Tensor(space, data)
