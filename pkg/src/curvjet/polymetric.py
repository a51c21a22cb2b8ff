"""Polynomial metrics and exact jet evaluation at the origin.

A metric germ is stored with truncated-polynomial entries normalized so the
value at the origin is the signature matrix.  Christoffel symbols come from
the standard Levi-Civita formula with a truncated Neumann series for the
inverse metric; the curvature tensor and its first two covariant
derivatives are then evaluated exactly at the origin (polynomial arithmetic
is exact under truncation, nothing is rounded).

The cubic seed metric turns a one-jet (R, dR) into a germ whose curvature
two-jet reproduces (R, dR); the sign convention of the quadratic and cubic
coefficients is pinned by that round trip.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .jets import TwoJet
from .spaces import Space, Tensor

__all__ = [
    "TruncPoly",
    "PolyMetric",
    "christoffel",
    "curvature_two_jet",
    "seed_metric",
    "random_poly_metric",
    "poly_metric_to_dict",
    "poly_metric_from_dict",
]


class TruncPoly:
    """Real polynomial in a fixed number of variables, truncated by total degree.

    Coefficients are kept in a dict keyed by exponent tuples; terms above the
    truncation degree are dropped on construction and after every product.
    """

    __slots__ = ("nvars", "degree", "coeff")

    def __init__(self, nvars: int, degree: int, coeff: dict | None = None) -> None:
        self.nvars = int(nvars)
        self.degree = int(degree)
        if self.nvars < 1 or self.degree < 0:
            raise ValueError("need at least one variable and a nonnegative degree")
        clean: dict[tuple[int, ...], float] = {}
        for exps, c in (coeff or {}).items():
            e = tuple(int(x) for x in exps)
            if len(e) != self.nvars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent tuple {exps!r}")
            value = float(c)
            if value == 0.0 or sum(e) > self.degree:
                continue
            clean[e] = clean.get(e, 0.0) + value
        self.coeff = clean

    @classmethod
    def constant(cls, nvars: int, degree: int, value: float) -> "TruncPoly":
        return cls(nvars, degree, {(0,) * nvars: value})

    def value0(self) -> float:
        """Value at the origin."""
        return self.coeff.get((0,) * self.nvars, 0.0)

    def diff(self, v: int) -> "TruncPoly":
        """Partial derivative with respect to variable v."""
        out: dict[tuple[int, ...], float] = {}
        for e, c in self.coeff.items():
            if e[v]:
                lowered = list(e)
                lowered[v] -= 1
                out[tuple(lowered)] = e[v] * c
        return TruncPoly(self.nvars, self.degree, out)

    def __call__(self, point) -> float:
        x = np.asarray(point, dtype=float)
        total = 0.0
        for e, c in self.coeff.items():
            total += c * float(np.prod(x**np.array(e)))
        return total

    def _check_ring(self, other: "TruncPoly") -> None:
        if self.nvars != other.nvars:
            raise ValueError("polynomials in different variable counts")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = TruncPoly.constant(self.nvars, self.degree, other)
        self._check_ring(other)
        merged = dict(self.coeff)
        for e, c in other.coeff.items():
            merged[e] = merged.get(e, 0.0) + c
        return TruncPoly(self.nvars, min(self.degree, other.degree), merged)

    __radd__ = __add__

    def __neg__(self):
        return TruncPoly(self.nvars, self.degree, {e: -c for e, c in self.coeff.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncPoly) else -float(other))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return TruncPoly(
                self.nvars, self.degree, {e: c * float(other) for e, c in self.coeff.items()}
            )
        self._check_ring(other)
        degree = min(self.degree, other.degree)
        out: dict[tuple[int, ...], float] = {}
        for ea, ca in self.coeff.items():
            if sum(ea) > degree:
                continue
            for eb, cb in other.coeff.items():
                if sum(ea) + sum(eb) > degree:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0.0) + ca * cb
        return TruncPoly(self.nvars, degree, out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.coeff == other.coeff

    def __repr__(self) -> str:
        if not self.coeff:
            return "TruncPoly(0)"
        parts = [f"{c:g}*x^{e}" for e, c in sorted(self.coeff.items())]
        return "TruncPoly(" + " + ".join(parts) + ")"


@dataclass(frozen=True, eq=False)
class PolyMetric:
    """Symmetric matrix of truncated polynomials with g(0) = signature matrix."""

    space: Space
    degree: int
    entries: tuple[tuple[TruncPoly, ...], ...]

    def __post_init__(self) -> None:
        n = self.space.dim
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ValueError("entry matrix must be n x n")
        eps = self.space.eps
        for i in range(n):
            for k in range(n):
                entry = self.entries[i][k]
                if entry.nvars != n:
                    raise ValueError("entries must be polynomials in n coordinates")
                if entry.coeff != self.entries[k][i].coeff:
                    raise ValueError("metric entries must be symmetric")
                if any(sum(e) > self.degree for e in entry.coeff):
                    raise ValueError("entry exceeds the truncation degree")
                expected = eps[i] if i == k else 0.0
                if entry.value0() != expected:
                    raise ValueError("metric at the origin must equal the signature matrix")


# ---------------------------------------------------------------------------
# coefficient-field arithmetic
#
# A "field" is a dict mapping exponent tuples to ndarray coefficients; it
# represents a tensor-valued polynomial.  Products contract tensor parts by
# an einsum spec and drop terms above the requested total degree.


def _f_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, arr in b.items():
        out[e] = out[e] + arr if e in out else arr
    return out


def _f_scale(a: dict, c: float) -> dict:
    return {e: c * arr for e, arr in a.items()}


def _f_mul(a: dict, b: dict, spec: str, cap: int) -> dict:
    out: dict = {}
    for ea, ta in a.items():
        da = sum(ea)
        if da > cap:
            continue
        for eb, tb in b.items():
            if da + sum(eb) > cap:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            prod = np.einsum(spec, ta, tb)
            if e in out:
                out[e] = out[e] + prod
            else:
                out[e] = prod
    return out


def _f_diff(a: dict, v: int) -> dict:
    out: dict = {}
    for e, arr in a.items():
        if e[v]:
            lowered = list(e)
            lowered[v] -= 1
            key = tuple(lowered)
            term = e[v] * arr
            out[key] = out[key] + term if key in out else term
    return out


def _metric_field(gm: PolyMetric) -> dict:
    n = gm.space.dim
    field: dict = {}
    for i in range(n):
        for k in range(n):
            for e, c in gm.entries[i][k].coeff.items():
                field.setdefault(e, np.zeros((n, n)))[i, k] = c
    return field


def _inverse_metric_field(G: dict, space: Space, cap: int) -> dict:
    """Truncated Neumann series for the inverse metric; exact under truncation."""
    n = space.dim
    zero = (0,) * n
    g0inv = np.diag(space.eps).astype(float)  # the signature matrix is its own inverse
    B = {e: -(g0inv @ arr) for e, arr in G.items() if e != zero}
    inv = {zero: g0inv.copy()}
    cur = {zero: g0inv}
    for _ in range(cap):
        cur = _f_mul(B, cur, "ij,jk->ik", cap)
        if not cur:
            break
        inv = _f_add(inv, cur)
    return inv


def _christoffel_field(G: dict, Ginv: dict, n: int, cap: int) -> dict:
    """Christoffel coefficients as a field of (n, n, n) arrays [k, i, j]."""
    T: dict = {}
    for a in range(n):
        for e, arr in _f_diff(G, a).items():
            T.setdefault(e, np.zeros((n, n, n)))[a] = arr
    U = {
        e: arr + np.transpose(arr, (1, 0, 2)) - np.transpose(arr, (1, 2, 0))
        for e, arr in T.items()
    }
    return _f_scale(_f_mul(Ginv, U, "kl,ijl->kij", cap), 0.5)


def _curvature_fields(G: dict, Ginv: dict, n: int) -> tuple:
    """Lowered curvature, first and second covariant derivative at the origin."""
    gamma = _christoffel_field(G, Ginv, n, cap=3)

    # derivative of the connection, arranged [i, j, k, l] = d_i Gamma^l_{jk}
    dgamma: dict = {}
    for i in range(n):
        for e, arr in _f_diff(gamma, i).items():
            dgamma.setdefault(e, np.zeros((n,) * 4))[i] = arr
    t1 = {e: np.transpose(arr, (0, 2, 3, 1)) for e, arr in dgamma.items()}
    t2 = {e: np.transpose(arr, (1, 0, 2, 3)) for e, arr in t1.items()}
    t3 = _f_mul(gamma, gamma, "lim,mjk->ijkl", cap=2)
    t4 = {e: np.transpose(arr, (1, 0, 2, 3)) for e, arr in t3.items()}
    upper = _f_add(_f_add(t1, _f_scale(t2, -1.0)), _f_add(t3, _f_scale(t4, -1.0)))

    # pairing with the metric; this orientation makes the commutator of the
    # stored second derivative match the curvature rotation, and reproduces
    # seed metrics with coefficient +1
    lowered = _f_mul(upper, G, "ijkm,ml->ijkl", cap=2)

    cov5: dict = {}
    for a in range(n):
        for e, arr in _f_diff(lowered, a).items():
            cov5.setdefault(e, np.zeros((n,) * 5))[a] = arr
    for spec in ("mai,mjkl->aijkl", "maj,imkl->aijkl", "mak,ijml->aijkl", "mal,ijkm->aijkl"):
        cov5 = _f_add(cov5, _f_scale(_f_mul(gamma, lowered, spec, cap=1), -1.0))

    zero = (0,) * n
    cov0 = cov5.get(zero, np.zeros((n,) * 5))
    gamma0 = gamma.get(zero, np.zeros((n,) * 3))

    linear = np.zeros((n,) + (n,) * 5)
    for b in range(n):
        unit = tuple(1 if v == b else 0 for v in range(n))
        if unit in cov5:
            linear[b] = cov5[unit]

    d2 = linear.copy()
    for spec in (
        "mba,mijkl->baijkl",
        "mbi,amjkl->baijkl",
        "mbj,aimkl->baijkl",
        "mbk,aijml->baijkl",
        "mbl,aijkm->baijkl",
    ):
        d2 -= np.einsum(spec, gamma0, cov0)

    return lowered.get(zero, np.zeros((n,) * 4)), cov0, d2


# ---------------------------------------------------------------------------
# public operations


def christoffel(gm: PolyMetric) -> np.ndarray:
    """Christoffel symbols as an object array of TruncPoly, indexed [k, i, j].

    The output carries total degree D - 1; symmetric in the lower pair.
    """
    if gm.degree < 1:
        raise ValueError("truncation degree too low for Christoffel symbols")
    n = gm.space.dim
    G = _metric_field(gm)
    Ginv = _inverse_metric_field(G, gm.space, gm.degree)
    gamma = _christoffel_field(G, Ginv, n, cap=gm.degree - 1)
    out = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                table = {e: arr[k, i, j] for e, arr in gamma.items() if arr[k, i, j] != 0.0}
                out[k, i, j] = TruncPoly(n, gm.degree - 1, table)
    return out


def curvature_two_jet(gm: PolyMetric) -> TwoJet:
    """Evaluate (R, dR, d2R) of the metric at the origin, exactly.

    Indices are lowered with the full metric before differentiating; the
    second derivative is stored outer-slot first.  Degree 4 input keeps the
    fourth metric derivatives that d2R consumes, hence the precondition.
    """
    if gm.degree < 4:
        raise ValueError("truncation degree must be at least 4 for a two-jet")
    sp = gm.space
    G = _metric_field(gm)
    Ginv = _inverse_metric_field(G, sp, gm.degree)
    R0, dR0, d2R0 = _curvature_fields(G, Ginv, sp.dim)
    return TwoJet(Tensor(sp, R0), Tensor(sp, dR0), Tensor(sp, d2R0))


# Sign of the quadratic/cubic seed coefficients under this module's curvature
# conventions; pinned by the constant-curvature round trip.
_SEED_SIGN = -1.0


def seed_metric(R: Tensor, dR: Tensor) -> PolyMetric:
    """Cubic metric germ whose curvature two-jet starts with (R, dR).

    Entries are g0 plus one third of the Jacobi-slot arrangement of R and
    one sixth of the directional derivative term, both converted to a
    bilinear form with the background metric.
    """
    if R.valence != 4 or dR.valence != 5:
        raise ValueError("seed metric expects a one-jet (valences 4 and 5)")
    if dR.space != R.space:
        raise ValueError("one-jet components live on different spaces")
    sp = R.space
    n = sp.dim
    eps = sp.eps

    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            table: dict[tuple[int, ...], float] = {}
            if i == j:
                table[(0,) * n] = float(eps[i])
            for k in range(n):
                for l in range(n):
                    # the Jacobi arrangement is symmetric in (i, j) up to
                    # roundoff; average so the entries match bitwise
                    c = _SEED_SIGN * (R.data[i, k, l, j] + R.data[j, k, l, i]) / 6.0
                    if c != 0.0:
                        e = [0] * n
                        e[k] += 1
                        e[l] += 1
                        key = tuple(e)
                        table[key] = table.get(key, 0.0) + c
                    for m in range(n):
                        c3 = (
                            _SEED_SIGN
                            * (dR.data[m, i, k, l, j] + dR.data[m, j, k, l, i])
                            / 12.0
                        )
                        if c3 != 0.0:
                            e = [0] * n
                            e[m] += 1
                            e[k] += 1
                            e[l] += 1
                            key = tuple(e)
                            table[key] = table.get(key, 0.0) + c3
            row.append(TruncPoly(n, 4, table))
        entries.append(tuple(row))
    return PolyMetric(sp, 4, tuple(entries))


def random_poly_metric(
    space: Space, seed: int, degree: int = 4, amplitude: float = 0.25
) -> PolyMetric:
    """Random symmetric polynomial perturbation of the flat metric.

    Coefficient size decays geometrically with the monomial degree to keep
    the Neumann inverse well conditioned.
    """
    if degree < 1:
        raise ValueError("perturbation needs degree at least 1")
    rng = np.random.default_rng(seed)
    n = space.dim
    eps = space.eps

    tables = [[{} for _ in range(n)] for _ in range(n)]
    for i in range(n):
        tables[i][i][(0,) * n] = float(eps[i])
    for i in range(n):
        for j in range(i, n):
            for total in range(1, degree + 1):
                for combo in combinations_with_replacement(range(n), total):
                    e = [0] * n
                    for v in combo:
                        e[v] += 1
                    c = amplitude**total * rng.standard_normal()
                    key = tuple(e)
                    tables[i][j][key] = tables[i][j].get(key, 0.0) + c
                    if j != i:
                        tables[j][i][key] = tables[i][j][key]

    entries = tuple(
        tuple(TruncPoly(n, degree, tables[i][j]) for j in range(n)) for i in range(n)
    )
    return PolyMetric(space, degree, entries)


def poly_metric_to_dict(gm: PolyMetric) -> dict:
    """Plain-document form: signature header plus (i, j, exponents, value) records."""
    records = []
    n = gm.space.dim
    for i in range(n):
        for j in range(i, n):
            for e, c in sorted(gm.entries[i][j].coeff.items()):
                records.append([i, j, list(e), c])
    return {
        "dim": n,
        "signature": list(gm.space.signature),
        "degree": gm.degree,
        "entries": records,
    }


def poly_metric_from_dict(doc: dict) -> PolyMetric:
    space = Space(int(doc["dim"]), tuple(int(s) for s in doc["signature"]))
    degree = int(doc["degree"])
    n = space.dim
    tables: list[list[dict]] = [[{} for _ in range(n)] for _ in range(n)]
    for i, j, exps, c in doc["entries"]:
        key = tuple(int(x) for x in exps)
        # reject rather than truncate: a dropped record would be silent data loss
        if len(key) != n or any(x < 0 for x in key) or sum(key) > degree:
            raise ValueError(f"entry record ({i}, {j}, {list(key)}) is outside the ring")
        tables[int(i)][int(j)][key] = float(c)
        if i != j:
            tables[int(j)][int(i)][key] = float(c)
    entries = tuple(
        tuple(TruncPoly(n, degree, tables[i][j]) for j in range(n)) for i in range(n)
    )
    return PolyMetric(space, degree, entries)
