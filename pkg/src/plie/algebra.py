"""Bracket algebras over Z/p^k, their Jacobi form, and the dual co-bracket.

A bracket algebra of dimension n is stored as the full structure-constant
tensor ``c[i, j, t]`` with ``[e_i, e_j] = sum_t c[i, j, t] e_t``.  Exterior
forms on the dual space are dictionaries keyed by strictly increasing index
tuples; the pairing is ``(x_i ^ x_j)(e_a, e_b) = d_ia d_jb - d_ib d_ja``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .modp import ModMatrix, PrimePower


class AlgebraFormatError(ValueError):
    """Raised for malformed algebra descriptions (files or names)."""


class BracketAlgebra:
    """Alternating bilinear product on (Z/p^k)^n given by structure constants."""

    def __init__(self, ring: PrimePower, constants, labels: Optional[Sequence[str]] = None):
        c = np.mod(np.array(constants, dtype=np.int64), ring.modulus)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise AlgebraFormatError(f"structure constants must be n x n x n, got {c.shape}")
        n = c.shape[0]
        if np.any((c + c.transpose(1, 0, 2)) % ring.modulus):
            raise AlgebraFormatError("structure constants are not antisymmetric")
        if n and np.any(c[np.arange(n), np.arange(n)]):
            raise AlgebraFormatError("[e_i, e_i] must vanish")
        c.setflags(write=False)
        self.ring = ring
        self.c = c
        if labels is None:
            labels = [f"e{i + 1}" for i in range(n)]
        if len(labels) != n:
            raise AlgebraFormatError(f"{len(labels)} labels for dimension {n}")
        self.labels = tuple(str(s) for s in labels)

    @classmethod
    def from_brackets(cls, ring: PrimePower, dim: int,
                      brackets: Mapping[Tuple[int, int], Sequence[int]],
                      labels=None) -> "BracketAlgebra":
        """Build from {(i, j): coefficient vector}, extending by antisymmetry."""
        c = np.zeros((dim, dim, dim), dtype=np.int64)
        for (i, j), coeffs in brackets.items():
            if i == j:
                if any(int(x) % ring.modulus for x in coeffs):
                    raise AlgebraFormatError(f"[e{i + 1}, e{i + 1}] must vanish")
                continue
            if len(coeffs) != dim:
                raise AlgebraFormatError(f"bracket ({i}, {j}) has {len(coeffs)} coefficients, expected {dim}")
            c[i, j] = coeffs
            c[j, i] = -np.asarray(coeffs, dtype=np.int64)
        return cls(ring, c, labels)

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def bracket(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return np.mod(np.einsum("i,j,ijt->t", u, v, self.c), self.ring.modulus)

    def ad_matrices(self) -> List[np.ndarray]:
        """ad(e_i) as matrices acting on column vectors: ad(e_i)[t, j] = c[i, j, t]."""
        return [self.c[i].T.copy() for i in range(self.dim)]

    def reduce(self, t: int) -> "BracketAlgebra":
        return BracketAlgebra(self.ring.reduce(t), self.c, self.labels)

    def change_basis(self, basis) -> "BracketAlgebra":
        """Structure constants in a new basis; row r of ``basis`` is the new
        r-th basis vector written in old coordinates.  Must be invertible."""
        P = np.mod(np.asarray(basis, dtype=np.int64), self.ring.modulus)
        n = self.dim
        Pinv = _inverse_mod(P, self.ring)
        # [b_r, b_s] = sum P_ri P_sj c_ijt e_t, then re-express e_t in b-coordinates
        old = np.einsum("ri,sj,ijt->rst", P, P, self.c) % self.ring.modulus
        new = np.einsum("rst,tu->rsu", old, Pinv) % self.ring.modulus
        return BracketAlgebra(self.ring, new, [f"b{i + 1}" for i in range(n)])

    def is_lie(self) -> bool:
        return jacobi_form(self).is_zero()

    def same_constants(self, other: "BracketAlgebra") -> bool:
        return self.ring == other.ring and np.array_equal(self.c, other.c)

    def __eq__(self, other):
        if not isinstance(other, BracketAlgebra):
            return NotImplemented
        return self.same_constants(other) and self.labels == other.labels

    def __hash__(self):
        return hash((self.ring, self.c.tobytes(), self.labels))

    def __repr__(self):
        nz = [(i, j) for i, j in combinations(range(self.dim), 2) if self.c[i, j].any()]
        parts = []
        for i, j in nz:
            terms = " + ".join(f"{int(v)}*{self.labels[t]}" for t, v in enumerate(self.c[i, j]) if v)
            parts.append(f"[{self.labels[i]},{self.labels[j]}]={terms}")
        return f"BracketAlgebra({self.ring}, dim={self.dim}, {'; '.join(parts) or 'abelian'})"

    # -- JSON ---------------------------------------------------------------
    def to_dict(self) -> dict:
        brackets = []
        for i, j in combinations(range(self.dim), 2):
            if self.c[i, j].any():
                brackets.append({"i": i, "j": j, "coeffs": [int(x) for x in self.c[i, j]]})
        return {"p": self.ring.p, "k": self.ring.k, "dim": self.dim,
                "basis": list(self.labels), "brackets": brackets}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "BracketAlgebra":
        try:
            ring = PrimePower(int(data["p"]), int(data.get("k", 1)))
            dim = int(data["dim"])
            labels = data.get("basis")
            entries = data.get("brackets", [])
        except (KeyError, TypeError, ValueError) as exc:
            raise AlgebraFormatError(f"malformed algebra description: {exc}") from exc
        if dim < 0:
            raise AlgebraFormatError("dim must be non-negative")
        br = {}
        for e in entries:
            try:
                i, j, coeffs = int(e["i"]), int(e["j"]), [int(x) for x in e["coeffs"]]
            except (KeyError, TypeError, ValueError) as exc:
                raise AlgebraFormatError(f"malformed bracket entry {e!r}") from exc
            if not (0 <= i < dim and 0 <= j < dim):
                raise AlgebraFormatError(f"bracket index out of range in {e!r}")
            if i > j:
                raise AlgebraFormatError(f"brackets must be listed with i < j, got {e!r}")
            if (i, j) in br:
                raise AlgebraFormatError(f"duplicate bracket ({i}, {j})")
            br[(i, j)] = coeffs
        return cls.from_brackets(ring, dim, br, labels)

    @classmethod
    def from_json(cls, text: str) -> "BracketAlgebra":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise AlgebraFormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise AlgebraFormatError("algebra file must hold a JSON object")
        return cls.from_dict(data)


def _inverse_mod(P: np.ndarray, ring: PrimePower) -> np.ndarray:
    """Inverse of a square matrix over Z/p^k (Gauss-Jordan with unit pivots)."""
    n = P.shape[0]
    q = ring.modulus
    a = np.hstack([P % q, np.eye(n, dtype=np.int64)])
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r, c] % ring.p), None)
        if piv is None:
            raise ValueError("change of basis is not invertible")
        a[[c, piv]] = a[[piv, c]]
        a[c] = a[c] * pow(int(a[c, c]), -1, q) % q
        for r in range(n):
            if r != c and a[r, c]:
                a[r] = (a[r] - a[r, c] * a[c]) % q
    return a[:, n:]


# -- Jacobi form ----------------------------------------------------------

@dataclass(frozen=True)
class JacobiTensor:
    """J(e_i, e_j, e_k) for i < j < k, one row per triple."""

    ring: PrimePower
    dim: int
    triples: Tuple[Tuple[int, int, int], ...]
    values: np.ndarray

    def is_zero(self) -> bool:
        return not self.values.any()

    def __call__(self, i: int, j: int, k: int) -> np.ndarray:
        """Value on an arbitrary index triple, extended by the alternating sign."""
        idx = (i, j, k)
        if len(set(idx)) < 3:
            return np.zeros(self.dim, dtype=np.int64)
        order = sorted(range(3), key=lambda a: idx[a])
        sign = _perm_sign(order)
        row = self.triples.index(tuple(idx[a] for a in order))
        return (sign * self.values[row]) % self.ring.modulus

    def reduce(self, t: int) -> "JacobiTensor":
        ring = self.ring.reduce(t)
        return JacobiTensor(ring, self.dim, self.triples, self.values % ring.modulus)

    def as_dict(self) -> Dict[Tuple[int, int, int], List[int]]:
        return {t: [int(x) for x in row] for t, row in zip(self.triples, self.values) if row.any()}


def _perm_sign(order: Sequence[int]) -> int:
    sign = 1
    order = list(order)
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j]:
                sign = -sign
    return sign


def jacobi_full(c: np.ndarray) -> np.ndarray:
    """Unreduced J[i, j, k, t] = [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]."""
    nested = np.einsum("ijs,skt->ijkt", c, c)
    return nested + nested.transpose(1, 2, 0, 3) + nested.transpose(2, 0, 1, 3)


def jacobi_form(L: BracketAlgebra) -> JacobiTensor:
    n = L.dim
    full = jacobi_full(L.c) % L.ring.modulus
    triples = tuple(combinations(range(n), 3))
    if triples:
        vals = np.array([full[i, j, k] for i, j, k in triples], dtype=np.int64)
    else:
        vals = np.zeros((0, n), dtype=np.int64)
    vals.setflags(write=False)
    return JacobiTensor(L.ring, n, triples, vals)


# -- exterior algebra on the dual ------------------------------------------

def _merge_sign(a: Tuple[int, ...], b: Tuple[int, ...]) -> int:
    """Koszul sign of x_a ^ x_b -> x_sorted, or 0 when indices repeat."""
    if set(a) & set(b):
        return 0
    inversions = sum(1 for i in a for j in b if i > j)
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class ExteriorElement:
    """Element of the exterior algebra on x_1..x_n over F_p."""

    dim: int
    p: int
    terms: Tuple[Tuple[Tuple[int, ...], int], ...] = ()

    @classmethod
    def from_dict(cls, dim: int, p: int, d: Mapping[Tuple[int, ...], int]) -> "ExteriorElement":
        acc: Dict[Tuple[int, ...], int] = {}
        for key, coeff in d.items():
            key = tuple(key)
            if len(set(key)) < len(key):
                continue
            if any(not 0 <= i < dim for i in key):
                raise ValueError(f"index out of range in {key}")
            order = sorted(range(len(key)), key=lambda a: key[a])
            s = _perm_sign(order)
            sk = tuple(key[a] for a in order)
            acc[sk] = (acc.get(sk, 0) + s * int(coeff)) % p
        return cls(dim, p, tuple(sorted((k, v) for k, v in acc.items() if v)))

    @classmethod
    def generator(cls, dim: int, p: int, i: int) -> "ExteriorElement":
        return cls.from_dict(dim, p, {(i,): 1})

    @classmethod
    def one(cls, dim: int, p: int) -> "ExteriorElement":
        return cls(dim, p, (((), 1),))

    @classmethod
    def zero(cls, dim: int, p: int) -> "ExteriorElement":
        return cls(dim, p, ())

    def as_dict(self) -> Dict[Tuple[int, ...], int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {len(k) for k, _ in self.terms}

    def _check(self, other: "ExteriorElement"):
        if (self.dim, self.p) != (other.dim, other.p):
            raise ValueError("exterior elements live in different algebras")

    def __add__(self, other: "ExteriorElement") -> "ExteriorElement":
        self._check(other)
        d = self.as_dict()
        for k, v in other.terms:
            d[k] = d.get(k, 0) + v
        return ExteriorElement.from_dict(self.dim, self.p, d)

    def __neg__(self) -> "ExteriorElement":
        return ExteriorElement.from_dict(self.dim, self.p, {k: -v for k, v in self.terms})

    def __sub__(self, other: "ExteriorElement") -> "ExteriorElement":
        return self + (-other)

    def scale(self, a: int) -> "ExteriorElement":
        return ExteriorElement.from_dict(self.dim, self.p, {k: a * v for k, v in self.terms})

    def __mul__(self, other: "ExteriorElement") -> "ExteriorElement":
        """Wedge product."""
        self._check(other)
        acc: Dict[Tuple[int, ...], int] = {}
        for ka, va in self.terms:
            for kb, vb in other.terms:
                s = _merge_sign(ka, kb)
                if s:
                    key = tuple(sorted(ka + kb))
                    acc[key] = acc.get(key, 0) + s * va * vb
        return ExteriorElement.from_dict(self.dim, self.p, acc)

    def vector(self, degree: int) -> np.ndarray:
        """Coefficients in the basis of sorted degree-subsets (lexicographic)."""
        basis = list(combinations(range(self.dim), degree))
        pos = {k: i for i, k in enumerate(basis)}
        v = np.zeros(len(basis), dtype=np.int64)
        for k, c in self.terms:
            if len(k) == degree:
                v[pos[k]] = c
        return v

    @classmethod
    def from_vector(cls, dim: int, p: int, degree: int, vec) -> "ExteriorElement":
        basis = list(combinations(range(dim), degree))
        return cls.from_dict(dim, p, {k: int(c) for k, c in zip(basis, vec)})

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*x{''.join(str(i + 1) for i in k) or '1'}" for k, v in self.terms)


def cobracket_generator(L: BracketAlgebra, t: int) -> ExteriorElement:
    """br*(x_t) = sum_{i<j} c_ij^t x_i ^ x_j."""
    _require_field(L)
    n = L.dim
    return ExteriorElement.from_dict(
        n, L.p, {(i, j): int(L.c[i, j, t]) for i, j in combinations(range(n), 2)})


def cobracket(L: BracketAlgebra, omega: ExteriorElement) -> ExteriorElement:
    """Degree +1 derivation extending br* from the degree-one duals."""
    _require_field(L)
    if omega.dim != L.dim or omega.p != L.p:
        raise ValueError("form does not live on the dual of this algebra")
    n, p = L.dim, L.p
    gens = [cobracket_generator(L, t) for t in range(n)]
    acc = ExteriorElement.zero(n, p)
    for key, coeff in omega.terms:
        for pos, t in enumerate(key):
            left = ExteriorElement.from_dict(n, p, {key[:pos]: 1})
            right = ExteriorElement.from_dict(n, p, {key[pos + 1:]: 1})
            term = left * gens[t] * right
            acc = acc + term.scale(coeff * (-1) ** pos)
    return acc


def colie_defect(L: BracketAlgebra) -> ModMatrix:
    """Matrix of br* o br* : W* -> Lambda^3 W* (columns indexed by x_t)."""
    _require_field(L)
    n = L.dim
    rows = len(list(combinations(range(n), 3)))
    m = np.zeros((rows, n), dtype=np.int64)
    for t in range(n):
        m[:, t] = cobracket(L, cobracket_generator(L, t)).vector(3)
    return ModMatrix(L.ring, m)


def _require_field(L: BracketAlgebra):
    if L.ring.k != 1:
        raise ValueError(f"operation needs an algebra over F_p, got {L.ring}")


# -- named algebras -------------------------------------------------------

def _matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=np.int64)
    m[i, j] = 1
    return m


def _matrix_algebra(ring: PrimePower, basis: List[np.ndarray], coords, labels) -> BracketAlgebra:
    d = len(basis)
    c = np.zeros((d, d, d), dtype=np.int64)
    for a in range(d):
        for b in range(d):
            comm = basis[a] @ basis[b] - basis[b] @ basis[a]
            c[a, b] = coords(comm)
    return BracketAlgebra(ring, c, labels)


def gl_algebra(n: int, ring: PrimePower) -> BracketAlgebra:
    """gl_n with basis the matrix units d_ij in row-major order."""
    basis = [_matrix_unit(n, i, j) for i in range(n) for j in range(n)]
    labels = [f"d{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return _matrix_algebra(ring, basis, lambda m: m.reshape(-1), labels)


def sl_algebra(n: int, ring: PrimePower) -> BracketAlgebra:
    """sl_n with basis: off-diagonal units d_ij (row-major), then h_i = d_ii - d_(i+1)(i+1)."""
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    basis = [_matrix_unit(n, i, j) for i, j in off]
    basis += [_matrix_unit(n, i, i) - _matrix_unit(n, i + 1, i + 1) for i in range(n - 1)]
    labels = [f"d{i + 1}{j + 1}" for i, j in off] + [f"h{i + 1}" for i in range(n - 1)]

    def coords(m):
        v = [m[i, j] for i, j in off]
        diag = np.diag(m)
        v += [int(diag[: i + 1].sum()) for i in range(n - 1)]
        return v

    return _matrix_algebra(ring, basis, coords, labels)


def _named_table(name: str, ring: PrimePower, n: Optional[int]) -> BracketAlgebra:
    if name == "abelian":
        if n is None:
            raise AlgebraFormatError("abelian needs a dimension")
        return BracketAlgebra(ring, np.zeros((n, n, n), dtype=np.int64))
    if name == "heisenberg":
        return BracketAlgebra.from_brackets(ring, 3, {(0, 1): [0, 0, 1]}, ["x", "y", "z"])
    if name == "solvable_S":
        return BracketAlgebra.from_brackets(ring, 2, {(0, 1): [1, 0]}, ["x", "y"])
    if name == "sl2":
        return BracketAlgebra.from_brackets(
            ring, 3, {(0, 1): [0, 2, 0], (0, 2): [0, 0, -2], (1, 2): [1, 0, 0]},
            ["h", "x+", "x-"])
    if name == "so3":
        # [X,Y] = -Z, [Y,Z] = -X, [Z,X] = -Y
        return BracketAlgebra.from_brackets(
            ring, 3, {(0, 1): [0, 0, -1], (1, 2): [-1, 0, 0], (0, 2): [0, 1, 0]},
            ["X", "Y", "Z"])
    if name == "gln":
        if n is None:
            raise AlgebraFormatError("gln needs n")
        return gl_algebra(n, ring)
    if name == "sln":
        if n is None or n < 2:
            raise AlgebraFormatError("sln needs n >= 2")
        return sl_algebra(n, ring)
    raise AlgebraFormatError(f"unknown algebra {name!r}")


NAMED = ("abelian", "heisenberg", "solvable_S", "sl2", "so3", "gln", "sln")

_NAME_RE = re.compile(r"^(abelian|gln|sln|gl|sl)\(?(\d+)\)?$")


def named_algebra(name: str, p: int, k: int = 1, n: Optional[int] = None) -> BracketAlgebra:
    """Library algebra by name; ``abelian``, ``gln``, ``sln`` take a size,
    either as ``n`` or inline (``abelian(3)``, ``gl2``, ``sln(3)``)."""
    ring = PrimePower(p, k)
    m = None if name in NAMED else _NAME_RE.match(name)
    if m:
        base, size = m.group(1), int(m.group(2))
        base = {"gl": "gln", "sl": "sln"}.get(base, base)
        if n is not None and n != size:
            raise AlgebraFormatError(f"conflicting sizes in {name!r} and n={n}")
        return _named_table(base, ring, size)
    return _named_table(name, ring, n)


__all__ = [
    "AlgebraFormatError",
    "BracketAlgebra",
    "JacobiTensor",
    "ExteriorElement",
    "jacobi_form",
    "jacobi_full",
    "cobracket",
    "cobracket_generator",
    "colie_defect",
    "named_algebra",
    "gl_algebra",
    "sl_algebra",
    "NAMED",
]
