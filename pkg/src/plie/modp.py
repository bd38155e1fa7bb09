"""Exact dense linear algebra over F_p and Z/p^k.

Matrices are numpy int64 arrays whose entries are kept reduced into
``[0, p^k)``.  Everything here is small (a few hundred rows at most), so the
elimination loops are plain row operations vectorised along the row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimePower:
    """The coefficient ring Z/p^k for an odd prime p."""

    p: int
    k: int = 1

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ValueError(f"p={self.p} is not prime")
        if self.p == 2:
            raise ValueError("p must be odd")
        if int(self.k) < 1:
            raise ValueError(f"exponent k={self.k} must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p ** self.k

    @property
    def is_field(self) -> bool:
        return self.k == 1

    def inverse(self, a: int) -> int:
        """Inverse of a unit of Z/p^k."""
        a = int(a) % self.modulus
        if a % self.p == 0:
            raise ZeroDivisionError(f"{a} is not a unit mod {self.modulus}")
        return pow(a, -1, self.modulus)

    @property
    def half(self) -> int:
        return self.inverse(2)

    def reduce(self, t: int) -> "PrimePower":
        if not 1 <= t <= self.k:
            raise ValueError(f"cannot reduce Z/{self.p}^{self.k} to exponent {t}")
        return PrimePower(self.p, t)

    def __str__(self):
        return f"F_{self.p}" if self.k == 1 else f"Z/{self.p}^{self.k}"


def valuation(a: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    a = int(a)
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


class ModMatrix:
    """Immutable integer matrix reduced mod p^k."""

    __slots__ = ("ring", "entries")

    def __init__(self, ring: PrimePower, entries):
        a = np.array(entries, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError("ModMatrix needs a 2-d array")
        a = np.mod(a, ring.modulus)
        a.setflags(write=False)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "entries", a)

    def __setattr__(self, name, value):
        raise AttributeError("ModMatrix is immutable")

    @classmethod
    def zeros(cls, ring: PrimePower, rows: int, cols: int) -> "ModMatrix":
        return cls(ring, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, ring: PrimePower, n: int) -> "ModMatrix":
        return cls(ring, np.eye(n, dtype=np.int64))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def is_zero(self) -> bool:
        return not self.entries.any()

    def __matmul__(self, other):
        if isinstance(other, ModMatrix):
            _check_same_ring(self.ring, other.ring)
            return ModMatrix(self.ring, self.entries @ other.entries)
        v = np.asarray(other, dtype=np.int64)
        return np.mod(self.entries @ v, self.ring.modulus)

    def __add__(self, other: "ModMatrix") -> "ModMatrix":
        _check_same_ring(self.ring, other.ring)
        return ModMatrix(self.ring, self.entries + other.entries)

    def __sub__(self, other: "ModMatrix") -> "ModMatrix":
        _check_same_ring(self.ring, other.ring)
        return ModMatrix(self.ring, self.entries - other.entries)

    def __neg__(self) -> "ModMatrix":
        return ModMatrix(self.ring, -self.entries)

    def scale(self, a: int) -> "ModMatrix":
        return ModMatrix(self.ring, self.entries * int(a))

    @property
    def T(self) -> "ModMatrix":
        return ModMatrix(self.ring, self.entries.T)

    def __eq__(self, other):
        if not isinstance(other, ModMatrix):
            return NotImplemented
        return self.ring == other.ring and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.ring, self.entries.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"ModMatrix({self.ring}, {self.entries.tolist()})"


def _check_same_ring(a: PrimePower, b: PrimePower):
    if a != b:
        raise ValueError(f"ring mismatch: {a} vs {b}")


def _require_field(m: ModMatrix):
    if m.ring.k != 1:
        raise ValueError(f"expected a matrix over F_p, got one over {m.ring}")


@dataclass(frozen=True)
class Subspace:
    """Subspace of F_p^ambient spanned by the rows of ``basis`` (reduced echelon)."""

    ring: PrimePower
    ambient: int
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, v) -> bool:
        v = np.mod(np.asarray(v, dtype=np.int64), self.ring.p)
        stacked = np.vstack([self.basis, v.reshape(1, -1)])
        return rank_fp(ModMatrix(self.ring, stacked)) == self.dim


def _rref(a: np.ndarray, p: int, ncols: Optional[int] = None):
    """In-place reduced row echelon form over F_p on the first ``ncols`` columns."""
    rows, cols = a.shape
    if ncols is None:
        ncols = cols
    pivots = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rref_fp(m: ModMatrix) -> Tuple[ModMatrix, int, Tuple[int, ...]]:
    """Reduced row echelon form over F_p: (echelon matrix, rank, pivot columns)."""
    _require_field(m)
    a, pivots = _rref(m.entries.copy(), m.ring.p)
    return ModMatrix(m.ring, a), len(pivots), tuple(pivots)


def rank_fp(m: ModMatrix) -> int:
    _require_field(m)
    if m.rows == 0 or m.cols == 0:
        return 0
    _, pivots = _rref(m.entries.copy(), m.ring.p)
    return len(pivots)


def kernel_fp(m: ModMatrix) -> Subspace:
    """Right kernel {v : m v = 0} as a subspace in reduced echelon form."""
    _require_field(m)
    p = m.ring.p
    cols = m.cols
    a, pivots = _rref(m.entries.copy(), p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = (-a[r, f]) % p
    if len(free):
        basis, _ = _rref(basis, p)
    basis.setflags(write=False)
    return Subspace(m.ring, cols, basis)


def span_fp(ring: PrimePower, vectors, ambient: int) -> Subspace:
    """Row span of a stack of vectors, as a reduced echelon basis."""
    vecs = np.mod(np.asarray(vectors, dtype=np.int64).reshape(-1, ambient), ring.p)
    a, pivots = _rref(vecs.copy(), ring.p)
    basis = a[: len(pivots)].copy()
    basis.setflags(write=False)
    return Subspace(ring, ambient, basis)


def solve_fp(m: ModMatrix, b) -> Optional[np.ndarray]:
    """Some v with m v = b over F_p, or None when the system is inconsistent."""
    _require_field(m)
    p = m.ring.p
    b = np.mod(np.asarray(b, dtype=np.int64).reshape(-1), p)
    if b.shape[0] != m.rows:
        raise ValueError(f"right-hand side has length {b.shape[0]}, expected {m.rows}")
    aug = np.hstack([m.entries, b.reshape(-1, 1)])
    a, pivots = _rref(aug, p, ncols=m.cols)
    rank = len(pivots)
    if a[rank:, -1].any():
        return None
    v = np.zeros(m.cols, dtype=np.int64)
    for r, c in enumerate(pivots):
        v[c] = a[r, -1]
    return v


def solve_mod_pk(m: ModMatrix, b) -> Optional[np.ndarray]:
    """Some v with m v = b mod p^k, or None.

    Elimination proceeds one p-adic layer at a time: first with every pivot
    that is a unit mod p, then, once the remaining block is divisible by p,
    with pivots of valuation 1, and so on.  Row operations with a
    minimal-valuation pivot never lose solutions, so back substitution with
    the free variables set to zero decides solvability exactly.
    """
    ring = m.ring
    q, p = ring.modulus, ring.p
    b = np.mod(np.asarray(b, dtype=np.int64).reshape(-1), q)
    if b.shape[0] != m.rows:
        raise ValueError(f"right-hand side has length {b.shape[0]}, expected {m.rows}")
    rows, cols = m.shape
    a = np.hstack([m.entries.copy(), b.reshape(-1, 1)])
    used_cols: list = []
    pivots = []  # (row, col, valuation)
    r = 0
    for layer in range(ring.k):
        unit = p ** layer
        progress = True
        while progress and r < rows:
            progress = False
            for c in range(cols):
                if c in used_cols:
                    continue
                col = a[r:, c]
                # entries of the remaining block are all divisible by p^layer
                cand = np.nonzero((col % (unit * p)) != 0)[0]
                if cand.size == 0:
                    continue
                piv = r + int(cand[0])
                if piv != r:
                    a[[r, piv]] = a[[piv, r]]
                u = int(a[r, c]) // unit
                uinv = pow(u, -1, q)
                for rr in range(r + 1, rows):
                    e = int(a[rr, c])
                    if e:
                        f = (e // unit) * uinv % q
                        a[rr] = (a[rr] - f * a[r]) % q
                pivots.append((r, c, layer))
                used_cols.append(c)
                r += 1
                progress = True
                break
    if a[r:, -1].any():
        return None
    x = np.zeros(cols, dtype=np.int64)
    for row, c, v in reversed(pivots):
        rhs = (int(a[row, -1]) - int(a[row, :cols] @ x)) % q
        unit = p ** v
        if rhs % unit:
            return None
        u = (int(a[row, c]) // unit) % (q // unit)
        mod = q // unit
        x[c] = (rhs // unit) * pow(u, -1, mod) % mod if mod > 1 else 0
    if np.any((m.entries @ x - b) % q):
        raise ArithmeticError("back substitution produced a non-solution")
    return x


__all__ = [
    "PrimePower",
    "ModMatrix",
    "Subspace",
    "is_prime",
    "valuation",
    "rref_fp",
    "rank_fp",
    "kernel_fp",
    "span_fp",
    "solve_fp",
    "solve_mod_pk",
]
