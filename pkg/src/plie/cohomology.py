"""Chevalley-Eilenberg cohomology of a Lie algebra over F_p.

A cochain in C^l(L; M) is stored as a flat vector: the block for the sorted
index subset T (subsets in lexicographic order) holds the value on
e_{t_0}, ..., e_{t_{l-1}}, a vector in M.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import BracketAlgebra
from .modp import ModMatrix, PrimePower, kernel_fp, rank_fp, solve_fp, span_fp


class ModuleAxiomError(ValueError):
    """rho([u, v]) differs from [rho(u), rho(v)] with either sign."""


class CochainError(ArithmeticError):
    """d o d is not zero."""

    def __init__(self, degree: int):
        super().__init__(f"d^{degree + 1} o d^{degree} != 0")
        self.degree = degree


def _field(L: BracketAlgebra):
    if L.ring.k != 1:
        raise ValueError("cohomology is computed over F_p only")


@dataclass
class LieModule:
    """Finite-dimensional module: rho[i] is the action of e_i on column vectors."""

    L: BracketAlgebra
    rho: Tuple[np.ndarray, ...]
    name: str = "custom"
    flipped: bool = False

    @property
    def dim(self) -> int:
        return self.rho[0].shape[0] if self.rho else 0

    def axiom_defect(self, sign: int = 1) -> List[Tuple[int, int]]:
        """Basis pairs (i, j) where rho([e_i, e_j]) != sign * [rho_i, rho_j]."""
        p = self.L.p
        bad = []
        for i in range(self.L.dim):
            for j in range(i + 1, self.L.dim):
                lhs = np.einsum("t,tab->ab", self.L.c[i, j], np.array(self.rho))
                rhs = self.rho[i] @ self.rho[j] - self.rho[j] @ self.rho[i]
                if np.any((lhs - sign * rhs) % p):
                    bad.append((i, j))
        return bad


def _checked(L: BracketAlgebra, rho: Sequence[np.ndarray], name: str) -> LieModule:
    """Validate the module axiom, flipping the sign of the action if that fixes it."""
    p = L.p
    rho = tuple(np.mod(np.asarray(r, dtype=np.int64), p) for r in rho)
    for r in rho:
        r.setflags(write=False)
    M = LieModule(L, rho, name)
    if L.dim == 0 or not M.axiom_defect(1):
        return M
    if not M.axiom_defect(-1):
        neg = tuple(np.mod(-r, p) for r in rho)
        return LieModule(L, neg, name, flipped=True)
    raise ModuleAxiomError(f"{name} is not a module (Jacobi fails or sign bug); bad pairs {M.axiom_defect(1)[:3]}")


def module_trivial(L: BracketAlgebra) -> LieModule:
    _field(L)
    return LieModule(L, tuple(np.zeros((1, 1), dtype=np.int64) for _ in range(L.dim)), "trivial")


def module_ad(L: BracketAlgebra) -> LieModule:
    _field(L)
    return _checked(L, L.ad_matrices(), "ad")


def sym_basis(n: int, k: int) -> List[Tuple[int, ...]]:
    """Sorted multi-indices i_1 <= ... <= i_k, one per symmetric-form coordinate."""
    return list(combinations_with_replacement(range(n), k))


def module_sym(L: BracketAlgebra, k: int) -> LieModule:
    """Symmetric k-forms f, with (u.f)(u_1..u_k) = sum_i f(u_1, .., [u_i, u], .., u_k).

    Coordinates are the values f(e_I) on sorted multi-indices I.
    """
    _field(L)
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        M = module_trivial(L)
        return LieModule(L, M.rho, "S^0")
    n, p = L.dim, L.p
    basis = sym_basis(n, k)
    pos = {I: r for r, I in enumerate(basis)}
    rho = []
    for a in range(n):
        R = np.zeros((len(basis), len(basis)), dtype=np.int64)
        for r, I in enumerate(basis):
            for slot, i in enumerate(I):
                for t in np.nonzero(L.c[i, a])[0]:
                    J = tuple(sorted(I[:slot] + (int(t),) + I[slot + 1:]))
                    R[r, pos[J]] += L.c[i, a, t]
        rho.append(R % p)
    return _checked(L, rho, f"S^{k}")


def module_poly(L: BracketAlgebra, k: int) -> LieModule:
    """Degree-k polynomials in the S^1 coordinates s_t, acted on by derivations.

    Isomorphic to S^k for k < p; from k = p on the two modules differ.
    """
    _field(L)
    if k < 0:
        raise ValueError("k must be non-negative")
    n, p = L.dim, L.p
    basis = poly_basis(n, k)
    pos = {e: r for r, e in enumerate(basis)}
    rho = []
    for a in range(n):
        R = np.zeros((len(basis), len(basis)), dtype=np.int64)
        for col, e in enumerate(basis):
            for t in range(n):
                if not e[t]:
                    continue
                for i in np.nonzero(L.c[:, a, t])[0]:
                    f = list(e)
                    f[t] -= 1
                    f[int(i)] += 1
                    R[pos[tuple(f)], col] += e[t] * L.c[i, a, t]
        rho.append(R % p)
    return _checked(L, rho, f"Sym^{k}")


def poly_basis(n: int, k: int) -> List[Tuple[int, ...]]:
    """Exponent vectors of total degree k, in reverse lexicographic order."""
    return sorted((tuple(I.count(i) for i in range(n)) for I in sym_basis(n, k)), reverse=True)


def multinomial(I: Sequence[int]) -> int:
    counts: Dict[int, int] = {}
    for i in I:
        counts[i] = counts.get(i, 0) + 1
    out = factorial(len(I))
    for c in counts.values():
        out //= factorial(c)
    return out


def form_to_polynomial(values: Sequence[int], n: int, k: int, p: int) -> Dict[Tuple[int, ...], int]:
    """Polynomial sum_I f(e_I) e_I^* with the multiplicity of each monomial.

    Keys are exponent vectors; e.g. the Killing form of sl2 (values 8 on
    (h,h), 4 on (x+,x-)) becomes 8 H^2 + 8 X+ X-.
    """
    out = {}
    for I, v in zip(sym_basis(n, k), values):
        coeff = (multinomial(I) * int(v)) % p
        if coeff:
            exps = tuple(I.count(i) for i in range(n))
            out[exps] = coeff
    return out


def polynomial_to_form(poly: Dict[Tuple[int, ...], int], n: int, k: int, p: int) -> np.ndarray:
    """Inverse of form_to_polynomial; needs k < p so multiplicities are units."""
    if k >= p:
        raise ValueError("symmetric forms and polynomials differ once k >= p")
    vals = np.zeros(len(sym_basis(n, k)), dtype=np.int64)
    for r, I in enumerate(sym_basis(n, k)):
        exps = tuple(I.count(i) for i in range(n))
        vals[r] = poly.get(exps, 0) * pow(multinomial(I), -1, p) % p
    return vals


# -- complex ----------------------------------------------------------------

def subsets(n: int, l: int) -> List[Tuple[int, ...]]:
    return list(combinations(range(n), l))


@dataclass
class CochainComplex:
    L: BracketAlgebra
    M: LieModule
    dims: Tuple[int, ...]
    d: Tuple[ModMatrix, ...]  # d[l] : C^l -> C^{l+1}

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def differential(self, l: int) -> ModMatrix:
        if 0 <= l < len(self.d):
            return self.d[l]
        rows = self.dims[l + 1] if 0 <= l + 1 < len(self.dims) else 0
        cols = self.dims[l] if 0 <= l < len(self.dims) else 0
        return ModMatrix.zeros(PrimePower(self.L.p), rows, cols)

    def dd_defects(self) -> List[int]:
        return [l for l in range(len(self.d) - 1) if not (self.d[l + 1] @ self.d[l]).is_zero()]

    def apply(self, l: int, cochain) -> np.ndarray:
        return self.differential(l) @ np.asarray(cochain, dtype=np.int64)


def differential_matrix(L: BracketAlgebra, M: LieModule, l: int) -> ModMatrix:
    """d^l, following
    (d w)(u_0..u_l) = sum_{i<j} (-1)^{i+j} w([u_i,u_j], u_0..^i..^j..u_l)
                     + sum_i (-1)^i rho(u_i) w(u_0..^i..u_l).
    """
    n, m, p = L.dim, M.dim, L.p
    src = subsets(n, l)
    tgt = subsets(n, l + 1)
    spos = {S: r for r, S in enumerate(src)}
    D = np.zeros((len(tgt) * m, len(src) * m), dtype=np.int64)
    eye = np.eye(m, dtype=np.int64)
    for r, T in enumerate(tgt):
        rows = slice(r * m, (r + 1) * m)
        for i in range(l + 1):
            for j in range(i + 1, l + 1):
                rest = T[:i] + T[i + 1:j] + T[j + 1:]
                for s in np.nonzero(L.c[T[i], T[j]])[0]:
                    s = int(s)
                    if s in rest:
                        continue
                    shift = sum(1 for x in rest if x < s)
                    S = tuple(sorted(rest + (s,)))
                    coeff = (-1) ** (i + j + shift) * int(L.c[T[i], T[j], s])
                    c0 = spos[S] * m
                    D[rows, c0:c0 + m] += coeff * eye
            S = T[:i] + T[i + 1:]
            c0 = spos[S] * m
            D[rows, c0:c0 + m] += (-1) ** i * M.rho[T[i]]
    return ModMatrix(PrimePower(p), D)


def build_complex(L: BracketAlgebra, M: Optional[LieModule] = None, check: bool = True) -> CochainComplex:
    """Cochain complex C^0 -> ... -> C^n; raises CochainError if d o d != 0."""
    _field(L)
    M = module_trivial(L) if M is None else M
    n = L.dim
    dims = tuple(comb(n, l) * M.dim for l in range(n + 1))
    d = tuple(differential_matrix(L, M, l) for l in range(n))
    cx = CochainComplex(L, M, dims, d)
    if check:
        bad = cx.dd_defects()
        if bad:
            raise CochainError(bad[0])
    return cx


@dataclass
class CohomologyReport:
    module: str
    dims: Tuple[int, ...]
    representatives: Optional[Tuple[np.ndarray, ...]] = None
    flipped: bool = False

    def to_dict(self) -> dict:
        out = {"module": self.module, "dims": list(self.dims), "action_sign_flipped": self.flipped}
        if self.representatives is not None:
            out["representatives"] = [r.tolist() for r in self.representatives]
        return out


def _ranks(cx: CochainComplex) -> List[int]:
    return [rank_fp(m) if m.rows and m.cols else 0 for m in cx.d]


def cohomology_dims(cx: CochainComplex) -> Tuple[int, ...]:
    ranks = _ranks(cx)
    out = []
    for l, dim in enumerate(cx.dims):
        rk_out = ranks[l] if l < len(ranks) else 0
        rk_in = ranks[l - 1] if l >= 1 else 0
        out.append(dim - rk_out - rk_in)
    return tuple(out)


def _complement_reps(kernel: np.ndarray, image: np.ndarray, p: int) -> np.ndarray:
    """Kernel vectors completing a basis of the image to one of the kernel."""
    ring = PrimePower(p)
    width = kernel.shape[1]
    current = image.reshape(-1, width)
    rk = rank_fp(ModMatrix(ring, current)) if current.size else 0
    chosen = []
    for v in kernel:
        trial = np.vstack([current, v.reshape(1, -1)])
        r = rank_fp(ModMatrix(ring, trial))
        if r > rk:
            chosen.append(v)
            current, rk = trial, r
    return np.array(chosen, dtype=np.int64).reshape(-1, width)


def cohomology(L: BracketAlgebra, M: Optional[LieModule] = None,
               representatives: bool = False) -> CohomologyReport:
    M = module_trivial(L) if M is None else M
    cx = build_complex(L, M)
    dims = cohomology_dims(cx)
    reps = None
    if representatives:
        p = L.p
        reps = []
        for l in range(len(cx.dims)):
            if cx.dims[l] == 0:
                reps.append(np.zeros((0, 0), dtype=np.int64))
                continue
            if l < len(cx.d):
                ker = kernel_fp(cx.d[l]).basis
            else:
                ker = np.eye(cx.dims[l], dtype=np.int64)
            if l >= 1:
                img = span_fp(PrimePower(p), cx.d[l - 1].entries.T, cx.dims[l]).basis
            else:
                img = np.zeros((0, cx.dims[l]), dtype=np.int64)
            reps.append(_complement_reps(ker, img, p))
        reps = tuple(reps)
    return CohomologyReport(M.name, dims, reps, M.flipped)


def is_coboundary(cx: CochainComplex, l: int, cocycle) -> Optional[np.ndarray]:
    """A preimage mu in C^{l-1} with d mu = cocycle, or None.

    Raises ValueError when ``cocycle`` is not closed.
    """
    p = cx.L.p
    v = np.mod(np.asarray(cocycle, dtype=np.int64).reshape(-1), p)
    if v.shape[0] != cx.dims[l]:
        raise ValueError(f"cochain has length {v.shape[0]}, C^{l} has dimension {cx.dims[l]}")
    if np.any(cx.apply(l, v)):
        raise ValueError("input is not a cocycle")
    if l == 0:
        return None if v.any() else np.zeros(0, dtype=np.int64)
    return solve_fp(cx.differential(l - 1), v)


def killing_form(L: BracketAlgebra) -> np.ndarray:
    """Values of tr(ad u ad v) on the S^2 basis."""
    ad = L.ad_matrices()
    return np.array([int(np.trace(ad[i] @ ad[j])) % L.p for i, j in sym_basis(L.dim, 2)], dtype=np.int64)


__all__ = [
    "LieModule",
    "ModuleAxiomError",
    "CochainError",
    "module_trivial",
    "module_ad",
    "module_sym",
    "module_poly",
    "sym_basis",
    "poly_basis",
    "multinomial",
    "form_to_polynomial",
    "polynomial_to_form",
    "subsets",
    "CochainComplex",
    "differential_matrix",
    "build_complex",
    "CohomologyReport",
    "cohomology",
    "cohomology_dims",
    "is_coboundary",
    "killing_form",
]
