"""Lifting a Lie algebra over Z/p^{k-1} to Z/p^k, one level at a time.

With c-hat the structure constants read as integers mod p^k, the Jacobi
tensor J(c-hat) is divisible by p^{k-1}; eta = J(c-hat) / p^{k-1} is an
ad-valued 3-cocycle on L-bar = L mod p.  Perturbing c-hat by p^{k-1} mu
changes J by p^{k-1} (-d mu), so a lift exists iff eta = d mu is solvable,
and then c-hat + p^{k-1} mu is one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .algebra import BracketAlgebra, ExteriorElement, jacobi_full
from .cohomology import build_complex, module_ad, subsets
from .groups import BudgetExceeded, enumeration_budget
from .modp import PrimePower, solve_fp


class LiftError(ValueError):
    """The lift problem's precondition fails."""


@dataclass(frozen=True)
class LiftProblem:
    """Lift L (over Z/p^{k-1}) to Z/p^k."""

    L: BracketAlgebra
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise LiftError("target exponent k must be at least 2")
        if self.L.ring.k != self.k - 1:
            raise LiftError(f"L lives over {self.L.ring}, expected Z/p^{self.k - 1}")
        if not self.L.is_lie():
            raise LiftError(f"J(L) is not zero mod p^{self.k - 1}")

    @property
    def p(self) -> int:
        return self.L.p

    @property
    def base(self) -> BracketAlgebra:
        """L-bar = L mod p."""
        return self.L.reduce(1) if self.L.ring.k > 1 else self.L


def canonical_lift(L: BracketAlgebra, k: int, balanced: bool = True) -> np.ndarray:
    """Integer representatives for i < j, extended antisymmetrically mod p^k.

    Balanced representatives lie in (-p^{k-1}/2, p^{k-1}/2), so small integral
    constants such as those of gl_n lift to themselves; otherwise [0, p^{k-1}).
    """
    q = L.p ** k
    m = L.ring.modulus
    n = L.dim
    c = np.zeros((n, n, n), dtype=np.int64)
    for i, j in combinations(range(n), 2):
        v = L.c[i, j].astype(np.int64) % m
        if balanced:
            v = np.where(v > m // 2, v - m, v)
        c[i, j] = v % q
        c[j, i] = (-v) % q
    return c


def eta_cochain(c_hat: np.ndarray, p: int, k: int) -> np.ndarray:
    """J(c_hat) / p^{k-1} mod p as a flat vector in C^3(L-bar; ad)."""
    q = p ** k
    J = jacobi_full(c_hat) % q
    scale = p ** (k - 1)
    if np.any(J % scale):
        raise LiftError(f"J is not divisible by p^{k - 1}")
    J = (J // scale) % p
    n = c_hat.shape[0]
    return np.concatenate([J[i, j, l] for i, j, l in subsets(n, 3)]).astype(np.int64) \
        if n >= 3 else np.zeros(0, dtype=np.int64)


def cochain_to_constants(mu: np.ndarray, n: int) -> np.ndarray:
    """A flat 2-cochain with ad coefficients as an antisymmetric n x n x n tensor."""
    c = np.zeros((n, n, n), dtype=np.int64)
    for r, (i, j) in enumerate(subsets(n, 2)):
        c[i, j] = mu[r * n:(r + 1) * n]
        c[j, i] = -c[i, j]
    return c


def eta_forms(eta: np.ndarray, n: int, p: int):
    """Split an ad-valued 3-cochain into the n exterior 3-forms eta_t."""
    trip = subsets(n, 3)
    return tuple(ExteriorElement.from_dict(n, p, {T: int(eta[r * n + t]) for r, T in enumerate(trip)})
                 for t in range(n))


@dataclass
class LiftReport:
    p: int
    k: int
    eta: np.ndarray
    obstruction_zero: bool
    mu: Optional[np.ndarray] = None
    corrected: Optional[BracketAlgebra] = None
    tower_verdict: str = ""

    def to_dict(self) -> dict:
        n = self.corrected.dim if self.corrected is not None else None
        out = {"p": self.p, "k": self.k,
               "eta": [int(x) for x in self.eta],
               "obstruction_zero": self.obstruction_zero,
               "mu": None if self.mu is None else [int(x) for x in self.mu],
               "corrected": None if self.corrected is None else self.corrected.to_dict(),
               "tower_verdict": self.tower_verdict}
        if n is not None:
            out["dim"] = n
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def obstruction(problem: LiftProblem, balanced: bool = True) -> LiftReport:
    """Decide the lift, and when it exists return verified corrected constants."""
    L, k, p = problem.L, problem.k, problem.p
    n = L.dim
    q = p ** k
    c_hat = canonical_lift(L, k, balanced)
    eta = eta_cochain(c_hat, p, k)
    Lbar = problem.base
    cx = build_complex(Lbar, module_ad(Lbar))
    if n >= 3 and np.any(cx.apply(3, eta)):
        raise ArithmeticError("eta is not a cocycle; convention bug")
    if n < 3 or not eta.any():
        mu = np.zeros(cx.dims[2] if n >= 2 else 0, dtype=np.int64)
    else:
        mu = solve_fp(cx.differential(2), eta)
    if mu is None:
        verdict = f"[eta] != 0: no lift to Z/{p}^{k}"
        return LiftReport(p, k, eta, False, None, None, verdict)
    corrected = (c_hat + p ** (k - 1) * cochain_to_constants(mu, n)) % q
    lifted = BracketAlgebra(PrimePower(p, k), corrected, L.labels)
    if not lifted.is_lie():
        raise ArithmeticError("corrected constants fail Jacobi mod p^k")
    if not lifted.reduce(k - 1).same_constants(L):
        raise ArithmeticError("corrected constants do not reduce to L")
    verdict = f"[eta] = 0: lifts to Z/{p}^{k}"
    return LiftReport(p, k, eta, True, mu, lifted, verdict)


def brute_force_lift_oracle(problem: LiftProblem, budget: Optional[int] = None) -> bool:
    """Try every perturbation c-hat + p^{k-1} delta and test Jacobi mod p^k directly."""
    L, k, p = problem.L, problem.k, problem.p
    n = L.dim
    pairs = list(combinations(range(n), 2))
    npar = len(pairs) * n
    budget = enumeration_budget() if budget is None else budget
    if p ** npar > budget:
        raise BudgetExceeded(f"{p}^{npar} perturbations exceed the budget of {budget}")
    q = p ** k
    c_hat = canonical_lift(L, k)
    scale = p ** (k - 1)
    chunk = max(1, 2 ** 16 // max(1, n ** 4))
    total = p ** npar
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = (idx[:, None] // p ** np.arange(npar, dtype=np.int64)) % p
        delta = np.zeros((len(idx), n, n, n), dtype=np.int64)
        for r, (i, j) in enumerate(pairs):
            delta[:, i, j] = digits[:, r * n:(r + 1) * n]
            delta[:, j, i] = -delta[:, i, j]
        c = (c_hat[None] + scale * delta) % q
        nested = np.einsum("bijs,bskt->bijkt", c, c)
        J = nested + nested.transpose(0, 2, 3, 1, 4) + nested.transpose(0, 3, 1, 2, 4)
        if np.any(~np.any(J.reshape(len(idx), -1) % q, axis=1)):
            return True
    return False


@dataclass
class TowerExtension:
    lie: bool
    length3: bool
    length4: bool
    report: Optional[LiftReport]

    def describe(self) -> str:
        if not self.length3:
            return "stops at length 2: Log is not a Lie algebra"
        if not self.length4:
            return "extends to length 3 but not 4: [eta] != 0"
        return "extends to length 4"


def tower_extension_verdict(L2: BracketAlgebra) -> TowerExtension:
    """Exp(L2) as G_2: length 3 iff J(L2) = 0, length 4 iff also [eta] = 0."""
    if L2.ring.k != 1:
        raise ValueError("expects a bracket algebra over F_p")
    if not L2.is_lie():
        return TowerExtension(False, False, False, None)
    report = obstruction(LiftProblem(L2, 2))
    return TowerExtension(True, True, report.obstruction_zero, report)


def random_lie_algebra(n: int, p: int, rng: np.random.Generator, max_tries: int = 10 ** 5) -> BracketAlgebra:
    """Rejection sample uniform alternating constants until Jacobi holds."""
    ring = PrimePower(p)
    pairs = list(combinations(range(n), 2))
    for _ in range(max_tries):
        c = np.zeros((n, n, n), dtype=np.int64)
        for i, j in pairs:
            c[i, j] = rng.integers(0, p, n)
            c[j, i] = -c[i, j]
        L = BracketAlgebra(ring, c)
        if L.is_lie():
            return L
    raise RuntimeError("no Lie algebra found")


__all__ = [
    "LiftError",
    "LiftProblem",
    "LiftReport",
    "obstruction",
    "brute_force_lift_oracle",
    "eta_cochain",
    "canonical_lift",
    "eta_forms",
    "cochain_to_constants",
    "TowerExtension",
    "tower_extension_verdict",
    "random_lie_algebra",
]
