"""Concrete finite p-groups and the predicates the bracket-group theory needs.

Elements are tuples of residues so they hash cheaply.  Each concrete group
also exposes ``mul_many`` on (N, d) integer arrays, which the enumeration
heavy checks (associativity, exponent) use.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import BracketAlgebra, gl_algebra
from .modp import PrimePower, rank_fp, ModMatrix

DEFAULT_BUDGET = 10 ** 6
DEFAULT_SAMPLES = 10 ** 5

Element = Tuple[int, ...]


class BudgetExceeded(RuntimeError):
    """The group is too large to enumerate and offers no normal form."""


class FormsError(ValueError):
    """The commutator / p-power forms are not well defined on G/Omega_1(G)."""


def enumeration_budget() -> int:
    env = os.environ.get("PLIE_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class FiniteGroup:
    """Uniform element interface used by every predicate in this module."""

    p: int
    order: int
    name: str = "G"

    @property
    def identity(self) -> Element:
        raise NotImplementedError

    def mul(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def inv(self, a: Element) -> Element:
        raise NotImplementedError

    def elements(self) -> Iterable[Element]:
        raise NotImplementedError

    def generators(self) -> List[Element]:
        raise NotImplementedError

    def random_element(self, rng: np.random.Generator) -> Element:
        raise NotImplementedError

    def random_elements(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return np.array([self.random_element(rng) for _ in range(count)], dtype=np.int64)

    def power(self, a: Element, e: int) -> Element:
        result, base = self.identity, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def commutator(self, a: Element, b: Element) -> Element:
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))

    def mul_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.array([self.mul(tuple(x), tuple(y)) for x, y in zip(a.tolist(), b.tolist())],
                        dtype=np.int64).reshape(a.shape)

    def inv_many(self, a: np.ndarray) -> np.ndarray:
        return np.array([self.inv(tuple(x)) for x in a.tolist()], dtype=np.int64).reshape(a.shape)

    def commutator_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.mul_many(self.mul_many(a, b), self.mul_many(self.inv_many(a), self.inv_many(b)))

    def element_array(self) -> np.ndarray:
        return np.array(list(self.elements()), dtype=np.int64)

    # normal forms for groups too large to enumerate; None means unknown
    def known_omega1(self) -> Optional["Subgroup"]:
        return None

    def known_power_subgroup(self, e: int) -> Optional["Subgroup"]:
        return None

    def canonical_lifts(self) -> Optional[List[Element]]:
        return None


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its elements (when enumerated) and generators."""

    order: int
    generators: Tuple[Element, ...]
    elements: Optional[FrozenSet[Element]] = None
    member: Optional[Callable[[Element], bool]] = field(default=None, compare=False)

    def __contains__(self, g: Element) -> bool:
        if self.elements is not None:
            return g in self.elements
        if self.member is None:
            raise BudgetExceeded("subgroup membership is unknown")
        return self.member(g)

    def issubset(self, other: "Subgroup") -> bool:
        if self.elements is not None and other.elements is not None:
            return self.elements <= other.elements
        return all(g in other for g in self.generators)

    def same_as(self, other: "Subgroup") -> bool:
        return self.order == other.order and self.issubset(other)


# -- concrete groups ------------------------------------------------------

class ExpGroup(FiniteGroup):
    """Vectors over Z/p^2 with l o m = l + m + p [l mod p, m mod p]."""

    def __init__(self, L: BracketAlgebra):
        if L.ring.k != 1:
            raise ValueError("Exp needs a bracket algebra over F_p")
        self.L = L
        self.p = L.p
        self.n = L.dim
        self.q = self.p ** 2
        self.order = self.q ** self.n
        self.name = f"Exp({L!r})"

    @property
    def identity(self) -> Element:
        return (0,) * self.n

    def mul(self, a, b):
        br = self.L.bracket(np.mod(a, self.p), np.mod(b, self.p))
        q, p = self.q, self.p
        return tuple(int((x + y + p * int(z)) % q) for x, y, z in zip(a, b, br))

    def mul_many(self, a, b):
        p = self.p
        br = np.einsum("ni,nj,ijt->nt", a % p, b % p, self.L.c)
        return (a + b + p * br) % self.q

    def inv(self, a):
        return tuple((-x) % self.q for x in a)

    def inv_many(self, a):
        return (-a) % self.q

    def elements(self):
        return itertools.product(range(self.q), repeat=self.n)

    def generators(self):
        return [tuple(int(i == j) for j in range(self.n)) for i in range(self.n)]

    def canonical_lifts(self):
        return self.generators()

    def random_element(self, rng):
        return tuple(int(x) for x in rng.integers(0, self.q, self.n))

    def random_elements(self, rng, count):
        return rng.integers(0, self.q, (count, self.n), dtype=np.int64)

    def known_omega1(self):
        p, n = self.p, self.n
        gens = tuple(tuple(p * int(i == j) for j in range(n)) for i in range(n))
        return Subgroup(p ** n, gens, member=lambda g: all(x % p == 0 for x in g))

    def known_power_subgroup(self, e):
        if e == 0:
            return Subgroup(self.order, tuple(self.generators()), member=lambda g: True)
        if e == 1:
            return self.known_omega1()
        return Subgroup(1, (), member=lambda g: not any(g))


def exp_group(L: BracketAlgebra) -> ExpGroup:
    return ExpGroup(L)


class GammaGroup(FiniteGroup):
    """Kernel of GL_n(Z/p^{k+1}) -> GL_n(F_p); elements are flat n*n tuples."""

    def __init__(self, n: int, k: int, p: int):
        PrimePower(p, 1)
        if n < 1 or k < 1:
            raise ValueError("n and k must be positive")
        self.n, self.k, self.p = n, k, p
        self.q = p ** (k + 1)
        if self.q ** 2 * n >= 2 ** 62:
            raise ValueError(f"entries mod {p}^{k + 1} overflow int64 products")
        self.order = p ** (k * n * n)
        self.name = f"Gamma_{n},{k}({p})"
        self._eye = tuple(int(i == j) for i in range(n) for j in range(n))

    @property
    def identity(self):
        return self._eye

    def _mat(self, a):
        return np.array(a, dtype=np.int64).reshape(self.n, self.n)

    def contains(self, a) -> bool:
        m = self._mat(a) % self.q
        return not np.any((m - np.eye(self.n, dtype=np.int64)) % self.p)

    def mul(self, a, b):
        return tuple(int(x) for x in ((self._mat(a) @ self._mat(b)) % self.q).reshape(-1))

    def mul_many(self, a, b):
        n = self.n
        prod = np.matmul(a.reshape(-1, n, n), b.reshape(-1, n, n)) % self.q
        return prod.reshape(a.shape)

    def inv(self, a):
        # (I + pA)^{-1} = sum_i (-pA)^i, truncated once p^i vanishes mod p^{k+1}
        n = self.n
        m = self._mat(a) % self.q
        x = (np.eye(n, dtype=np.int64) - m) % self.q
        acc = np.eye(n, dtype=np.int64)
        term = np.eye(n, dtype=np.int64)
        for _ in range(self.k):
            term = (term @ x) % self.q
            acc = (acc + term) % self.q
        return tuple(int(v) for v in acc.reshape(-1))

    def elements(self):
        n2, p, pk = self.n * self.n, self.p, self.p ** self.k
        eye = self._eye
        for A in itertools.product(range(pk), repeat=n2):
            yield tuple((e + p * a) % self.q for e, a in zip(eye, A))

    def generators(self):
        n, p = self.n, self.p
        gens = []
        for i in range(n):
            for j in range(n):
                m = list(self._eye)
                m[i * n + j] = (m[i * n + j] + p) % self.q
                gens.append(tuple(m))
        return gens

    def canonical_lifts(self):
        return self.generators()

    def random_element(self, rng):
        A = rng.integers(0, self.p ** self.k, self.n * self.n)
        return tuple(int((e + self.p * a) % self.q) for e, a in zip(self._eye, A))

    def random_elements(self, rng, count):
        A = rng.integers(0, self.p ** self.k, (count, self.n * self.n), dtype=np.int64)
        return (np.array(self._eye, dtype=np.int64) + self.p * A) % self.q

    def known_power_subgroup(self, e):
        # Gamma^{p^e} = {g = I mod p^{e+1}}
        p, n = self.p, self.n
        level = min(e + 1, self.k + 1)
        order = p ** ((self.k + 1 - level) * n * n)
        gens = []
        if level <= self.k:
            for i in range(n):
                for j in range(n):
                    m = list(self._eye)
                    m[i * n + j] = (m[i * n + j] + p ** level) % self.q
                    gens.append(tuple(m))
        eye = self._eye
        return Subgroup(order, tuple(gens),
                        member=lambda g: all((x - y) % (p ** level) == 0 for x, y in zip(g, eye)))

    def known_omega1(self):
        return self.known_power_subgroup(self.k - 1)

    def reduction(self) -> Callable[[Element], Element]:
        """Projection Gamma_{n,k} -> Gamma_{n,k-1} (entries mod p^k)."""
        pk = self.p ** self.k
        return lambda g: tuple(x % pk for x in g)


def gamma_group(n: int, k: int, p: int) -> GammaGroup:
    return GammaGroup(n, k, p)


class AbelianGroup(FiniteGroup):
    """Z/m_1 x ... x Z/m_r for prime powers m_i (all of the same prime)."""

    def __init__(self, moduli: Sequence[int], p: Optional[int] = None):
        self.moduli = tuple(int(m) for m in moduli)
        if p is None:
            p = next((_prime_of(m) for m in self.moduli if m > 1), 3)
        self.p = p
        self.order = int(np.prod(self.moduli, dtype=object)) if self.moduli else 1
        self.name = "x".join(f"Z/{m}" for m in self.moduli) or "1"

    @property
    def identity(self):
        return (0,) * len(self.moduli)

    def mul(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def mul_many(self, a, b):
        return (a + b) % np.array(self.moduli, dtype=np.int64)

    def inv(self, a):
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    def elements(self):
        return itertools.product(*(range(m) for m in self.moduli))

    def generators(self):
        r = len(self.moduli)
        return [tuple(int(i == j) for j in range(r)) for i in range(r)]

    def random_element(self, rng):
        return tuple(int(rng.integers(0, m)) for m in self.moduli)


def _prime_of(m: int) -> int:
    f = 2
    while m % f:
        f += 1
    return f


def trivial_group(p: int) -> AbelianGroup:
    return AbelianGroup((), p)


# -- subgroup machinery ---------------------------------------------------

def _require_enumerable(G: FiniteGroup, budget: Optional[int]):
    budget = enumeration_budget() if budget is None else budget
    if G.order > budget:
        raise BudgetExceeded(f"{G.name} has {G.order} elements, over the budget of {budget}")


def closure(G: FiniteGroup, gens: Iterable[Element], start: Optional[Iterable[Element]] = None) -> FrozenSet[Element]:
    """Subgroup generated by ``gens`` (together with an existing subgroup ``start``)."""
    gens = [g for g in gens if g != G.identity]
    seen = set(start) if start is not None else {G.identity}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def generated_subgroup(G: FiniteGroup, candidates: Iterable[Element]) -> Subgroup:
    """Subgroup generated by ``candidates``, keeping only the generators needed."""
    H = frozenset({G.identity})
    gens: List[Element] = []
    for g in candidates:
        if g not in H:
            gens.append(g)
            H = closure(G, gens, start=H) if len(H) > 1 else closure(G, gens)
    return Subgroup(len(H), tuple(gens), H)


def element_orders_log(G: FiniteGroup, elems: Optional[np.ndarray] = None) -> np.ndarray:
    """For each element g, the least e with g^(p^e) = 1."""
    arr = G.element_array() if elems is None else elems
    ident = np.array(G.identity, dtype=np.int64)
    e = np.zeros(len(arr), dtype=np.int64)
    cur = arr.copy()
    alive = np.any(cur != ident, axis=1)
    step = 0
    while alive.any():
        step += 1
        if step > 64:
            raise RuntimeError("element order is not a power of p")
        e[alive] += 1
        sub = cur[alive]
        acc = sub.copy()
        for _ in range(G.p - 1):
            acc = G.mul_many(acc, sub)
        cur[alive] = acc
        alive = np.any(cur != ident, axis=1)
    return e


def omega1(G: FiniteGroup, budget: Optional[int] = None) -> Subgroup:
    """<g : g^p = 1>."""
    try:
        _require_enumerable(G, budget)
    except BudgetExceeded:
        known = G.known_omega1()
        if known is None:
            raise
        return known
    elems = list(G.elements())
    arr = np.array(elems, dtype=np.int64)
    logs = element_orders_log(G, arr)
    return generated_subgroup(G, [g for g, e in zip(elems, logs) if e <= 1])


def power_subgroup(G: FiniteGroup, e: int, budget: Optional[int] = None) -> Subgroup:
    """G^{p^e} = <g^(p^e)>."""
    try:
        _require_enumerable(G, budget)
    except BudgetExceeded:
        known = G.known_power_subgroup(e)
        if known is None:
            raise
        return known
    arr = G.element_array()
    cur = arr
    for _ in range(e):
        acc = cur.copy()
        for _ in range(G.p - 1):
            acc = G.mul_many(acc, cur)
        cur = acc
    powers = sorted(set(map(tuple, cur.tolist())))
    return generated_subgroup(G, powers)


def commutator_subgroup(G: FiniteGroup) -> Subgroup:
    """[G, G] as the normal closure of commutators of generators."""
    gens = G.generators()
    comms = [G.commutator(a, b) for a in gens for b in gens]
    H = generated_subgroup(G, comms)
    changed = True
    while changed:
        changed = False
        for g in gens:
            ginv = G.inv(g)
            for h in list(H.generators):
                c = G.mul(G.mul(g, h), ginv)
                if c not in H.elements:
                    H = generated_subgroup(G, list(H.generators) + [c])
                    changed = True
    return H


def is_central(G: FiniteGroup, H: Subgroup) -> bool:
    gens = G.generators()
    return all(G.mul(h, g) == G.mul(g, h) for h in H.generators for g in gens)


@dataclass
class GroupPredicates:
    p_central: bool
    powerful: bool
    exponent: int
    omega1: Subgroup
    power: Subgroup
    frattini: Subgroup
    commutator: Optional[Subgroup]
    mode: str = "exact"
    witnesses: Dict[str, object] = field(default_factory=dict)


def predicates(G: FiniteGroup, budget: Optional[int] = None,
               samples: int = DEFAULT_SAMPLES, rng: Optional[np.random.Generator] = None) -> GroupPredicates:
    """p-central, powerful, exponent and Frattini subgroup, with witnesses on failure."""
    budget = enumeration_budget() if budget is None else budget
    if G.order <= budget:
        om = omega1(G, budget)
        pw = power_subgroup(G, 1, budget)
        comm = commutator_subgroup(G)
        frat = generated_subgroup(G, list(pw.generators) + list(comm.generators))
        wit = {}
        pc = is_central(G, om)
        if not pc:
            gens = G.generators()
            wit["p_central"] = next((h, g) for h in om.generators for g in gens
                                    if G.mul(h, g) != G.mul(g, h))
        powerful = comm.elements <= pw.elements
        if not powerful:
            wit["powerful"] = next(iter(comm.elements - pw.elements))
        exponent = G.p ** int(element_orders_log(G).max(initial=0))
        return GroupPredicates(pc, powerful, exponent, om, pw, frat, comm, "exact", wit)

    rng = rng if rng is not None else np.random.default_rng(0)
    om = omega1(G, budget)
    pw = power_subgroup(G, 1, budget)
    wit = {}
    pc = is_central(G, om)
    powerful = True
    A, B = G.random_elements(rng, samples), G.random_elements(rng, samples)
    for a, b, c in zip(A.tolist(), B.tolist(), G.commutator_many(A, B).tolist()):
        if tuple(c) not in pw:
            powerful = False
            wit["powerful"] = (tuple(a), tuple(b))
            break
    sample = G.random_elements(rng, min(samples, 10 ** 4))
    worst = int(element_orders_log(G, sample).max(initial=0))
    frat = pw if powerful else Subgroup(0, ())
    return GroupPredicates(pc, powerful, G.p ** worst, om, pw, frat, None, "sampled", wit)


@dataclass
class AssociativityVerdict:
    associative: bool
    mode: str
    checked: int
    witness: Optional[Tuple[Element, Element, Element]] = None


def check_associativity(G: FiniteGroup, triple_budget: int = 10 ** 6, samples: int = DEFAULT_SAMPLES,
                        rng: Optional[np.random.Generator] = None) -> AssociativityVerdict:
    """Exhaustive over all triples when |G|^3 fits the budget, else random triples."""
    if G.order ** 3 <= triple_budget:
        arr = G.element_array()
        N = len(arr)
        B = np.repeat(arr, N, axis=0)
        C = np.tile(arr, (N, 1))
        BC = G.mul_many(B, C)
        for a in arr:
            A = np.broadcast_to(a, B.shape)
            left = G.mul_many(G.mul_many(A, B), C)
            right = G.mul_many(A, BC)
            bad = np.nonzero(np.any(left != right, axis=1))[0]
            if bad.size:
                i = int(bad[0])
                return AssociativityVerdict(False, "exhaustive", N ** 3,
                                            (tuple(a), tuple(B[i]), tuple(C[i])))
        return AssociativityVerdict(True, "exhaustive", N ** 3)
    rng = rng if rng is not None else np.random.default_rng(0)
    A, B, C = (G.random_elements(rng, samples) for _ in range(3))
    left = G.mul_many(G.mul_many(A, B), C)
    right = G.mul_many(A, G.mul_many(B, C))
    bad = np.nonzero(np.any(left != right, axis=1))[0]
    if bad.size:
        i = int(bad[0])
        return AssociativityVerdict(False, "sampled", samples, (tuple(A[i]), tuple(B[i]), tuple(C[i])))
    return AssociativityVerdict(True, "sampled", samples)


# -- commutator and p-power forms -----------------------------------------

@dataclass
class CentralExtensionForms:
    """<.,.> : W x W -> V and phi : W -> V in chosen bases.

    ``comm[i, j]`` holds the V-coordinates of <w_i, w_j>; row i of ``phi``
    the V-coordinates of phi(w_i).
    """

    p: int
    lifts: Tuple[Element, ...]
    v_basis: Tuple[Element, ...]
    comm: np.ndarray
    phi: np.ndarray

    @property
    def dim_w(self) -> int:
        return len(self.lifts)

    @property
    def dim_v(self) -> int:
        return len(self.v_basis)

    def phi_invertible(self) -> bool:
        return self.dim_w == self.dim_v and rank_fp(ModMatrix(PrimePower(self.p), self.phi)) == self.dim_w


def _coordinates(G: FiniteGroup, basis: Sequence[Element]) -> Dict[Element, Tuple[int, ...]]:
    """Element -> exponent vector for an elementary abelian subgroup with given basis."""
    p = G.p
    coords = {}
    powers = [[G.identity] for _ in basis]
    for i, b in enumerate(basis):
        for _ in range(p - 1):
            powers[i].append(G.mul(powers[i][-1], b))
    for a in itertools.product(range(p), repeat=len(basis)):
        g = G.identity
        for i, ai in enumerate(a):
            g = G.mul(g, powers[i][ai])
        if g in coords:
            raise FormsError("V basis is not independent")
        coords[g] = a
    return coords


def extract_forms(G: FiniteGroup, lifts: Optional[Sequence[Element]] = None,
                  v_basis: Optional[Sequence[Element]] = None, budget: Optional[int] = None,
                  samples: int = 2000, rng: Optional[np.random.Generator] = None) -> CentralExtensionForms:
    """Commutator form and p-power map of 1 -> Omega_1(G) -> G -> W -> 1.

    By default the lifts are the group's canonical section (or a greedy
    choice), and V gets the basis phi(lifts) when that is a basis.
    """
    _require_enumerable(G, budget)
    p = G.p
    rng = rng if rng is not None else np.random.default_rng(1)
    V = omega1(G, budget)
    if not is_central(G, V):
        raise FormsError("Omega_1(G) is not central")
    if any(G.power(v, p) != G.identity for v in V.generators):
        raise FormsError("Omega_1(G) is not elementary abelian")
    index = G.order // V.order
    dim_w = _log_exact(index, p)
    if dim_w is None:
        raise FormsError("G/Omega_1(G) does not have p-power order")

    if lifts is None:
        lifts = G.canonical_lifts()
        if lifts is None:
            lifts = []
            H = V.elements
            for g in list(G.generators()) + list(G.elements()):
                if len(lifts) == dim_w:
                    break
                if g not in H:
                    lifts.append(g)
                    H = closure(G, lifts, start=H)
    lifts = tuple(tuple(g) for g in lifts)
    if len(lifts) != dim_w:
        raise FormsError(f"need {dim_w} lifts, got {len(lifts)}")

    if v_basis is None:
        cand = [G.power(g, p) for g in lifts]
        sub = generated_subgroup(G, cand)
        if len(cand) == _log_exact(V.order, p) and sub.order == V.order and len(sub.generators) == len(cand):
            v_basis = cand
        else:
            v_basis = list(generated_subgroup(G, sorted(V.elements)).generators)
    v_basis = tuple(tuple(v) for v in v_basis)
    vc = _coordinates(G, v_basis)
    if len(vc) != V.order or any(v not in V for v in vc):
        raise FormsError("v_basis does not span Omega_1(G)")

    # coset coordinates of every element
    wc: Dict[Element, Tuple[int, ...]] = {}
    lift_powers = [[G.identity] for _ in lifts]
    for i, g in enumerate(lifts):
        for _ in range(p - 1):
            lift_powers[i].append(G.mul(lift_powers[i][-1], g))
    for a in itertools.product(range(p), repeat=dim_w):
        t = G.identity
        for i, ai in enumerate(a):
            t = G.mul(t, lift_powers[i][ai])
        for v in V.elements:
            x = G.mul(t, v)
            if x in wc:
                raise FormsError("lifts are not independent modulo Omega_1(G)")
            wc[x] = a
    if len(wc) != G.order:
        raise FormsError("lifts do not cover G/Omega_1(G)")

    def vcoords(x):
        try:
            return np.array(vc[x], dtype=np.int64)
        except KeyError:
            raise FormsError(f"{x} should lie in Omega_1(G)") from None

    comm = np.zeros((dim_w, dim_w, len(v_basis)), dtype=np.int64)
    for i, a in enumerate(lifts):
        for j, b in enumerate(lifts):
            comm[i, j] = vcoords(G.commutator(a, b))
    phi = np.array([vcoords(G.power(g, p)) for g in lifts], dtype=np.int64).reshape(dim_w, len(v_basis))

    # well-definedness: arbitrary lifts must give the bilinear / linear extension
    elems = list(wc)
    for _ in range(samples):
        x = elems[int(rng.integers(len(elems)))]
        y = elems[int(rng.integers(len(elems)))]
        ax, ay = np.array(wc[x]), np.array(wc[y])
        want = np.einsum("i,j,ijv->v", ax, ay, comm) % p
        if np.any(vcoords(G.commutator(x, y)) != want):
            raise FormsError(f"commutator form is not bilinear at {x}, {y}")
        if np.any(vcoords(G.power(x, p)) != (ax @ phi) % p):
            raise FormsError(f"p-power map is not linear at {x}")
    return CentralExtensionForms(p, lifts, v_basis, comm % p, phi % p)


def _log_exact(m: int, p: int) -> Optional[int]:
    e = 0
    while m > 1:
        if m % p:
            return None
        m //= p
        e += 1
    return e


def log_bracket(source, **kwargs) -> BracketAlgebra:
    """[w_i, w_j] = 1/2 phi^{-1}(<w_i, w_j>) on W = G/Omega_1(G)."""
    forms = source if isinstance(source, CentralExtensionForms) else extract_forms(source, **kwargs)
    if not forms.phi_invertible():
        raise FormsError("p-power map is singular; G is not a bracket group")
    ring = PrimePower(forms.p)
    from .algebra import _inverse_mod
    phi_inv = _inverse_mod(forms.phi, ring)
    c = (ring.half * np.einsum("ijv,vt->ijt", forms.comm, phi_inv)) % forms.p
    return BracketAlgebra(ring, c)


def gamma_log_matches_gl(G: GammaGroup, L: Optional[BracketAlgebra] = None) -> bool:
    """Log(Gamma_{n,2}) in the basis 2*(class of I + p d_ij) equals gl_n over F_p."""
    L = log_bracket(G) if L is None else L
    p = G.p
    matched = L.change_basis(2 * np.eye(L.dim, dtype=np.int64))
    return matched.same_constants(gl_algebra(G.n, PrimePower(p)))


# -- towers ---------------------------------------------------------------

@dataclass
class StageVerdict:
    stage: int
    group: str
    p_central: bool
    surjective: bool
    kernel_is_omega1: bool
    phi_bijective: bool
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.p_central and self.surjective and self.kernel_is_omega1 and self.phi_bijective


@dataclass
class TowerVerdict:
    stages: List[StageVerdict]

    @property
    def uniform(self) -> bool:
        return all(s.ok for s in self.stages)


def uniform_tower_check(groups: Sequence[FiniteGroup],
                        projections: Sequence[Callable[[Element], Element]],
                        budget: Optional[int] = None) -> TowerVerdict:
    """Check G_N -> ... -> G_1 -> 1 stage by stage.

    ``groups`` is listed from the top; ``projections[i]`` maps groups[i] onto
    groups[i + 1].  The last group maps to the trivial group.
    """
    if len(projections) != len(groups) - 1:
        raise ValueError("need one projection between each pair of consecutive groups")
    omegas = [omega1(G, budget) for G in groups]
    stages = []
    N = len(groups)
    for idx, G in enumerate(groups):
        level = N - idx
        pc = is_central(G, omegas[idx])
        if idx == N - 1:
            _require_enumerable(G, budget)
            kernel = frozenset(G.elements())
            ok_kernel = kernel == omegas[idx].elements
            stages.append(StageVerdict(level, G.name, pc, True, ok_kernel, True, "bottom stage maps to 1"))
            continue
        H = groups[idx + 1]
        pi = projections[idx]
        _require_enumerable(G, budget)
        image = set()
        kernel = set()
        lift_of: Dict[Element, Element] = {}
        for g in G.elements():
            h = tuple(pi(g))
            image.add(h)
            lift_of.setdefault(h, g)
            if h == H.identity:
                kernel.add(g)
        surj = len(image) == H.order
        ok_kernel = frozenset(kernel) == omegas[idx].elements
        # phi : Omega_1(H) -> Omega_1(G), x -> (any lift)^p
        images = {}
        well_defined = True
        for g in G.elements():
            h = tuple(pi(g))
            if h in omegas[idx + 1].elements:
                gp = G.power(g, G.p)
                if images.setdefault(h, gp) != gp:
                    well_defined = False
        phi_image = set(images.values())
        bij = (well_defined and surj and len(phi_image) == omegas[idx + 1].order
               and phi_image == set(omegas[idx].elements))
        note = "" if well_defined else "p-power map depends on the lift"
        stages.append(StageVerdict(level, G.name, pc, surj, ok_kernel, bij, note))
    return TowerVerdict(stages)


__all__ = [
    "BudgetExceeded",
    "FormsError",
    "FiniteGroup",
    "Subgroup",
    "ExpGroup",
    "GammaGroup",
    "AbelianGroup",
    "trivial_group",
    "exp_group",
    "gamma_group",
    "enumeration_budget",
    "closure",
    "generated_subgroup",
    "omega1",
    "power_subgroup",
    "commutator_subgroup",
    "is_central",
    "predicates",
    "GroupPredicates",
    "check_associativity",
    "AssociativityVerdict",
    "CentralExtensionForms",
    "extract_forms",
    "log_bracket",
    "gamma_log_matches_gl",
    "uniform_tower_check",
    "TowerVerdict",
    "StageVerdict",
]
