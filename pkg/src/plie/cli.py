"""Command line front end: ``plie <subcommand> [options]``.

Exit codes: 0 success, 1 computation error, 2 invalid input (bad arguments,
unreadable or malformed files, enumeration budget exceeded).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from .algebra import AlgebraFormatError, BracketAlgebra, ExteriorElement, jacobi_form, named_algebra
from .bockstein import BetaSquaredError, BocksteinData, b2_direct, b2_via_lie, lhs_e3_dims, ring_dims
from .cohomology import CochainError, ModuleAxiomError, cohomology, module_ad, module_sym, module_trivial
from .groups import (BudgetExceeded, FormsError, check_associativity, exp_group, gamma_group,
                     gamma_log_matches_gl, log_bracket, predicates)
from .lifting import LiftError, LiftProblem, obstruction, tower_extension_verdict
from .modp import is_prime


class UsageError(Exception):
    """Invalid input; maps to exit code 2."""


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _emit(args, text: List[str], data: dict):
    if args.json:
        print(json.dumps(data, sort_keys=True))
    else:
        print("\n".join(text))


def _check_p(p: int):
    if p < 3 or not is_prime(p):
        raise UsageError(f"-p must be an odd prime, got {p}")


def _banner(args):
    if args.p == 3:
        print("warning: p = 3 lies outside the p >= 5 range assumed by the B2 and "
              "cohomology results; output is computed but not covered by them", file=sys.stderr)


def load_algebra(args, k: Optional[int] = None) -> BracketAlgebra:
    if bool(args.named) == bool(args.file):
        raise UsageError("give exactly one of --named or --file")
    if args.file:
        try:
            with open(args.file) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
        try:
            return BracketAlgebra.from_json(text)
        except (AlgebraFormatError, json.JSONDecodeError) as exc:
            raise UsageError(f"malformed algebra file {args.file}: {exc}") from None
    try:
        return named_algebra(args.named, args.p, k if k is not None else (args.k or 1), args.n)
    except (AlgebraFormatError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _coefficients(L: BracketAlgebra, spec: str):
    if spec == "trivial":
        return module_trivial(L)
    if spec == "ad":
        return module_ad(L)
    if spec.startswith("sym:"):
        try:
            k = int(spec[4:])
        except ValueError:
            raise UsageError(f"bad coefficient module {spec!r}") from None
        if k < 0:
            raise UsageError("sym:k needs k >= 0")
        return module_sym(L, k)
    raise UsageError(f"--coeff must be trivial, ad or sym:k, got {spec!r}")


def _load_eta(path: str, n: int, p: int):
    """JSON list of n objects mapping "i,j,k" (0-based) to a coefficient."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed eta file {path}: {exc}") from None
    if not isinstance(data, list) or len(data) != n:
        raise UsageError(f"eta file must hold a list of {n} forms")
    forms = []
    for entry in data:
        try:
            terms = {tuple(int(x) for x in key.split(",")): int(v) for key, v in entry.items()}
            if any(len(key) != 3 for key in terms):
                raise ValueError("eta terms need three indices")
            forms.append(ExteriorElement.from_dict(n, p, terms))
        except (AttributeError, ValueError) as exc:
            raise UsageError(f"malformed eta file {path}: {exc}") from None
    return tuple(forms)


# -- subcommands ---------------------------------------------------------

def cmd_check_lie(args) -> int:
    L = load_algebra(args)
    J = jacobi_form(L)
    lie = J.is_zero()
    text = ["Lie: yes (Jacobi ≡ 0)" if lie else "Lie: no (Jacobi ≢ 0)"]
    for (i, j, k), vals in sorted(J.as_dict().items()):
        text.append(f"  J({L.labels[i]},{L.labels[j]},{L.labels[k]}) = {vals}")
    data = {"lie": lie, "jacobi": {f"{i},{j},{k}": v for (i, j, k), v in sorted(J.as_dict().items())}}
    _emit(args, text, data)
    return 0


def cmd_cohomology(args) -> int:
    L = load_algebra(args)
    if L.ring.k != 1:
        raise UsageError("cohomology needs an algebra over F_p (k = 1)")
    if not L.is_lie():
        raise UsageError("not a Lie algebra: J(L) != 0")
    M = _coefficients(L, args.coeff)
    rep = cohomology(L, M, representatives=args.verify)
    text = [f"H^*(L; {M.name}) over F_{L.p}", "  l  dim"]
    text += [f"{l:>3}  {d}" for l, d in enumerate(rep.dims)]
    if rep.flipped:
        text.append("(action sign flipped to satisfy the module axiom)")
    _emit(args, text, rep.to_dict())
    return 0


def cmd_b2(args) -> int:
    L = load_algebra(args)
    if L.ring.k != 1:
        raise UsageError("b2 needs an algebra over F_p (k = 1)")
    _banner(args)
    eta = _load_eta(args.eta, L.dim, L.p) if args.eta else None
    bd = BocksteinData(L, eta)
    rep = b2_direct(bd, args.D)
    cross = b2_via_lie(L, args.D) if bd.eta_zero and L.is_lie() else None
    sensitive = set(rep.sensitive_degrees(L.p))
    text = [f"B2 of G(L), p = {L.p}, D = {args.D}", "  d    B1   B2" + ("  H(L;S^k)" if cross else "")]
    for i, g in enumerate(rep.degrees):
        line = f"{g.d:>3} {g.b1:>5} {g.b2:>4}"
        if cross:
            other = cross.degrees[i].b2
            line += f" {other:>9}" + ("" if other == g.b2 else "  differs")
        if g.d in sensitive:
            line += "  *"
        text.append(line)
    if sensitive:
        text.append("* degree >= 2p: symmetric forms and polynomials can differ here")
    _emit(args, text, rep.to_dict())
    return 0


def cmd_exp(args) -> int:
    L = load_algebra(args)
    if L.ring.k != 1:
        raise UsageError("Exp needs an algebra over F_p (k = 1)")
    G = exp_group(L)
    text = [f"Exp(L): order {G.order} = {L.p}^{2 * L.dim}"]
    data = {"order": G.order}
    if args.verify:
        assoc = check_associativity(G)
        pr = predicates(G, budget=args.budget)
        back = log_bracket(G, budget=args.budget)
        frat_ok = pr.omega1.same_as(pr.power) and pr.power.same_as(pr.frattini) if pr.mode == "exact" \
            else pr.omega1.same_as(pr.power)
        roundtrip = back.same_constants(L)
        text += [f"associative: {_yes(assoc.associative)} ({assoc.mode}, {assoc.checked} triples)",
                 f"exponent: {pr.exponent}",
                 f"p-central: {_yes(pr.p_central)}",
                 f"powerful: {_yes(pr.powerful)}",
                 f"Omega_1 = G^p = Frat(G): {_yes(frat_ok)}",
                 f"Log(Exp(L)) = L: {_yes(roundtrip)}"]
        data.update({"associative": assoc.associative, "exponent": pr.exponent, "p_central": pr.p_central,
                     "powerful": pr.powerful, "omega_power_frattini": frat_ok, "log_roundtrip": roundtrip,
                     "mode": pr.mode})
    _emit(args, text, data)
    return 0


def cmd_gamma(args) -> int:
    if args.n is None:
        raise UsageError("gamma needs -n")
    k = args.k or 1
    G = gamma_group(args.n, k, args.p)
    text = [f"Gamma_{{{args.n},{k}}}({args.p}): order {G.order}"]
    data = {"n": args.n, "k": k, "p": args.p, "order": G.order}
    if args.verify:
        pr = predicates(G, budget=args.budget)
        text += [f"powerful: {_yes(pr.powerful)}", f"p-central: {_yes(pr.p_central)}",
                 f"exponent: {pr.exponent}"]
        data.update({"powerful": pr.powerful, "p_central": pr.p_central, "exponent": pr.exponent,
                     "mode": pr.mode})
        if k == 2:
            ok = gamma_log_matches_gl(G)
            text.append(f"Log ≅ gl{args.n}(F_{args.p}): {_yes(ok)}")
            data["log_is_gl"] = ok
    _emit(args, text, data)
    return 0


def cmd_lift(args) -> int:
    target = args.k or 2
    if args.file:
        L = load_algebra(args)
        target = args.k or L.ring.k + 1
    else:
        L = load_algebra(args, k=target - 1)
    try:
        problem = LiftProblem(L, target)
    except LiftError as exc:
        raise UsageError(str(exc)) from None
    rep = obstruction(problem)
    text = [f"lift {L.ring} -> Z/{L.p}^{target}: {rep.tower_verdict}"]
    if rep.corrected is not None:
        text.append(f"corrected lift: {rep.corrected!r}")
    _emit(args, text, rep.to_dict())
    return 0


def cmd_e3(args) -> int:
    L = load_algebra(args)
    if L.ring.k != 1:
        raise UsageError("e3 needs an algebra over F_p (k = 1)")
    D = args.D if args.D_given else 6
    dims = lhs_e3_dims(L, D)
    expected = ring_dims(L.dim, D)
    text = ["  d   E3  Lambda(x)F_p[s]"] + [f"{d:>3} {a:>4} {b:>6}" for d, (a, b) in enumerate(zip(dims, expected))]
    text.append(f"match: {_yes(dims == expected)}")
    _emit(args, text, {"e3": dims, "ring": expected, "match": dims == expected})
    return 0


def cmd_report(args) -> int:
    L = load_algebra(args)
    if L.ring.k != 1:
        raise UsageError("report needs an algebra over F_p (k = 1)")
    _banner(args)
    lie = L.is_lie()
    text = [repr(L), f"Lie: {_yes(lie)}"]
    data = {"algebra": L.to_dict(), "lie": lie}
    tower = tower_extension_verdict(L)
    text.append(f"uniform tower: {tower.describe()}")
    data["tower"] = tower.describe()
    if lie:
        triv = cohomology(L, module_trivial(L)).dims
        ad = cohomology(L, module_ad(L)).dims
        rep = b2_direct(BocksteinData(L), args.D)
        text += [f"H^*(L; F_p) = {list(triv)}", f"H^*(L; ad) = {list(ad)}",
                 f"B2 dims (d < {args.D}) = {rep.dims()}"]
        data.update({"h_trivial": list(triv), "h_ad": list(ad), "b2": rep.to_dict()})
    _emit(args, text, data)
    return 0


COMMANDS = {
    "check-lie": cmd_check_lie,
    "cohomology": cmd_cohomology,
    "b2": cmd_b2,
    "exp": cmd_exp,
    "gamma": cmd_gamma,
    "lift": cmd_lift,
    "e3": cmd_e3,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--named", help="library algebra: abelian(n), heisenberg, solvable_S, sl2, so3, gln, sln")
    src.add_argument("--file", help="algebra in JSON form")
    common.add_argument("-p", type=int, default=5, help="odd prime (default 5)")
    common.add_argument("-k", type=int, default=None, help="exponent of the coefficient ring")
    common.add_argument("-n", type=int, default=None, help="size for gln / sln / abelian / gamma")
    common.add_argument("-D", type=int, default=None, help="truncation degree (default 12)")
    common.add_argument("--coeff", default="trivial", help="trivial | ad | sym:k")
    common.add_argument("--eta", help="JSON file with the forms eta_t")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--verify", action="store_true", help="run the expensive checks too")
    common.add_argument("--budget", type=int, default=None, help="enumeration cap in elements")
    parser = argparse.ArgumentParser(prog="plie", description="Lie algebras over Z/p^k and their p-groups")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        _check_p(args.p)
        if args.k is not None and args.k < 1:
            raise UsageError("-k must be at least 1")
        if args.n is not None and args.n < 1:
            raise UsageError("-n must be at least 1")
        args.D_given = args.D is not None
        if args.D is None:
            args.D = 12
        if args.D < 2:
            raise UsageError("-D must be at least 2")
        if args.budget is None and os.environ.get("PLIE_BUDGET"):
            args.budget = int(os.environ["PLIE_BUDGET"])
        if args.budget is not None and args.budget < 1:
            raise UsageError("--budget must be positive")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, FormsError, ModuleAxiomError, BetaSquaredError, CochainError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
