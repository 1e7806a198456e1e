"""Sequent derivations for LK and LK*, their checkers and proof transformations.

Derivations carry root ids.  At every node the *context* is the conclusion
minus the principal roots; context roots keep their ids in the premise that
holds them, and the premise roots that are not context are the rule's active
formulas.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .formula_core import TOP, And, Atom, Bot, Formula, Or, Sequent, Top, dual, is_subsequent, rank

LK = "LK"
LKSTAR = "LKstar"
LKSTAR_CUT = "LKstar_cut"

RULES = {
    LK: {"Ax", "AxTop", "Or", "And", "C", "W"},
    LKSTAR: {"Ax", "AxTop", "Or0", "Or", "Or1", "And", "Mix", "C"},
    LKSTAR_CUT: {"Ax", "AxTop", "Or0", "Or", "Or1", "And", "Mix", "C", "Cut"},
}


class ProofFault(Exception):
    """A precondition of a proof transformation does not hold."""


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Sequent
    principal: tuple[int, ...] = ()
    premises: tuple["Derivation", ...] = ()

    def context_ids(self) -> set[int]:
        return set(self.conclusion.ids) - set(self.principal)

    def active(self, k: int) -> list[tuple[int, Formula]]:
        ctx = self.context_ids()
        return [(i, f) for i, f in self.premises[k].conclusion.roots if i not in ctx]

    def walk(self) -> Iterator["Derivation"]:
        yield self
        for p in self.premises:
            yield from p.walk()

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def rules_used(self) -> list[str]:
        return [n.rule for n in self.walk()]

    def max_id(self) -> int:
        return max((n.conclusion.max_id() for n in self.walk()), default=-1)


@dataclass
class Violation:
    path: tuple[int, ...]
    rule: str
    reason: str

    def __str__(self) -> str:
        where = "/".join(map(str, self.path)) or "root"
        return f"{self.rule} at {where}: {self.reason}"


@dataclass
class CheckResult:
    ok: bool
    violation: Optional[Violation] = None

    def __bool__(self) -> bool:
        return self.ok


def _same_multiset(xs: list[Formula], ys: list[Formula]) -> bool:
    ys = list(ys)
    for x in xs:
        if x in ys:
            ys.remove(x)
        else:
            return False
    return not ys


def _check_node(d: Derivation, system: str, allow_mix: bool) -> Optional[str]:
    if d.rule not in RULES[system]:
        return f"rule {d.rule} not in {system}"
    if d.rule == "Mix" and not allow_mix:
        return "Mix not allowed"
    concl = d.conclusion.as_dict()
    for p in d.principal:
        if p not in concl:
            return f"principal id {p} not in conclusion"
    arity = {"Ax": 0, "AxTop": 0, "And": 2, "Mix": 2, "Cut": 2}.get(d.rule, 1)
    if len(d.premises) != arity:
        return f"expected {arity} premises, got {len(d.premises)}"

    if d.rule == "Ax":
        fs = d.conclusion.formulas
        if len(fs) != 2 or not all(isinstance(f, Atom) for f in fs) or not fs[0].is_dual_of(fs[1]):
            return "axiom needs exactly two dual atoms"
        return None
    if d.rule == "AxTop":
        if d.conclusion.formulas != (TOP,):
            return "top axiom needs exactly T"
        return None

    ctx = d.context_ids()
    # context roots must be carried with identical formulas, each by exactly one premise
    seen: set[int] = set()
    for k, p in enumerate(d.premises):
        for i, f in p.conclusion.roots:
            if i in ctx:
                if concl[i] != f:
                    return f"context root {i} changes formula"
                if i in seen:
                    return f"context root {i} shared between premises"
                seen.add(i)
    if seen != ctx:
        return f"context roots {sorted(ctx - seen)} missing from premises"

    want_principal = {"Mix": 0, "Cut": 0}.get(d.rule, 1)
    if len(d.principal) != want_principal:
        return f"expected {want_principal} principal roots"
    actives = [[f for _, f in d.active(k)] for k in range(len(d.premises))]

    if d.rule == "Mix":
        if any(actives):
            return "mix premises have extra roots"
        return None
    if d.rule == "Cut":
        if not all(len(a) == 1 for a in actives):
            return "cut needs one active root per premise"
        a, b = actives[0][0], actives[1][0]
        if dual(a) != b:
            return "cut formulas not dual"
        if isinstance(a, (Top, Bot)):
            return "cut on a unit"
        return None

    main = concl[d.principal[0]]
    if d.rule == "W":
        if actives[0]:
            return "weakening premise has extra roots"
        return None
    if d.rule == "C":
        if not _same_multiset(actives[0], [main, main]):
            return "contraction needs two copies of the principal formula"
        if system != LK and not isinstance(main, (Atom, And)):
            kind = "disjunction" if isinstance(main, Or) else "unit"
            return f"contraction on {kind}"
        return None
    if d.rule in ("Or", "Or0", "Or1"):
        if not isinstance(main, Or):
            return "principal is not a disjunction"
        want = {"Or": [main.left, main.right], "Or0": [main.left], "Or1": [main.right]}[d.rule]
        if not _same_multiset(actives[0], want):
            return "disjunction premise does not match"
        return None
    if d.rule == "And":
        if not isinstance(main, And):
            return "principal is not a conjunction"
        if actives != [[main.left], [main.right]]:
            return "conjunction premises do not match"
        return None
    return f"unknown rule {d.rule}"


def check_derivation(d: Derivation, system: str = LKSTAR, allow_mix: bool = True) -> CheckResult:
    stack = [((), d)]
    while stack:
        path, node = stack.pop()
        reason = _check_node(node, system, allow_mix)
        if reason is not None:
            return CheckResult(False, Violation(path, node.rule, reason))
        for k, p in enumerate(node.premises):
            stack.append((path + (k,), p))
    return CheckResult(True)


# --- construction helpers -------------------------------------------------

def axiom(a: Atom, ids: tuple[int, int] = (0, 1)) -> Derivation:
    return Derivation("Ax", Sequent(((ids[0], a), (ids[1], a.dual()))), ids)


def axiom_top(rid: int = 0) -> Derivation:
    return Derivation("AxTop", Sequent(((rid, TOP),)), (rid,))


def _apply_unary(rule: str, d: Derivation, active: tuple[int, ...], new_id: int, formula: Formula) -> Derivation:
    concl = d.conclusion.without(*active).plus((new_id, formula))
    return Derivation(rule, concl, (new_id,), (d,))


def apply_or(d: Derivation, a: int, b: int, new_id: int) -> Derivation:
    return _apply_unary("Or", d, (a, b), new_id, Or(d.conclusion[a], d.conclusion[b]))


def apply_or0(d: Derivation, a: int, other: Formula, new_id: int) -> Derivation:
    return _apply_unary("Or0", d, (a,), new_id, Or(d.conclusion[a], other))


def apply_or1(d: Derivation, b: int, other: Formula, new_id: int) -> Derivation:
    return _apply_unary("Or1", d, (b,), new_id, Or(other, d.conclusion[b]))


def apply_contraction(d: Derivation, a: int, b: int, new_id: int) -> Derivation:
    return _apply_unary("C", d, (a, b), new_id, d.conclusion[a])


def apply_weakening(d: Derivation, formula: Formula, new_id: int) -> Derivation:
    return Derivation("W", d.conclusion.plus((new_id, formula)), (new_id,), (d,))


def apply_and(d0: Derivation, a: int, d1: Derivation, b: int, new_id: int) -> Derivation:
    concl = Sequent(d0.conclusion.without(a).roots + d1.conclusion.without(b).roots
                    + ((new_id, And(d0.conclusion[a], d1.conclusion[b])),))
    return Derivation("And", concl, (new_id,), (d0, d1))


def apply_mix(d0: Derivation, d1: Derivation) -> Derivation:
    return Derivation("Mix", Sequent(d0.conclusion.roots + d1.conclusion.roots), (), (d0, d1))


def apply_cut(d0: Derivation, a: int, d1: Derivation, b: int) -> Derivation:
    concl = Sequent(d0.conclusion.without(a).roots + d1.conclusion.without(b).roots)
    return Derivation("Cut", concl, (), (d0, d1))


def _fresh_counter(*ds: Derivation) -> Iterator[int]:
    return itertools.count(max(d.max_id() for d in ds) + 1)


def rename_root(d: Derivation, old: int, new: int, fresh: Iterator[int]) -> Derivation:
    """Rename conclusion root `old` to `new`, propagating through contexts."""
    if old == new:
        return d
    if new in d.conclusion:
        raise ProofFault(f"id {new} already used in conclusion")
    concl = d.conclusion.rename(old, new)
    if old in d.principal:
        principal = tuple(new if p == old else p for p in d.principal)
        return Derivation(d.rule, concl, principal, d.premises)
    premises = []
    for p in d.premises:
        if old in p.conclusion:
            if new in p.conclusion:
                # an active root of p happens to use `new`; move it aside first
                p = rename_root(p, new, next(fresh), fresh)
            p = rename_root(p, old, new, fresh)
        premises.append(p)
    return Derivation(d.rule, concl, d.principal, tuple(premises))


def _rebuild(d: Derivation, k: int, new_premise: Derivation, removed: int,
             added: tuple[tuple[int, Formula], ...]) -> Derivation:
    """Replace premise k, whose context root `removed` became `added`."""
    premises = list(d.premises)
    premises[k] = new_premise
    concl = d.conclusion.without(removed).plus(*added)
    return Derivation(d.rule, concl, d.principal, tuple(premises))


def _premise_holding(d: Derivation, rid: int) -> int:
    for k, p in enumerate(d.premises):
        if rid in p.conclusion:
            return k
    raise ProofFault(f"root {rid} not carried by any premise of {d.rule}")


# --- pseudo-invertibility of disjunction ---------------------------------

@dataclass
class Inversion:
    tag: str                  # "both" | "left" | "right"
    derivation: Derivation
    left: Optional[int]       # root id of A in the new conclusion
    right: Optional[int]      # root id of B in the new conclusion


def invert_or(d: Derivation, rid: int, fresh: Optional[Iterator[int]] = None) -> Inversion:
    f = d.conclusion.as_dict().get(rid)
    if not isinstance(f, Or):
        raise ProofFault(f"root {rid} is not a disjunction")
    if fresh is None:
        fresh = _fresh_counter(d)
    return _invert(d, rid, fresh)


def _invert(d: Derivation, rid: int, fresh: Iterator[int]) -> Inversion:
    if rid in d.principal:
        if d.rule not in ("Or", "Or0", "Or1"):
            raise ProofFault(f"disjunction introduced by {d.rule}")
        prem = d.premises[0]
        main = d.conclusion[rid]
        act = [i for i, _ in d.active(0)]
        if d.rule == "Or":
            a, b = act
            if prem.conclusion[a] != main.left:
                a, b = b, a
            na, nb = next(fresh), next(fresh)
            prem = rename_root(prem, a, na, fresh)
            prem = rename_root(prem, b, nb, fresh)
            return Inversion("both", prem, na, nb)
        na = next(fresh)
        prem = rename_root(prem, act[0], na, fresh)
        if d.rule == "Or0":
            return Inversion("left", prem, na, None)
        return Inversion("right", prem, None, na)
    # leftmost premise first; the root lives in exactly one premise
    k = _premise_holding(d, rid)
    inv = _invert(d.premises[k], rid, fresh)
    added = tuple((i, inv.derivation.conclusion[i]) for i in (inv.left, inv.right) if i is not None)
    return Inversion(inv.tag, _rebuild(d, k, inv.derivation, rid, added), inv.left, inv.right)


# --- top elimination -----------------------------------------------------

def eliminate_top(d: Derivation, rid: int) -> Derivation:
    f = d.conclusion.as_dict().get(rid)
    if not isinstance(f, Top):
        raise ProofFault(f"root {rid} is not T")
    if len(d.conclusion) < 2:
        raise ProofFault("cannot eliminate T from a one-root sequent")
    return _elim_top(d, rid)


def _elim_top(d: Derivation, rid: int) -> Derivation:
    if rid in d.principal:
        raise ProofFault(f"T introduced by {d.rule} below the root")
    k = _premise_holding(d, rid)
    p = d.premises[k]
    if len(p.conclusion) == 1:
        if d.rule != "Mix":
            raise ProofFault(f"lone T premise under {d.rule}")
        return d.premises[1 - k]
    return _rebuild(d, k, _elim_top(p, rid), rid, ())


# --- Proposition: contraction is admissible -------------------------------

def contract_admissible(d: Derivation, id1: int, id2: int,
                        fresh: Optional[Iterator[int]] = None) -> Derivation:
    """Derive the conclusion of d without root id2 (a copy of root id1)."""
    concl = d.conclusion.as_dict()
    if id1 == id2 or id1 not in concl or id2 not in concl or concl[id1] != concl[id2]:
        raise ProofFault("designated roots are not two copies of one formula")
    if fresh is None:
        fresh = _fresh_counter(d)
    return _contract(d, id1, id2, fresh)


def _contract(d: Derivation, id1: int, id2: int, fresh: Iterator[int]) -> Derivation:
    a = d.conclusion[id1]
    if isinstance(a, (Atom, And)):
        return Derivation("C", d.conclusion.without(id1, id2).plus((id1, a)), (id1,), (d,))
    if isinstance(a, Top):
        return eliminate_top(d, id2)
    if isinstance(a, Bot):
        raise ProofFault("F is not derivable in LK*")
    inv1 = _invert(d, id1, fresh)
    inv2 = _invert(inv1.derivation, id2, fresh)
    cur = inv2.derivation
    lefts = [i for i in (inv1.left, inv2.left) if i is not None]
    rights = [i for i in (inv1.right, inv2.right) if i is not None]
    for ids, sub in ((lefts, a.left), (rights, a.right)):
        if len(ids) == 2:
            assert rank(sub) < rank(a), "contraction measure must decrease"
            cur = _contract(cur, ids[0], ids[1], fresh)
    if lefts and rights:
        return apply_or(cur, lefts[0], rights[0], id1)
    if lefts:
        return apply_or0(cur, lefts[0], a.right, id1)
    return apply_or1(cur, rights[0], a.left, id1)


# --- Proposition: LK to LK* via strong and weak formulas -------------------

@dataclass
class Translation:
    gamma_s: Sequent
    derivation: Derivation
    weak: frozenset[int]
    injection: dict[int, int] = field(default_factory=dict)


def lk_to_lkstar(d: Derivation) -> Translation:
    res = check_derivation(d, LK)
    if not res:
        raise ProofFault(f"not an LK derivation: {res.violation}")
    out = _translate(d, _fresh_counter(d))
    inj = is_subsequent(out.conclusion, d.conclusion)
    assert inj is not None and all(k == v for k, v in inj.items())
    weak = frozenset(set(d.conclusion.ids) - set(out.conclusion.ids))
    return Translation(out.conclusion, out, weak, inj)


def _translate(d: Derivation, fresh: Iterator[int]) -> Derivation:
    r = d.rule
    if r in ("Ax", "AxTop"):
        return d
    if r == "W":
        return _translate(d.premises[0], fresh)
    c = d.principal[0]
    if r == "And":
        s0 = _translate(d.premises[0], fresh)
        s1 = _translate(d.premises[1], fresh)
        (a, _), = d.active(0)
        (b, _), = d.active(1)
        sa, sb = a in s0.conclusion, b in s1.conclusion
        if sa and sb:
            return apply_and(s0, a, s1, b, c)
        if not sa and not sb:
            return apply_mix(s0, s1)
        return s0 if not sa else s1
    s = _translate(d.premises[0], fresh)
    act = [i for i, _ in d.active(0)]
    if r == "Or":
        main = d.conclusion[c]
        a, b = act
        if d.premises[0].conclusion[a] != main.left:
            a, b = b, a
        sa, sb = a in s.conclusion, b in s.conclusion
        if sa and sb:
            return apply_or(s, a, b, c)
        if sa:
            return apply_or0(s, a, main.right, c)
        if sb:
            return apply_or1(s, b, main.left, c)
        return s
    if r == "C":
        strong = [i for i in act if i in s.conclusion]
        if len(strong) == 2:
            s = contract_admissible(s, strong[0], strong[1], fresh)
            strong = strong[:1]
        if strong:
            return rename_root(s, strong[0], c, fresh)
        return s
    raise ProofFault(f"unexpected LK rule {r}")


def is_mix_free(d: Derivation) -> bool:
    return all(n.rule != "Mix" for n in d.walk())


# --- N-nets traced through a derivation -----------------------------------

Position = tuple[int, tuple[int, ...]]      # (root id, formula path)


def nnet_of_derivation(d: Derivation) -> Counter:
    """Links between dual atom occurrences of the conclusion, positive end first.

    Positions are (root index in the conclusion, formula path).  When both
    active formulas of an Or step are equal, the first active root is taken
    as the left disjunct.
    """
    links = _trace(d)
    index = {rid: k for k, rid in enumerate(d.conclusion.ids)}
    return Counter(((index[p[0]], p[1]), (index[n[0]], n[1])) for p, n in links)


def _trace(d: Derivation) -> list[tuple[Position, Position]]:
    r = d.rule
    if r == "Ax":
        (i, a), (j, _) = d.conclusion.roots
        return [((i, ()), (j, ()))] if a.positive else [((j, ()), (i, ()))]
    if r == "AxTop":
        return []
    if r in ("Cut", "W"):
        raise ProofFault(f"N-net tracing does not handle {r}")
    out = []
    for k, p in enumerate(d.premises):
        moves: dict[int, tuple[int, tuple[int, ...]]] = {}
        if r != "Mix":
            c = d.principal[0]
            act = [i for i, _ in d.active(k)]
            if r == "And":
                moves[act[0]] = (c, (k,))
            elif r == "Or0":
                moves[act[0]] = (c, (0,))
            elif r == "Or1":
                moves[act[0]] = (c, (1,))
            elif r == "Or":
                a, b = act
                if p.conclusion[a] != d.conclusion[c].left:
                    a, b = b, a
                moves[a], moves[b] = (c, (0,)), (c, (1,))
            elif r == "C":
                for a in act:
                    moves[a] = (c, ())

        def lift(pos: Position) -> Position:
            if pos[0] in moves:
                rid, pre = moves[pos[0]]
                return rid, pre + pos[1]
            return pos

        out.extend((lift(x), lift(y)) for x, y in _trace(p))
    return out
