"""Cut reductions on AC typed forests and the cut-elimination strategy.

Every reduction is an edit of the host forest: some nodes are replaced, some
become weak (deleted, or turned into ``*``), and some cut roots are swapped
for new roots.  The rebuild engine applies an edit and reports how the roots
of the result map back to the roots of the input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .correctness import ac_correct_poly
from .expansion_nets import (Cut, Disj, Expansion, NetIndex, One, Star, Tensor, TypedForest, TypedRoot,
                             Wire, children, is_closure_of, is_witness_type, iter_nodes, underlying,
                             validate_forest)
from .formula_core import dual, rank
from .subnets import Host, Substructure, SubnetFault, contiguous_empire, empire_note, kingdom

LOGICAL_ANDOR = "LogicalAndOr"
LOGICAL_ATOMIC = "LogicalAtomic"
CONTRACTION = "Contraction"
DEFAULT_WEAKENING = "DefaultWeakening"


class CutFault(Exception):
    """A reduction precondition or a strategy invariant failed."""


ClosureMap = dict[int, int]     # root nid of the result -> root nid of the input


def compose(later: ClosureMap, earlier: ClosureMap) -> ClosureMap:
    return {k: earlier[v] for k, v in later.items() if v in earlier}


def check_closure(new: TypedForest, old: TypedForest, m: ClosureMap) -> Optional[str]:
    olds = {r.nid: r.type for r in old.roots if isinstance(r, TypedRoot)}
    news = {r.nid: r.type for r in new.roots if isinstance(r, TypedRoot)}
    if set(m) != set(news):
        return "closure map does not cover the typed roots"
    if len(set(m.values())) != len(m):
        return "closure map is not injective"
    for k, v in m.items():
        if v not in olds or not is_closure_of(news[k], olds[v]):
            return f"root {k} is not a closure of root {v}"
    return None


@dataclass
class ReductionStep:
    kind: str
    cut: int
    forest: TypedForest
    closure: ClosureMap
    aux: dict = field(default_factory=dict)


# --- rebuild engine ------------------------------------------------------

@dataclass
class _Edit:
    replace: dict[int, object] = field(default_factory=dict)    # nid -> node, or list of witnesses
    weak: set[int] = field(default_factory=set)
    roots: dict[int, list] = field(default_factory=dict)         # root nid -> replacement roots
    appended: list = field(default_factory=list)


_WEAK = object()


class _Engine:
    def __init__(self, f: TypedForest, edit: _Edit, fresh: Iterator[int]):
        self.f = f
        self.e = edit
        self.fresh = fresh

    def node(self, n):
        if n.nid in self.e.weak:
            return _WEAK
        if n.nid in self.e.replace:
            v = self.e.replace[n.nid]
            return (_WEAK if not v else list(v)) if isinstance(v, list) else v
        if isinstance(n, Expansion):
            out = []
            for w in n.summands:
                r = self.node(w)
                if r is _WEAK:
                    continue
                out.extend(r if isinstance(r, list) else [r])
            return Expansion(n.nid, tuple(out)) if out else _WEAK
        if isinstance(n, Disj):
            l, r = self.node(n.left), self.node(n.right)
            for side in (l, r):
                if isinstance(side, list):
                    raise CutFault("summands spliced under a disjunction")
            l = Star(next(self.fresh)) if l is _WEAK else l
            r = Star(next(self.fresh)) if r is _WEAK else r
            if isinstance(l, Star) and isinstance(r, Star):
                raise CutFault("weakening would create (* \\/ *)")
            return Disj(n.nid, l, r)
        if isinstance(n, (Tensor, Cut)):
            l, r = self.node(n.left), self.node(n.right)
            if l is _WEAK or r is _WEAK:
                raise CutFault(f"weak successor of a {type(n).__name__.lower()}")
            if isinstance(l, list) or isinstance(r, list):
                raise CutFault("summands spliced under a binary node")
            if isinstance(n, Tensor):
                return Tensor(n.nid, l, r)
            return Cut(n.nid, l, r, n.left_type)
        return n

    def root(self, r):
        """Rebuilt roots with their closure preimage (None for cuts)."""
        nid = TypedForest.root_node(r).nid
        if nid in self.e.roots:
            out = []
            for s in self.e.roots[nid]:
                out.extend(self.root(s))
            return out
        if isinstance(r, Cut):
            c = self.node(r)
            return [] if c is _WEAK else [(c, None)]
        t = self.node(r.term)
        if t is _WEAK:
            return []
        ty = r.type
        if isinstance(t, list):
            t = Expansion(next(self.fresh), tuple(t))
        if isinstance(t, (Expansion, Disj, One)) and is_witness_type(ty):
            ty = underlying(ty)
        return [(TypedRoot(t, ty), nid)]

    def run(self) -> tuple[TypedForest, ClosureMap]:
        out, cmap = [], {}
        for r in list(self.f.roots) + list(self.e.appended):
            for new, pre in self.root(r):
                out.append(new)
                if pre is not None and isinstance(new, TypedRoot):
                    cmap[new.nid] = pre
        return TypedForest(tuple(out)), cmap


def _apply(f: TypedForest, edit: _Edit, fresh: Iterator[int]) -> tuple[TypedForest, ClosureMap]:
    g, cmap = _Engine(f, edit, fresh).run()
    res = validate_forest(g)
    if not res:
        raise CutFault(f"reduction produced an invalid forest: {res.reason}")
    bad = check_closure(g, f, cmap)
    if bad:
        raise CutFault(bad)
    return g, cmap


# --- helpers -------------------------------------------------------------

def _cut(f: TypedForest, nid: int) -> Cut:
    for r in f.roots:
        if isinstance(r, Cut) and r.nid == nid:
            return r
    raise CutFault(f"no cut root with id {nid}")


def _fresh(f: TypedForest) -> Iterator[int]:
    return itertools.count(f.max_nid() + 1)


def positive_width(c: Cut) -> int:
    p = c.positive
    return len(p.summands) if isinstance(p, Expansion) else 1


def cut_measure(c: Cut) -> tuple[int, int]:
    return rank(c.positive_type), positive_width(c)


def _new_cut(nid: int, pos, neg, pos_type, pos_left: bool) -> Cut:
    return Cut(nid, pos, neg, pos_type) if pos_left else Cut(nid, neg, pos, dual(pos_type))


def classify(c: Cut) -> str:
    p, n = c.positive, c.negative
    if not isinstance(p, Expansion):
        raise CutFault("positive cut side is not an expansion")
    if len(p.summands) > 1:
        return CONTRACTION
    w = p.summands[0]
    if isinstance(w, Wire):
        return LOGICAL_ATOMIC
    if isinstance(n, Disj) and n.weakened:
        return DEFAULT_WEAKENING
    return LOGICAL_ANDOR


# --- the four reductions -------------------------------------------------

def reduce_logical_andor(f: TypedForest, cut: int) -> ReductionStep:
    c = _cut(f, cut)
    p, n = c.positive, c.negative
    if not (isinstance(p, Expansion) and len(p.summands) == 1 and isinstance(p.summands[0], Tensor)
            and isinstance(n, Disj) and not n.weakened):
        raise CutFault("not a logical conjunction/disjunction cut")
    w = p.summands[0]
    a = c.positive_type
    fresh = _fresh(f)
    pl = c.positive_is_left()
    y = _new_cut(next(fresh), w.left, n.left, a.left, pl)
    z = _new_cut(next(fresh), w.right, n.right, a.right, pl)
    g, cmap = _apply(f, _Edit(roots={cut: [y, z]}), fresh)
    return ReductionStep(LOGICAL_ANDOR, cut, g, cmap, {"cuts": [y.nid, z.nid]})


def reduce_logical_atomic(f: TypedForest, cut: int) -> ReductionStep:
    c = _cut(f, cut)
    p, t = c.positive, c.negative
    if not (isinstance(p, Expansion) and len(p.summands) == 1 and isinstance(p.summands[0], Wire)):
        raise CutFault("not an atomic logical cut")
    ix = NetIndex(f)
    u = ix.partner(p.summands[0].nid)
    if u in {n.nid for n in iter_nodes(t)}:
        raise CutFault("wire crosses its own cut")
    parent = ix.parent[u]
    edit = _Edit(roots={cut: []})
    edit.replace[u] = list(t.summands) if parent is not None else t
    g, cmap = _apply(f, edit, _fresh(f))
    return ReductionStep(LOGICAL_ATOMIC, cut, g, cmap, {"substituted": u})


def _symbol_factory(f: TypedForest):
    taken = set(f.wire_symbols())
    gen = itertools.count(1)

    def make(base: str, tag: str) -> str:
        name = f"{base}{tag}"
        while name in taken:
            name = f"{base}{tag}{next(gen)}"
        taken.add(name)
        return name
    return make


def _copy(n, tag: str, fresh: Iterator[int], names: dict[str, str], make):
    if isinstance(n, Wire):
        if n.symbol not in names:
            names[n.symbol] = make(n.symbol, tag)
        return Wire(next(fresh), names[n.symbol], n.positive)
    if isinstance(n, (One, Star)):
        return type(n)(next(fresh))
    nid = next(fresh)
    if isinstance(n, Expansion):
        return Expansion(nid, tuple(_copy(w, tag, fresh, names, make) for w in n.summands))
    l = _copy(n.left, tag, fresh, names, make)
    r = _copy(n.right, tag, fresh, names, make)
    if isinstance(n, Tensor):
        return Tensor(nid, l, r)
    if isinstance(n, Disj):
        return Disj(nid, l, r)
    return Cut(nid, l, r, n.left_type)


def maximal_witness(f: TypedForest, cut: int, host: Optional[Host] = None) -> int:
    """Index of a <<-maximal summand of the positive side (lowest id on ties)."""
    c = _cut(f, cut)
    ws = c.positive.summands
    host = host or Host(f, check=False)
    ks = [kingdom(w.nid, host).nodes for w in ws]
    for i, w in sorted(enumerate(ws), key=lambda p: p[1].nid):
        if not any(w.nid in ks[j] for j in range(len(ws)) if j != i):
            return i
    raise CutFault("no <<-maximal witness")


def reduce_contraction(f: TypedForest, cut: int, split: Optional[tuple[list[int], list[int]]] = None,
                       host: Optional[Host] = None) -> ReductionStep:
    """Duplicate the kingdom of the negative side; ``split`` lists summand indices."""
    c = _cut(f, cut)
    p, t = c.positive, c.negative
    if not (isinstance(p, Expansion) and len(p.summands) >= 2):
        raise CutFault("contraction needs a nontrivial positive expansion")
    m = len(p.summands)
    if split is None:
        i = maximal_witness(f, cut, host)
        split = ([i], [j for j in range(m) if j != i])
    left, right = split
    if not left or not right or sorted(left + right) != list(range(m)):
        raise CutFault(f"invalid split {split} of {m} summands")
    host = host or Host(f, check=False)
    ix = host.ix
    k = kingdom(t.nid, host).nodes
    if cut in k or k & {n.nid for n in iter_nodes(p)}:
        raise CutFault("kingdom of the negative side meets the positive side")

    fresh = _fresh(f)
    make = _symbol_factory(f)
    names_l: dict[str, str] = {}
    names_r: dict[str, str] = {}
    edit = _Edit()
    duplicated = []
    for r in sorted(n for n in k if ix.parent[n] not in k):
        if r == t.nid:
            continue
        node = ix.node[r]
        if isinstance(node, Cut):
            cl = _copy(node, "L", fresh, names_l, make)
            cr = _copy(node, "R", fresh, names_r, make)
            edit.roots[r] = [cl, cr]
        elif isinstance(node, (Wire, Tensor)):
            wl = _copy(node, "L", fresh, names_l, make)
            wr = _copy(node, "R", fresh, names_r, make)
            edit.replace[r] = [wl, wr]
        else:
            raise CutFault(f"kingdom root {node} is neither a witness nor a cut")
        duplicated.append(r)
    tl = _copy(t, "L", fresh, names_l, make)
    tr = _copy(t, "R", fresh, names_r, make)
    s1 = Expansion(next(fresh), tuple(p.summands[i] for i in left))
    s2 = Expansion(next(fresh), tuple(p.summands[i] for i in right))
    pl = c.positive_is_left()
    y = _new_cut(next(fresh), s1, tl, c.positive_type, pl)
    z = _new_cut(next(fresh), s2, tr, c.positive_type, pl)
    edit.roots[cut] = [y, z]
    g, cmap = _apply(f, edit, fresh)
    return ReductionStep(CONTRACTION, cut, g, cmap,
                         {"split": (list(left), list(right)), "cuts": [y.nid, z.nid], "duplicated": duplicated})


def reduce_weakening(f: TypedForest, cut: int, strategy: str = "ce",
                     host: Optional[Host] = None) -> ReductionStep:
    c = _cut(f, cut)
    p, n = c.positive, c.negative
    if not (isinstance(p, Expansion) and len(p.summands) == 1 and isinstance(p.summands[0], Tensor)
            and isinstance(n, Disj) and n.weakened):
        raise CutFault("not a cut against default weakening")
    w = p.summands[0]
    a = c.positive_type
    if isinstance(n.right, Star):
        keep, drop, t, keep_type = w.left, w.right, n.left, a.left
    else:
        keep, drop, t, keep_type = w.right, w.left, n.right, a.right
    host = host or Host(f, check=False)
    ix = host.ix
    if strategy == "ce":
        e = contiguous_empire(drop.nid, host).nodes
    elif strategy == "empire":
        e = empire_note(drop.nid, host).nodes
    else:
        raise ValueError(f"unknown weakening strategy {strategy!r}")
    if e & ({cut, p.nid, w.nid, keep.nid, t.nid, n.nid}):
        raise CutFault("deleted empire meets the cut")
    fresh = _fresh(f)
    e_roots = sorted(x for x in e if ix.parent[x] not in e and x != drop.nid)
    edit = _Edit(weak=set(e_roots))
    pl = c.positive_is_left()
    y = _new_cut(next(fresh), keep, t, keep_type, pl)
    edit.roots[cut] = [y]
    g, cmap = _apply(f, edit, fresh)
    return ReductionStep(DEFAULT_WEAKENING, cut, g, cmap, {"deleted": e_roots, "cuts": [y.nid]})


def reduce_cut(f: TypedForest, cut: int, strategy: str = "ce", host: Optional[Host] = None) -> ReductionStep:
    kind = classify(_cut(f, cut))
    if kind == LOGICAL_ANDOR:
        return reduce_logical_andor(f, cut)
    if kind == LOGICAL_ATOMIC:
        return reduce_logical_atomic(f, cut)
    if kind == CONTRACTION:
        return reduce_contraction(f, cut, host=host)
    return reduce_weakening(f, cut, strategy, host=host)


# --- subnet replacement --------------------------------------------------

def _renumber(g: TypedForest, taken_nids: set[int], taken_wires: set[str],
              fresh: Iterator[int]) -> tuple[TypedForest, dict[int, int]]:
    nmap: dict[int, int] = {}
    wmap: dict[str, str] = {}
    used = set(taken_nids)
    gen = itertools.count(1)

    def nid(old):
        if old in used:
            new = next(fresh)
            while new in used:
                new = next(fresh)
        else:
            new = old
        used.add(new)
        nmap[old] = new
        return new

    def sym(s):
        if s not in wmap:
            name = s
            while name in taken_wires:
                name = f"{s}{next(gen)}"
            wmap[s] = name
        return wmap[s]

    def go(n):
        if isinstance(n, Wire):
            return Wire(nid(n.nid), sym(n.symbol), n.positive)
        if isinstance(n, (One, Star)):
            return type(n)(nid(n.nid))
        k = nid(n.nid)
        if isinstance(n, Expansion):
            return Expansion(k, tuple(go(w) for w in n.summands))
        l, r = go(n.left), go(n.right)
        if isinstance(n, Tensor):
            return Tensor(k, l, r)
        if isinstance(n, Disj):
            return Disj(k, l, r)
        return Cut(k, l, r, n.left_type)

    roots = []
    for r in g.roots:
        roots.append(go(r) if isinstance(r, Cut) else TypedRoot(go(r.term), r.type))
    return TypedForest(tuple(roots)), nmap


def replace_subnet(f: TypedForest, g: Union[Substructure, set], g2: TypedForest,
                   closure: ClosureMap) -> tuple[TypedForest, ClosureMap]:
    """Splice g2 in place of the subnet g; ``closure`` maps g2 roots to g roots.

    A weak root of g (no preimage) is deleted when it is a host root or a
    summand, and becomes ``*`` under a disjunction.  An expansion whose every
    summand is weak is itself weak.
    """
    nodes = g.nodes if isinstance(g, Substructure) else frozenset(g)
    ix = NetIndex(f)
    res = validate_forest(g2)
    if not res:
        raise CutFault(f"replacement is invalid: {res.reason}")
    if not ac_correct_poly(g2):
        raise CutFault("replacement is not AC-correct")
    g_roots = sorted(n for n in nodes if ix.parent[n] not in nodes)
    outside = {n for n in ix.node if n not in nodes}
    outside_wires = {ix.node[n].symbol for n in outside if isinstance(ix.node[n], Wire)}
    fresh = itertools.count(max(f.max_nid(), g2.max_nid()) + 1)
    g2r, nmap = _renumber(g2, outside, outside_wires, fresh)
    cl = {nmap[k]: v for k, v in closure.items()}
    if len(set(cl.values())) != len(cl):
        raise CutFault("closure map is not injective")
    pre = {v: k for k, v in cl.items()}
    by_nid = {TypedForest.root_node(r).nid: r for r in g2r.roots}
    edit = _Edit()
    for r in g_roots:
        node = ix.node[r]
        if isinstance(node, Cut):
            edit.roots[r] = []
            continue
        if r not in pre:
            if ix.parent[r] is not None and not (isinstance(ix.node[ix.parent[r]], (Expansion, Disj))):
                raise CutFault(f"weak node {r} sits under a {type(ix.node[ix.parent[r]]).__name__}")
            edit.weak.add(r)
            continue
        new = by_nid[pre[r]]
        if not is_closure_of(new.type, ix.type[r]):
            raise CutFault(f"root {pre[r]} is not a closure of node {r}")
        spliced = isinstance(node, (Wire, Tensor)) and not is_witness_type(new.type)
        if spliced and ix.parent[r] is not None:
            edit.replace[r] = list(new.term.summands)
        else:
            edit.replace[r] = new.term
    edit.appended = [r for r in g2r.roots if isinstance(r, Cut)]
    out, cmap = _Engine(f, edit, fresh).run()
    v = validate_forest(out)
    if not v:
        raise CutFault(f"replacement produced an invalid forest: {v.reason}")
    return out, cmap


# --- strategy ------------------------------------------------------------

def is_minimal_cut(f: TypedForest, cut: int, host: Optional[Host] = None) -> bool:
    """No other cut lies in the kingdom of this one."""
    host = host or Host(f)
    k = kingdom(cut, host).nodes
    return not any(c.nid != cut and c.nid in k for c in f.cuts())


def minimal_cut(f: TypedForest, host: Optional[Host] = None) -> int:
    host = host or Host(f)
    for c in sorted(f.cuts(), key=lambda c: c.nid):
        if is_minimal_cut(f, c.nid, host):
            return c.nid
    raise CutFault("no <<-minimal cut")


@dataclass
class Elimination:
    forest: TypedForest
    closure: ClosureMap
    steps: list[ReductionStep]
    measures: list[tuple[tuple[int, int], tuple[int, int]]] = field(default_factory=list)


class _Run:
    def __init__(self, strategy: str, check_ac: bool):
        self.strategy = strategy
        self.check_ac = check_ac
        self.steps: list[ReductionStep] = []
        self.measures: list = []

    def step(self, f: TypedForest, cut: int) -> ReductionStep:
        host = Host(f, check=False)
        s = reduce_cut(f, cut, self.strategy, host)
        if self.check_ac and not ac_correct_poly(s.forest):
            raise CutFault(f"{s.kind} step broke AC-correctness")
        self.steps.append(s)
        return s

    def eliminate(self, f: TypedForest, cut: int, bound: Optional[tuple[int, int]]) -> tuple[TypedForest, ClosureMap]:
        c = _cut(f, cut)
        meas = cut_measure(c)
        if bound is not None:
            self.measures.append((bound, meas))
            if not meas < bound:
                raise CutFault(f"measure did not decrease: {meas} after {bound}")
        before = len(f.cuts())
        s = self.step(f, cut)
        g, cmap = s.forest, s.closure
        if s.kind == LOGICAL_ATOMIC:
            pass
        elif s.kind == DEFAULT_WEAKENING:
            (y,) = s.aux["cuts"]
            g, m2 = self.eliminate(g, y, meas)
            cmap = compose(m2, cmap)
        else:
            y, z = s.aux["cuts"]
            if s.kind == CONTRACTION:
                order = [z, y]
            else:
                order = sorted([y, z], key=lambda k: (cut_measure(_cut(g, k)), k))
            for k in order:
                if any(c2.nid == k for c2 in g.cuts()):
                    g, m2 = self.eliminate(g, k, meas)
                    cmap = compose(m2, cmap)
        # a weakening step may delete further cuts lying in the deleted empire
        if len(g.cuts()) > before - 1 or any(c2.nid == cut for c2 in g.cuts()):
            raise CutFault(f"cut count went from {before} to {len(g.cuts())}")
        return g, cmap


def eliminate_cut(f: TypedForest, cut: int, strategy: str = "ce", check_ac: bool = True,
                  check_minimal: bool = True) -> Elimination:
    host = Host(f)
    if check_minimal and not is_minimal_cut(f, cut, host):
        raise CutFault(f"cut {cut} is not <<-minimal")
    run = _Run(strategy, check_ac)
    g, cmap = run.eliminate(f, cut, None)
    return Elimination(g, cmap, run.steps, run.measures)


def eliminate_all(f: TypedForest, strategy: str = "ce", check_ac: bool = True) -> Elimination:
    res = ac_correct_poly(f)
    if not res:
        raise CutFault(f"input is not AC-correct: {res.reason}")
    run = _Run(strategy, check_ac)
    cmap: ClosureMap = {r.nid: r.nid for r in f.roots if isinstance(r, TypedRoot)}
    g = f
    while g.cuts():
        c = minimal_cut(g, Host(g, check=False))
        g, m2 = run.eliminate(g, c, None)
        cmap = compose(m2, cmap)
    return Elimination(g, cmap, run.steps, run.measures)
