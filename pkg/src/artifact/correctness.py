"""Switchings, AC-correctness, and the net/derivation correspondence.

The polynomial checker runs sequentialization: a net is AC-correct exactly
when it is the conclusion of an annotated LK* derivation, and the derivation
is returned as the certificate.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from .calculi import Derivation
from .expansion_nets import (Cut, Disj, Expansion, NetIndex, One, Star, Tensor, TypedForest,
                             TypedRoot, Wire, children, is_witness_type, underlying,
                             validate_forest)
from .formula_core import TOP, And, Atom, Formula, Or, Sequent

DEFAULT_SWITCHING_CAP = 2 ** 16


class SwitchingCapExceeded(Exception):
    pass


class NotSequentializable(Exception):
    def __init__(self, reason: str, stuck: TypedForest):
        super().__init__(f"not sequentializable: {reason}: {stuck}")
        self.reason = reason
        self.stuck = stuck


class AnnotationFault(Exception):
    pass


# --- switchings ----------------------------------------------------------

def switched_nodes(ix: NetIndex) -> list[int]:
    return sorted(n for n in ix.node if ix.is_switched(n))


def switching_count(f: TypedForest) -> int:
    ix = NetIndex(f)
    k = 1
    for n in switched_nodes(ix):
        k *= len(ix.children(n))
    return k


def enumerate_switchings(f: TypedForest) -> Iterator[dict[int, int]]:
    ix = NetIndex(f)
    keys = switched_nodes(ix)
    for choice in itertools.product(*(ix.children(k) for k in keys)):
        yield dict(zip(keys, choice))


def switching_edges(ix: NetIndex, sigma: dict[int, int]) -> list[tuple[int, int]]:
    edges = []
    for c, p in ix.parent.items():
        if p is None:
            continue
        if p in sigma and sigma[p] != c:
            continue
        edges.append((c, p))
    edges.extend(ix.wire_pairs())
    return edges


def _find_cycle(vertices: Iterable[int], edges: list[tuple[int, int]]) -> Optional[list[int]]:
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    adj: dict[int, list[int]] = {v: [] for v in parent}
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            # recover the cycle: path u..v in the forest built so far, plus (v,u)
            prev = {u: None}
            q = deque([u])
            while q:
                a = q.popleft()
                if a == v:
                    break
                for b in adj[a]:
                    if b not in prev:
                        prev[b] = a
                        q.append(b)
            path = []
            cur = v
            while cur is not None:
                path.append(cur)
                cur = prev[cur]
            return path[::-1]
        parent[ru] = rv
        adj[u].append(v)
        adj[v].append(u)
    return None


@dataclass
class ACResult:
    ok: bool
    switching: Optional[dict[int, int]] = None
    cycle: Optional[list[int]] = None
    derivation: Optional["AnnotatedDerivation"] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def ac_correct_bruteforce(f: TypedForest, cap: int = DEFAULT_SWITCHING_CAP,
                          extra_edges: Iterable[tuple[int, int]] = ()) -> ACResult:
    """Check every switching graph for a cycle.  ``extra_edges`` is for tests."""
    n = switching_count(f)
    if n > cap:
        raise SwitchingCapExceeded(f"{n} switchings exceed the cap {cap}")
    ix = NetIndex(f)
    extra = list(extra_edges)
    for sigma in enumerate_switchings(f):
        cyc = _find_cycle(ix.node, switching_edges(ix, sigma) + extra)
        if cyc is not None:
            return ACResult(False, sigma, cyc, reason="cycle")
    return ACResult(True)


# --- switching paths -----------------------------------------------------

def _walk(ix: NetIndex, start: int, prev0: Optional[int], goal: int,
          allowed: Optional[Callable[[int], bool]], edge_ok: Optional[Callable[[int, int], bool]],
          blocked: set[int]) -> Optional[list[int]]:
    """Shortest locally valid walk: no turning back on an edge, and no passing
    between two successors of a switched node.  Nodes in ``blocked`` are never
    entered.  Every switching path is such a walk, not conversely."""
    back: dict[tuple[int, Optional[int]], Optional[tuple]] = {(start, prev0): None}
    q = deque([(start, prev0)])
    while q:
        state = q.popleft()
        cur, prev = state
        from_child = prev is not None and ix.parent.get(prev) == cur
        sw = ix.is_switched(cur)
        for nb in ix.neighbours(cur):
            if nb == prev or nb in blocked:
                continue
            if sw and from_child and ix.parent.get(nb) == cur:
                continue
            if allowed is not None and not allowed(nb):
                continue
            if edge_ok is not None and not edge_ok(cur, nb):
                continue
            nxt = (nb, cur)
            if nxt in back:
                continue
            back[nxt] = state
            if nb == goal:
                path = []
                s = nxt
                while s is not None:
                    path.append(s[0])
                    s = back[s]
                return path[::-1]
            q.append(nxt)
    return None


def _search(ix: NetIndex, start: int, goal: int,
            allowed: Optional[Callable[[int], bool]] = None,
            edge_ok: Optional[Callable[[int, int], bool]] = None) -> Optional[list[int]]:
    """Exact switching-path search.

    Depth-first over simple paths, pruned by the walk relaxation: a branch is
    abandoned as soon as no valid walk reaches the goal, and a simple walk is
    returned at once.
    """
    if start == goal:
        return [start]
    path = [start]
    visited = {start}

    def step() -> Optional[list[int]]:
        cur = path[-1]
        prev = path[-2] if len(path) > 1 else None
        w = _walk(ix, cur, prev, goal, allowed, edge_ok, visited)
        if w is None:
            return None
        if len(set(w)) == len(w):
            return path[:-1] + w
        order = [w[1]] + [n for n in ix.neighbours(cur) if n != w[1]]
        from_child = prev is not None and ix.parent.get(prev) == cur
        sw = ix.is_switched(cur)
        for nb in order:
            if nb == prev or nb in visited:
                continue
            if sw and from_child and ix.parent.get(nb) == cur:
                continue
            if allowed is not None and not allowed(nb):
                continue
            if edge_ok is not None and not edge_ok(cur, nb):
                continue
            if nb == goal:
                return path + [nb]
            path.append(nb)
            visited.add(nb)
            found = step()
            if found is not None:
                return found
            path.pop()
            visited.discard(nb)
        return None

    return step()


def switching_path(f_or_ix, x: int, y: int, forbidden: Iterable[int] = (),
                   within: Optional[Iterable[int]] = None) -> Optional[list[int]]:
    ix = f_or_ix if isinstance(f_or_ix, NetIndex) else NetIndex(f_or_ix)
    bad = set(forbidden)
    inside = None if within is None else set(within)
    if x in bad or y in bad:
        return None
    if inside is not None and (x not in inside or y not in inside):
        return None

    def allowed(n):
        return n not in bad and (inside is None or n in inside)

    return _search(ix, x, y, allowed)


def switching_path_exists(f_or_ix, x: int, y: int, forbidden: Iterable[int] = (),
                          within: Optional[Iterable[int]] = None) -> bool:
    return switching_path(f_or_ix, x, y, forbidden, within) is not None


def is_switching_path(ix: NetIndex, path: list[int]) -> bool:
    """Direct check of the switching-path condition on an explicit path."""
    if len(set(path)) != len(path):
        return False
    for a, b in zip(path, path[1:]):
        if b not in ix.neighbours(a):
            return False
    for a, b, c in zip(path, path[1:], path[2:]):
        if ix.is_switched(b) and ix.parent.get(a) == b and ix.parent.get(c) == b:
            return False
    return True


# --- annotated derivations -----------------------------------------------

@dataclass(frozen=True)
class AnnotatedDerivation:
    rule: str
    conclusion: TypedForest
    principal: tuple[int, ...] = ()     # node ids of the roots built by this rule
    premises: tuple["AnnotatedDerivation", ...] = ()

    def walk(self) -> Iterator["AnnotatedDerivation"]:
        yield self
        for p in self.premises:
            yield from p.walk()

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def rules_used(self) -> list[str]:
        return [n.rule for n in self.walk()]


def _root_by_nid(f: TypedForest, nid: int):
    for r in f.roots:
        if TypedForest.root_node(r).nid == nid:
            return r
    return None


def _multiset_minus(a: list, b: list) -> Optional[list]:
    c = Counter(b)
    out = []
    for x in a:
        if c[x]:
            c[x] -= 1
        else:
            out.append(x)
    if sum(c.values()):
        return None
    return out


def _check_annotated_node(d: AnnotatedDerivation) -> Optional[str]:
    roots = list(d.conclusion.roots)
    principal = [_root_by_nid(d.conclusion, n) for n in d.principal]
    if any(p is None for p in principal):
        return "principal root missing"
    arity = {"Ax": 0, "AxTop": 0, "And": 2, "Mix": 2, "Cut": 2}.get(d.rule, 1)
    if len(d.premises) != arity:
        return f"expected {arity} premises"
    if d.rule == "AxTop":
        if len(roots) != 1 or not (isinstance(roots[0], TypedRoot) and isinstance(roots[0].term, One)
                                   and roots[0].type == TOP):
            return "expected 1 : T"
        return None
    if d.rule == "Ax":
        if len(roots) != 2 or not all(isinstance(r, TypedRoot) for r in roots):
            return "axiom needs two roots"
        ws = []
        for r in roots:
            t = r.term
            if not (isinstance(t, Expansion) and len(t.summands) == 1 and isinstance(t.summands[0], Wire)
                    and isinstance(r.type, Atom) and t.summands[0].positive == r.type.positive):
                return "axiom roots must be trivial atomic expansions"
            ws.append(t.summands[0])
        if ws[0].symbol != ws[1].symbol or ws[0].positive == ws[1].positive:
            return "axiom wires are not dual"
        if not roots[0].type.is_dual_of(roots[1].type):
            return "axiom types are not dual"
        return None

    context = _multiset_minus(roots, principal)
    if context is None:
        return "principal roots not in conclusion"
    actives = []
    rest: list = []
    for p in d.premises:
        prem_roots = list(p.conclusion.roots)
        act = [r for r in prem_roots if r not in context]
        actives.append(act)
        rest.extend(r for r in prem_roots if r in context)
    if Counter(rest) != Counter(context):
        return "context not carried by the premises"

    if d.rule == "Mix":
        return None if not any(actives) and not principal else "mix introduces roots"
    if len(principal) != 1:
        return "expected one principal root"
    (P,) = principal
    if d.rule == "Cut":
        if not isinstance(P, Cut):
            return "cut rule must build a cut"
        a, b = TypedRoot(P.left, P.left_type), TypedRoot(P.right, P.right_type)
        if Counter([x for act in actives for x in act]) != Counter([a, b]) or not all(len(x) == 1 for x in actives):
            return "cut premises do not match"
        return None
    if not isinstance(P, TypedRoot):
        return "principal must be a typed root"
    t, ty = P.term, P.type
    if d.rule == "And":
        if not (isinstance(t, Expansion) and len(t.summands) == 1 and isinstance(t.summands[0], Tensor)
                and isinstance(ty, And)):
            return "conjunction must build a trivial expansion of a tensor"
        w = t.summands[0]
        if actives != [[TypedRoot(w.left, ty.left)], [TypedRoot(w.right, ty.right)]]:
            return "conjunction premises do not match"
        return None
    (act,) = actives
    if d.rule in ("Or", "Or0", "Or1"):
        if not (isinstance(t, Disj) and isinstance(ty, Or)):
            return "disjunction rule must build a disjunction"
        kinds = (isinstance(t.left, Star), isinstance(t.right, Star))
        want_kinds = {"Or": (False, False), "Or0": (False, True), "Or1": (True, False)}[d.rule]
        if kinds != want_kinds:
            return "wrong default weakening shape"
        want = []
        if not kinds[0]:
            want.append(TypedRoot(t.left, ty.left))
        if not kinds[1]:
            want.append(TypedRoot(t.right, ty.right))
        if Counter(act) != Counter(want):
            return "disjunction premise does not match"
        return None
    if d.rule == "C":
        if not (isinstance(t, Expansion) and isinstance(ty, (Atom, And))):
            return "contraction must build an expansion of atomic or conjunctive type"
        if len(act) != 2 or not all(isinstance(r, TypedRoot) and r.type == ty and isinstance(r.term, Expansion)
                                    for r in act):
            return "contraction needs two expansions of the same type"
        if Counter(act[0].term.summands + act[1].term.summands) != Counter(t.summands):
            return "contraction does not sum the premises"
        return None
    return f"unknown rule {d.rule}"


@dataclass
class AnnotatedCheck:
    ok: bool
    path: tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_annotated(d: AnnotatedDerivation, validate: bool = True) -> AnnotatedCheck:
    if validate:
        res = validate_forest(d.conclusion)
        if not res:
            return AnnotatedCheck(False, (), res.reason)
    stack = [((), d)]
    while stack:
        path, node = stack.pop()
        reason = _check_annotated_node(node)
        if reason is not None:
            return AnnotatedCheck(False, path, f"{node.rule}: {reason}")
        for k, p in enumerate(node.premises):
            stack.append((path + (k,), p))
    return AnnotatedCheck(True)


def desequentialize(d: AnnotatedDerivation) -> TypedForest:
    res = check_annotated(d)
    if not res:
        raise AnnotationFault(f"schema violation at {res.path}: {res.reason}")
    return d.conclusion


def skeleton(d: AnnotatedDerivation) -> Derivation:
    """The un-annotated LK* derivation; root ids are the net's root node ids."""
    def seq(f: TypedForest) -> Sequent:
        return Sequent(tuple((r.term.nid, underlying(r.type)) for r in f.roots if isinstance(r, TypedRoot)))

    concl = seq(d.conclusion)
    principal = d.principal
    if d.rule == "Cut":
        principal = ()
    return Derivation(d.rule, concl, tuple(principal), tuple(skeleton(p) for p in d.premises))


class _Fresh:
    def __init__(self, nid_start: int = 0, wire_prefix: str = "x", taken: Iterable[str] = ()):
        self.nids = itertools.count(nid_start)
        self.prefix = wire_prefix
        self.k = itertools.count()
        self.taken = set(taken)

    def nid(self) -> int:
        return next(self.nids)

    def wire(self) -> str:
        while True:
            name = f"{self.prefix}{next(self.k)}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def annotate(d0: Derivation, wire_prefix: str = "x") -> AnnotatedDerivation:
    """Lift an LK* derivation: fresh wires at axioms, sums at contractions."""
    fresh = _Fresh(0, wire_prefix)
    ad, _ = _annotate(d0, fresh)
    return ad


def _annotate(d: Derivation, fresh: _Fresh) -> tuple[AnnotatedDerivation, dict[int, object]]:
    r = d.rule
    if r == "Ax":
        name = fresh.wire()
        roots = {}
        for i, f in d.conclusion.roots:
            e = Expansion(fresh.nid(), (Wire(fresh.nid(), name, f.positive),))
            roots[i] = TypedRoot(e, f)
        forest = TypedForest(tuple(roots[i] for i in d.conclusion.ids))
        return AnnotatedDerivation("Ax", forest, tuple(x.nid for x in forest.roots)), roots
    if r == "AxTop":
        (i,) = d.conclusion.ids
        root = TypedRoot(One(fresh.nid()), TOP)
        return AnnotatedDerivation("AxTop", TypedForest((root,)), (root.nid,)), {i: root}

    subs = [_annotate(p, fresh) for p in d.premises]
    pmaps = [m for _, m in subs]
    ctx = d.context_ids()
    roots: dict[int, object] = {}
    for m in pmaps:
        for i, root in m.items():
            if i in ctx:
                roots[i] = root

    def act(k):
        return [(i, pmaps[k][i]) for i, _ in d.active(k)]

    built = []
    if r == "Cut":
        (_, ra), = act(0)
        (_, rb), = act(1)
        cut = Cut(fresh.nid(), ra.term, rb.term, ra.type)
        built.append(cut)
    elif r != "Mix":
        c = d.principal[0]
        main = d.conclusion[c]
        if r == "Or":
            (ia, ra), (ib, rb) = act(0)
            if ra.type != main.left:
                ra, rb = rb, ra
            node = TypedRoot(Disj(fresh.nid(), ra.term, rb.term), main)
        elif r == "Or0":
            (_, ra), = act(0)
            node = TypedRoot(Disj(fresh.nid(), ra.term, Star(fresh.nid())), main)
        elif r == "Or1":
            (_, rb), = act(0)
            node = TypedRoot(Disj(fresh.nid(), Star(fresh.nid()), rb.term), main)
        elif r == "And":
            (_, ra), = act(0)
            (_, rb), = act(1)
            tensor = Tensor(fresh.nid(), ra.term, rb.term)
            node = TypedRoot(Expansion(fresh.nid(), (tensor,)), main)
        elif r == "C":
            (_, ra), (_, rb) = act(0)
            node = TypedRoot(Expansion(fresh.nid(), ra.term.summands + rb.term.summands), main)
        else:
            raise AnnotationFault(f"cannot annotate rule {r}")
        roots[c] = node
        built.append(node)
    ordered = [roots[i] for i in d.conclusion.ids]
    cuts = [r_ for ad, _ in subs for r_ in ad.conclusion.roots if isinstance(r_, Cut)]
    forest = TypedForest(tuple(ordered + cuts + [b for b in built if isinstance(b, Cut)]))
    principal = tuple(TypedForest.root_node(b).nid for b in built)
    return AnnotatedDerivation(r, forest, principal, tuple(ad for ad, _ in subs)), roots


# --- sequentialization ---------------------------------------------------

def _components(ix: NetIndex) -> list[set[int]]:
    seen: set[int] = set()
    comps = []
    for r in ix.roots():
        if r in seen:
            continue
        comp = {r}
        q = deque([r])
        while q:
            a = q.popleft()
            for b in ix.neighbours(a):
                if b not in comp:
                    comp.add(b)
                    q.append(b)
        seen |= comp
        comps.append(comp)
    return comps


def _reach(ix: NetIndex, start: int, blocked: set[int]) -> set[int]:
    comp = {start}
    q = deque([start])
    while q:
        a = q.popleft()
        for b in ix.neighbours(a):
            if b not in comp and b not in blocked:
                comp.add(b)
                q.append(b)
    return comp


@dataclass
class Split:
    index: int
    g1: list[int]       # root indices on the left side
    g2: list[int]


def _tensor_root(r) -> Optional[tuple[set[int], int, int]]:
    """(removed nodes, left start, right start) for a splitting candidate."""
    if isinstance(r, Cut):
        return {r.nid}, r.left.nid, r.right.nid
    t = r.term
    if isinstance(t, Expansion) and len(t.summands) == 1 and isinstance(t.summands[0], Tensor):
        w = t.summands[0]
        return {t.nid, w.nid}, w.left.nid, w.right.nid
    return None


def find_splitting_tensor(g: TypedForest, ix: Optional[NetIndex] = None) -> Split:
    ix = ix or NetIndex(g)
    for k, r in enumerate(g.roots):
        cand = _tensor_root(r)
        if cand is None:
            continue
        removed, a, b = cand
        left = _reach(ix, a, removed)
        if b in left:
            continue
        g1, g2 = [], []
        for j, s in enumerate(g.roots):
            if j == k:
                continue
            (g1 if TypedForest.root_node(s).nid in left else g2).append(j)
        return Split(k, g1, g2)
    raise NotSequentializable("no splitting tensor", g)


def _with_root(f: TypedForest, idxs: list[int], extra: list) -> TypedForest:
    return TypedForest(tuple(f.roots[i] for i in idxs) + tuple(extra))


def sequentialize(f: TypedForest, fresh: Optional[Iterator[int]] = None) -> AnnotatedDerivation:
    if fresh is None:
        fresh = f.fresh()
    return _seq(f, fresh)


def _seq(f: TypedForest, fresh: Iterator[int]) -> AnnotatedDerivation:
    if not f.roots:
        raise NotSequentializable("empty forest", f)
    # disjunction and contraction gates are local, so they are peeled before the connectivity test
    roots = list(f.roots)
    for k, r in enumerate(roots):
        if isinstance(r, TypedRoot) and isinstance(r.term, Disj):
            t, ty = r.term, r.type
            new = []
            if not isinstance(t.left, Star):
                new.append(TypedRoot(t.left, ty.left))
            if not isinstance(t.right, Star):
                new.append(TypedRoot(t.right, ty.right))
            rule = "Or" if len(new) == 2 else ("Or0" if isinstance(t.right, Star) else "Or1")
            prem = TypedForest(tuple(roots[:k]) + tuple(new) + tuple(roots[k + 1:]))
            return AnnotatedDerivation(rule, f, (t.nid,), (_seq(prem, fresh),))
    for k, r in enumerate(roots):
        if isinstance(r, TypedRoot) and isinstance(r.term, Expansion) and len(r.term.summands) > 1:
            t = r.term
            a = TypedRoot(Expansion(next(fresh), t.summands[:1]), r.type)
            b = TypedRoot(Expansion(next(fresh), t.summands[1:]), r.type)
            prem = TypedForest(tuple(roots[:k]) + (a, b) + tuple(roots[k + 1:]))
            return AnnotatedDerivation("C", f, (t.nid,), (_seq(prem, fresh),))
    ix = NetIndex(f)
    comps = _components(ix)
    if len(comps) > 1:
        first = comps[0]
        i0 = [k for k, r in enumerate(f.roots) if TypedForest.root_node(r).nid in first]
        i1 = [k for k in range(len(f.roots)) if k not in i0]
        return AnnotatedDerivation("Mix", f, (), (_seq(_with_root(f, i0, []), fresh),
                                                   _seq(_with_root(f, i1, []), fresh)))
    if len(roots) == 1 and isinstance(roots[0], TypedRoot) and isinstance(roots[0].term, One):
        return AnnotatedDerivation("AxTop", f, (roots[0].term.nid,))
    if any(_tensor_root(r) is not None for r in roots):
        sp = find_splitting_tensor(f, ix)
        r = roots[sp.index]
        if isinstance(r, Cut):
            left = TypedRoot(r.left, r.left_type)
            right = TypedRoot(r.right, r.right_type)
            rule = "Cut"
        else:
            w = r.term.summands[0]
            left = TypedRoot(w.left, r.type.left)
            right = TypedRoot(w.right, r.type.right)
            rule = "And"
        p0 = _with_root(f, sp.g1, [left])
        p1 = _with_root(f, sp.g2, [right])
        return AnnotatedDerivation(rule, f, (TypedForest.root_node(r).nid,), (_seq(p0, fresh), _seq(p1, fresh)))
    if len(roots) == 2 and all(isinstance(r, TypedRoot) and isinstance(r.term, Expansion) for r in roots):
        w0, w1 = roots[0].term.summands[0], roots[1].term.summands[0]
        if (isinstance(w0, Wire) and isinstance(w1, Wire) and w0.symbol == w1.symbol
                and w0.positive != w1.positive):
            return AnnotatedDerivation("Ax", f, (roots[0].nid, roots[1].nid))
    raise NotSequentializable("no gate", f)


def wrap_witness_roots(f: TypedForest) -> TypedForest:
    """Give every bare witness root a virtual trivial expansion."""
    fresh = f.fresh()
    roots = []
    for r in f.roots:
        if isinstance(r, TypedRoot) and is_witness_type(r.type):
            roots.append(TypedRoot(Expansion(next(fresh), (r.term,)), underlying(r.type)))
        else:
            roots.append(r)
    return TypedForest(tuple(roots))


def ac_correct_poly(f: TypedForest) -> ACResult:
    res = validate_forest(f)
    if not res:
        return ACResult(False, reason=f"invalid forest: {res.reason}")
    g = wrap_witness_roots(f)
    try:
        d = sequentialize(g)
    except NotSequentializable as e:
        return ACResult(False, reason=e.reason)
    return ACResult(True, derivation=d)
