"""Random derivations, nets, mutations and cut nets for property tests."""

from __future__ import annotations

import itertools
import random
from typing import Iterator, Optional

from .calculi import (Derivation, apply_and, apply_contraction, apply_cut, apply_mix, apply_or, apply_or0,
                      apply_or1, apply_weakening, axiom, axiom_top, rename_root)
from .correctness import annotate, switching_count
from .expansion_nets import Disj, Expansion, NetIndex, Tensor, TypedForest, TypedRoot, Wire, validate_forest
from .formula_core import TOP, And, Atom, Formula, Or, Sequent, dual, rank

ATOMS = ("p", "q", "r")


class _Ids:
    def __init__(self, start: int = 0):
        self._c = itertools.count(start)

    def __call__(self) -> int:
        return next(self._c)


def random_atom(rng: random.Random, atoms=ATOMS) -> Atom:
    return Atom(rng.choice(atoms), rng.random() < 0.5)


def random_formula(rng: random.Random, max_rank: int, atoms=ATOMS, units: bool = False) -> Formula:
    if max_rank <= 1 or rng.random() < 0.3:
        if units and rng.random() < 0.1:
            return TOP
        return random_atom(rng, atoms)
    left = random_formula(rng, max_rank - 1, atoms, units)
    right = random_formula(rng, max_rank - 1, atoms, units)
    return And(left, right) if rng.random() < 0.5 else Or(left, right)


# --- LK* derivations ----------------------------------------------------

def random_lkstar(rng: random.Random, axioms: int = 4, steps: int = 8, atoms=ATOMS,
                  top: bool = True, ids: Optional[_Ids] = None) -> Derivation:
    """Bottom-up random LK* derivation: axioms combined by random rule steps."""
    ids = ids or _Ids()
    pool: list[Derivation] = []
    for _ in range(max(1, axioms)):
        if top and rng.random() < 0.08:
            pool.append(axiom_top(ids()))
        else:
            pool.append(axiom(random_atom(rng, atoms), (ids(), ids())))
    for _ in range(steps):
        pool = _lkstar_step(rng, pool, ids, atoms)
    while len(pool) > 1:
        i, j = rng.sample(range(len(pool)), 2)
        d0, d1 = pool[i], pool[j]
        rest = [d for k, d in enumerate(pool) if k not in (i, j)]
        if rng.random() < 0.5:
            a = rng.choice(d0.conclusion.ids)
            b = rng.choice(d1.conclusion.ids)
            rest.append(apply_and(d0, a, d1, b, ids()))
        else:
            rest.append(apply_mix(d0, d1))
        pool = rest
    return pool[0]


def _contractible(d: Derivation) -> list[tuple[int, int]]:
    out = []
    roots = d.conclusion.roots
    for x in range(len(roots)):
        for y in range(x + 1, len(roots)):
            (i, f), (j, g) = roots[x], roots[y]
            if f == g and isinstance(f, (Atom, And)):
                out.append((i, j))
    return out


def _lkstar_step(rng: random.Random, pool: list[Derivation], ids: _Ids, atoms) -> list[Derivation]:
    kind = rng.choice(["And", "And", "Or", "Or0", "Or1", "C", "C", "Mix"])
    if kind in ("And", "Mix") and len(pool) >= 2:
        i, j = rng.sample(range(len(pool)), 2)
        d0, d1 = pool[i], pool[j]
        rest = [d for k, d in enumerate(pool) if k not in (i, j)]
        if kind == "Mix":
            return rest + [apply_mix(d0, d1)]
        return rest + [apply_and(d0, rng.choice(d0.conclusion.ids), d1, rng.choice(d1.conclusion.ids), ids())]
    k = rng.randrange(len(pool))
    d = pool[k]
    rest = pool[:k] + pool[k + 1:]
    cids = d.conclusion.ids
    if kind == "Or" and len(cids) >= 2:
        a, b = rng.sample(cids, 2)
        return rest + [apply_or(d, a, b, ids())]
    if kind == "Or0":
        return rest + [apply_or0(d, rng.choice(cids), random_formula(rng, 2, atoms), ids())]
    if kind == "Or1":
        return rest + [apply_or1(d, rng.choice(cids), random_formula(rng, 2, atoms), ids())]
    if kind == "C":
        pairs = _contractible(d)
        if pairs:
            a, b = rng.choice(pairs)
            return rest + [apply_contraction(d, a, b, ids())]
    return pool


def derivation_proving(rng: random.Random, f: Formula, ids: _Ids, atoms=ATOMS,
                       contract: float = 0.25) -> tuple[Derivation, int]:
    """A random LK* derivation with a root of formula f; returns (d, root id)."""
    if isinstance(f, Atom):
        a, b = ids(), ids()
        return axiom(f, (a, b)), a
    if f == TOP:
        r = ids()
        return axiom_top(r), r
    if isinstance(f, And):
        d0, a = derivation_proving(rng, f.left, ids, atoms, contract)
        d1, b = derivation_proving(rng, f.right, ids, atoms, contract)
        c = ids()
        d = apply_and(d0, a, d1, b, c)
        if rng.random() < contract:
            e0, a2 = derivation_proving(rng, f.left, ids, atoms, contract / 2)
            e1, b2 = derivation_proving(rng, f.right, ids, atoms, contract / 2)
            c2 = ids()
            e = apply_and(e0, a2, e1, b2, c2)
            c3 = ids()
            d = apply_contraction(apply_mix(d, e), c, c2, c3)
            c = c3
        return d, c
    if isinstance(f, Or):
        choice = rng.random()
        c = ids()
        if choice < 0.3:
            d0, a = derivation_proving(rng, f.left, ids, atoms, contract)
            return apply_or0(d0, a, f.right, c), c
        if choice < 0.6:
            d1, b = derivation_proving(rng, f.right, ids, atoms, contract)
            return apply_or1(d1, b, f.left, c), c
        d0, a = derivation_proving(rng, f.left, ids, atoms, contract)
        d1, b = derivation_proving(rng, f.right, ids, atoms, contract)
        s0 = [i for i in d0.conclusion.ids if i != a]
        s1 = [i for i in d1.conclusion.ids if i != b]
        if s0 and s1 and rng.random() < 0.5:
            # join the two disjuncts' side formulas by a tensor instead of Mix
            m = apply_and(d0, rng.choice(s0), d1, rng.choice(s1), ids())
            return apply_or(m, a, b, c), c
        return apply_or(apply_mix(d0, d1), a, b, c), c
    raise ValueError(f"cannot prove {f} alone")


# --- LK derivations -------------------------------------------------------

def random_lk(rng: random.Random, axioms: int = 3, steps: int = 8, atoms=ATOMS) -> Derivation:
    """Random Mix-free LK derivation using Ax, AxTop, And, Or, C and W."""
    ids = _Ids()
    pool: list[Derivation] = []
    for _ in range(max(1, axioms)):
        if rng.random() < 0.08:
            pool.append(axiom_top(ids()))
        else:
            pool.append(axiom(random_atom(rng, atoms), (ids(), ids())))
    for _ in range(steps):
        kind = rng.choice(["And", "Or", "C", "W", "W"])
        if kind == "And" and len(pool) >= 2:
            i, j = rng.sample(range(len(pool)), 2)
            d0, d1 = pool[i], pool[j]
            rest = [d for k, d in enumerate(pool) if k not in (i, j)]
            pool = rest + [apply_and(d0, rng.choice(d0.conclusion.ids), d1, rng.choice(d1.conclusion.ids), ids())]
            continue
        k = rng.randrange(len(pool))
        d = pool[k]
        cids = d.conclusion.ids
        if kind == "Or" and len(cids) >= 2:
            a, b = rng.sample(cids, 2)
            d = apply_or(d, a, b, ids())
        elif kind == "W":
            if rng.random() < 0.5:
                g = d.conclusion[rng.choice(cids)]
            else:
                g = random_formula(rng, 3, atoms, units=True)
            d = apply_weakening(d, g, ids())
        elif kind == "C":
            roots = d.conclusion.roots
            pairs = [(roots[x][0], roots[y][0]) for x in range(len(roots)) for y in range(x + 1, len(roots))
                     if roots[x][1] == roots[y][1]]
            if pairs:
                a, b = rng.choice(pairs)
                d = apply_contraction(d, a, b, ids())
        pool[k] = d
    while len(pool) > 1:
        d0, d1 = pool.pop(), pool.pop()
        pool.append(apply_and(d0, rng.choice(d0.conclusion.ids), d1, rng.choice(d1.conclusion.ids), ids()))
    return pool[0]


# --- nets and mutations ---------------------------------------------------

def random_net(rng: random.Random, axioms: int = 4, steps: int = 8, max_switchings: int = 2 ** 16,
               atoms=ATOMS) -> TypedForest:
    while True:
        f = annotate(random_lkstar(rng, axioms, steps, atoms)).conclusion
        if switching_count(f) <= max_switchings:
            return f


def _rebuild(n, table: dict):
    """Rebuild a term bottom-up, replacing nodes found in table by nid."""
    if n.nid in table:
        return table[n.nid]
    if isinstance(n, Expansion):
        return Expansion(n.nid, tuple(_rebuild(c, table) for c in n.summands))
    if isinstance(n, Tensor):
        return Tensor(n.nid, _rebuild(n.left, table), _rebuild(n.right, table))
    if isinstance(n, Disj):
        return Disj(n.nid, _rebuild(n.left, table), _rebuild(n.right, table))
    return n


def _map_roots(f: TypedForest, table: dict) -> TypedForest:
    out = []
    for r in f.roots:
        if isinstance(r, TypedRoot):
            out.append(TypedRoot(_rebuild(r.term, table), r.type))
        else:
            out.append(r)
    return TypedForest(tuple(out))


def _wire_swap(rng: random.Random, f: TypedForest) -> Optional[TypedForest]:
    wires = [n for n in f.nodes() if isinstance(n, Wire) and n.positive]
    if len(wires) < 2:
        return None
    a, b = rng.sample(wires, 2)
    return _map_roots(f, {a.nid: Wire(a.nid, b.symbol, True), b.nid: Wire(b.nid, a.symbol, True)})


def _move_summand(rng: random.Random, f: TypedForest) -> Optional[TypedForest]:
    ix = NetIndex(f)
    exps = [n for n in f.nodes() if isinstance(n, Expansion)]
    pairs = [(e1, e2) for e1 in exps for e2 in exps
             if e1.nid != e2.nid and len(e1.summands) > 1 and ix.type[e1.nid] == ix.type[e2.nid]]
    if not pairs:
        return None
    e1, e2 = rng.choice(pairs)
    w = rng.choice(e1.summands)
    new1 = Expansion(e1.nid, tuple(s for s in e1.summands if s is not w))
    table = {e1.nid: new1}
    g = _map_roots(f, table)
    e2_now = next(n for n in g.nodes() if n.nid == e2.nid)
    return _map_roots(g, {e2.nid: Expansion(e2.nid, e2_now.summands + (w,))})


def _illegal_tensor(rng: random.Random, f: TypedForest) -> Optional[TypedForest]:
    """Tensor two classical roots together regardless of connectivity."""
    idx = [k for k, r in enumerate(f.roots)
           if isinstance(r, TypedRoot) and isinstance(r.term, (Expansion, Disj)) and r.type != TOP]
    if len(idx) < 2:
        return None
    i, j = rng.sample(idx, 2)
    ri, rj = f.roots[i], f.roots[j]
    nid = f.max_nid() + 1
    root = TypedRoot(Expansion(nid + 1, (Tensor(nid, ri.term, rj.term),)), And(ri.type, rj.type))
    rest = [r for k, r in enumerate(f.roots) if k not in (i, j)]
    return TypedForest(tuple(rest + [root]))


MUTATIONS = (_wire_swap, _move_summand, _illegal_tensor)


def mutate(rng: random.Random, f: TypedForest, tries: int = 10) -> Optional[TypedForest]:
    """A validating variant of f that may or may not be AC-correct."""
    for _ in range(tries):
        g = rng.choice(MUTATIONS)(rng, f)
        if g is not None and validate_forest(g):
            return g
    return None


# --- canonicity pairs -----------------------------------------------------

def contraction_pair(rng: random.Random, copies: int = 3, axioms: int = 3,
                     steps: int = 5) -> tuple[Derivation, Derivation]:
    """Two LK* derivations differing by one swap of adjacent contraction steps."""
    ids = _Ids()
    base = [random_lkstar(rng, axioms, steps, ids=ids, top=False) for _ in range(copies)]
    d = base[0]
    for e in base[1:]:
        d = apply_mix(d, e)
    groups: dict[Formula, list[int]] = {}
    for i, f in d.conclusion.roots:
        if isinstance(f, (Atom, And)):
            groups.setdefault(f, []).append(i)
    merges = []
    for members in groups.values():
        if len(members) < 2:
            continue
        order = members[:]
        rng.shuffle(order)
        for k in range(1, len(order)):
            merges.append((order[rng.randrange(k)], order[k]))
    rng.shuffle(merges)
    if len(merges) < 2:
        return contraction_pair(rng, copies, axioms, steps)
    k = rng.randrange(len(merges) - 1)
    swapped = merges[:k] + [merges[k + 1], merges[k]] + merges[k + 2:]
    start = ids()
    return _contract_plan(d, merges, start), _contract_plan(d, swapped, start)


def _contract_plan(d: Derivation, merges: list[tuple[int, int]], start: int) -> Derivation:
    """Apply the merges in order, then give each surviving root a canonical id and position."""
    fresh = itertools.count(start)
    current = {i: i for i in d.conclusion.ids}       # original id -> current root id
    for a, b in merges:
        ra, rb = current[a], current[b]
        new = next(fresh)
        d = apply_contraction(d, ra, rb, new)
        for k, v in current.items():
            if v in (ra, rb):
                current[k] = new
    classes: dict[int, int] = {}
    for k, v in current.items():
        classes[v] = min(k, classes.get(v, k))
    offset = start + len(merges) + 1
    spare = itertools.count(offset + 2 * (max(current) + 1))
    for v, low in classes.items():
        d = rename_root(d, v, offset + low, spare)
    concl = Sequent(tuple(sorted(d.conclusion.roots, key=lambda r: r[0])))
    return Derivation(d.rule, concl, d.principal, d.premises)


# --- cut nets -------------------------------------------------------------

def random_cut_derivation(rng: random.Random, max_rank: int = 4, atoms=ATOMS, extra_cut: float = 0.3,
                          contract: float = 0.25) -> Derivation:
    """Two random derivations cut on a formula and its dual, rank at most max_rank."""
    ids = _Ids()
    a = random_formula(rng, max_rank, atoms)
    d0, x = derivation_proving(rng, a, ids, atoms, contract)
    d1, y = derivation_proving(rng, dual(a), ids, atoms, contract)
    d = apply_cut(d0, x, d1, y)
    if rng.random() < extra_cut:
        cands = [(i, f) for i, f in d.conclusion.roots if f != TOP and rank(f) <= max_rank]
        if len(cands) > 1:
            i, f = rng.choice(cands)
            d2, z = derivation_proving(rng, dual(f), ids, atoms, contract)
            d = apply_cut(d, i, d2, z)
    if not d.conclusion.roots:
        return random_cut_derivation(rng, max_rank, atoms, extra_cut, contract)
    return d


def random_cut_net(rng: random.Random, max_rank: int = 4, atoms=ATOMS, extra_cut: float = 0.3,
                   contract: float = 0.25) -> TypedForest:
    return annotate(random_cut_derivation(rng, max_rank, atoms, extra_cut, contract)).conclusion


def small_nets(rng: random.Random, max_nodes: int = 12) -> Iterator[TypedForest]:
    """Endless stream of nets (some with cuts) having at most max_nodes nodes."""
    while True:
        if rng.random() < 0.25:
            f = random_cut_net(rng, max_rank=2, extra_cut=0.0, contract=0.1)
        else:
            f = annotate(random_lkstar(rng, rng.randint(1, 3), rng.randint(1, 5))).conclusion
        if sum(1 for _ in f.nodes()) <= max_nodes:
            yield f
