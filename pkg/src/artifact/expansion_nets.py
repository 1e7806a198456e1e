"""Expansion trees, witnesses, cut trees and typed forests.

Every node carries an integer ``nid`` unique within its forest.  ``*`` is a
real node (``Star``) so that default attachments are ordinary edges.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .formula_core import TOP, And, Atom, Bot, Formula, Or, Top, dual


# --- terms ---------------------------------------------------------------

@dataclass(frozen=True)
class One:
    nid: int

    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class Star:
    nid: int

    def __str__(self) -> str:
        return "*"


@dataclass(frozen=True)
class Wire:
    nid: int
    symbol: str
    positive: bool

    def __str__(self) -> str:
        return self.symbol if self.positive else "~" + self.symbol


@dataclass(frozen=True)
class Tensor:
    nid: int
    left: "Tree"
    right: "Tree"

    def __str__(self) -> str:
        return f"({self.left} >< {self.right})"


@dataclass(frozen=True)
class Expansion:
    nid: int
    summands: tuple["Witness", ...]

    def __str__(self) -> str:
        return "{" + " + ".join(str(w) for w in self.summands) + "}"


@dataclass(frozen=True)
class Disj:
    """Disjunction node; one child may be a ``Star`` (default weakening)."""
    nid: int
    left: Union["Tree", Star]
    right: Union["Tree", Star]

    @property
    def weakened(self) -> bool:
        return isinstance(self.left, Star) or isinstance(self.right, Star)

    def __str__(self) -> str:
        return f"({self.left} \\/ {self.right})"


@dataclass(frozen=True)
class Cut:
    """Unordered cut pair, stored with the type of its left side."""
    nid: int
    left: "Tree"
    right: "Tree"
    left_type: Formula

    @property
    def right_type(self) -> Formula:
        return dual(self.left_type)

    def positive_is_left(self) -> bool:
        """The positive side has a negative-atom type or a conjunction type."""
        a = self.left_type
        if isinstance(a, Atom):
            return not a.positive
        return isinstance(a, And)

    @property
    def positive(self) -> "Tree":
        return self.left if self.positive_is_left() else self.right

    @property
    def negative(self) -> "Tree":
        return self.right if self.positive_is_left() else self.left

    @property
    def positive_type(self) -> Formula:
        return self.left_type if self.positive_is_left() else self.right_type

    def __str__(self) -> str:
        return f"{self.left} || {self.right} : {self.left_type}"


Witness = Union[Wire, Tensor]
Tree = Union[One, Expansion, Disj]
Node = Union[One, Star, Wire, Tensor, Expansion, Disj, Cut]


def children(n: Node) -> tuple[Node, ...]:
    if isinstance(n, Expansion):
        return n.summands
    if isinstance(n, (Tensor, Disj, Cut)):
        return (n.left, n.right)
    return ()


def iter_nodes(n: Node) -> Iterator[Node]:
    stack = [n]
    while stack:
        m = stack.pop()
        yield m
        stack.extend(reversed(children(m)))


def is_switched(n: Node) -> bool:
    return isinstance(n, Expansion) or (isinstance(n, Disj) and not n.weakened)


# --- types ---------------------------------------------------------------

@dataclass(frozen=True)
class WireType:
    """Witness type [a] of a wire; the atom carries the polarity."""
    atom: Atom

    def __str__(self) -> str:
        return f"[{self.atom}]"


@dataclass(frozen=True)
class TensorType:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return f"({self.left} >< {self.right})"


NetType = Union[Formula, WireType, TensorType]


def underlying(ty: NetType) -> Formula:
    if isinstance(ty, WireType):
        return ty.atom
    if isinstance(ty, TensorType):
        return And(ty.left, ty.right)
    return ty


def is_witness_type(ty: NetType) -> bool:
    return isinstance(ty, (WireType, TensorType))


def is_closure_of(new: NetType, old: NetType) -> bool:
    return new == old or (is_witness_type(old) and new == underlying(old))


# --- typing (syntax directed) --------------------------------------------

class TypingError(Exception):
    pass


def _assign(t: Node, ty, out: dict[int, object]) -> None:
    """Propagate ``ty`` top-down through ``t``; raise TypingError on mismatch."""
    out[t.nid] = ty
    if isinstance(t, One):
        if ty != TOP:
            raise TypingError(f"1 typed {ty}")
    elif isinstance(t, Star):
        if not isinstance(ty, (Atom, Top, Bot, And, Or)):
            raise TypingError("* needs a formula type")
    elif isinstance(t, Wire):
        if not (isinstance(ty, WireType) and ty.atom.positive == t.positive):
            raise TypingError(f"wire {t} typed {ty}")
    elif isinstance(t, Tensor):
        if not isinstance(ty, TensorType):
            raise TypingError(f"tensor typed {ty}")
        for sub, sty in ((t.left, ty.left), (t.right, ty.right)):
            if not isinstance(sub, (One, Expansion, Disj)):
                raise TypingError("tensor child must be an expansion tree")
            _assign(sub, sty, out)
    elif isinstance(t, Expansion):
        if not t.summands:
            raise TypingError("empty expansion")
        if isinstance(ty, Atom):
            wty = WireType(ty)
            for w in t.summands:
                if not isinstance(w, Wire):
                    raise TypingError(f"expansion of {ty} holds a non-wire")
                _assign(w, wty, out)
        elif isinstance(ty, And):
            tty = TensorType(ty.left, ty.right)
            for w in t.summands:
                if not isinstance(w, Tensor):
                    raise TypingError(f"expansion of {ty} holds a non-tensor")
                _assign(w, tty, out)
        else:
            raise TypingError(f"expansion typed {ty}")
    elif isinstance(t, Disj):
        if not isinstance(ty, Or):
            raise TypingError(f"disjunction typed {ty}")
        if isinstance(t.left, Star) and isinstance(t.right, Star):
            raise TypingError("(* \\/ *) is not a term")
        for sub, sty in ((t.left, ty.left), (t.right, ty.right)):
            if not isinstance(sub, (One, Expansion, Disj, Star)):
                raise TypingError("disjunct must be an expansion tree")
            _assign(sub, sty, out)
    elif isinstance(t, Cut):
        if isinstance(ty, (Top, Bot)) or not isinstance(ty, (Atom, And, Or)):
            raise TypingError("cut on a unit")
        for sub in (t.left, t.right):
            if not isinstance(sub, (One, Expansion, Disj)):
                raise TypingError("cut side must be an expansion tree")
        _assign(t.left, ty, out)
        _assign(t.right, dual(ty), out)
        out[t.nid] = None
    else:
        raise TypingError(f"unknown node {t!r}")


@dataclass
class Typing:
    ok: bool
    types: dict[int, object] = field(default_factory=dict)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def type_check(t: Node, ty: NetType) -> Typing:
    """Syntax-directed typing; the returned map is the (unique) typing derivation."""
    out: dict[int, object] = {}
    try:
        if isinstance(t, (Wire, Tensor)) and not is_witness_type(ty):
            raise TypingError("witness needs a witness type")
        if isinstance(t, (One, Expansion, Disj)) and is_witness_type(ty):
            raise TypingError("expansion tree needs a formula type")
        if isinstance(t, Star):
            raise TypingError("* cannot be typed on its own")
        _assign(t, ty, out)
    except TypingError as e:
        return Typing(False, {}, str(e))
    return Typing(True, out)


# --- forests -------------------------------------------------------------

@dataclass(frozen=True)
class TypedRoot:
    term: Node
    type: NetType

    @property
    def nid(self) -> int:
        return self.term.nid

    def __str__(self) -> str:
        return f"{self.term} : {self.type}"


Root = Union[TypedRoot, Cut]


@dataclass(frozen=True)
class TypedForest:
    roots: tuple[Root, ...]

    def __str__(self) -> str:
        return ", ".join(str(r) for r in self.roots)

    @staticmethod
    def root_node(r: Root) -> Node:
        return r if isinstance(r, Cut) else r.term

    def root_nodes(self) -> list[Node]:
        return [self.root_node(r) for r in self.roots]

    def nodes(self) -> Iterator[Node]:
        for r in self.roots:
            yield from iter_nodes(self.root_node(r))

    def max_nid(self) -> int:
        return max((n.nid for n in self.nodes()), default=-1)

    def fresh(self) -> Iterator[int]:
        return itertools.count(self.max_nid() + 1)

    def cuts(self) -> list[Cut]:
        return [r for r in self.roots if isinstance(r, Cut)]

    def is_cut_free(self) -> bool:
        return not self.cuts()

    def is_e_annotated(self) -> bool:
        return all(isinstance(r, TypedRoot) and not is_witness_type(r.type) for r in self.roots)

    def sequent_types(self) -> list[NetType]:
        return [r.type for r in self.roots if isinstance(r, TypedRoot)]

    def wire_symbols(self) -> set[str]:
        return {n.symbol for n in self.nodes() if isinstance(n, Wire)}


@dataclass
class ValidationResult:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_forest(f: TypedForest) -> ValidationResult:
    seen: set[int] = set()
    wires: Counter = Counter()
    for n in f.nodes():
        if n.nid in seen:
            return ValidationResult(False, f"node id {n.nid} reused")
        seen.add(n.nid)
        if isinstance(n, Wire):
            wires[(n.symbol, n.positive)] += 1
    for (sym, pol), k in wires.items():
        if k > 1:
            return ValidationResult(False, f"wire reuse: {'' if pol else '~'}{sym}")
        if (sym, not pol) not in wires:
            return ValidationResult(False, f"unpaired wire: {'' if pol else '~'}{sym}")
    for r in f.roots:
        if isinstance(r, Cut):
            if isinstance(r.left_type, (Top, Bot)):
                return ValidationResult(False, "cut on a unit")
            for side, ty in ((r.left, r.left_type), (r.right, r.right_type)):
                res = type_check(side, ty)
                if not res:
                    return ValidationResult(False, f"cut not dual: {res.reason}")
        else:
            res = type_check(r.term, r.type)
            if not res:
                return ValidationResult(False, f"root {r.term}: {res.reason}")
    return ValidationResult(True)


class NetIndex:
    """Flat view of a forest: parents, types, root positions and wire ends."""

    def __init__(self, f: TypedForest):
        self.forest = f
        self.node: dict[int, Node] = {}
        self.parent: dict[int, Optional[int]] = {}
        self.root_of: dict[int, int] = {}
        self.type: dict[int, object] = {}
        self.wire_pos: dict[str, int] = {}
        self.wire_neg: dict[str, int] = {}
        for k, r in enumerate(f.roots):
            top = TypedForest.root_node(r)
            self.parent[top.nid] = None
            stack = [top]
            while stack:
                n = stack.pop()
                self.node[n.nid] = n
                self.root_of[n.nid] = k
                for c in children(n):
                    self.parent[c.nid] = n.nid
                    stack.append(c)
                if isinstance(n, Wire):
                    (self.wire_pos if n.positive else self.wire_neg)[n.symbol] = n.nid
            if isinstance(r, Cut):
                _assign(r, r.left_type, self.type)
            else:
                _assign(r.term, r.type, self.type)

    def children(self, nid: int) -> list[int]:
        return [c.nid for c in children(self.node[nid])]

    def partner(self, nid: int) -> int:
        w = self.node[nid]
        return (self.wire_neg if w.positive else self.wire_pos)[w.symbol]

    def is_switched(self, nid: int) -> bool:
        return is_switched(self.node[nid])

    def neighbours(self, nid: int) -> list[int]:
        out = self.children(nid)
        p = self.parent[nid]
        if p is not None:
            out.append(p)
        if isinstance(self.node[nid], Wire):
            out.append(self.partner(nid))
        return out

    def descendants(self, nid: int) -> list[int]:
        return [n.nid for n in iter_nodes(self.node[nid])]

    def roots(self) -> list[int]:
        return [TypedForest.root_node(r).nid for r in self.forest.roots]

    def wire_pairs(self) -> list[tuple[int, int]]:
        return [(self.wire_pos[s], self.wire_neg[s]) for s in sorted(self.wire_pos)]


@dataclass
class NetGraph:
    vertices: list[int]
    forest_edges: list[tuple[int, int]]     # child -> parent
    wire_edges: list[tuple[int, int]]       # x -> ~x
    kinds: dict[int, str]
    labels: dict[int, str]


def _kind(n: Node) -> str:
    return type(n).__name__


def _label(n: Node) -> str:
    if isinstance(n, Expansion):
        return "+"
    if isinstance(n, Tensor):
        return "><"
    if isinstance(n, Disj):
        return "\\/"
    if isinstance(n, Cut):
        return "||"
    return str(n)


def graph_of(f: TypedForest) -> NetGraph:
    res = validate_forest(f)
    if not res:
        raise ValueError(f"invalid forest: {res.reason}")
    ix = NetIndex(f)
    verts = sorted(ix.node)
    fe = [(c, p) for c, p in sorted(ix.parent.items()) if p is not None]
    we = ix.wire_pairs()
    return NetGraph(verts, fe, we, {v: _kind(ix.node[v]) for v in verts},
                    {v: _label(ix.node[v]) for v in verts})


# --- alpha equivalence ---------------------------------------------------

def _shape(n: Node, memo: dict[int, str]) -> str:
    key = id(n)
    if key in memo:
        return memo[key]
    if isinstance(n, Wire):
        s = "x" if n.positive else "~x"
    elif isinstance(n, (One, Star)):
        s = str(n)
    elif isinstance(n, Expansion):
        s = "{" + "+".join(sorted(_shape(w, memo) for w in n.summands)) + "}"
    elif isinstance(n, Tensor):
        s = f"({_shape(n.left, memo)}><{_shape(n.right, memo)})"
    elif isinstance(n, Disj):
        s = f"({_shape(n.left, memo)}\\/{_shape(n.right, memo)})"
    else:
        a, b = sorted((_shape(n.left, memo), _shape(n.right, memo)))
        s = f"[{a}||{b}]"
    memo[key] = s
    return s


class _Matcher:
    def __init__(self):
        self.memo: dict[int, str] = {}
        self.fwd: dict[str, str] = {}
        self.bwd: dict[str, str] = {}

    def shape(self, n: Node) -> str:
        return _shape(n, self.memo)

    def match(self, a: Node, b: Node) -> Iterator[None]:
        """Yield once per extension of the wire bijection matching a with b."""
        if type(a) is not type(b) or self.shape(a) != self.shape(b):
            return
        if isinstance(a, Wire):
            if a.positive != b.positive:
                return
            cur = self.fwd.get(a.symbol)
            if cur is not None:
                if cur == b.symbol:
                    yield
                return
            if b.symbol in self.bwd:
                return
            self.fwd[a.symbol] = b.symbol
            self.bwd[b.symbol] = a.symbol
            try:
                yield
            finally:
                del self.fwd[a.symbol]
                del self.bwd[b.symbol]
        elif isinstance(a, (One, Star)):
            yield
        elif isinstance(a, (Tensor, Disj)):
            for _ in self.match(a.left, b.left):
                yield from self.match(a.right, b.right)
        elif isinstance(a, Expansion):
            yield from self.match_bag(list(a.summands), list(b.summands))
        elif isinstance(a, Cut):
            if a.left_type == b.left_type:
                for _ in self.match(a.left, b.left):
                    yield from self.match(a.right, b.right)
            if a.left_type == b.right_type:
                for _ in self.match(a.left, b.right):
                    yield from self.match(a.right, b.left)

    def match_bag(self, xs: list, ys: list) -> Iterator[None]:
        if not xs:
            yield
            return
        x, rest = xs[0], xs[1:]
        for k, y in enumerate(ys):
            if self.shape(x) != self.shape(y):
                continue
            for _ in self.match(x, y):
                yield from self.match_bag(rest, ys[:k] + ys[k + 1:])

    def match_seq(self, xs: list, ys: list) -> Iterator[None]:
        if not xs:
            yield
            return
        for _ in self.match(xs[0], ys[0]):
            yield from self.match_seq(xs[1:], ys[1:])


def alpha_equal(f: TypedForest, g: TypedForest) -> bool:
    if len(f.roots) != len(g.roots):
        return False
    for r, s in zip(f.roots, g.roots):
        if isinstance(r, Cut) != isinstance(s, Cut):
            return False
        if isinstance(r, TypedRoot) and r.type != s.type:
            return False
    m = _Matcher()
    xs = [TypedForest.root_node(r) for r in f.roots]
    ys = [TypedForest.root_node(r) for r in g.roots]
    for _ in m.match_seq(xs, ys):
        return True
    return False


def same_forest(f: TypedForest, g: TypedForest) -> bool:
    """Equality with node ids, insensitive to root and summand order."""
    def canon(n: Node):
        if isinstance(n, Expansion):
            return ("E", n.nid, tuple(sorted((canon(w) for w in n.summands), key=repr)))
        if isinstance(n, Wire):
            return ("W", n.nid, n.symbol, n.positive)
        if isinstance(n, (One, Star)):
            return (_kind(n), n.nid)
        if isinstance(n, Cut):
            sides = sorted([(canon(n.left), str(n.left_type)), (canon(n.right), str(n.right_type))], key=repr)
            return ("C", n.nid, tuple(sides))
        return (_kind(n), n.nid, canon(n.left), canon(n.right))

    def key(r: Root):
        if isinstance(r, Cut):
            return (canon(r), None)
        return (canon(r.term), str(r.type))

    return sorted(map(key, f.roots), key=repr) == sorted(map(key, g.roots), key=repr)


# --- N-nets --------------------------------------------------------------

def leaf_position(ix: NetIndex, nid: int) -> tuple[int, tuple[int, ...]]:
    """Map a node to its (root index, formula path) in the type sequent."""
    path: list[int] = []
    cur = nid
    while ix.parent[cur] is not None:
        p = ix.parent[cur]
        node = ix.node[p]
        if isinstance(node, (Tensor, Disj)):
            path.append(0 if node.left.nid == cur else 1)
        cur = p
    return ix.root_of[nid], tuple(reversed(path))


def extract_nnet(f: TypedForest) -> Counter:
    if f.cuts():
        raise ValueError("N-net extraction needs a cut-free forest")
    ix = NetIndex(f)
    return Counter((leaf_position(ix, p), leaf_position(ix, n)) for p, n in ix.wire_pairs())


# --- builders ------------------------------------------------------------

class Builder:
    """Allocates node ids while building terms by hand."""

    def __init__(self, start: int = 0):
        self._ids = itertools.count(start)

    def nid(self) -> int:
        return next(self._ids)

    def wire(self, symbol: str, positive: bool = True) -> Wire:
        return Wire(self.nid(), symbol, positive)

    def exp(self, *summands: Witness) -> Expansion:
        return Expansion(self.nid(), tuple(summands))

    def tensor(self, left: Tree, right: Tree) -> Tensor:
        return Tensor(self.nid(), left, right)

    def disj(self, left, right) -> Disj:
        return Disj(self.nid(), left, right)

    def star(self) -> Star:
        return Star(self.nid())

    def one(self) -> One:
        return One(self.nid())

    def cut(self, left: Tree, right: Tree, left_type: Formula) -> Cut:
        return Cut(self.nid(), left, right, left_type)


def node_at(f: TypedForest, root: int, *path: int) -> Node:
    """Address a node by root index and child indices."""
    n = TypedForest.root_node(f.roots[root])
    for k in path:
        kids = children(n)
        if not 0 <= k < len(kids):
            raise IndexError(f"no child {k} at {n}")
        n = kids[k]
    return n


def node_path(f: TypedForest, nid: int) -> tuple[int, ...]:
    """Inverse of node_at: (root index, child indices...)."""
    for k, r in enumerate(f.roots):
        stack = [(TypedForest.root_node(r), (k,))]
        while stack:
            n, p = stack.pop()
            if n.nid == nid:
                return p
            stack.extend((c, p + (j,)) for j, c in enumerate(children(n)))
    raise KeyError(nid)
