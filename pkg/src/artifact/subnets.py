"""Substructures, subnets, kingdoms, the kingdom preorder and contiguous empires.

Orientation: a substructure contains every descendant of its members (the
leaves lie "above" the roots), the partner of each of its wires, and the
disjunction above each of its ``*`` nodes.  Cut nodes are unswitched binary
nodes throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .correctness import _search, ac_correct_poly, switching_path
from .expansion_nets import Cut, Disj, NetIndex, Star, Tensor, TypedForest, TypedRoot, Wire, children


class SubnetFault(Exception):
    pass


class OracleRefused(SubnetFault):
    """An exhaustive oracle declined a host above its size cap."""


class Host:
    """An AC typed forest with its index; AC-ness is checked once on demand."""

    def __init__(self, f: TypedForest, check: bool = True):
        self.forest = f
        self.ix = NetIndex(f)
        self._str: dict[int, frozenset[int]] = {}
        if check:
            res = ac_correct_poly(f)
            if not res:
                raise SubnetFault(f"host is not AC-correct: {res.reason}")


HostLike = Union[Host, TypedForest]


def as_host(h: HostLike, check: bool = True) -> Host:
    return h if isinstance(h, Host) else Host(h, check)


@dataclass(frozen=True)
class Substructure:
    nodes: frozenset[int]

    def __contains__(self, nid: int) -> bool:
        return nid in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def roots(self, h: HostLike) -> list[int]:
        ix = as_host(h, False).ix
        return sorted(n for n in self.nodes if ix.parent[n] not in self.nodes)

    def as_forest(self, h: HostLike) -> TypedForest:
        """The substructure as a typed forest in its own right, same node ids."""
        ix = as_host(h, False).ix
        tops = set(self.roots(ix.forest))
        order = []
        for r in ix.forest.roots:
            stack = [TypedForest.root_node(r)]
            while stack:
                n = stack.pop()
                if n.nid in tops:
                    order.append(n)
                stack.extend(reversed(children(n)))
        out = []
        for n in order:
            out.append(n if isinstance(n, Cut) else TypedRoot(n, ix.type[n.nid]))
        return TypedForest(tuple(out))


def _close(ix: NetIndex, seed: Iterable[int]) -> set[int]:
    out: set[int] = set()
    stack = list(seed)
    while stack:
        n = stack.pop()
        if n in out:
            continue
        out.add(n)
        node = ix.node[n]
        stack.extend(ix.children(n))
        if isinstance(node, Star):
            stack.append(ix.parent[n])
        elif isinstance(node, Wire):
            stack.append(ix.partner(n))
    return out


def is_substructure(h: HostLike, nodes: Iterable[int]) -> bool:
    ix = as_host(h, False).ix
    s = set(nodes)
    return _close(ix, s) == s


def str_closure(h: HostLike, x: int) -> Substructure:
    host = as_host(h, False)
    if isinstance(host.ix.node[x], Star):
        raise SubnetFault("* is never the root of a substructure")
    if x not in host._str:
        host._str[x] = frozenset(_close(host.ix, [x]))
    return Substructure(host._str[x])


def escape_path(h: HostLike, g: Substructure) -> Optional[list[int]]:
    """A switching path between two roots of g that leaves g, if any."""
    ix = as_host(h, False).ix
    roots = g.roots(ix.forest)
    for i, r1 in enumerate(roots):
        for r2 in roots[i + 1:]:
            ends = {r1, r2}

            def allowed(n, ends=ends):
                return n not in g.nodes or n in ends

            def edge_ok(a, b):
                return not (a in g.nodes and b in g.nodes)

            p = _search(ix, r1, r2, allowed, edge_ok)
            if p is not None:
                return p
    return None


@dataclass
class SubnetCheck:
    ok: bool
    path: Optional[list[int]] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_subnet(g: Union[Substructure, Iterable[int]], h: HostLike) -> SubnetCheck:
    host = as_host(h, False)
    if not isinstance(g, Substructure):
        g = Substructure(frozenset(g))
    if not g.nodes:
        return SubnetCheck(False, reason="empty")
    if not is_substructure(host, g.nodes):
        return SubnetCheck(False, reason="not a substructure")
    p = escape_path(host, g)
    if p is not None:
        return SubnetCheck(False, p, "switching path leaves the substructure")
    return SubnetCheck(True)


# --- kingdoms -------------------------------------------------------------

def _entered_from_parent(ix: NetIndex, x: int, r: int) -> bool:
    """Is there a switching path from x ending with the edge parent(r) -> r?"""
    p = ix.parent[r]
    if p is None:
        return False

    def edge_ok(a, b):
        return b != r or a == p

    return _search(ix, x, r, None, edge_ok) is not None


def kingdom(x: int, h: HostLike) -> Substructure:
    """The smallest subnet with x as a root.

    Growth rule: a root r of the current candidate must gain its parent when
    some switching path from x reaches r through that parent, since both
    would be roots of any smaller subnet.  The result is checked.
    """
    host = as_host(h)
    ix = host.ix
    g = set(str_closure(host, x).nodes)
    changed = True
    while changed:
        changed = False
        for r in sorted(n for n in g if ix.parent[n] not in g):
            if r == x:
                continue
            if _entered_from_parent(ix, x, r):
                g |= str_closure(host, ix.parent[r]).nodes
                changed = True
                break
    if ix.parent[x] in g:
        raise SubnetFault(f"node {x} cannot be a subnet root")
    res = Substructure(frozenset(g))
    chk = is_subnet(res, host)
    if not chk:
        raise SubnetFault(f"kingdom of {x} is not a subnet: {chk.path}")
    return res


def kingdom_leq(x: int, y: int, h: HostLike) -> bool:
    """x << y iff x lies in the kingdom of y."""
    return x in kingdom(y, h)


# --- contiguous empires --------------------------------------------------

def contiguous_empire(x: int, h: HostLike) -> Substructure:
    host = as_host(h)
    ix = host.ix
    g = set(str_closure(host, x).nodes)
    changed = True
    while changed:
        changed = False
        candidates = sorted({ix.parent[r] for r in g if ix.parent[r] is not None and ix.parent[r] not in g})
        for y in candidates:
            if _admit(ix, x, y, g):
                g |= str_closure(host, y).nodes
                changed = True
                break
    if ix.parent[x] in g:
        raise SubnetFault(f"node {x} is not a root of its contiguous empire")
    return Substructure(frozenset(g))


def _admit(ix: NetIndex, x: int, y: int, g: set[int]) -> bool:
    node = ix.node[y]
    succ = ix.children(y)
    if x in succ:
        return False
    if isinstance(node, (Tensor, Cut)):
        return any(s in g for s in succ)
    if isinstance(node, Disj) and node.weakened:
        t = node.right if isinstance(node.left, Star) else node.left
        return t.nid in g
    if all(s in g for s in succ):
        return True
    if any(s in g for s in succ):
        return switching_path(ix, x, y, forbidden=succ) is not None
    return False


def contiguous_empire_prime(x: int, h: HostLike) -> Substructure:
    """The path-closed variant; equal to contiguous_empire on AC hosts."""
    host = as_host(h)
    ix = host.ix
    g = set(str_closure(host, x).nodes)
    changed = True
    while changed:
        changed = False
        candidates = sorted({ix.parent[r] for r in g if ix.parent[r] is not None and ix.parent[r] not in g})
        for y in candidates:
            node = ix.node[y]
            succ = ix.children(y)
            if x in succ:
                continue
            add: list[int] = []
            if isinstance(node, (Tensor, Cut)) and any(s in g for s in succ):
                add = [y]
            elif isinstance(node, Disj) and node.weakened:
                t = node.right if isinstance(node.left, Star) else node.left
                add = [y] if t.nid in g else []
            elif all(s in g for s in succ):
                add = [y]
            elif any(s in g for s in succ):
                add = switching_path(ix, x, y, forbidden=succ) or []
            if add:
                for w in add:
                    g |= str_closure(host, w).nodes
                changed = True
                break
    return Substructure(frozenset(g))


def is_contiguous(g: Substructure, x: int, h: HostLike) -> bool:
    ix = as_host(h, False).ix
    return all(switching_path(ix, x, y, within=g.nodes) is not None for y in g.nodes)


# --- exhaustive oracles (small hosts only) --------------------------------

DEFAULT_ORACLE_CAP = 5000


def substructures_with_root(x: int, h: HostLike, cap: int = DEFAULT_ORACLE_CAP) -> list[Substructure]:
    """Every substructure having x as a root, by closing unions of str sets."""
    host = as_host(h, False)
    ix = host.ix
    start = str_closure(host, x).nodes
    px = ix.parent[x]
    found = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for v in ix.node:
            if v in s or isinstance(ix.node[v], Star):
                continue
            t = s | str_closure(host, v).nodes
            if px in t or t in found:
                continue
            found.add(t)
            if len(found) > cap:
                raise OracleRefused(f"more than {cap} substructures; oracle refused")
            stack.append(t)
    return [Substructure(s) for s in found]


def subnets_with_root(x: int, h: HostLike, cap: int = DEFAULT_ORACLE_CAP) -> list[Substructure]:
    host = as_host(h, False)
    return [g for g in substructures_with_root(x, host, cap) if is_subnet(g, host)]


def kingdom_bruteforce(x: int, h: HostLike, cap: int = DEFAULT_ORACLE_CAP) -> Substructure:
    subs = subnets_with_root(x, h, cap)
    if not subs:
        raise SubnetFault(f"no subnet has {x} as a root")
    best = min(subs, key=len)
    if not all(best.nodes <= s.nodes for s in subs):
        raise SubnetFault("no least subnet")
    return best


def empire_note(x: int, h: HostLike, cap: int = DEFAULT_ORACLE_CAP) -> Substructure:
    """The largest subnet with x as a root, by exhaustive search."""
    subs = subnets_with_root(x, h, cap)
    if not subs:
        raise SubnetFault(f"no subnet has {x} as a root")
    best = max(subs, key=len)
    if not all(s.nodes <= best.nodes for s in subs):
        raise SubnetFault("no largest subnet")
    return best
