"""Classical propositional formulas and sequents viewed as forests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class Atom:
    symbol: str
    positive: bool = True

    def dual(self) -> "Atom":
        return Atom(self.symbol, not self.positive)

    def is_dual_of(self, other: "Atom") -> bool:
        return self.symbol == other.symbol and self.positive != other.positive

    def __str__(self) -> str:
        return self.symbol if self.positive else "~" + self.symbol


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "T"


@dataclass(frozen=True)
class Bot:
    def __str__(self) -> str:
        return "F"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left} /\\ {self.right})"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left} \\/ {self.right})"


Formula = Union[Atom, Top, Bot, And, Or]

TOP = Top()
BOT = Bot()


def rank(f: Formula) -> int:
    if isinstance(f, (And, Or)):
        return 1 + max(rank(f.left), rank(f.right))
    return 1


def dual(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return f.dual()
    if isinstance(f, Top):
        return BOT
    if isinstance(f, Bot):
        return TOP
    if isinstance(f, And):
        return Or(dual(f.left), dual(f.right))
    return And(dual(f.left), dual(f.right))


def is_atomic(f: Formula) -> bool:
    return isinstance(f, Atom)


def subformula(f: Formula, path: tuple[int, ...]) -> Formula:
    for step in path:
        if not isinstance(f, (And, Or)):
            raise ValueError(f"path {path} leaves the formula")
        f = f.left if step == 0 else f.right
    return f


def atom_positions(f: Formula, prefix: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Atom]]:
    """Yield (path, atom) for every atom occurrence, left to right."""
    if isinstance(f, Atom):
        yield prefix, f
    elif isinstance(f, (And, Or)):
        yield from atom_positions(f.left, prefix + (0,))
        yield from atom_positions(f.right, prefix + (1,))


@dataclass(frozen=True)
class Sequent:
    """Ordered roots, each an (id, formula) pair with ids unique in the sequent.

    A node of the forest is addressed as (root id, child path), so every
    subformula occurrence has a stable identity.
    """

    roots: tuple[tuple[int, Formula], ...]

    def __post_init__(self):
        ids = [i for i, _ in self.roots]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate root ids in sequent: {ids}")

    @classmethod
    def of(cls, *formulas: Formula, start: int = 0) -> "Sequent":
        return cls(tuple((start + k, f) for k, f in enumerate(formulas)))

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.roots)

    @property
    def formulas(self) -> tuple[Formula, ...]:
        return tuple(f for _, f in self.roots)

    def as_dict(self) -> dict[int, Formula]:
        return dict(self.roots)

    def __getitem__(self, rid: int) -> Formula:
        for i, f in self.roots:
            if i == rid:
                return f
        raise KeyError(rid)

    def __contains__(self, rid: int) -> bool:
        return any(i == rid for i, _ in self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    def without(self, *rids: int) -> "Sequent":
        return Sequent(tuple((i, f) for i, f in self.roots if i not in rids))

    def plus(self, *entries: tuple[int, Formula]) -> "Sequent":
        return Sequent(self.roots + tuple(entries))

    def rename(self, old: int, new: int) -> "Sequent":
        return Sequent(tuple((new if i == old else i, f) for i, f in self.roots))

    def nodes(self) -> Iterator[tuple[tuple[int, tuple[int, ...]], Formula]]:
        """Every node with its (root id, path) identifier, preorder."""
        def walk(rid, f, path):
            yield (rid, path), f
            if isinstance(f, (And, Or)):
                yield from walk(rid, f.left, path + (0,))
                yield from walk(rid, f.right, path + (1,))
        for rid, f in self.roots:
            yield from walk(rid, f, ())

    def max_id(self) -> int:
        return max(self.ids, default=-1)

    def __str__(self) -> str:
        return ", ".join(str(f) for f in self.formulas)


def predecessor(node: tuple[int, tuple[int, ...]]) -> Optional[tuple[int, tuple[int, ...]]]:
    rid, path = node
    return None if not path else (rid, path[:-1])


def is_subsequent(delta: Sequent, gamma: Sequent) -> Optional[dict[int, int]]:
    """Return a root injection delta -> gamma preserving formulas, or None.

    Roots with matching ids and formulas are mapped to themselves first, so
    id-preserving constructions get the identity injection.
    """
    used: set[int] = set()
    mapping: dict[int, int] = {}
    pending = []
    gdict = gamma.as_dict()
    for rid, f in delta.roots:
        if gdict.get(rid) == f and rid not in used:
            mapping[rid] = rid
            used.add(rid)
        else:
            pending.append((rid, f))
    for rid, f in pending:
        for gid, g in gamma.roots:
            if gid not in used and g == f:
                mapping[rid] = gid
                used.add(gid)
                break
        else:
            return None
    return mapping
