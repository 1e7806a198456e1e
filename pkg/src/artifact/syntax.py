"""Text grammar for formulas, sequents and typed forests.

Formulas: ``a``, ``~a``, ``T``, ``F``, ``(A /\\ B)``, ``(A \\/ B)``; a binary
formula at top level may drop its outer parentheses.

Nets: expansions ``{w + w}``, tensors ``(t >< s)``, disjunctions
``(t \\/ s)``, ``(t \\/ *)``, ``(* \\/ t)``, unit ``1``, wires ``x``/``~x``.
A root is ``term : type`` where a type is a formula, ``[a]``, ``[~a]`` or
``(A >< B)``.  A cut root is ``term || term : A`` with A the type of the left
term.  Roots are separated by commas.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .formula_core import BOT, TOP, And, Atom, Formula, Or, Sequent
from .expansion_nets import (Cut, Disj, Expansion, NetType, One, Star, Tensor, TensorType,
                             TypedForest, TypedRoot, Wire, WireType)

_TOKEN = re.compile(r"\s*(?:(/\\|\\/|><|\|\||[~(){}\[\]+*:,])|([A-Za-z_][A-Za-z0-9_']*|1))")


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.message = message
        self.pos = pos


@dataclass
class _Tok:
    kind: str   # punctuation text, or "id"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            toks.append(_Tok(m.group(1), m.group(1), start))
        else:
            toks.append(_Tok("id", m.group(2), start))
        pos = m.end()
    toks.append(_Tok("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, start_nid: int = 0):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.ids = itertools.count(start_nid)

    # token helpers
    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.peek()
        self.i += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.next()
        if t.kind != kind:
            self.fail(f"expected {kind!r}, found {t.text or 'end of input'!r}", t)
        return t

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok.pos)

    def done(self):
        if self.peek().kind != "eof":
            self.fail(f"unexpected {self.peek().text!r}")

    # formulas
    def atom_or_unit(self) -> Formula:
        t = self.next()
        if t.kind == "~":
            s = self.next()
            if s.kind != "id" or s.text in ("T", "F", "1"):
                self.fail("expected atom after '~'", s)
            return Atom(s.text, False)
        if t.kind == "id" and t.text != "1":
            if t.text == "T":
                return TOP
            if t.text == "F":
                return BOT
            return Atom(t.text, True)
        self.fail(f"expected formula, found {t.text or 'end of input'!r}", t)

    def formula(self) -> Formula:
        if self.peek().kind == "(":
            self.next()
            left = self.formula()
            op = self.next()
            if op.kind not in ("/\\", "\\/"):
                self.fail("expected '/\\' or '\\/'", op)
            right = self.formula()
            self.expect(")")
            return And(left, right) if op.kind == "/\\" else Or(left, right)
        return self.atom_or_unit()

    def top_formula(self) -> Formula:
        f = self.formula()
        if self.peek().kind in ("/\\", "\\/"):
            op = self.next()
            g = self.formula()
            f = And(f, g) if op.kind == "/\\" else Or(f, g)
        return f

    def net_type(self) -> NetType:
        if self.peek().kind == "[":
            self.next()
            a = self.atom_or_unit()
            if not isinstance(a, Atom):
                self.fail("witness type needs an atom")
            self.expect("]")
            return WireType(a)
        if self.peek().kind == "(":
            save = self.i
            self.next()
            left = self.formula()
            if self.peek().kind == "><":
                self.next()
                right = self.formula()
                self.expect(")")
                return TensorType(left, right)
            self.i = save
        return self.top_formula()

    # terms
    def term(self, allow_star: bool = False):
        t = self.peek()
        if t.kind == "id" and t.text == "1":
            self.next()
            return One(next(self.ids))
        if t.kind == "*":
            if not allow_star:
                self.fail("'*' only allowed as a disjunct", t)
            self.next()
            return Star(next(self.ids))
        if t.kind == "{":
            self.next()
            nid = next(self.ids)
            if self.peek().kind == "}":
                self.fail("expansion must be nonempty")
            summands = [self.term()]
            while self.peek().kind == "+":
                self.next()
                summands.append(self.term())
            self.expect("}")
            return Expansion(nid, tuple(summands))
        if t.kind == "(":
            self.next()
            nid = next(self.ids)
            left = self.term(allow_star=True)
            op = self.next()
            if op.kind not in ("><", "\\/"):
                self.fail("expected '><' or '\\/'", op)
            right = self.term(allow_star=True)
            self.expect(")")
            if op.kind == "><":
                if isinstance(left, Star) or isinstance(right, Star):
                    self.fail("'*' only allowed as a disjunct", op)
                return Tensor(nid, left, right)
            if isinstance(left, Star) and isinstance(right, Star):
                self.fail("(* \\/ *) is not a term", op)
            return Disj(nid, left, right)
        if t.kind == "~":
            self.next()
            s = self.expect("id")
            return Wire(next(self.ids), s.text, False)
        if t.kind == "id":
            self.next()
            return Wire(next(self.ids), t.text, True)
        self.fail(f"expected term, found {t.text or 'end of input'!r}", t)

    def root(self):
        start = self.peek()
        left = self.term()
        if self.peek().kind == "||":
            self.next()
            cut_nid = next(self.ids)
            right = self.term()
            if self.peek().kind != ":":
                self.fail("cut needs a type annotation ': A' for its left term")
            self.next()
            return Cut(cut_nid, left, right, self.top_formula())
        if self.peek().kind != ":":
            self.fail("root needs a type annotation", start)
        self.next()
        return TypedRoot(left, self.net_type())

    def forest(self) -> TypedForest:
        roots = []
        if self.peek().kind != "eof":
            roots.append(self.root())
            while self.peek().kind == ",":
                self.next()
                roots.append(self.root())
        self.done()
        return TypedForest(tuple(roots))


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.top_formula()
    p.done()
    return f


def parse_sequent(text: str, ids=None) -> Sequent:
    p = _Parser(text)
    fs = []
    if p.peek().kind != "eof":
        fs.append(p.top_formula())
        while p.peek().kind == ",":
            p.next()
            fs.append(p.top_formula())
    p.done()
    ids = list(range(len(fs))) if ids is None else list(ids)
    if len(ids) != len(fs):
        raise ValueError("id list does not match the sequent")
    return Sequent(tuple(zip(ids, fs)))


def parse_net(text: str, start_nid: int = 0) -> TypedForest:
    return _Parser(text, start_nid).forest()


def print_net(f: TypedForest) -> str:
    return str(f)


def print_sequent(s: Sequent) -> str:
    return str(s)
