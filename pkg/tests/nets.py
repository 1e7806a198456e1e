"""Example nets and derivations shared by the test modules."""

from __future__ import annotations

import itertools

from artifact.calculi import Derivation, apply_and, apply_contraction, apply_or, apply_or0, apply_or1, axiom
from artifact.formula_core import Atom, Sequent

AXIOM = "{x} : a, {~x} : ~a"

PIERCE = r"{(({~x} \/ *) >< {~y})} : ((~p \/ q) /\ ~p), {x + y} : p"

# the net F of the kingdom examples
F_NET = r"({({~x} >< {~z})} \/ {~y}) : ((~p /\ ~p) \/ ~p), {x + z + y} : p"

BADEMPIRES = r"{x} : p, {({~x} >< {y})} : (~p /\ q), {~y} : ~q, {z} : r, {~z} : ~r"

BELLIN = (r"{(({~z} \/ {~y}) >< ({~x} \/ {~w}))} : ((~s \/ ~q) /\ (~p \/ ~r)), "
          r"{z} : s, {w} : r, ({x} \/ {y}) : (p \/ q)")

# the three-root example net
EXAMPLE_NET = (r"{~x + ~y + ~z} : ~q, {({~w} >< {~v})} : (~p /\ ~p), "
               r"{({((* \/ {x}) >< {v}) + (({y} \/ *) >< {w})} >< {z})} : (((q \/ q) /\ p) /\ q)")

# what the sample derivation itself builds: x shares a tensor with the left p-bar conjunct
SAMPLE_NET = (r"{~x + ~y + ~z} : ~q, {({~w} >< {~v})} : (~p /\ ~p), "
            r"{({((* \/ {x}) >< {w}) + (({y} \/ *) >< {v})} >< {z})} : (((q \/ q) /\ p) /\ q)")

# the example net cut against associativity of conjunction
RUNNING = (r"{~x + ~y + ~z} : ~q, {({~w} >< {~v})} : (~p /\ ~p), "
           r"{({((* \/ {x}) >< {v}) + (({y} \/ *) >< {w})} >< {z})} || "
           r"(({({~o} >< {~n})} \/ {~m}) \/ {~l}) : (((q \/ q) /\ p) /\ q), "
           r"{(({o} \/ {n}) >< {({m} >< {l})})} : ((q \/ q) /\ (p /\ q))")

# the cut-free net displayed at the end of the worked cut-elimination example
RUNNING_DISPLAYED_FINAL = (r"{~x + ~y + ~z} : ~q, {({~w} >< {~v})} : (~p /\ ~p), "
                       r"{(({y} \/ {x}) >< {({w + v} >< {z})})} : ((q \/ q) /\ (p /\ q))")

# the same worked example after its contraction step, as displayed
RUNNING_DISPLAYED_CONTRACTED = (
    r"{~x + ~y + ~z} : ~q, {({~w} >< {~v})} : (~p /\ ~p), "
    r"{((* \/ {x}) >< {v})} || ({({~o1} >< {~n1})} \/ {~m1}) : ((q \/ q) /\ p), "
    r"{(({y} \/ *) >< {w})} || ({({~o0} >< {~n0})} \/ {~m0}) : ((q \/ q) /\ p), "
    r"{(({o0 + o1} \/ {n0 + n1}) >< {({m0 + m1} >< {z})})} : ((q \/ q) /\ (p /\ q))")

# yanking: an atomic cut against a witness root
YANK = r"x : [p], {~x} || {y + z} : ~p, {({~y} >< {~z})} : (~p /\ ~p)"
YANK_RESULT = r"{y + z} : p, {({~y} >< {~z})} : (~p /\ ~p)"

# a default-weakening cut (corrected variant of the boxed replacement example)
BOXED = (r"({~x} \/ {~y}) : (~p \/ ~p), ({x + y} \/ *) || {({~z + ~w} >< {~v})} : (p \/ p), "
         r"{z} : p, ({w} \/ {v}) : (p \/ p)")
BOXED_RESULT = r"({~x} \/ {~y}) : (~p \/ ~p), (* \/ {x + y}) : (p \/ p)"


# --- derivations ----------------------------------------------------------

def _ids(start: int = 0):
    c = itertools.count(start)
    return lambda: next(c)


def reorder(d: Derivation, ids) -> Derivation:
    """The same derivation with its conclusion roots listed in the given id order."""
    return Derivation(d.rule, Sequent(tuple((i, d.conclusion[i]) for i in ids)), d.principal, d.premises)


def contraction_order_derivations() -> tuple[Derivation, Derivation]:
    """Two derivations of ~a, (a /\\ a) /\\ a differing only in contraction order."""
    a = Atom("a")
    na = a.dual()

    def base():
        # ids: ~x=0 x=1, ~y=2 y=3, ~z=4 z=5, x(x)y=6, (x(x)y)(x)z=7
        d = apply_and(axiom(na, (0, 1)), 1, axiom(na, (2, 3)), 3, 6)
        return apply_and(d, 6, axiom(na, (4, 5)), 5, 7)

    first = apply_contraction(apply_contraction(base(), 2, 4, 8), 0, 8, 9)
    second = apply_contraction(apply_contraction(base(), 0, 4, 8), 8, 2, 9)
    return reorder(first, (9, 7)), reorder(second, (9, 7))


def nnet_pair() -> tuple[Derivation, Derivation]:
    """Two derivations with one N-net but different expansion nets."""
    a, b, c, d = (Atom(s) for s in "abcd")
    ids = _ids()

    def half(first, second, others, rule):
        # axioms on first/second; their first atoms go into disjunctions by
        # rule and meet in a conjunction, their duals meet in a disjunction
        i1, j1, i2, j2 = ids(), ids(), ids(), ids()
        o1, o2, conj, disj = ids(), ids(), ids(), ids()
        g1 = rule(axiom(first, (i1, j1)), i1, others[0], o1)
        g2 = rule(axiom(second, (i2, j2)), i2, others[1], o2)
        m = apply_and(g1, o1, g2, o2, conj)
        return apply_or(m, j1, j2, disj), conj, disj

    def join(left, right):
        (dl, cl, xl), (dr, cr, xr) = left, right
        top, last = ids(), ids()
        joined = apply_and(dl, xl, dr, xr, top)
        return apply_contraction(joined, cl, cr, last), top, last

    p1, top1, last1 = join(half(a.dual(), c.dual(), (b.dual(), d.dual()), apply_or0),
                           half(b.dual(), d.dual(), (a.dual(), c.dual()), apply_or1))
    p2, top2, last2 = join(half(a, b, (c, d), apply_or0), half(c, d, (a, b), apply_or1))
    return reorder(p1, (last1, top1)), reorder(p2, (top2, last2))


def sample_derivation() -> Derivation:
    """The sample derivation of the three-root example net, un-annotated."""
    q, p = Atom("q"), Atom("p")
    # t: (* \/ x) (x) w
    t0 = apply_or1(axiom(q.dual(), (0, 1)), 1, q, 2)            # ~x=0, (* \/ x)=2
    t = apply_and(t0, 2, axiom(p, (3, 4)), 3, 5)                  # w=3, ~w=4, t=5
    s0 = apply_or0(axiom(q.dual(), (6, 7)), 7, q, 8)            # ~y=6, (y \/ *)=8
    s = apply_and(s0, 8, axiom(p, (9, 10)), 9, 11)               # v=9, ~v=10, s=11
    both = apply_and(t, 4, s, 10, 12)                            # (~w (x) ~v)=12
    c2 = apply_contraction(apply_contraction(both, 0, 6, 13), 5, 11, 14)
    z = apply_and(c2, 14, axiom(q, (15, 16)), 15, 17)            # z=15, ~z=16
    last = apply_contraction(z, 13, 16, 18)
    return reorder(last, (18, 12, 17))
