import random

import pytest
from hypothesis import given, settings, strategies as st

from artifact.calculi import (LK, LKSTAR, LKSTAR_CUT, Derivation, ProofFault, apply_and, apply_contraction,
                              apply_cut, apply_mix, apply_or, apply_or0, apply_or1, apply_weakening, axiom, axiom_top,
                              check_derivation, contract_admissible, eliminate_top, invert_or, is_mix_free,
                              lk_to_lkstar, nnet_of_derivation, rename_root)
from artifact.formula_core import TOP, Atom, Or, Sequent, is_subsequent
from artifact.generators import random_lk, random_lkstar

from nets import sample_derivation

a, b = Atom("a"), Atom("b")


def test_axiom_checks():
    assert check_derivation(axiom(a), LKSTAR)


def test_contraction_on_disjunction_rejected():
    d = apply_or(apply_mix(axiom(a, (0, 1)), axiom(b, (2, 3))), 0, 2, 4)      # a \/ b, ~a, ~b
    d = apply_or(apply_mix(d, apply_or(apply_mix(axiom(a, (5, 6)), axiom(b, (7, 8))), 5, 7, 9)), 1, 6, 10)
    dd = apply_contraction(apply_or(d, 3, 8, 11), 4, 9, 12)
    res = check_derivation(dd, LKSTAR)
    assert not res and res.violation.reason == "contraction on disjunction"


def test_sample_skeleton_checks():
    d = sample_derivation()
    assert check_derivation(d, LKSTAR)
    assert [str(f) for f in d.conclusion.formulas] == ["~q", "(~p /\\ ~p)", "(((q \\/ q) /\\ p) /\\ q)"]


def test_check_reports_position_of_violation():
    d = axiom(a, (0, 1))
    bad = Derivation("Or0", Sequent(((0, a), (2, Or(b, b)))), (2,), (d,))
    res = check_derivation(bad, LKSTAR)
    assert not res and res.violation.path == () and res.violation.rule == "Or0"


def test_weakening_is_not_lkstar():
    d = apply_weakening(axiom(a), b, 2)
    assert check_derivation(d, LK)
    assert not check_derivation(d, LKSTAR)


def test_cut_needs_its_system():
    d = apply_cut(axiom(a, (0, 1)), 0, axiom(a, (2, 3)), 3)
    assert check_derivation(d, LKSTAR_CUT)
    assert not check_derivation(d, LKSTAR)


# --- pseudo-invertibility -------------------------------------------------

def test_invert_or0_returns_premise():
    d = apply_or0(axiom(a, (0, 1)), 0, b, 2)
    inv = invert_or(d, 2)
    assert inv.tag == "left"
    assert sorted(map(str, inv.derivation.conclusion.formulas)) == ["a", "~a"]
    assert check_derivation(inv.derivation)


def test_invert_or_both():
    d = apply_or(axiom(a, (0, 1)), 0, 1, 2)
    inv = invert_or(d, 2)
    assert inv.tag == "both" and check_derivation(inv.derivation)
    assert inv.derivation.conclusion[inv.left] == a and inv.derivation.conclusion[inv.right] == a.dual()


def test_invert_or_permutes_past_and():
    d0 = apply_or1(axiom(a, (0, 1)), 1, b, 2)               # a, b \/ ~a
    d = apply_and(d0, 0, axiom(b, (3, 4)), 3, 5)              # b \/ ~a, a /\ b, ~b
    inv = invert_or(d, 2)
    assert inv.tag == "right"
    assert check_derivation(inv.derivation)
    assert inv.derivation.conclusion[inv.right] == a.dual()


def test_invert_or_rejects_non_disjunction():
    with pytest.raises(ProofFault):
        invert_or(axiom(a), 0)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=150, deadline=None)
def test_invert_then_reintroduce(seed):
    rng = random.Random(seed)
    d = random_lkstar(rng, 3, 8)
    ors = [i for i, f in d.conclusion.roots if isinstance(f, Or)]
    if not ors:
        return
    rid = ors[0]
    main = d.conclusion[rid]
    inv = invert_or(d, rid)
    assert check_derivation(inv.derivation)
    if inv.tag == "both":
        back = apply_or(inv.derivation, inv.left, inv.right, rid)
    elif inv.tag == "left":
        back = apply_or0(inv.derivation, inv.left, main.right, rid)
    else:
        back = apply_or1(inv.derivation, inv.right, main.left, rid)
    assert check_derivation(back)
    assert sorted(map(str, back.conclusion.formulas)) == sorted(map(str, d.conclusion.formulas))


# --- top elimination --------------------------------------------------------

def test_eliminate_top_from_mix():
    g = axiom(a, (0, 1))
    d = apply_mix(axiom_top(2), g)
    assert eliminate_top(d, 2) == g


def test_eliminate_top_needs_top_root():
    d = apply_or1(axiom_top(0), 0, a, 1)
    with pytest.raises(ProofFault):
        eliminate_top(apply_mix(d, axiom(b, (2, 3))), 1)


def test_eliminate_top_nested():
    d = apply_mix(apply_mix(axiom(a, (0, 1)), axiom_top(2)), axiom(b, (3, 4)))
    d = apply_and(d, 0, axiom(a, (5, 6)), 5, 7)
    out = eliminate_top(d, 2)
    assert check_derivation(out)
    assert TOP not in out.conclusion.formulas and len(out.conclusion) == len(d.conclusion) - 1


def test_eliminate_top_rejects_lone_top():
    with pytest.raises(ProofFault):
        eliminate_top(axiom_top(0), 0)


# --- contraction admissibility ----------------------------------------------

def test_contract_atoms_is_one_step():
    d = apply_mix(axiom(a, (0, 1)), axiom(a, (2, 3)))
    out = contract_admissible(d, 0, 2)
    assert out.rule == "C" and out.premises[0] == d and check_derivation(out)


def test_contract_top_uses_top_elimination():
    d = apply_mix(axiom_top(0), apply_mix(axiom_top(1), axiom(a, (2, 3))))
    out = contract_admissible(d, 0, 1)
    assert check_derivation(out) and "C" not in out.rules_used()
    assert sorted(map(str, out.conclusion.formulas)) == ["T", "a", "~a"]


def test_contract_disjunctions_built_by_or0():
    d0 = apply_or0(axiom(a, (0, 1)), 0, b, 2)
    d1 = apply_or0(axiom(a, (3, 4)), 3, b, 5)
    d = apply_mix(d0, d1)
    out = contract_admissible(d, 2, 5)
    assert check_derivation(out)
    assert sorted(map(str, out.conclusion.formulas)) == ["(a \\/ b)", "~a", "~a"]


def test_contract_rejects_mismatch():
    with pytest.raises(ProofFault):
        contract_admissible(axiom(a), 0, 1)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=150, deadline=None)
def test_contract_random_copies(seed):
    rng = random.Random(seed)
    d = random_lkstar(rng, 3, 6)
    rid, f = rng.choice(d.conclusion.roots)
    shift = d.max_id() + 1
    e = d
    for i in sorted(d.conclusion.ids, reverse=True):
        e = rename_root(e, i, i + shift, iter(range(10 * shift, 20 * shift)))
    twice = apply_mix(d, e)
    out = contract_admissible(twice, rid, rid + shift)
    assert check_derivation(out)
    assert len(out.conclusion) == 2 * len(d.conclusion) - 1


# --- LK to LK* ----------------------------------------------------------------

def test_translate_weakened_atom():
    d = apply_weakening(axiom(a, (0, 1)), b, 2)
    tr = lk_to_lkstar(d)
    assert tr.gamma_s.formulas == (a, a.dual())
    assert tr.weak == {2}
    assert check_derivation(tr.derivation, LKSTAR)


def test_translate_without_w_or_c_is_identity():
    d = apply_and(axiom(a, (0, 1)), 0, axiom(b, (2, 3)), 2, 4)
    tr = lk_to_lkstar(d)
    assert tr.derivation == d and tr.weak == frozenset()


def test_translate_and_of_weak_conjuncts_uses_mix():
    d0 = apply_weakening(axiom(a, (0, 1)), b, 2)
    d1 = apply_weakening(axiom(b, (3, 4)), a, 5)
    d = apply_and(d0, 2, d1, 5, 6)
    tr = lk_to_lkstar(d)
    assert "Mix" in tr.derivation.rules_used()
    assert check_derivation(tr.derivation, LKSTAR)
    assert tr.weak == {6}


def test_translate_rejects_non_lk():
    with pytest.raises(ProofFault):
        lk_to_lkstar(apply_mix(axiom(a), axiom(b, (2, 3))))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=200, deadline=None)
def test_translate_random(seed):
    d = random_lk(random.Random(seed))
    assert check_derivation(d, LK) and is_mix_free(d)
    tr = lk_to_lkstar(d)
    assert check_derivation(tr.derivation, LKSTAR)
    assert is_subsequent(tr.gamma_s, d.conclusion) is not None
    assert tr.weak == frozenset(set(d.conclusion.ids) - set(tr.gamma_s.ids))


# --- N-net tracing ------------------------------------------------------------

def test_nnet_of_axiom():
    assert nnet_of_derivation(axiom(a.dual(), (0, 1))) == {((1, ()), (0, ())): 1}


def test_nnet_contraction_merges_positions():
    d = apply_contraction(apply_mix(axiom(a, (0, 1)), axiom(a, (2, 3))), 0, 2, 4)
    links = nnet_of_derivation(d)
    assert sum(links.values()) == 2 and all(p == (2, ()) for p, _ in links)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=150, deadline=None)
def test_random_lkstar_checks(seed):
    assert check_derivation(random_lkstar(random.Random(seed)), LKSTAR)
