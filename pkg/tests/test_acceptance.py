"""Acceptance criteria 1-8, one test each.

Workload sizes and seeds are pinned; every criterion must hold on 100% of
cases.  Each test also asserts its own run time stays under 60 s.
"""

import itertools
import random
import time
from pathlib import Path

from artifact.calculi import LK, LKSTAR, apply_weakening, axiom, check_derivation, lk_to_lkstar, nnet_of_derivation
from artifact.correctness import (DEFAULT_SWITCHING_CAP, ac_correct_bruteforce, ac_correct_poly, annotate,
                                  check_annotated, desequentialize, sequentialize, skeleton, switching_count)
from artifact.cut_elimination import (CONTRACTION, DEFAULT_WEAKENING, LOGICAL_ANDOR, LOGICAL_ATOMIC, eliminate_all)
from artifact.expansion_nets import Star, TypedRoot, alpha_equal, extract_nnet
from artifact.formula_core import Atom, Sequent, is_subsequent
from artifact.generators import contraction_pair, mutate, random_cut_net, random_lk, random_lkstar, random_net, small_nets
from artifact.subnets import (Host, SubnetFault, contiguous_empire, empire_note, is_contiguous, is_subnet, kingdom,
                              kingdom_bruteforce)
from artifact.syntax import parse_net

from nets import BADEMPIRES, RUNNING, nnet_pair, contraction_order_derivations

GOLDEN = Path(__file__).parent / "golden"
TIME_LIMIT = 60.0

# generator sizes (axioms, steps) for criterion 1 and their weights
NET_SIZES = [((3, 6), 90), ((6, 12), 60), ((10, 30), 34), ((14, 50), 15), ((16, 60), 1)]


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < TIME_LIMIT, f"took {self.elapsed:.1f} s"


def sequent(f):
    return Sequent(tuple((r.nid, r.type) for r in f.roots if isinstance(r, TypedRoot)))


def test_criterion_1_oracle_agreement():
    rng = random.Random(1001)
    sizes = [s for s, w in NET_SIZES for _ in range(w)]
    cases = incorrect = largest = 0
    with Clock():
        while cases < 5000:
            axioms, steps = rng.choice(sizes)
            f = random_net(rng, axioms, steps, max_switchings=DEFAULT_SWITCHING_CAP)
            if rng.random() < 0.5:
                f = mutate(rng, f) or f
            n = switching_count(f)
            assert n <= 2 ** 16
            brute = ac_correct_bruteforce(f)
            assert bool(ac_correct_poly(f)) == bool(brute), str(f)
            cases += 1
            incorrect += not brute
            largest = max(largest, n)
    assert incorrect >= 500 and largest >= 2 ** 8


def test_criterion_2_canonicity():
    first, second = contraction_order_derivations()
    assert first != second
    assert alpha_equal(desequentialize(annotate(first)), desequentialize(annotate(second)))
    rng = random.Random(1002)
    with Clock():
        for _ in range(1000):
            d1, d2 = contraction_pair(rng)
            assert d1 != d2
            assert check_derivation(d1, LKSTAR) and check_derivation(d2, LKSTAR)
            assert alpha_equal(desequentialize(annotate(d1)), desequentialize(annotate(d2)))


def test_criterion_3_sequentialization_round_trip():
    rng = random.Random(1003)
    with Clock():
        for k in range(2000):
            f = random_net(rng, axioms=3 + k % 6, steps=6 + k % 12)
            d = sequentialize(f)
            assert check_annotated(d)
            assert check_derivation(skeleton(d), LKSTAR)
            assert alpha_equal(desequentialize(d), f)


def test_criterion_4_golden_cut_elimination():
    with Clock():
        res = eliminate_all(parse_net(RUNNING))
    kinds = [s.kind for s in res.steps]
    assert kinds[:3] == [LOGICAL_ANDOR, LOGICAL_ATOMIC, CONTRACTION]
    weak = [i for i, k in enumerate(kinds) if k == DEFAULT_WEAKENING]
    assert len(weak) == 2
    logical = {LOGICAL_ANDOR, LOGICAL_ATOMIC}
    assert all(kinds[i - 1] in logical and kinds[i + 1] in logical for i in weak)
    golden = parse_net((GOLDEN / "running_displayed_final.net").read_text().strip())
    matches = alpha_equal(res.forest, golden)
    assert matches, f"result {res.forest} differs from the displayed final net {golden}"


def test_criterion_5_cut_elimination_safety():
    rng = random.Random(1005)
    steps = measured = 0
    with Clock():
        for _ in range(1000):
            f = random_cut_net(rng, max_rank=4)
            assert f.cuts()
            res = eliminate_all(f)
            g = res.forest
            assert g.is_cut_free()
            assert ac_correct_poly(g)
            assert is_subsequent(sequent(g), sequent(f)) is not None
            assert all(after < before for before, after in res.measures)
            steps += len(res.steps)
            measured += len(res.measures)
    assert steps > 1000 and measured > 100


def test_criterion_6_subnet_machinery():
    rng = random.Random(1006)
    with Clock():
        nets = 0
        for f in itertools.islice(small_nets(rng, max_nodes=12), 200):
            h = Host(f)
            assert len(h.ix.node) <= 12
            for x in h.ix.node:
                if isinstance(h.ix.node[x], Star):
                    continue
                try:
                    expected = kingdom_bruteforce(x, h).nodes
                except SubnetFault:
                    expected = None
                try:
                    actual = kingdom(x, h).nodes
                except SubnetFault:
                    actual = None
                assert actual == expected
            nets += 1
        assert nets == 200

        queries = 0
        while queries < 2000:
            h = Host(random_net(rng, axioms=3, steps=6))
            for x in h.ix.node:
                if isinstance(h.ix.node[x], Star):
                    continue
                ce = contiguous_empire(x, h)
                assert is_subnet(ce, h)
                assert is_contiguous(ce, x, h)
                queries += 1

    # node ids in BADEMPIRES: 0 = {x}, 4 = {~x}, 6 = {y}, 10 = {z}, 12 = {~z}
    h = Host(parse_net(BADEMPIRES))
    e_nx = empire_note(4, h).nodes
    assert e_nx == {0, 1, 4, 5, 10, 11, 12, 13}
    assert not is_subnet(e_nx | empire_note(6, h).nodes, h)
    assert contiguous_empire(4, h).nodes == {0, 1, 4, 5}


def test_criterion_7_lk_translation():
    rng = random.Random(1007)
    with Clock():
        for _ in range(1000):
            d = random_lk(rng)
            assert check_derivation(d, LK)
            tr = lk_to_lkstar(d)
            assert check_derivation(tr.derivation, LKSTAR)
            assert is_subsequent(tr.derivation.conclusion, d.conclusion) is not None
    a, b = Atom("a"), Atom("b")
    d = apply_weakening(axiom(a, (0, 1)), b, 2)
    assert d.conclusion.formulas == (a, a.dual(), b)
    assert lk_to_lkstar(d).gamma_s.formulas == (a, a.dual())


def test_criterion_8_nnet_coincidence():
    rng = random.Random(1008)
    with Clock():
        for k in range(1000):
            d = random_lkstar(rng, axioms=2 + k % 5, steps=4 + k % 10)
            assert nnet_of_derivation(d) == extract_nnet(desequentialize(annotate(d)))
    d1, d2 = nnet_pair()
    f1, f2 = desequentialize(annotate(d1)), desequentialize(annotate(d2))
    assert nnet_of_derivation(d1) == nnet_of_derivation(d2)
    assert extract_nnet(f1) == extract_nnet(f2)
    assert not alpha_equal(f1, f2)
