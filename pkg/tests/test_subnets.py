import itertools
import random

import pytest

from artifact.correctness import switching_path
from artifact.expansion_nets import Star, Wire
from artifact.generators import random_net, small_nets
from artifact.subnets import (Host, SubnetFault, contiguous_empire, contiguous_empire_prime, empire_note,
                              is_contiguous, is_subnet, is_substructure, kingdom, kingdom_bruteforce, kingdom_leq,
                              str_closure, subnets_with_root)
from artifact.syntax import parse_net

from nets import AXIOM, BADEMPIRES, BELLIN, F_NET, PIERCE

# node ids in F_NET: 1 = {(~x >< ~z)}, 3 = {~x}, 5 = {~z}, 10 = x, 11 = z
KINGDOM_REGION = {1, 2, 3, 4, 5, 6, 10, 11}
ESCAPING_REGION = {3, 4, 5, 6, 10, 11}

# node ids in BADEMPIRES: 0 = {x}, 4 = {~x}, 6 = {y}, 8 = {~y}, 10 = {z}, 12 = {~z}
BAD_E_NX = {0, 1, 4, 5, 10, 11, 12, 13}
BAD_E_Y = {6, 7, 8, 9, 10, 11, 12, 13}


def proper_nodes(h):
    return [n for n in sorted(h.ix.node) if not isinstance(h.ix.node[n], Star)]


def test_kingdom_region_is_the_kingdom_of_its_leftmost_root():
    h = Host(parse_net(F_NET))
    assert is_subnet(KINGDOM_REGION, h)
    assert kingdom(1, h).nodes == KINGDOM_REGION


def test_escaping_region_is_not_a_subnet():
    h = Host(parse_net(F_NET))
    assert is_substructure(h, ESCAPING_REGION)
    res = is_subnet(ESCAPING_REGION, h)
    assert not res
    assert {res.path[0], res.path[-1]} == {3, 5}
    assert any(n not in ESCAPING_REGION for n in res.path)


def test_whole_host_is_a_subnet():
    h = Host(parse_net(PIERCE))
    assert is_subnet(set(h.ix.node), h)


def test_not_a_substructure():
    h = Host(parse_net(AXIOM))
    assert is_subnet({0, 1}, h).reason == "not a substructure"


def test_kingdom_of_a_wire_is_the_link():
    h = Host(parse_net(AXIOM))
    assert kingdom(1, h).nodes == {1, 3}
    assert kingdom(0, h).nodes == {0, 1, 3}


def test_dual_wires_are_mutually_below():
    h = Host(parse_net(PIERCE))
    assert kingdom_leq(9, 4, h) and kingdom_leq(4, 9, h)
    assert kingdom_leq(1, 1, h)


def test_star_is_never_a_root():
    h = Host(parse_net(PIERCE))
    with pytest.raises(SubnetFault):
        str_closure(h, 5)


def test_host_must_be_correct():
    with pytest.raises(SubnetFault):
        Host(parse_net(r"{({x} >< {y})} : (p /\ q), {({~x} >< {~y})} : (~p /\ ~q)"))


def test_badempires_empire_as_printed():
    h = Host(parse_net(BADEMPIRES))
    assert empire_note(4, h).nodes == BAD_E_NX
    assert empire_note(6, h).nodes == BAD_E_Y


def test_badempires_union_is_not_a_subnet():
    h = Host(parse_net(BADEMPIRES))
    assert not is_subnet(BAD_E_NX | BAD_E_Y, h)


def test_badempires_contiguous_empire():
    h = Host(parse_net(BADEMPIRES))
    assert contiguous_empire(4, h).nodes == {0, 1, 4, 5}


def test_bellin_contiguous_empire_is_whole_net():
    h = Host(parse_net(BELLIN))
    assert contiguous_empire(16, h).nodes == set(h.ix.node)


def test_contiguous_empire_without_switches_is_component():
    f = parse_net(r"{({x} >< {y})} : (p /\ q), {~x} : ~p, {~y} : ~q, {z} : r, {~z} : ~r")
    h = Host(f)
    assert contiguous_empire(0, h).nodes == set(range(10))


def test_kingdom_matches_oracle_on_small_nets():
    rng = random.Random(4)
    nets = itertools.islice(small_nets(rng, max_nodes=12), 40)
    for f in nets:
        h = Host(f)
        for x in proper_nodes(h):
            try:
                expected = kingdom_bruteforce(x, h)
            except SubnetFault:
                with pytest.raises(SubnetFault):
                    kingdom(x, h)
                continue
            assert kingdom(x, h).nodes == expected.nodes


def test_contiguous_empire_properties():
    rng = random.Random(9)
    for _ in range(30):
        h = Host(random_net(rng, axioms=3, steps=5))
        for x in proper_nodes(h):
            ce = contiguous_empire(x, h)
            assert is_subnet(ce, h)
            assert is_contiguous(ce, x, h)
            assert kingdom(x, h).nodes <= ce.nodes
            assert contiguous_empire_prime(x, h) == ce


def test_order_is_a_preorder_and_antisymmetric_on_nonatomic_nodes():
    rng = random.Random(6)
    for f in itertools.islice(small_nets(rng, max_nodes=12), 30):
        h = Host(f)
        nodes = proper_nodes(h)
        k = {x: kingdom(x, h).nodes for x in nodes}
        for x in nodes:
            assert x in k[x]
        for x, y in itertools.permutations(nodes, 2):
            if x in k[y]:
                assert k[x] <= k[y]
                both_nonatomic = not isinstance(h.ix.node[x], Wire) and not isinstance(h.ix.node[y], Wire)
                assert not (both_nonatomic and y in k[x]), f"{x} and {y} are mutually below each other"


def test_subnet_intersection():
    rng = random.Random(7)
    for f in itertools.islice(small_nets(rng, max_nodes=12), 20):
        h = Host(f)
        for x in proper_nodes(h):
            subs = subnets_with_root(x, h)
            for g1, g2 in itertools.combinations(subs, 2):
                assert is_subnet(g1.nodes & g2.nodes, h)


def test_ce_paths_stay_inside():
    h = Host(parse_net(F_NET))
    ce = contiguous_empire(1, h)
    for y in ce.nodes:
        p = switching_path(h.ix, 1, y, within=ce.nodes)
        assert p is not None and set(p) <= ce.nodes
