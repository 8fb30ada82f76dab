import random

import pytest

from pfstar.errors import BudgetExceeded, OutOfBall
from pfstar.groups import FreeGroup, parse_word
from pfstar.schreier import (
    SchreierBall,
    coset_of,
    default_generators,
    expand_ball,
    partition_signature,
    signature_scan,
)
from pfstar.subgroups import FreeGeneratedSubgroup, TrivialSubgroup

from conftest import random_word


def test_z_kernel_ball(F2, z_kernel):
    ball = expand_ball(F2, z_kernel, 2)
    assert len(ball) == 5
    exponents = sorted(z_kernel.image(rep).key for rep in ball.reps)
    assert exponents == [(-1,) * 2, (-1,), (), (1,), (1, 1)]
    # b-edges are loops
    for v in range(len(ball)):
        if ball.edge(v, 2) is not None:
            assert ball.edge(v, 2) == v


def test_trivial_ball_tree_germ(F2):
    ball = expand_ball(F2, TrivialSubgroup(F2), 1)
    assert len(ball) == 5
    assert ball.interior_count() == 1
    ball2 = expand_ball(F2, TrivialSubgroup(F2), 3)
    assert len(ball2) == 1 + 4 + 12 + 36


def test_finite_ball_saturates(s3, s3_mod_12):
    ball = expand_ball(s3, s3_mod_12, 3)
    assert len(ball) == 3
    assert ball.saturated
    assert ball.interior_count() == 3


def test_coset_of(F2, z_kernel):
    ball = expand_ball(F2, z_kernel, 3)
    assert coset_of(ball, parse_word("abba", F2)) == ball.find_coset(parse_word("aa", F2))
    assert coset_of(ball, F2.identity()) == 0
    triv_ball = expand_ball(F2, TrivialSubgroup(F2), 1)
    with pytest.raises(OutOfBall):
        coset_of(triv_ball, parse_word("ab", F2))


def test_ball_monotone_and_incremental(F2, z_kernel):
    b_small = expand_ball(F2, z_kernel, 4)
    reps_small = list(b_small.reps)
    b_small.expand_to(7)
    b_small.resolve_frontier_edges()
    assert b_small.reps[: len(reps_small)] == reps_small
    b_big = expand_ball(F2, z_kernel, 7)
    assert b_big.reps == b_small.reps
    assert len(b_big) == 15
    # interior grows with the radius
    assert b_big.interior_count() >= len(reps_small)


def test_vertex_budget(F2):
    with pytest.raises(BudgetExceeded):
        expand_ball(F2, TrivialSubgroup(F2), 8, vertex_budget=100)


def test_generator_permutation_isomorphic(F2, z_kernel):
    gens = F2.generators()
    b1 = expand_ball(F2, z_kernel, 5, generators=gens)
    b2 = expand_ball(F2, z_kernel, 5, generators=list(reversed(gens)))
    assert len(b1) == len(b2)
    # map vertices of b1 into b2 through the coset they carry, then check
    # that every relabelled edge is present
    mapping = {v: b2.coset_of(rep) for v, rep in enumerate(b1.reps)}
    label_map = {1: 2, -1: -2, 2: 1, -2: -1}  # generator i of b1 is 2-i in b2
    for (v, s), w in b1.edges.items():
        assert b2.edge(mapping[v], label_map[s]) == mapping[w]


def test_partition_signature_well_defined(F2):
    sub = FreeGeneratedSubgroup([parse_word("b", F2)])
    probe = [parse_word("b", F2), parse_word("bb", F2)]
    rng = random.Random(31)
    for _ in range(200):
        x = random_word(rng, F2, 5)
        h = parse_word("b", F2) ** rng.randint(-3, 3)
        assert partition_signature(sub, x, probe) == partition_signature(sub, x * h, probe)


def test_signature_scan_normal(F2, z_kernel):
    probe = [parse_word("a", F2), parse_word("b", F2)]
    sigs, rad, stabilized, exhaustive = signature_scan(F2, z_kernel, probe, margin=2)
    assert len(sigs) == 1
    assert stabilized and not exhaustive
    assert rad == 2  # margin radii past the last novelty at R=0


def test_signature_scan_trivial(F2):
    probe = [parse_word("a", F2), parse_word("b", F2), parse_word("ab", F2)]
    sigs, _rad, stabilized, _ex = signature_scan(F2, TrivialSubgroup(F2), probe, margin=2)
    assert sigs == {((0,), (1,), (2,))}
    assert stabilized


def test_signature_scan_b_subgroup(F2):
    sub = FreeGeneratedSubgroup([parse_word("b", F2)])
    probe = [parse_word("b", F2), parse_word("bb", F2)]
    sigs, rad, stabilized, _ex = signature_scan(F2, sub, probe, margin=2)
    assert sigs == {((0, 1),), ((0,), (1,))}
    assert stabilized
    assert rad <= 4


def test_signature_scan_finite_exhaustive(s3, s3_mod_12):
    probe = [s3.element(1), s3.element(4)]
    sigs, _rad, stabilized, exhaustive = signature_scan(s3, s3_mod_12, probe, margin=2)
    assert stabilized and exhaustive


def test_edge_dump_format(F2, z_kernel):
    ball = expand_ball(F2, z_kernel, 1)
    text = ball.dump_edges()
    lines = text.strip().splitlines()
    assert lines[0] == "# radius=1"
    for line in lines[1:]:
        v, g, w = line.split()
        assert int(g) > 0
        assert 0 <= int(v) < len(ball) and 0 <= int(w) < len(ball)


def test_default_generators(F2, s3, s3_mod_12):
    assert [str(g) for g in default_generators(F2)] == ["a", "b"]
    assert len(default_generators(s3, s3_mod_12)) == 2
    assert len(default_generators(s3, TrivialSubgroup(s3))) == 5
