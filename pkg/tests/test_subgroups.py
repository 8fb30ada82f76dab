import random

import pytest

from pfstar.groups import FreeGroup, parse_word
from pfstar.subgroups import (
    CosetTableSubgroup,
    FreeGeneratedSubgroup,
    HomKernelSubgroup,
    TrivialSubgroup,
    build_coset_table,
    contains,
    coset_index_if_finite,
    fold_stallings,
)

from conftest import S3_PERMS, random_word


def words(group, *texts):
    return [parse_word(t, group) for t in texts]


def test_fold_a2_b(F2):
    auto = fold_stallings(words(F2, "aa", "b"))
    assert auto.n_states == 2
    assert auto.transitions[(0, 1)] == 1
    assert auto.transitions[(1, 1)] == 0
    assert auto.transitions[(0, 2)] == 0
    assert (1, 2) not in auto.transitions  # s1 has no b-edge
    assert auto.folded


def test_fold_empty_and_full(F2):
    assert fold_stallings([]).n_states == 1
    full = fold_stallings(words(F2, "a", "b"))
    assert full.n_states == 1
    assert full.is_complete(2)


def test_fold_generator_order_independent(F2):
    gens = words(F2, "aa", "b", "abA")
    auto1 = fold_stallings(gens)
    auto2 = fold_stallings(list(reversed(gens)))
    rng = random.Random(3)
    for _ in range(300):
        w = random_word(rng, F2, 8)
        assert auto1.accepts(w.key) == auto2.accepts(w.key)


def test_fold_idempotent_accepts(F2):
    # folding a redundant generating set of the same subgroup leaves the
    # accepted language unchanged
    gens = words(F2, "aba", "bb")
    redundant = gens + [gens[0] * gens[1], gens[1] * gens[1]]
    auto1 = fold_stallings(gens)
    auto2 = fold_stallings(redundant)
    rng = random.Random(23)
    for _ in range(400):
        w = random_word(rng, F2, 8)
        assert auto1.accepts(w.key) == auto2.accepts(w.key)


def test_contains_examples(F2, z_kernel):
    H = FreeGeneratedSubgroup(words(F2, "aa", "b"))
    assert H.contains(parse_word("aa", F2))
    assert not H.contains(parse_word("a", F2))
    assert z_kernel.contains(parse_word("abAB", F2))
    assert not z_kernel.contains(parse_word("a", F2))
    triv = TrivialSubgroup(F2)
    assert triv.contains(F2.identity())
    assert not triv.contains(parse_word("a", F2))


def test_coset_index(F2, s3, z_kernel):
    assert coset_index_if_finite(FreeGeneratedSubgroup(words(F2, "aa", "b", "abA"))) == 2
    assert coset_index_if_finite(FreeGeneratedSubgroup(words(F2, "aa", "b"))) is None
    assert coset_index_if_finite(TrivialSubgroup(s3)) == 6
    assert coset_index_if_finite(TrivialSubgroup(F2)) is None
    assert coset_index_if_finite(z_kernel) is None
    # kernel into a finite target has index = image size
    z3 = __import__("pfstar.groups", fromlist=["FiniteGroup"]).FiniteGroup.cyclic(3)
    K = HomKernelSubgroup(F2, z3, [z3.element(1), z3.element(0)])
    assert coset_index_if_finite(K) == 3


def test_membership_vs_exhaustive_oracle(F2):
    gens = words(F2, "aa", "bab")
    sub = FreeGeneratedSubgroup(gens)
    gen_pool = gens + [g.inverse() for g in gens]

    def subgroup_elements_up_to(length_cap):
        # exhaustive closure of generator products, pruned by reduced length
        seen = {F2.identity().key}
        frontier = [F2.identity()]
        while frontier:
            nxt = []
            for w in frontier:
                for g in gen_pool:
                    y = w * g
                    if y.word_length() <= length_cap and y.key not in seen:
                        seen.add(y.key)
                        nxt.append(y)
            frontier = nxt
        return seen

    # members up to twice the probe length suffice to decide length-6 words
    oracle = subgroup_elements_up_to(12)
    rng = random.Random(5)
    checked = 0
    for _ in range(500):
        w = random_word(rng, F2, 6)
        assert sub.contains(w) == (w.key in oracle)
        checked += 1
    assert checked == 500


def test_subgroup_products_members(F2):
    gens = words(F2, "ab", "aab")
    sub = FreeGeneratedSubgroup(gens)
    rng = random.Random(9)
    pool = gens + [g.inverse() for g in gens]
    for _ in range(500):
        h = F2.identity()
        for _ in range(rng.randint(1, 6)):
            h = h * rng.choice(pool)
        assert sub.contains(h)


def test_kernel_normality(F2, z_kernel):
    rng = random.Random(17)
    for _ in range(200):
        x = random_word(rng, F2)
        y = random_word(rng, F2)
        if z_kernel.contains(x) and z_kernel.contains(y):
            assert z_kernel.contains(x * y.inverse())
        if z_kernel.contains(x):
            g = random_word(rng, F2)
            assert z_kernel.contains(g * x * g.inverse())


def test_kernel_image_length_check(F2, Z):
    with pytest.raises(ValueError):
        HomKernelSubgroup(F2, Z, [Z.generator(1)])  # needs 2 images


def test_coset_table_free_ambient(F2):
    # index-2 subgroup <a^2, b, aba^-1>: cosets {H, aH}
    table = [
        [1, 1, 0, 0],
        [0, 0, 1, 1],
    ]
    sub = CosetTableSubgroup(F2, table)
    assert sub.coset_index_if_finite() == 2
    assert sub.contains(parse_word("aa", F2))
    assert sub.contains(parse_word("b", F2))
    assert sub.contains(parse_word("abA", F2))
    assert not sub.contains(parse_word("a", F2))
    assert sub.coset_of_element(parse_word("ab", F2)) == 1


def test_coset_table_finite_ambient(s3, s3_mod_12):
    assert s3_mod_12.coset_index_if_finite() == 3
    i12 = S3_PERMS.index((1, 0, 2))
    assert s3_mod_12.contains(s3.element(i12))
    assert s3_mod_12.contains(s3.identity())
    others = [i for i in range(6) if i not in (0, i12)]
    assert not any(s3_mod_12.contains(s3.element(i)) for i in others)


def test_build_coset_table_trivial_subgroup(s3):
    gens = [s3.element(S3_PERMS.index((1, 0, 2))), s3.element(S3_PERMS.index((1, 2, 0)))]
    sub = build_coset_table(s3, [], gens)
    assert sub.coset_index_if_finite() == 6


def test_stallings_automaton_degree_observable(F2):
    sub = FreeGeneratedSubgroup(words(F2, "b"))
    assert sub.automaton.n_states == 1
    assert contains(sub, parse_word("bbb", F2))
    assert not contains(sub, parse_word("ab", F2))
