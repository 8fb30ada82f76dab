import random

import numpy as np
import pytest

from pfstar.errors import BudgetExceeded, DescriptorMismatch, WordParseError
from pfstar.groups import (
    FiniteGroup,
    FreeGroup,
    ProductGroup,
    compose,
    dump_table_csv,
    invert,
    load_table_csv,
    parse_word,
)

from conftest import S3_PERMS, random_word


def test_free_reduction_examples(F2):
    assert str(parse_word("ab", F2) * parse_word("Ba", F2)) == "aa"
    assert (parse_word("a", F2) * parse_word("A", F2)).is_identity()
    assert str(invert(parse_word("aB", F2))) == "bA"
    assert invert(F2.identity()).is_identity()


def test_cyclic_table():
    z3 = FiniteGroup.cyclic(3)
    assert compose(z3.element(1), z3.element(2)).key == 0
    assert invert(z3.element(1)).key == 2


def test_s3_inverse_from_table(s3):
    i123 = S3_PERMS.index((1, 2, 0))
    i132 = S3_PERMS.index((2, 0, 1))
    assert invert(s3.element(i123)).key == i132


def test_parse_errors(F2):
    with pytest.raises(WordParseError) as err:
        parse_word("c", F2)
    assert err.value.position == 0
    with pytest.raises(WordParseError) as err:
        parse_word("ab?", F2)
    assert err.value.position == 2
    assert parse_word("aA", F2).is_identity()
    assert parse_word("aab", F2).key == (1, 1, 2)
    assert parse_word("1", F2).is_identity()


def test_descriptor_mismatch(F2):
    other = FreeGroup(3)
    with pytest.raises(DescriptorMismatch):
        compose(F2.generator(1), other.generator(1))
    # equal descriptors from different instances compose fine
    assert compose(FreeGroup(2).generator(1), F2.generator(1)).key == (1, 1)


def test_word_length_cap(F2):
    long_word = F2.element(tuple([1] * 4096))
    with pytest.raises(BudgetExceeded):
        compose(long_word, F2.generator(1))


def test_table_validation():
    with pytest.raises(ValueError):
        FiniteGroup([[0, 1], [1, 1]])  # not a group: second row repeats 1
    with pytest.raises(ValueError):
        FiniteGroup([[1, 0], [0, 1]])  # identity not index 0
    # a non-associative Latin square with identity at 0 must be rejected
    bad = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(ValueError, match="associative"):
        FiniteGroup(bad)


def test_table_csv_roundtrip(s3):
    text = dump_table_csv(s3)
    back = load_table_csv(text)
    assert back == s3
    assert np.array_equal(back.inverse_table, s3.inverse_table)


def test_product_group(F2, s3):
    prod = ProductGroup(F2, s3)
    x = prod.pair(parse_word("ab", F2), s3.element(2))
    y = prod.pair(parse_word("B", F2), s3.element(3))
    z = x * y
    assert z.key == ((1,), s3.table[2, 3])
    assert (x * x.inverse()).is_identity()


@pytest.mark.parametrize("build", ["free", "finite", "product"])
def test_associativity_random(build, F2, s3):
    rng = random.Random(7)
    if build == "free":
        group = F2
        sample = lambda: random_word(rng, F2)
    elif build == "finite":
        group = s3
        sample = lambda: group.element(rng.randrange(6))
    else:
        group = ProductGroup(FreeGroup(1), s3)
        sample = lambda: group.pair(random_word(rng, group.left, 4),
                                    group.right.element(rng.randrange(6)))
    for _ in range(1000):
        a, b, c = sample(), sample(), sample()
        assert (a * b) * c == a * (b * c)


def test_inverse_antihomomorphism(F2):
    rng = random.Random(11)
    for _ in range(500):
        a, b = random_word(rng, F2), random_word(rng, F2)
        assert invert(a * b) == invert(b) * invert(a)
        assert invert(invert(a)) == a
        assert (a * invert(a)).is_identity()


def test_canonical_hash_equality(F2):
    rng = random.Random(13)
    for _ in range(300):
        a = random_word(rng, F2)
        b = random_word(rng, F2)
        # rebuild a through a detour: a = (a b) b^{-1}
        rebuilt = (a * b) * invert(b)
        assert rebuilt == a and hash(rebuilt) == hash(a)
        if a.key != b.key:
            assert a != b


def test_powers(F2):
    a = F2.generator(1)
    assert (a ** 5).key == (1,) * 5
    assert (a ** 0).is_identity()
    assert (a ** -3) == invert(a) ** 3
