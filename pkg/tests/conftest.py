"""Shared fixtures and independent oracles for the test suite.

Oracles are deliberately written from scratch (permutation composition,
dense matrix norms, closed-form eigenvalues) so they never share code
paths with the machinery they check.
"""

import math
import random

import numpy as np
import pytest

from pfstar.groups import FiniteGroup, FreeGroup, GroupElement, parse_word
from pfstar.groupring import GroupRingElement
from pfstar.rationals import QQi
from pfstar.subgroups import (
    CosetTableSubgroup,
    FreeGeneratedSubgroup,
    HomKernelSubgroup,
    TrivialSubgroup,
    build_coset_table,
)


@pytest.fixture(scope="session")
def F2():
    return FreeGroup(2)


@pytest.fixture(scope="session")
def Z():
    return FreeGroup(1)


@pytest.fixture(scope="session")
def z_kernel(F2, Z):
    """ker(a -> 1, b -> 0) of the exponent-sum map onto Z."""
    return HomKernelSubgroup(F2, Z, [Z.generator(1), Z.identity()])


# --- S3 assembled by hand from permutation composition ----------------------

S3_PERMS = [
    (0, 1, 2),   # e            -> index 0
    (1, 0, 2),   # (12)
    (0, 2, 1),   # (23)
    (2, 1, 0),   # (13)
    (1, 2, 0),   # (123): 0->1->2->0
    (2, 0, 1),   # (132)
]


def _compose_perm(p, q):
    """p then q, matching the group law used by the package tables."""
    return tuple(q[p[i]] for i in range(len(p)))


@pytest.fixture(scope="session")
def s3():
    n = len(S3_PERMS)
    index = {perm: i for i, perm in enumerate(S3_PERMS)}
    table = [[index[_compose_perm(S3_PERMS[i], S3_PERMS[j])] for j in range(n)]
             for i in range(n)]
    group = FiniteGroup(table)
    group.permutations = list(S3_PERMS)
    return group


@pytest.fixture(scope="session")
def s3_mod_12(s3):
    """Coset table for the order-2 subgroup generated by (12)."""
    i12 = S3_PERMS.index((1, 0, 2))
    i123 = S3_PERMS.index((1, 2, 0))
    return build_coset_table(s3, [s3.element(i12)],
                             [s3.element(i12), s3.element(i123)])


def qqi(re, im=0):
    return QQi(re, im)


def element_of(group, terms):
    """terms: list of (word_or_element, coeff)."""
    pairs = []
    for w, c in terms:
        if isinstance(w, str):
            w = parse_word(w, group)
        pairs.append((w, c))
    return GroupRingElement.from_terms(group, pairs)


def random_word(rng: random.Random, group: FreeGroup, max_len=6) -> GroupElement:
    letters = []
    for _ in range(rng.randint(0, max_len)):
        g = rng.randint(1, group.rank)
        letters.append(g if rng.random() < 0.5 else -g)
    return group.element(tuple(letters))


def random_element(rng: random.Random, group, candidates, max_terms=4,
                   complex_coeffs=False):
    """Random group-ring element supported on the given candidates."""
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        c_re = rng.randint(-3, 3)
        c_im = rng.randint(-2, 2) if complex_coeffs else 0
        if c_re == 0 and c_im == 0:
            c_re = 1
        terms.append((rng.choice(candidates), QQi(c_re, c_im)))
    return GroupRingElement.from_terms(group, terms)


def self_adjoint_random(rng, group, candidates, max_terms=3):
    f = random_element(rng, group, candidates, max_terms)
    return f + f.star()


# --- dense norm oracles ------------------------------------------------------


def dense_p_norm_oracle(matrix: np.ndarray, p, restarts=50, iters=300, seed=1234):
    """Matrix p->p operator norm of a dense matrix.

    Exact formulas at p in {1, 2, inf}; elsewhere projected dual-ascent
    maximization of ||Ax||_p / ||x||_p from many restarts, an intentionally
    independent implementation of the same optimization problem.
    """
    a = np.asarray(matrix)
    if p == 1:
        return float(np.abs(a).sum(axis=0).max())
    if p == math.inf:
        return float(np.abs(a).sum(axis=1).max())
    if p == 2:
        return float(np.linalg.svd(a, compute_uv=False)[0])
    q = p / (p - 1)
    rng = np.random.default_rng(seed)
    n = a.shape[1]
    best = 0.0
    starts = [np.ones(n)] + [rng.standard_normal(n) for _ in range(restarts - 1)]
    for x in starts:
        x = x / np.linalg.norm(x, p)
        for _ in range(iters):
            y = a @ x
            best = max(best, float(np.linalg.norm(y, p)))
            g = np.sign(y) * np.abs(y) ** (p - 1)
            z = a.T @ g
            nz = np.linalg.norm(z, q)
            if nz == 0:
                break
            x_new = np.sign(z) * np.abs(z) ** (q - 1)
            x_new /= np.linalg.norm(x_new, p)
            if np.allclose(x_new, x, atol=1e-14):
                x = x_new
                break
            x = x_new
        best = max(best, float(np.linalg.norm(a @ x, p)))
    return best


def tree_radial_top_eigenvalue(branching_plus_one: int, depth: int) -> float:
    """Top eigenvalue of the depth-truncated regular tree's adjacency, via
    the closed-form radial tridiagonal (off-diagonals sqrt(deg), sqrt(deg-1))."""
    q = branching_plus_one - 1
    off = [math.sqrt(branching_plus_one)] + [math.sqrt(q)] * (depth - 1)
    j = np.diag(off, 1) + np.diag(off, -1)
    return float(np.linalg.eigvalsh(j).max())


def path_top_eigenvalue(n_vertices: int) -> float:
    """Top adjacency eigenvalue of the path graph: 2 cos(pi/(n+1))."""
    return 2.0 * math.cos(math.pi / (n_vertices + 1))


def tree_return_counts(rank: int, steps: int):
    """Closed-walk counts at the root of the 2r-regular tree by the radial
    step recursion; the independent check for group-ring return masses."""
    deg = 2 * rank
    c = {0: 1}
    out = [dict(c)]
    for _ in range(steps):
        nxt = {}
        max_l = max(c) + 1
        for L in range(max_l + 1):
            if L == 0:
                val = deg * c.get(1, 0)
            else:
                val = c.get(L - 1, 0) + (deg - 1) * c.get(L + 1, 0)
            if val:
                nxt[L] = val
        c = nxt
        out.append(dict(c))
    return [layer.get(0, 0) for layer in out]
