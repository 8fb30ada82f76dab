"""Subgroup membership backends.

Every supported subgroup kind has an exact decision procedure for
``x in H``; cosets, kernel tests and Schreier graphs are all built on top
of it. Left cosets xH are used throughout, with generators acting by left
translation.
"""

from __future__ import annotations

import numpy as np

from .errors import DescriptorMismatch
from .groups import (
    FiniteGroup,
    FreeGroup,
    GroupDescriptor,
    GroupElement,
    ProductGroup,
)


def group_order(group: GroupDescriptor):
    """Order of the group, or None when infinite."""
    if isinstance(group, FiniteGroup):
        return group.order
    if isinstance(group, ProductGroup):
        left = group_order(group.left)
        right = group_order(group.right)
        if left is None or right is None:
            return None
        return left * right
    return None


class SubgroupDescriptor:
    """Base class; concrete kinds implement ``contains``."""

    ambient: GroupDescriptor
    # True only when normality is known structurally, not merely possible
    known_normal = False

    def contains(self, x: GroupElement) -> bool:
        raise NotImplementedError

    def coset_index_if_finite(self):
        """[G:H] when finitely computable, else None."""
        return None


class TrivialSubgroup(SubgroupDescriptor):
    known_normal = True

    def __init__(self, ambient: GroupDescriptor):
        self.ambient = ambient

    def contains(self, x: GroupElement) -> bool:
        return x.is_identity()

    def coset_index_if_finite(self):
        return group_order(self.ambient)

    def __repr__(self):
        return "TrivialSubgroup()"


# ---------------------------------------------------------------------------
# Stallings automata for finitely generated subgroups of free groups
# ---------------------------------------------------------------------------


class StallingsAutomaton:
    """Folded core automaton of a finitely generated subgroup of F_r.

    ``transitions[(state, letter)] = state`` with signed letters; both
    orientations of every geometric edge are stored, so determinism of the
    map is equivalent to the graph being folded. Accepts exactly the
    reduced words lying in the subgroup.
    """

    def __init__(self, transitions, n_states, folded=True):
        self.transitions = transitions
        self.n_states = n_states
        self.base = 0
        self.folded = folded

    def accepts(self, word) -> bool:
        state = self.base
        for letter in word:
            state = self.transitions.get((state, letter))
            if state is None:
                return False
        return state == self.base

    def trace(self, word, start=0):
        """Follow a word as far as defined; returns (state, letters_consumed)."""
        state = start
        for i, letter in enumerate(word):
            nxt = self.transitions.get((state, letter))
            if nxt is None:
                return state, i
            state = nxt
        return state, len(word)

    def is_complete(self, rank: int) -> bool:
        for s in range(self.n_states):
            for g in range(1, rank + 1):
                if (s, g) not in self.transitions or (s, -g) not in self.transitions:
                    return False
        return True

    def degree(self, state: int) -> int:
        return sum(1 for (s, _l) in self.transitions if s == state)


def fold_stallings(generators) -> StallingsAutomaton:
    """Fold the wedge of generator loops into the core automaton.

    Iterative edge identification over a union-find of states; the result
    is independent of generator order up to the canonical base-first BFS
    renumbering applied at the end.
    """
    if generators:
        ambient = generators[0].group
        if not isinstance(ambient, FreeGroup):
            raise DescriptorMismatch("Stallings folding needs a free ambient group")
        for g in generators:
            if g.group != ambient:
                raise DescriptorMismatch("subgroup generators from different descriptors")

    parent = [0]

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def new_state():
        parent.append(len(parent))
        return len(parent) - 1

    # out[state] = {letter: target}; both orientations kept in sync
    out = [dict()]
    pending = []

    def add_edge(s, letter, t):
        pending.append((s, letter, t))
        while pending:
            a, l, b = pending.pop()
            a, b = find(a), find(b)
            _attach(a, l, b)
            _attach(b, -l, a)

    def _attach(a, l, b):
        existing = out[a].get(l)
        if existing is None:
            out[a][l] = b
            return
        existing = find(existing)
        if existing != b:
            _merge(existing, b)

    def _merge(x, y):
        # union by edge count, replaying the smaller state's edges
        if len(out[x]) < len(out[y]):
            x, y = y, x
        parent[y] = x
        edges = out[y]
        out[y] = {}
        for l, t in edges.items():
            pending.append((x, l, t))

    for gen in generators:
        word = gen.key
        if not word:
            continue
        state = 0
        for letter in word[:-1]:
            nxt = new_state()
            out.append({})  # keep out aligned with parent
            add_edge(state, letter, nxt)
            state = find(nxt)
        add_edge(state, word[-1], 0)

    # canonical renumbering: BFS from base in letter order
    base = find(0)
    order = {base: 0}
    queue = [base]
    rank = generators[0].group.rank if generators else 0
    letter_order = [l for g in range(1, rank + 1) for l in (g, -g)]
    while queue:
        s = queue.pop(0)
        for l in letter_order:
            t = out[s].get(l)
            if t is None:
                continue
            t = find(t)
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    transitions = {}
    for s, idx in order.items():
        for l, t in out[s].items():
            transitions[(idx, l)] = order[find(t)]
    return StallingsAutomaton(transitions, len(order))


class FreeGeneratedSubgroup(SubgroupDescriptor):
    """Finitely generated subgroup of a free group, via its folded automaton."""

    def __init__(self, generators, ambient=None):
        if not generators and ambient is None:
            raise ValueError("an empty generating set needs an explicit ambient group")
        self.ambient = ambient if ambient is not None else generators[0].group
        if not isinstance(self.ambient, FreeGroup):
            raise DescriptorMismatch("FreeGeneratedSubgroup needs a free ambient group")
        self.generators = list(generators)
        self.automaton = fold_stallings(self.generators)

    def contains(self, x: GroupElement) -> bool:
        return self.automaton.accepts(x.key)

    def coset_index_if_finite(self):
        if self.automaton.is_complete(self.ambient.rank):
            return self.automaton.n_states
        return None

    def __repr__(self):
        gens = ",".join(str(g) for g in self.generators)
        return f"FreeGeneratedSubgroup(<{gens}>)"


class HomKernelSubgroup(SubgroupDescriptor):
    """Kernel of the homomorphism sending each free generator to ``images[i]``."""

    known_normal = True

    def __init__(self, ambient: FreeGroup, target: GroupDescriptor, images):
        if not isinstance(ambient, FreeGroup):
            raise DescriptorMismatch("HomKernelSubgroup needs a free source group")
        if len(images) != ambient.rank:
            raise ValueError(
                f"need {ambient.rank} generator images, got {len(images)}"
            )
        for img in images:
            if img.group != target:
                raise DescriptorMismatch("image element outside the target descriptor")
        self.ambient = ambient
        self.target = target
        self.images = list(images)
        self._inverse_images = [img.inverse() for img in images]

    def image(self, x: GroupElement) -> GroupElement:
        if isinstance(self.target, FreeGroup):
            # one stack pass instead of repeated immutable concatenation
            stack = []
            for letter in x.key:
                img = self.images[letter - 1] if letter > 0 else self._inverse_images[-letter - 1]
                for t in img.key:
                    if stack and stack[-1] == -t:
                        stack.pop()
                    else:
                        stack.append(t)
            return GroupElement(self.target, tuple(stack))
        acc = self.target.identity()
        for letter in x.key:
            step = self.images[letter - 1] if letter > 0 else self._inverse_images[-letter - 1]
            acc = acc * step
        return acc

    def contains(self, x: GroupElement) -> bool:
        return self.image(x).is_identity()

    def coset_index_if_finite(self):
        # [G : ker] = size of the image subgroup
        if all(img.is_identity() for img in self.images):
            return 1
        if group_order(self.target) is None:
            return None
        closure = {self.target.identity()}
        frontier = list(closure)
        gens = self.images + self._inverse_images
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = x * g
                    if y not in closure:
                        closure.add(y)
                        nxt.append(y)
            frontier = nxt
        return len(closure)

    def __repr__(self):
        imgs = ",".join(str(i) for i in self.images)
        return f"HomKernelSubgroup(images=[{imgs}])"


class CosetTableSubgroup(SubgroupDescriptor):
    """Finite-index subgroup given by a closed left-coset table.

    ``table[c][k]`` is the coset of g·rep_c where g runs over the signed
    generator sequence [g1, g1⁻¹, g2, g2⁻¹, ...]; the base coset H has
    index 0. For a free ambient the generators are the standard ones; for
    a finite ambient an explicit generator list is required and membership
    is resolved by propagating cosets over the whole group.
    """

    def __init__(self, ambient: GroupDescriptor, table, generators=None):
        self.ambient = ambient
        self.table = np.asarray(table, dtype=np.int64)
        n, width = self.table.shape
        if self.table.min() < 0 or self.table.max() >= n:
            raise ValueError("coset table entries out of range")
        if isinstance(ambient, FreeGroup):
            if generators is None:
                generators = ambient.generators()
            if width != 2 * len(generators):
                raise ValueError("table width must be 2 * generator count")
            self.generators = list(generators)
            self._element_coset = None
        elif isinstance(ambient, FiniteGroup):
            if generators is None:
                raise ValueError("finite ambient needs an explicit generator list")
            if width != 2 * len(generators):
                raise ValueError("table width must be 2 * generator count")
            self.generators = list(generators)
            self._element_coset = self._propagate_cosets()
            self._coset_reps = np.full(n, -1, dtype=np.int64)
            for element in range(ambient.order - 1, -1, -1):
                self._coset_reps[self._element_coset[element]] = element
        else:
            raise DescriptorMismatch("coset tables support free or finite ambient groups")
        self._check_consistency()

    def _signed_generators(self):
        """[(element, column)] over [g1, g1⁻¹, g2, g2⁻¹, ...]."""
        out = []
        for k, g in enumerate(self.generators):
            out.append((g, 2 * k))
            out.append((g.inverse(), 2 * k + 1))
        return out

    def _propagate_cosets(self):
        order = self.ambient.order
        coset = np.full(order, -1, dtype=np.int64)
        coset[0] = 0
        frontier = [0]
        signed = self._signed_generators()
        while frontier:
            nxt = []
            for x in frontier:
                cx = coset[x]
                for g, col in signed:
                    y = self.ambient._mul(g.key, x)
                    cy = self.table[cx, col]
                    if coset[y] < 0:
                        coset[y] = cy
                        nxt.append(y)
                    elif coset[y] != cy:
                        raise ValueError("coset table inconsistent with the group table")
            frontier = nxt
        if (coset < 0).any():
            raise ValueError("coset-table generators do not generate the group")
        return coset

    def _check_consistency(self):
        # g and g^-1 columns must be mutually inverse permutations on cosets
        n = self.table.shape[0]
        for k in range(len(self.generators)):
            fwd = self.table[:, 2 * k]
            bwd = self.table[:, 2 * k + 1]
            if not np.array_equal(bwd[fwd], np.arange(n)):
                raise ValueError(f"generator {k} columns are not inverse to each other")

    def coset_of_element(self, x: GroupElement, start: int = 0) -> int:
        """Coset index of x·(coset ``start``); start 0 gives the coset of x."""
        if self._element_coset is not None:
            rep = int(self._coset_reps[start])
            return int(self._element_coset[self.ambient._mul(x.key, rep)])
        # free ambient: xH = l1·(l2···lk·H), so apply letters last-first
        c = start
        for letter in reversed(x.key):
            col = 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)
            c = int(self.table[c, col])
        return c

    def contains(self, x: GroupElement) -> bool:
        return self.coset_of_element(x) == 0

    def coset_index_if_finite(self):
        return int(self.table.shape[0])

    def __repr__(self):
        return f"CosetTableSubgroup(index={self.table.shape[0]})"


def build_coset_table(ambient: FiniteGroup, subgroup_elements, generators):
    """Enumerate left cosets of the subgroup generated by ``subgroup_elements``.

    Returns a CosetTableSubgroup over the given ambient generators. The
    subgroup is closed internally, so any generating subset works.
    """
    closure = {ambient.identity()}
    frontier = list(closure)
    sub_gens = list(subgroup_elements) + [s.inverse() for s in subgroup_elements]
    while frontier:
        nxt = []
        for x in frontier:
            for s in sub_gens:
                y = x * s
                if y not in closure:
                    closure.add(y)
                    nxt.append(y)
        frontier = nxt
    member = {x.key for x in closure}

    signed = []
    for k, g in enumerate(generators):
        signed.append((g, 2 * k))
        signed.append((g.inverse(), 2 * k + 1))

    # enumerate left cosets by left translation, representatives first-found
    reps = [ambient.identity()]
    table_rows = []
    i = 0
    while i < len(reps):
        rep = reps[i]
        row = [0] * (2 * len(generators))
        for g, col in signed:
            target = g * rep
            # target ∈ cH iff rep_c⁻¹·target ∈ H
            found = None
            for c, crep in enumerate(reps):
                if (crep.inverse() * target).key in member:
                    found = c
                    break
            if found is None:
                found = len(reps)
                reps.append(target)
            row[col] = found
        table_rows.append(row)
        i += 1
    return CosetTableSubgroup(ambient, table_rows, generators=generators)


def contains(subgroup: SubgroupDescriptor, x: GroupElement) -> bool:
    """Module-level alias for the membership test."""
    return subgroup.contains(x)


def coset_index_if_finite(subgroup: SubgroupDescriptor):
    return subgroup.coset_index_if_finite()
