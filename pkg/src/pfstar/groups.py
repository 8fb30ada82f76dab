"""Group descriptors and exact element arithmetic with canonical forms.

Three descriptor kinds are supported: free groups (elements are freely
reduced words), finite groups given by an explicit multiplication table
(elements are row indices, identity is index 0), and direct products of
two descriptors (elements are componentwise canonical pairs). Canonical
forms are unique, so ``==`` and ``hash`` decide group equality.
"""

from __future__ import annotations

import numpy as np

from .errors import BudgetExceeded, DescriptorMismatch, WordParseError

WORD_LENGTH_CAP = 4096


class GroupDescriptor:
    """Common interface for the three descriptor kinds."""

    def identity(self) -> "GroupElement":
        return GroupElement(self, self._identity_key())

    def element(self, key) -> "GroupElement":
        return GroupElement(self, self._canonical(key))

    # key-level operations implemented by subclasses
    def _identity_key(self):
        raise NotImplementedError

    def _canonical(self, key):
        raise NotImplementedError

    def _mul(self, a, b):
        raise NotImplementedError

    def _inv(self, a):
        raise NotImplementedError

    def _format(self, key) -> str:
        raise NotImplementedError


class FreeGroup(GroupDescriptor):
    """Free group of given rank; elements are reduced words.

    Words are tuples of signed 1-based generator indices: ``a`` is ``(1,)``,
    ``a⁻¹`` is ``(-1,)``, ``b`` is ``(2,)``.
    """

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError(f"free rank must be >= 1, got {rank}")
        self.rank = int(rank)

    def __eq__(self, other):
        return isinstance(other, FreeGroup) and other.rank == self.rank

    def __hash__(self):
        return hash(("free", self.rank))

    def __repr__(self):
        return f"FreeGroup({self.rank})"

    def generator(self, index: int) -> "GroupElement":
        """1-based generator; negative index gives the inverse."""
        if not 1 <= abs(index) <= self.rank:
            raise ValueError(f"generator index {index} out of range for rank {self.rank}")
        return GroupElement(self, (index,))

    def generators(self):
        return [self.generator(i) for i in range(1, self.rank + 1)]

    def _identity_key(self):
        return ()

    def _canonical(self, key):
        return reduce_word(tuple(key))

    def _mul(self, a, b):
        # a and b are reduced; cancellation only happens at the seam
        i = len(a)
        j = 0
        while i > 0 and j < len(b) and a[i - 1] == -b[j]:
            i -= 1
            j += 1
        word = a[:i] + b[j:]
        if len(word) > WORD_LENGTH_CAP:
            raise BudgetExceeded(
                f"word length {len(word)} exceeds cap {WORD_LENGTH_CAP}",
                reached=len(word),
            )
        return word

    def _inv(self, a):
        return tuple(-x for x in reversed(a))

    def _format(self, key):
        if not key:
            return "1"
        return "".join(
            chr(ord("a") + x - 1) if x > 0 else chr(ord("A") - x - 1) for x in key
        )


def reduce_word(word):
    """Freely reduce a tuple of signed generator indices."""
    out = []
    for x in word:
        if x == 0:
            raise ValueError("0 is not a valid signed generator index")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    if len(out) > WORD_LENGTH_CAP:
        raise BudgetExceeded(
            f"word length {len(out)} exceeds cap {WORD_LENGTH_CAP}", reached=len(out)
        )
    return tuple(out)


class FiniteGroup(GroupDescriptor):
    """Finite group given by a multiplication table of element indices.

    ``table[i][j]`` is the index of the product of elements i and j; the
    identity must be index 0. The table is validated as a genuine group
    (identity row/column, two-sided inverses, associativity) for orders
    up to 512.
    """

    ASSOC_CHECK_LIMIT = 512

    def __init__(self, table, inverse=None):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("multiplication table must be square")
        n = t.shape[0]
        if n < 1 or t.min() < 0 or t.max() >= n:
            raise ValueError("table entries must be indices in [0, order)")
        if not (np.array_equal(t[0], np.arange(n)) and np.array_equal(t[:, 0], np.arange(n))):
            raise ValueError("identity must be index 0")
        inv = self._derive_inverse(t) if inverse is None else np.asarray(inverse, dtype=np.int64)
        if inv.shape != (n,):
            raise ValueError("inverse array has wrong length")
        if not (np.array_equal(t[np.arange(n), inv], np.zeros(n, dtype=np.int64))
                and np.array_equal(t[inv, np.arange(n)], np.zeros(n, dtype=np.int64))):
            raise ValueError("inverse array inconsistent with table")
        if n <= self.ASSOC_CHECK_LIMIT:
            self._check_associative(t)
        self.order = int(n)
        self.table = t
        self.inverse_table = inv
        self._hash = hash(("finite", t.tobytes()))

    @staticmethod
    def _derive_inverse(t):
        n = t.shape[0]
        rows, cols = np.nonzero(t == 0)
        inv = np.full(n, -1, dtype=np.int64)
        inv[rows] = cols
        if (inv < 0).any():
            raise ValueError("some element has no right inverse")
        return inv

    @staticmethod
    def _check_associative(t):
        n = t.shape[0]
        # (ab)c vs a(bc), chunked over a to bound memory at ~n^2 per chunk
        bc = t[:, :]  # alias for clarity
        for a in range(n):
            left = t[t[a]]          # left[b, c] = (ab)c
            right = t[a][bc]        # right[b, c] = a(bc)
            if not np.array_equal(left, right):
                b, c = np.argwhere(left != right)[0]
                raise ValueError(f"table not associative at triple ({a}, {b}, {c})")

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self._hash == other._hash \
            and np.array_equal(self.table, other.table)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def elements(self):
        return [GroupElement(self, i) for i in range(self.order)]

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        idx = np.arange(n)
        return cls((idx[:, None] + idx[None, :]) % n)

    @classmethod
    def from_permutations(cls, perms) -> "FiniteGroup":
        """Build the table of the group generated by permutation tuples.

        Permutations map positions to values, composed left-to-right as
        p*q : i -> q[p[i]]. The identity permutation gets index 0.
        """
        degree = len(perms[0])
        ident = tuple(range(degree))
        elems = [ident]
        seen = {ident: 0}
        frontier = [ident]
        gens = [tuple(p) for p in perms]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = tuple(g[p[i]] for i in range(degree))
                    if q not in seen:
                        seen[q] = len(elems)
                        elems.append(q)
                        nxt.append(q)
            frontier = nxt
        n = len(elems)
        table = np.zeros((n, n), dtype=np.int64)
        for i, p in enumerate(elems):
            for j, q in enumerate(elems):
                table[i, j] = seen[tuple(q[p[k]] for k in range(degree))]
        group = cls(table)
        group.permutations = elems
        return group

    def _identity_key(self):
        return 0

    def _canonical(self, key):
        k = int(key)
        if not 0 <= k < self.order:
            raise ValueError(f"element index {k} out of range for order {self.order}")
        return k

    def _mul(self, a, b):
        return int(self.table[a, b])

    def _inv(self, a):
        return int(self.inverse_table[a])

    def _format(self, key):
        return str(key)


class ProductGroup(GroupDescriptor):
    """Direct product of two descriptors; elements are canonical pairs."""

    def __init__(self, left: GroupDescriptor, right: GroupDescriptor):
        self.left = left
        self.right = right

    def __eq__(self, other):
        return (
            isinstance(other, ProductGroup)
            and self.left == other.left
            and self.right == other.right
        )

    def __hash__(self):
        return hash(("product", self.left, self.right))

    def __repr__(self):
        return f"ProductGroup({self.left!r}, {self.right!r})"

    def pair(self, a: "GroupElement", b: "GroupElement") -> "GroupElement":
        if a.group != self.left or b.group != self.right:
            raise DescriptorMismatch("pair components belong to the wrong factors")
        return GroupElement(self, (a.key, b.key))

    def _identity_key(self):
        return (self.left._identity_key(), self.right._identity_key())

    def _canonical(self, key):
        a, b = key
        return (self.left._canonical(a), self.right._canonical(b))

    def _mul(self, a, b):
        return (self.left._mul(a[0], b[0]), self.right._mul(a[1], b[1]))

    def _inv(self, a):
        return (self.left._inv(a[0]), self.right._inv(a[1]))

    def _format(self, key):
        return f"({self.left._format(key[0])},{self.right._format(key[1])})"


class GroupElement:
    """Canonical, hashable element of a described group."""

    __slots__ = ("group", "key")

    def __init__(self, group: GroupDescriptor, key):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "key", key)

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if not isinstance(other, GroupElement):
            return NotImplemented
        if self.group != other.group:
            raise DescriptorMismatch("cannot compose elements of different descriptors")
        return GroupElement(self.group, self.group._mul(self.key, other.key))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.group, self.group._inv(self.key))

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.group.identity()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def is_identity(self) -> bool:
        return self.key == self.group._identity_key()

    def word_length(self) -> int:
        """Letter count for free elements, 0/1 for finite, sum for pairs."""
        g = self.group
        if isinstance(g, FreeGroup):
            return len(self.key)
        if isinstance(g, FiniteGroup):
            return 0 if self.key == 0 else 1
        left = GroupElement(g.left, self.key[0]).word_length()
        right = GroupElement(g.right, self.key[1]).word_length()
        return left + right

    def __eq__(self, other):
        return (
            isinstance(other, GroupElement)
            and self.key == other.key
            and self.group == other.group
        )

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<{self.group._format(self.key)}>"

    def __str__(self):
        return self.group._format(self.key)


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """Canonical form of the product ab."""
    return a * b


def invert(a: GroupElement) -> GroupElement:
    return a.inverse()


def parse_word(text: str, group: GroupDescriptor) -> GroupElement:
    """Parse a word literal: a..z generators, A..Z inverses, ``1`` identity.

    For finite descriptors, decimal element indices are accepted instead.
    """
    if isinstance(group, FiniteGroup):
        s = text.strip()
        if not s.isdigit():
            raise WordParseError(f"expected an element index for a finite group, got {text!r}", 0)
        idx = int(s)
        if idx >= group.order:
            raise WordParseError(f"element index {idx} out of range (order {group.order})", 0)
        return group.element(idx)
    if not isinstance(group, FreeGroup):
        raise WordParseError(f"word literals are not supported for {type(group).__name__}", 0)
    letters = []
    for pos, ch in enumerate(text):
        if ch.isspace():
            continue
        if ch == "1":
            continue
        if "a" <= ch <= "z":
            idx = ord(ch) - ord("a") + 1
        elif "A" <= ch <= "Z":
            idx = -(ord(ch) - ord("A") + 1)
        else:
            raise WordParseError(f"unknown letter {ch!r}", pos)
        if abs(idx) > group.rank:
            raise WordParseError(f"generator {ch!r} exceeds rank {group.rank}", pos)
        letters.append(idx)
    return GroupElement(group, reduce_word(letters))


def format_word(element: GroupElement) -> str:
    return str(element)


def load_table_csv(text: str) -> FiniteGroup:
    """Parse the finite-group table format: ``order=N`` then N index rows.

    An optional ``inverse=`` row may follow the table.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("order="):
        raise ValueError("finite table file must start with 'order=N'")
    n = int(lines[0].split("=", 1)[1])
    if len(lines) < n + 1:
        raise ValueError(f"expected {n} table rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1 : n + 1]:
        rows.append([int(tok) for tok in ln.replace(",", " ").split()])
    inverse = None
    for ln in lines[n + 1 :]:
        if ln.startswith("inverse="):
            inverse = [int(tok) for tok in ln.split("=", 1)[1].replace(",", " ").split()]
    return FiniteGroup(rows, inverse=inverse)


def dump_table_csv(group: FiniteGroup) -> str:
    lines = [f"order={group.order}"]
    for row in group.table:
        lines.append(",".join(str(int(x)) for x in row))
    lines.append("inverse=" + ",".join(str(int(x)) for x in group.inverse_table))
    return "\n".join(lines) + "\n"
