"""Schreier coset graphs: lazy balls, boundary tracking, partition scans.

Vertices are left cosets xH; the edge labelled by a signed generator g
joins xH to (g·x)H. Vertex 0 is the base coset H and representatives are
shortlex-least BFS words, so numbering is reproducible.
"""

from __future__ import annotations

from .errors import BudgetExceeded, OutOfBall
from .groups import FiniteGroup, FreeGroup, GroupDescriptor, GroupElement, ProductGroup
from .subgroups import (
    CosetTableSubgroup,
    HomKernelSubgroup,
    SubgroupDescriptor,
    TrivialSubgroup,
)

DEFAULT_VERTEX_BUDGET = 5_000_000


def default_generators(group: GroupDescriptor, subgroup: SubgroupDescriptor = None):
    """Generating set used to label Schreier edges.

    Free groups use their standard generators. Finite groups use the coset
    table's generators when available, otherwise every non-identity
    element. Products combine factor generators against the identity.
    """
    if isinstance(group, FreeGroup):
        return group.generators()
    if isinstance(group, FiniteGroup):
        if isinstance(subgroup, CosetTableSubgroup):
            return list(subgroup.generators)
        return [GroupElement(group, i) for i in range(1, group.order)]
    if isinstance(group, ProductGroup):
        left = default_generators(group.left)
        right = default_generators(group.right)
        el = group.left.identity()
        er = group.right.identity()
        return [group.pair(g, er) for g in left] + [group.pair(el, g) for g in right]
    raise ValueError(f"no default generators for {type(group).__name__}")


class _CosetTracker:
    """Incremental exact coset keys along BFS edges.

    xH = yH iff the keys agree: images under the hom for kernels, table
    states for coset tables, the element itself for the trivial subgroup.
    Stepping a stored state by one generator is O(1)-ish, which is what
    keeps deep balls (thousands of layers) linear instead of quadratic.
    """

    def __init__(self, subgroup, signed_generators):
        self.subgroup = subgroup
        if isinstance(subgroup, HomKernelSubgroup):
            self._kind = "image"
            self._steps = {s: subgroup.image(g) for s, g in signed_generators}
        elif isinstance(subgroup, CosetTableSubgroup):
            self._kind = "table"
            self._steps = {s: g for s, g in signed_generators}
        else:
            self._kind = "element"

    @staticmethod
    def for_subgroup(subgroup, signed_generators):
        if isinstance(subgroup, (HomKernelSubgroup, CosetTableSubgroup, TrivialSubgroup)):
            return _CosetTracker(subgroup, signed_generators)
        return None

    def initial(self):
        if self._kind == "image":
            return self.subgroup.target.identity()
        if self._kind == "table":
            return 0
        return None

    def step(self, state, signed_label, element):
        """State of the coset signed_label * (coset of state).

        ``element`` is the already-computed candidate representative, used
        by the element-keyed (trivial subgroup) mode.
        """
        if self._kind == "image":
            return self._steps[signed_label] * state
        if self._kind == "table":
            return self.subgroup.coset_of_element(self._steps[signed_label], start=state)
        return element

    def key(self, state, element):
        if self._kind == "image":
            return state.key
        if self._kind == "table":
            return state
        return element.key

    def key_of_element(self, x: GroupElement):
        if self._kind == "image":
            return self.subgroup.image(x).key
        if self._kind == "table":
            return self.subgroup.coset_of_element(x)
        return x.key


class SchreierBall:
    """Radius-R neighbourhood of the base coset, incrementally expandable."""

    def __init__(self, group, subgroup, generators=None, vertex_budget=DEFAULT_VERTEX_BUDGET):
        self.group = group
        self.subgroup = subgroup
        self.generators = list(generators) if generators is not None else \
            default_generators(group, subgroup)
        self.signed_generators = []
        for k, g in enumerate(self.generators):
            self.signed_generators.append((k + 1, g))
            self.signed_generators.append((-(k + 1), g.inverse()))
        self.vertex_budget = vertex_budget
        # edge labels coincide with free-group letters only for the standard
        # generator list; translate() walks edges only in that case
        self._standard_free_labels = (
            isinstance(group, FreeGroup) and self.generators == group.generators()
        )

        self.reps = [group.identity()]
        self.distance = [0]
        self.edges = {}  # (vertex, signed label) -> vertex
        self.radius = 0
        self._layers = [[0]]
        self._tracker = _CosetTracker.for_subgroup(subgroup, self.signed_generators)
        if self._tracker is not None:
            self._states = [self._tracker.initial()]
            self._key_index = {self._tracker.key(self._states[0], self.reps[0]): 0}
        else:
            self._states = None
            self._key_index = None
        self._saturated = False

    # -- queries ------------------------------------------------------------

    def __len__(self):
        return len(self.reps)

    @property
    def saturated(self) -> bool:
        """True when the whole coset space has been enumerated."""
        return self._saturated

    def interior_count(self) -> int:
        return sum(1 for v in range(len(self.reps)) if self.is_interior(v))

    def is_interior(self, v: int) -> bool:
        return all((v, s) in self.edges for s, _g in self.signed_generators)

    def edge(self, v: int, signed_label: int):
        return self.edges.get((v, signed_label))

    def find_coset(self, x: GroupElement):
        """Vertex index of xH if it lies in the ball, else None."""
        if self._tracker is not None:
            return self._key_index.get(self._tracker.key_of_element(x))
        for v, rep in enumerate(self.reps):
            if self.subgroup.contains(rep.inverse() * x):
                return v
        return None

    def coset_of(self, x: GroupElement) -> int:
        v = self.find_coset(x)
        if v is None:
            raise OutOfBall(
                f"coset of {x} is outside the radius-{self.radius} ball; expand it"
            )
        return v

    # -- growth ---------------------------------------------------------------

    def _membership_scan(self, x: GroupElement, new_layer):
        """Pairwise-membership fallback, restricted to the layers a BFS
        candidate can possibly match (distance >= radius-1)."""
        lo = self.radius - 1
        for v in range(len(self.reps)):
            if self.distance[v] < lo:
                continue
            if self.subgroup.contains(self.reps[v].inverse() * x):
                return v
        for v in new_layer:
            if self.subgroup.contains(self.reps[v].inverse() * x):
                return v
        return None

    def expand_to(self, target_radius: int):
        """Grow the ball to the target radius (no-op once saturated)."""
        while self.radius < target_radius and not self._saturated:
            self._expand_once()
        return self

    def _expand_once(self):
        frontier = self._layers[-1]
        new_layer = []
        tracker = self._tracker
        for v in frontier:
            rep_v = self.reps[v]
            for s, g in self.signed_generators:
                if (v, s) in self.edges:
                    continue
                x = g * rep_v
                if tracker is not None:
                    state = tracker.step(self._states[v], s, x)
                    key = tracker.key(state, x)
                    w = self._key_index.get(key)
                else:
                    state = key = None
                    w = self._membership_scan(x, new_layer)
                if w is None:
                    if len(self.reps) >= self.vertex_budget:
                        raise BudgetExceeded(
                            f"vertex budget {self.vertex_budget} exceeded at radius {self.radius}",
                            reached=self.radius,
                        )
                    w = len(self.reps)
                    self.reps.append(x)
                    self.distance.append(self.radius + 1)
                    new_layer.append(w)
                    if tracker is not None:
                        self._states.append(state)
                        self._key_index[key] = w
                self.edges[(v, s)] = w
                self.edges[(w, -s)] = v
        self.radius += 1
        self._layers.append(new_layer)
        if not new_layer:
            self._close_remaining_edges()
            self._saturated = True

    def _close_remaining_edges(self):
        # saturated graphs still need frontier-to-frontier edges resolved
        for v in range(len(self.reps)):
            for s, g in self.signed_generators:
                if (v, s) in self.edges:
                    continue
                w = self.find_coset(g * self.reps[v])
                if w is None:
                    raise RuntimeError("saturated ball is missing a coset")
                self.edges[(v, s)] = w
                self.edges[(w, -s)] = v

    def resolve_frontier_edges(self):
        """Resolve frontier edges whose targets already lie in the ball.

        Frontier edges to cosets outside the ball stay absent; callers see
        exactly which columns are boundary columns.
        """
        for v in self._layers[-1]:
            rep_v = self.reps[v]
            for s, g in self.signed_generators:
                if (v, s) in self.edges:
                    continue
                w = self.find_coset(g * rep_v)
                if w is not None:
                    self.edges[(v, s)] = w
                    self.edges[(w, -s)] = v

    # -- translation along support words -------------------------------------

    def translate(self, v: int, element: GroupElement):
        """Vertex of element·(coset v), walking edges when possible.

        Returns None when the walk leaves the ball. Free-group elements
        walk letter by letter; other elements fall back to a coset search.
        """
        if self._standard_free_labels:
            c = v
            for letter in reversed(element.key):
                c = self.edges.get((c, letter))
                if c is None:
                    return None
            return c
        return self.find_coset(element * self.reps[v])

    def dump_edges(self) -> str:
        """Edge-list text: '# radius=R' header then 'v g w' lines."""
        lines = [f"# radius={self.radius}"]
        for (v, s), w in sorted(self.edges.items()):
            if s > 0:
                lines.append(f"{v} {s} {w}")
        return "\n".join(lines) + "\n"


def expand_ball(group, subgroup, radius, generators=None,
                vertex_budget=DEFAULT_VERTEX_BUDGET) -> SchreierBall:
    """BFS ball of the given radius around the base coset."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    ball = SchreierBall(group, subgroup, generators=generators, vertex_budget=vertex_budget)
    ball.expand_to(radius)
    ball.resolve_frontier_edges()
    return ball


def coset_of(ball: SchreierBall, x: GroupElement) -> int:
    return ball.coset_of(x)


# ---------------------------------------------------------------------------
# Partition signatures
# ---------------------------------------------------------------------------


def partition_signature(subgroup, rep: GroupElement, probe):
    """Canonical partition of the probe set at the coset of ``rep``.

    Probe elements s, s' fall in one block iff rep⁻¹·s'·s⁻¹·rep ∈ H; the
    relation only depends on the coset. Blocks are sorted index tuples.
    """
    rep_inv = rep.inverse()
    blocks = []
    leaders_inv = []
    for i, s in enumerate(probe):
        placed = False
        for b, linv in enumerate(leaders_inv):
            if subgroup.contains(rep_inv * s * linv * rep):
                blocks[b].append(i)
                placed = True
                break
        if not placed:
            blocks.append([i])
            leaders_inv.append(s.inverse())
    return tuple(tuple(b) for b in blocks)


def signature_scan(group, subgroup, probe, margin=2, generators=None,
                   vertex_budget=DEFAULT_VERTEX_BUDGET, max_radius=None):
    """Collect partition signatures of the probe over cosets of growing radius.

    Returns (signatures, stabilized_at, stabilized, exhaustive). stabilized
    means ``margin`` consecutive radius increments added nothing new;
    exhaustive means the coset space itself was fully enumerated, making
    the signature set complete without any hypothesis.
    """
    if not probe:
        raise ValueError("probe must be nonempty")
    if margin < 1:
        raise ValueError("margin must be >= 1")
    ball = SchreierBall(group, subgroup, generators=generators, vertex_budget=vertex_budget)
    signatures = {partition_signature(subgroup, ball.reps[0], probe)}
    quiet = 0
    radius = 0
    while True:
        if ball.saturated:
            return signatures, radius, True, True
        if quiet >= margin:
            return signatures, radius, True, False
        if max_radius is not None and radius >= max_radius:
            return signatures, radius, False, False
        try:
            ball.expand_to(radius + 1)
        except BudgetExceeded:
            return signatures, radius, False, False
        radius += 1
        new_any = False
        for v in ball._layers[-1]:
            sig = partition_signature(subgroup, ball.reps[v], probe)
            if sig not in signatures:
                signatures.add(sig)
                new_any = True
        quiet = 0 if new_any else quiet + 1
