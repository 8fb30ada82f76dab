"""Exact arithmetic in the complex group ring.

Elements are finitely supported maps from group elements to Gaussian
rationals. Convolution powers stay exact, which is what makes n-th-root
sequences of norms trustworthy downstream. Classes modulo the kernel of
the coset representation are represented by lifts plus the decision
procedure ``class_is_zero``; there is no canonical quotient datum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import BudgetExceeded, DescriptorMismatch, OutOfBall
from .groups import GroupDescriptor, GroupElement
from .rationals import QQi
from .schreier import DEFAULT_VERTEX_BUDGET, SchreierBall, partition_signature
from .subgroups import SubgroupDescriptor, TrivialSubgroup

DEFAULT_TERM_BUDGET = 10_000_000


class GroupRingElement:
    """Finitely supported function G -> Q(i) with exact coefficients.

    Instances are value-immutable once handed out; derived facts (masses,
    self-adjointness, radial profiles) are memoized since convolution
    powers get re-inspected by several bound routes.
    """

    __slots__ = ("group", "_data", "_cache")

    def __init__(self, group: GroupDescriptor, data=None):
        self.group = group
        self._data = {}
        self._cache = {}
        if data:
            for key, coeff in data.items():
                if coeff:
                    self._data[key] = coeff

    def _memo(self, name, compute):
        if name not in self._cache:
            self._cache[name] = compute()
        return self._cache[name]

    # construction -----------------------------------------------------------

    @classmethod
    def delta(cls, element: GroupElement, coeff=1) -> "GroupRingElement":
        c = coeff if isinstance(coeff, QQi) else QQi(coeff)
        return cls(element.group, {element.key: c})

    @classmethod
    def from_terms(cls, group: GroupDescriptor, terms) -> "GroupRingElement":
        """Sum of (element, coefficient) pairs."""
        out = cls(group)
        for element, coeff in terms:
            if element.group != group:
                raise DescriptorMismatch("term element outside the ring's group")
            c = coeff if isinstance(coeff, QQi) else QQi(coeff)
            out._accumulate(element.key, c)
        return out

    def _accumulate(self, key, coeff):
        total = self._data.get(key, QQi(0)) + coeff
        if total:
            self._data[key] = total
        else:
            self._data.pop(key, None)

    # inspection ---------------------------------------------------------------

    def __len__(self):
        return len(self._data)

    def __bool__(self):
        return bool(self._data)

    def support(self):
        return [GroupElement(self.group, k) for k in self._data]

    def terms(self):
        for k, c in self._data.items():
            yield GroupElement(self.group, k), c

    def coefficient(self, element: GroupElement) -> QQi:
        return self._data.get(element.key, QQi(0))

    def __eq__(self, other):
        return (
            isinstance(other, GroupRingElement)
            and self.group == other.group
            and self._data == other._data
        )

    def __repr__(self):
        items = ", ".join(
            f"{self.group._format(k)}:{c.literal()}" for k, c in list(self._data.items())[:8]
        )
        more = "" if len(self._data) <= 8 else f", ... ({len(self._data)} terms)"
        return f"GroupRingElement({items}{more})"

    # linear structure -----------------------------------------------------------

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check_same_ring(other)
        out = GroupRingElement(self.group, dict(self._data))
        for k, c in other._data.items():
            out._accumulate(k, c)
        return out

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check_same_ring(other)
        out = GroupRingElement(self.group, dict(self._data))
        for k, c in other._data.items():
            out._accumulate(k, -c)
        return out

    def scale(self, coeff) -> "GroupRingElement":
        c = coeff if isinstance(coeff, QQi) else QQi(coeff)
        if not c:
            return GroupRingElement(self.group)
        return GroupRingElement(self.group, {k: c * v for k, v in self._data.items()})

    def _check_same_ring(self, other):
        if not isinstance(other, GroupRingElement) or other.group != self.group:
            raise DescriptorMismatch("group-ring operands over different groups")

    # ring structure -----------------------------------------------------------

    def _scalar_mode(self):
        """'int' / 'fraction' / 'complex' view of the coefficients."""
        def compute():
            mode = "int"
            for c in self._data.values():
                if c.im:
                    return "complex"
                if c.re.denominator != 1:
                    mode = "fraction"
            return mode
        return self._memo("scalar_mode", compute)

    def convolve(self, other: "GroupRingElement",
                 term_budget=DEFAULT_TERM_BUDGET) -> "GroupRingElement":
        """(f*g)(x) = sum_y f(y) g(y^{-1}x), exact.

        Real (and especially integer) coefficients run on raw scalars;
        convolution powers dominate everything downstream, so this loop is
        deliberately lean.
        """
        self._check_same_ring(other)
        group = self.group
        mul = group._mul
        modes = {self._scalar_mode(), other._scalar_mode()}
        if "complex" in modes:
            left = dict(self._data)
            right = dict(other._data)
            wrap = lambda v: v
        elif "fraction" in modes:
            left = {k: c.re for k, c in self._data.items()}
            right = {k: c.re for k, c in other._data.items()}
            wrap = lambda v: QQi(v)
        else:
            left = {k: c.re.numerator for k, c in self._data.items()}
            right = {k: c.re.numerator for k, c in other._data.items()}
            wrap = lambda v: QQi(v)
        out = {}
        get = out.get
        for ykey, cy in left.items():
            for zkey, cz in right.items():
                key = mul(ykey, zkey)
                total = get(key, 0) + cy * cz
                if total:
                    out[key] = total
                else:
                    out.pop(key, None)
            if len(out) > term_budget:
                raise BudgetExceeded(
                    f"convolution support exceeded {term_budget} terms",
                    reached=len(out),
                )
        result = GroupRingElement(group)
        result._data = {k: wrap(v) for k, v in out.items() if v}
        return result

    def star(self) -> "GroupRingElement":
        """Involution f*(x) = conj(f(x^{-1}))."""
        inv = self.group._inv
        return GroupRingElement(
            self.group, {inv(k): c.conjugate() for k, c in self._data.items()}
        )

    def power(self, n: int, term_budget=DEFAULT_TERM_BUDGET) -> "GroupRingElement":
        """n-fold convolution power by binary exponentiation."""
        if n < 1:
            raise ValueError("power expects n >= 1")
        result = None
        base = self
        remaining = n
        while remaining:
            if remaining & 1:
                result = base if result is None else result.convolve(base, term_budget)
            remaining >>= 1
            if remaining:
                base = base.convolve(base, term_budget)
        return result

    def is_self_adjoint(self) -> bool:
        def compute():
            inv = self.group._inv
            for k, c in self._data.items():
                if self._data.get(inv(k)) != c.conjugate():
                    return False
            return True
        return self._memo("self_adjoint", compute)

    def is_real_nonnegative(self) -> bool:
        return self._memo(
            "nonneg", lambda: all(c.is_real_nonnegative() for c in self._data.values())
        )

    def is_real(self) -> bool:
        return self._memo("real", lambda: self._scalar_mode() != "complex")

    # masses -----------------------------------------------------------------

    def coefficient_sum(self) -> QQi:
        total = QQi(0)
        for c in self._data.values():
            total = total + c
        return total

    def l1_mass_exact(self) -> Fraction:
        """Sum of |coefficients| as an exact rational (real coefficients only)."""
        def compute():
            if self._scalar_mode() == "int":
                return Fraction(sum(abs(c.re.numerator) for c in self._data.values()))
            total = Fraction(0)
            for c in self._data.values():
                total += c.abs_exact()
            return total
        return self._memo("l1_mass", compute)

    def l1_mass_float(self) -> float:
        return sum(c.abs_float() for c in self._data.values())

    def l2_mass_squared(self) -> Fraction:
        """Sum of |coefficients|^2; exact for any Gaussian rationals."""
        def compute():
            if self._scalar_mode() == "int":
                return Fraction(sum(c.re.numerator ** 2 for c in self._data.values()))
            total = Fraction(0)
            for c in self._data.values():
                total += c.abs_squared()
            return total
        return self._memo("l2_mass_sq", compute)

    def max_word_length(self) -> int:
        def compute():
            if not self._data:
                return 0
            return max(GroupElement(self.group, k).word_length() for k in self._data)
        return self._memo("max_word_length", compute)


def convolve(f: GroupRingElement, g: GroupRingElement, **kw) -> GroupRingElement:
    return f.convolve(g, **kw)


def star(f: GroupRingElement) -> GroupRingElement:
    return f.star()


def power(f: GroupRingElement, n: int, **kw) -> GroupRingElement:
    return f.power(n, **kw)


# ---------------------------------------------------------------------------
# Coset-side objects
# ---------------------------------------------------------------------------


class CosetFunction:
    """Finitely supported function on the vertices of a Schreier ball."""

    __slots__ = ("ball", "values")

    def __init__(self, ball: SchreierBall, values):
        for v in values:
            if not 0 <= v < len(ball.reps):
                raise ValueError(f"vertex {v} not in the ball")
        self.ball = ball
        self.values = {v: c for v, c in values.items() if c}

    def coefficient(self, vertex: int) -> QQi:
        return self.values.get(vertex, QQi(0))

    def total(self) -> QQi:
        out = QQi(0)
        for c in self.values.values():
            out = out + c
        return out

    def abs_sum_exact(self) -> Fraction:
        total = Fraction(0)
        for c in self.values.values():
            total += c.abs_exact()
        return total

    def __len__(self):
        return len(self.values)


def tilde(f: GroupRingElement, ball: SchreierBall) -> CosetFunction:
    """Push f to the coset space: f~(xH) = sum_{h in H} f(xh).

    Support elements in the same left coset collapse onto one vertex;
    total mass is preserved exactly.
    """
    out = {}
    for element, coeff in f.terms():
        v = ball.find_coset(element)
        if v is None:
            raise OutOfBall(f"support element {element} lies outside the ball")
        total = out.get(v, QQi(0)) + coeff
        if total:
            out[v] = total
        else:
            out.pop(v, None)
    return CosetFunction(ball, out)


def kernel_entry(f: GroupRingElement, x: GroupElement, y: GroupElement,
                 subgroup: SubgroupDescriptor) -> QQi:
    """Matrix entry <lambda(f) d_yH, d_xH> = sum_{h in H} f(x h y^{-1}).

    The sum is finite: h ranges over x^{-1}·s·y for s in the support.
    Well-defined under x -> xh, y -> yh'.
    """
    x_inv = x.inverse()
    total = QQi(0)
    for s, coeff in f.terms():
        if subgroup.contains(x_inv * s * y):
            total = total + coeff
    return total


# ---------------------------------------------------------------------------
# The kernel test for classes [f]
# ---------------------------------------------------------------------------


@dataclass
class ClassZeroResult:
    """Outcome of the kernel membership test.

    ``exact`` marks verdicts needing no stabilization hypothesis (trivial,
    normal, or finite-index subgroups, or any nonzero verdict). A zero
    verdict with ``exact=False`` holds under the scan's stabilization
    hypothesis, recorded in ``assumptions``.
    """

    verdict: str                      # "zero" | "nonzero" | "unknown"
    witness: Optional[tuple] = None   # (x, y) with nonvanishing entry
    exact: bool = True
    stabilized_at: Optional[int] = None
    assumptions: tuple = ()


def _blocks_with_sums(f: GroupRingElement, subgroup, rep: GroupElement):
    """Partition f's support at the coset of rep; yield (leader, block sum)."""
    support = f.support()
    sig = partition_signature(subgroup, rep, support)
    for block in sig:
        total = QQi(0)
        for i in block:
            total = total + f.coefficient(support[i])
        yield support[block[0]], total


def class_is_zero(f: GroupRingElement, subgroup: SubgroupDescriptor,
                  margin: int = 2, generators=None,
                  vertex_budget=None, max_radius=None) -> ClassZeroResult:
    """Decide whether [f] = 0, i.e. every H-block sum of f vanishes.

    For each coset xH the support splits into blocks s ~ s' iff
    x⁻¹s's⁻¹x ∈ H; f lies in the kernel iff every block sum over every
    coset is zero. A nonzero verdict always carries a witness pair (x, y)
    whose kernel entry is the offending block sum.
    """
    if not f:
        return ClassZeroResult("zero")

    if isinstance(subgroup, TrivialSubgroup):
        element = f.support()[0]
        return ClassZeroResult("nonzero", witness=(element, element.group.identity()))

    def check_at(rep):
        for leader, total in _blocks_with_sums(f, subgroup, rep):
            if total:
                return (rep, leader.inverse() * rep), total
        return None, None

    if subgroup.known_normal:
        witness, _total = check_at(f.group.identity())
        if witness is not None:
            return ClassZeroResult("nonzero", witness=witness)
        return ClassZeroResult("zero")

    # enumerate cosets; finite index gives an exact verdict, otherwise a
    # margin-stabilized scan
    budget = vertex_budget if vertex_budget is not None else DEFAULT_VERTEX_BUDGET
    ball = SchreierBall(f.group, subgroup, generators=generators, vertex_budget=budget)
    seen = set()
    quiet = 0
    radius = 0
    while True:
        layer = ball._layers[-1]
        new_any = False
        for v in layer:
            rep = ball.reps[v]
            sig = partition_signature(subgroup, rep, f.support())
            if sig in seen:
                continue
            seen.add(sig)
            new_any = True
            witness, _total = check_at(rep)
            if witness is not None:
                return ClassZeroResult("nonzero", witness=witness)
        quiet = 0 if new_any else quiet + 1
        if ball.saturated:
            return ClassZeroResult("zero", stabilized_at=radius)
        if quiet >= margin:
            return ClassZeroResult(
                "zero",
                exact=False,
                stabilized_at=radius,
                assumptions=(f"signature scan stabilized for {margin} radii at R={radius}",),
            )
        if max_radius is not None and radius >= max_radius:
            return ClassZeroResult("unknown", exact=False, stabilized_at=radius)
        try:
            ball.expand_to(radius + 1)
        except BudgetExceeded:
            return ClassZeroResult("unknown", exact=False, stabilized_at=radius)
        radius += 1
