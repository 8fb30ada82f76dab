"""Spectral radius estimation from norm sequences of convolution powers.

The n-th root of any certified upper bound on ||f^(n)|| upper-bounds the
spectral radius (submultiplicativity). Certified lower bounds need more
structure and are tagged by the regime that produced them:

- ``c-star-selfadjoint-power``: at p = 2 a self-adjoint element satisfies
  ||f^(n)|| = ||f||^n in the operator algebra, so n-th roots of l2 lower
  bounds are lower bounds of the radius.
- ``p-monotone-selfadjoint``: the identity maps PF*_p -> PF*_2 are norm
  decreasing for p in [1,2], so the p=2 radius lower bound transfers to
  every smaller p.
- ``nonneg-moment-fekete``: for nonnegative f, the diagonal moments
  m_n = <lambda(f)^n d_H, d_H> are supermultiplicative; every m_n^(1/n)
  lower-bounds the radius.
- ``nonneg-mass-exact``: nonnegative f has ||f^(n)||_{PF*_1} equal to
  mass(f)^n exactly, pinning the p=1 radius.
- ``free-rapid-decay``: on a free group with trivial subgroup, the
  word-length rapid decay inequality ||lambda(g)|| <= sum_L (L+1)||g_L||_2
  upper-bounds l2 norms of powers, which is what separates non-amenable
  examples from the l1 mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import BoundContradiction, BudgetExceeded
from .groupring import DEFAULT_TERM_BUDGET, GroupRingElement, kernel_entry
from .groups import FreeGroup
from .opnorms import (
    ASSEMBLY_WORK_BUDGET,
    DEFAULT_VERTEX_BUDGET,
    assemble,
    grow_ball,
    norm_l2_lower,
    pf_star_bounds,
    radial_l2_lower,
    radial_profile,
)
from .subgroups import TrivialSubgroup


def default_power_schedule(n_max: int):
    """Doubling schedule capped at n_max: 1, 2, 4, 8, ..., n_max."""
    out = [1]
    while out[-1] * 2 < n_max:
        out.append(out[-1] * 2)
    if n_max > out[-1]:
        out.append(n_max)
    return out


@dataclass
class PowerRecord:
    n: int
    interval: NormInterval

    @property
    def root_lo(self) -> float:
        return self.interval.lo ** (1.0 / self.n) if self.interval.lo > 0 else 0.0

    @property
    def root_hi(self) -> float:
        if self.interval.hi == math.inf:
            return math.inf
        return self.interval.hi ** (1.0 / self.n)

    def to_dict(self):
        return {"n": self.n, "norm": self.interval.to_dict(),
                "root_lo": self.root_lo, "root_hi": self.root_hi}


@dataclass
class RadiusEstimate:
    """Certified [lo, hi] for the spectral radius in PF*_p."""

    p: float
    records: list
    lo: float
    hi: float
    methods: tuple = ()
    stabilized: bool = True
    assumptions: tuple = ()
    exact_value: Optional[Fraction] = None

    def __post_init__(self):
        if self.lo > self.hi * (1 + 1e-9):
            raise BoundContradiction(
                f"radius bounds inverted at p={self.p}: lo={self.lo} > hi={self.hi}"
            )
        self.lo = min(self.lo, self.hi)

    def to_dict(self):
        return {
            "p": "inf" if self.p == math.inf else self.p,
            "lo": self.lo,
            "hi": self.hi,
            "methods": list(self.methods),
            "stabilized": self.stabilized,
            "assumptions": list(self.assumptions),
            "exact": str(self.exact_value) if self.exact_value is not None else None,
            "records": [r.to_dict() for r in self.records],
        }


def _nonneg_normalized(f: GroupRingElement) -> Optional[GroupRingElement]:
    """f or -f when one of them has nonnegative real coefficients.

    Spectra are symmetric under the sign flip, so nonnegativity-based
    radius bounds apply to either representative.
    """
    if not f.is_real():
        return None
    if f.is_real_nonnegative():
        return f
    neg = f.scale(-1)
    if neg.is_real_nonnegative():
        return neg
    return None


def compute_powers(f: GroupRingElement, schedule, term_budget=DEFAULT_TERM_BUDGET):
    """Exact convolution powers along the schedule; stops at the budget.

    Returns (powers dict n -> element, truncated_at or None). Memoized on
    the element: certificates evaluate the same powers at several p.
    """
    key = ("powers", tuple(schedule), term_budget)
    if key in f._cache:
        return f._cache[key]

    powers = {}
    current = None
    current_n = 0
    truncated = None
    for n in schedule:
        try:
            if current is None:
                current = f.power(n, term_budget)
            else:
                step = n - current_n
                current = current.convolve(f.power(step, term_budget), term_budget) \
                    if step > 1 else current.convolve(f, term_budget)
            current_n = n
        except BudgetExceeded:
            truncated = current_n
            break
        powers[n] = current
    f._cache[key] = (powers, truncated)
    return powers, truncated


def power_sequence(f: GroupRingElement, group, subgroup, p, n_max: int = 12,
                   radius: int = 12, iterations: int = 200, rng_seed: int = 0,
                   margin: int = 2, generators=None,
                   vertex_budget=DEFAULT_VERTEX_BUDGET,
                   term_budget=DEFAULT_TERM_BUDGET,
                   schedule=None) -> list:
    """Per-n certified PF*_p intervals for the powers f^(n)."""
    records, _powers, _extras = _power_analysis(
        f, group, subgroup, p, n_max, radius, iterations, rng_seed, margin,
        generators, vertex_budget, term_budget, schedule)
    return records


def _ball_for(group, subgroup, radius, generators, vertex_budget, cache):
    key = radius
    if key not in cache:
        cache[key] = grow_ball(group, subgroup, radius, generators, vertex_budget)
    return cache[key]


def _power_radii(fn, subgroup, n, max_len, radius):
    """(analysis radius, enumerated-ball radius) for bounding f^(n).

    The analysis radius grows to the power's support reach; the ball that
    is actually enumerated vertex by vertex stays small whenever the
    radial compression carries the l2 weight at full depth anyway.
    """
    r_n = max(radius, n * max_len + 1)
    ball_r = min(r_n, 8) if radial_profile(fn, subgroup) is not None else r_n
    return r_n, ball_r


def _power_analysis(f, group, subgroup, p, n_max, radius, iterations, rng_seed,
                    margin, generators, vertex_budget, term_budget, schedule):
    if n_max < 1:
        raise ValueError("need n_max >= 1")
    schedule = schedule or default_power_schedule(n_max)
    powers, truncated_at = compute_powers(f, schedule, term_budget)
    max_len = max(1, f.max_word_length())
    ball_cache = {}
    records = []
    for n in sorted(powers):
        fn = powers[n]
        r_n, ball_r = _power_radii(fn, subgroup, n, max_len, radius)
        ball = None
        if p != 1 and len(fn) * 100 <= ASSEMBLY_WORK_BUDGET:
            # p = 1 resolves through exact endpoint scans without a ball
            ball, _hit = _ball_for(group, subgroup, ball_r, generators,
                                   vertex_budget, ball_cache)
        interval = pf_star_bounds(fn, group, subgroup, p, radius=r_n,
                                  iterations=iterations, rng_seed=rng_seed,
                                  margin=margin, generators=generators,
                                  vertex_budget=vertex_budget, ball=ball)
        records.append(PowerRecord(n, interval))
    extras = {"truncated_at": truncated_at, "powers": powers,
              "ball_cache": ball_cache, "max_len": max_len}
    return records, powers, extras


def _free_rd_upper(fn: GroupRingElement) -> float:
    """Rapid-decay bound sum_L (L+1)||fn|_L||_2 on a free group."""
    by_length = {}
    if fn._scalar_mode() == "int":
        for key, coeff in fn._data.items():
            length = len(key)
            c = coeff.re.numerator
            by_length[length] = by_length.get(length, 0) + c * c
    else:
        for key, coeff in fn._data.items():
            length = len(key)
            by_length[length] = by_length.get(length, Fraction(0)) + coeff.abs_squared()
    total = 0.0
    for length, sq in by_length.items():
        total += (length + 1) * math.sqrt(float(sq))
    return total


def radius_bounds(f: GroupRingElement, group, subgroup, p, n_max: int = 12,
                  radius: int = 12, iterations: int = 200, rng_seed: int = 0,
                  margin: int = 2, generators=None,
                  vertex_budget=DEFAULT_VERTEX_BUDGET,
                  term_budget=DEFAULT_TERM_BUDGET,
                  schedule=None) -> RadiusEstimate:
    """Certified bounds on r([f], PF*_p(G:H)) from the power sequence."""
    if not 1 <= p <= 2:
        raise ValueError(f"radius exponent must lie in [1, 2], got {p}")
    if not f:
        return RadiusEstimate(p, [], 0.0, 0.0, ("empty",), True, (), Fraction(0))

    records, powers, extras = _power_analysis(
        f, group, subgroup, p, n_max, radius, iterations, rng_seed, margin,
        generators, vertex_budget, term_budget, schedule)

    methods = []
    assumptions = []
    if extras["truncated_at"]:
        assumptions.append(f"power sequence truncated at n={extras['truncated_at']}")

    hi = math.inf
    for rec in records:
        hi = min(hi, rec.root_hi)
        if not rec.interval.stabilized:
            assumptions.append(
                f"norm bound at n={rec.n} relies on an unstabilized scan"
            )
    methods.append("root-of-power-norms")
    stabilized = all(rec.interval.stabilized for rec in records)

    self_adjoint = f.is_self_adjoint()
    nonneg = _nonneg_normalized(f)
    lo = 0.0

    # rapid decay sharpens the l2 upper bound on free groups
    if (p == 2 and self_adjoint and isinstance(group, FreeGroup)
            and isinstance(subgroup, TrivialSubgroup)):
        for n, fn in extras["powers"].items():
            bound = _free_rd_upper(fn) ** (1.0 / n)
            if bound < hi:
                hi = bound
        methods.append("free-rapid-decay")

    if self_adjoint:
        if p == 2:
            for rec in records:
                lo = max(lo, rec.root_lo)
            methods.append("c-star-selfadjoint-power")
        else:
            # radii are monotone nonincreasing in p on [1,2]; transfer the
            # certified p=2 lower bound
            l2_lo = _selfadjoint_l2_lo(
                f, group, subgroup, extras, radius, iterations, rng_seed,
                generators, vertex_budget)
            if l2_lo > lo:
                lo = l2_lo
                methods.append("p-monotone-selfadjoint")

    exact = None
    if nonneg is not None:
        if p == 1:
            mass = nonneg.l1_mass_exact()
            lo = max(lo, float(mass))
            hi = min(hi, float(mass))
            exact = mass
            methods.append("nonneg-mass-exact")
        else:
            moment = _moment_lower(nonneg, extras["powers"], subgroup)
            if moment > lo:
                lo = moment
                methods.append("nonneg-moment-fekete")

    estimate = RadiusEstimate(p, records, lo, hi, tuple(dict.fromkeys(methods)),
                              stabilized, tuple(assumptions), exact)
    return estimate


def _selfadjoint_l2_lo(f, group, subgroup, extras, radius, iterations, rng_seed,
                       generators, vertex_budget):
    """max_n (l2 lower of ||f^(n)||)^(1/n) for self-adjoint f."""
    best = 0.0
    ball_cache = extras["ball_cache"]
    for n, fn in extras["powers"].items():
        lo_n = 0.0
        r_n, ball_r = _power_radii(fn, subgroup, n, extras["max_len"], radius)
        radial = radial_l2_lower(fn, subgroup, r_n)
        if radial is not None:
            lo_n = radial.lo
        if len(fn) * 100 <= ASSEMBLY_WORK_BUDGET:
            ball, _hit = _ball_for(group, subgroup, ball_r, generators,
                                   vertex_budget, ball_cache)
            if len(fn) * len(ball.reps) <= ASSEMBLY_WORK_BUDGET:
                op = assemble(fn, ball)
                l2 = norm_l2_lower(op, iterations=iterations, rng_seed=rng_seed)
                lo_n = max(lo_n, l2.lo)
        if lo_n > 0:
            best = max(best, lo_n ** (1.0 / n))
    return best


def _moment_lower(nonneg: GroupRingElement, powers, subgroup) -> float:
    """max_n m_n^(1/n) with m_n the diagonal moment of the n-th power."""
    identity = nonneg.group.identity()
    best = 0.0
    for n, fn in powers.items():
        fn_abs = fn if fn.is_real_nonnegative() else fn.scale(-1)
        m = kernel_entry(fn_abs, identity, identity, subgroup)
        value = float(m.re)
        if value > 0:
            best = max(best, value ** (1.0 / n))
    return best


def radius_csv(estimates) -> str:
    """CSV rows p,n,lo,hi,root_lo,root_hi for a list of RadiusEstimates."""
    lines = ["p,n,lo,hi,root_lo,root_hi"]
    for est in estimates:
        p_str = "inf" if est.p == math.inf else repr(float(est.p))
        for rec in est.records:
            lines.append(
                f"{p_str},{rec.n},{rec.interval.lo!r},{rec.interval.hi!r},"
                f"{rec.root_lo!r},{rec.root_hi!r}"
            )
    return "\n".join(lines) + "\n"
