"""Certified two-sided bounds for the coset-representation operator norms.

Lower bounds only ever evaluate the operator on vectors whose support
translates stay inside the enumerated ball, so every reported ``lo`` is a
genuine Rayleigh-type value of the full (usually infinite) operator, not
a heuristic. Upper bounds come from exact endpoint norms, interpolation
between exponents, and exact dense norms once the coset space saturates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import BudgetExceeded, PfstarError
from .groups import FreeGroup, GroupElement
from .groupring import DEFAULT_TERM_BUDGET, GroupRingElement
from .rationals import QQi
from .schreier import (
    DEFAULT_VERTEX_BUDGET,
    SchreierBall,
    partition_signature,
)
from .subgroups import SubgroupDescriptor, TrivialSubgroup

FLOAT_SLACK = 1e-12
ASSEMBLY_WORK_BUDGET = 50_000_000  # support size x ball size guard


def conjugate_exponent(p):
    if p == 1:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class NormInterval:
    """Certified [lo, hi] for an operator norm, with provenance."""

    lo: float
    hi: float
    p: float
    methods: tuple = ()
    radius: Optional[int] = None
    stabilized: bool = True
    exact_value: Optional[Fraction] = None  # set when lo = hi exactly rational

    def __post_init__(self):
        if self.lo > self.hi * (1 + FLOAT_SLACK) + FLOAT_SLACK:
            raise PfstarError(
                f"norm interval inverted: lo={self.lo} > hi={self.hi} (p={self.p})"
            )

    @property
    def conjugate_q(self):
        return conjugate_exponent(self.p)

    @property
    def width(self):
        return self.hi - self.lo

    def tagged(self, *tags) -> "NormInterval":
        return NormInterval(self.lo, self.hi, self.p, self.methods + tuple(tags),
                            self.radius, self.stabilized, self.exact_value)

    def to_dict(self):
        return {
            "lo": self.lo,
            "hi": self.hi,
            "p": "inf" if self.p == math.inf else self.p,
            "methods": list(self.methods),
            "radius": self.radius,
            "stabilized": self.stabilized,
            "exact": str(self.exact_value) if self.exact_value is not None else None,
        }


def interval_max(a: NormInterval, b: NormInterval) -> NormInterval:
    """Interval enclosure of max(x, y) for x in a, y in b."""
    exact = None
    if a.exact_value is not None and b.exact_value is not None:
        exact = max(a.exact_value, b.exact_value)
    return NormInterval(
        lo=max(a.lo, b.lo),
        hi=max(a.hi, b.hi),
        p=a.p,
        methods=tuple(dict.fromkeys(a.methods + b.methods)),
        radius=a.radius if a.radius is not None else b.radius,
        stabilized=a.stabilized and b.stabilized,
        exact_value=exact,
    )


# ---------------------------------------------------------------------------
# Truncated operators on Schreier balls
# ---------------------------------------------------------------------------


@dataclass
class TruncatedOperator:
    """Sparse compression of lambda(f) onto a Schreier ball.

    Interior columns hold the complete infinite column; boundary columns
    lost at least one translate and are never used for certified bounds.
    """

    ball: SchreierBall
    matrix: sp.csr_matrix
    interior_columns: np.ndarray
    is_real: bool
    element: GroupRingElement

    @property
    def saturated(self) -> bool:
        return self.ball.saturated

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def _effective_support(f: GroupRingElement, ball: SchreierBall):
    """(element, coefficient) pairs driving the coset action.

    For a normal subgroup the action of s factors through its coset, so
    support elements sharing a coset are presummed onto the shortest
    representative. This is what keeps powers with huge supports but tiny
    quotient images assemblable.
    """
    support = [(GroupElement(f.group, k), c) for k, c in f._data.items()]
    sub = ball.subgroup
    if (not sub.known_normal or isinstance(sub, TrivialSubgroup)
            or ball._tracker is None or len(support) <= 8):
        return support
    classes = {}
    for s, coeff in support:
        key = ball._tracker.key_of_element(s)
        if key in classes:
            rep, total = classes[key]
            if s.word_length() < rep.word_length():
                rep = s
            classes[key] = (rep, total + coeff)
        else:
            classes[key] = (s, coeff)
    return [(rep, total) for rep, total in classes.values() if total]


def _signed_permutations(ball: SchreierBall):
    """Per signed-label vertex maps as numpy arrays; -1 marks out-of-ball."""
    n = len(ball.reps)
    perms = {s: np.full(n, -1, dtype=np.int64) for s, _g in ball.signed_generators}
    for (v, s), w in ball.edges.items():
        perms[s][v] = w
    return perms


def assemble(f: GroupRingElement, ball: SchreierBall) -> TruncatedOperator:
    """Sparse matrix of lambda(f) on the ball; entry (x, y) is the kernel
    entry sum_h f(x h y^{-1}), realized by translating column cosets by
    support elements."""
    n = len(ball.reps)
    support = _effective_support(f, ball)
    is_real = f.is_real()
    rows_parts, cols_parts, vals_parts = [], [], []
    ok = np.ones(n, dtype=bool)
    base_cols = np.arange(n, dtype=np.int64)

    if ball._standard_free_labels:
        perms = _signed_permutations(ball)
        for s, coeff in support:
            rows = base_cols
            for letter in reversed(s.key):
                valid = rows >= 0
                stepped = np.full(n, -1, dtype=np.int64)
                stepped[valid] = perms[letter][rows[valid]]
                rows = stepped
            valid = rows >= 0
            ok &= valid
            rows_parts.append(rows[valid])
            cols_parts.append(base_cols[valid])
            vals_parts.append(np.full(int(valid.sum()), complex(coeff)))
    else:
        for c in range(n):
            for s, coeff in support:
                w = ball.translate(c, s)
                if w is None:
                    ok[c] = False
                    continue
                rows_parts.append(np.array([w], dtype=np.int64))
                cols_parts.append(np.array([c], dtype=np.int64))
                vals_parts.append(np.array([complex(coeff)]))

    dtype = np.float64 if is_real else np.complex128
    if rows_parts:
        rows = np.concatenate(rows_parts)
        cols = np.concatenate(cols_parts)
        data = np.concatenate(vals_parts)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        data = np.zeros(0, dtype=np.complex128)
    if is_real:
        data = data.real.astype(np.float64)
    matrix = sp.coo_matrix((data, (rows, cols)), shape=(n, n), dtype=dtype).tocsr()
    interior = base_cols[ok]
    return TruncatedOperator(ball, matrix, interior, is_real, f)


# ---------------------------------------------------------------------------
# Exact endpoint norms (p = 1 and p = infinity)
# ---------------------------------------------------------------------------


def _abs_block_sums(f, support, signature):
    """Sum over blocks of |block coefficient sum|; exact Fraction when f is
    real, float otherwise. Block indices refer to positions in support."""
    exact = f.is_real()
    total_fr = Fraction(0)
    total_fl = 0.0
    for block in signature:
        s = QQi(0)
        for i in block:
            s = s + f.coefficient(support[i])
        if exact:
            total_fr += s.abs_exact()
        else:
            total_fl += s.abs_float()
    return total_fr if exact else total_fl


def norm_endpoint_exact(f: GroupRingElement, group, subgroup: SubgroupDescriptor,
                        endpoint=1, margin: int = 2, generators=None,
                        vertex_budget=DEFAULT_VERTEX_BUDGET,
                        max_radius=None) -> NormInterval:
    """Exact-or-certified bounds for the l1 / l-infinity operator norms.

    The maximal column (endpoint 1) or row (endpoint inf) absolute sum
    depends on the coset only through the partition it induces on the
    support, so one evaluation per distinct partition signature suffices.
    When the scan stabilizes the norm is pinned (lo = hi); otherwise the
    l1 mass of f is the always-valid upper bound.
    """
    if endpoint not in (1, math.inf, "inf"):
        raise ValueError("endpoint must be 1 or infinity")
    p_out = 1.0 if endpoint == 1 else math.inf

    if not f:
        return NormInterval(0.0, 0.0, p_out, ("empty",), 0, True, Fraction(0))

    # column sums of a nonnegative element all equal its mass; for the
    # trivial subgroup every column is a disjoint copy of the coefficients.
    # Both statements apply verbatim to the row sums (the involution keeps
    # nonnegativity and mass), so this also settles the endpoint at infinity
    # without materializing star(f).
    if isinstance(subgroup, TrivialSubgroup) or f.is_real_nonnegative():
        tag = "trivial-subgroup-mass" if isinstance(subgroup, TrivialSubgroup) \
            else "nonnegative-mass"
        if f.is_real():
            mass = f.l1_mass_exact()
            v = float(mass)
            return NormInterval(v, v, p_out, (tag,), 0, True, mass)
        v = f.l1_mass_float()
        return NormInterval(v * (1 - FLOAT_SLACK), v * (1 + FLOAT_SLACK), p_out,
                            (tag,), 0, True)

    if endpoint in (math.inf, "inf"):
        inner = norm_endpoint_exact(f.star(), group, subgroup, 1, margin,
                                    generators, vertex_budget, max_radius)
        return NormInterval(inner.lo, inner.hi, math.inf,
                            inner.methods + ("star-transpose",),
                            inner.radius, inner.stabilized, inner.exact_value)

    support = f.support()
    # column blocks at yH: s ~ s' iff s·yH = s'·yH, which is the signature
    # relation applied to the inverted support (probe[i] = support[i]^-1)
    probe = [s.inverse() for s in support]

    def column_value(rep):
        sig = partition_signature(subgroup, rep, probe)
        return sig, _abs_block_sums(f, support, sig)

    if subgroup.known_normal:
        # blocks are coset-independent: one evaluation at the base coset
        _sig, value = column_value(group.identity())
        v = float(value)
        exact = value if isinstance(value, Fraction) else None
        return NormInterval(v, v, 1.0, ("normal-pushforward",), 0, True, exact)

    ball = SchreierBall(group, subgroup, generators=generators, vertex_budget=vertex_budget)
    seen = {}
    best = None
    quiet = 0
    radius = 0
    exhausted = False
    stabilized = False
    while True:
        new_any = False
        for v in ball._layers[-1]:
            sig, value = column_value(ball.reps[v])
            if sig not in seen:
                seen[sig] = value
                best = value if best is None else max(best, value)
                new_any = True
        quiet = 0 if new_any else quiet + 1
        if ball.saturated:
            exhausted = True
            stabilized = True
            break
        if quiet >= margin:
            stabilized = True
            break
        if max_radius is not None and radius >= max_radius:
            break
        try:
            ball.expand_to(radius + 1)
        except BudgetExceeded:
            break
        radius += 1

    lo = float(best)
    if exhausted or stabilized:
        exact = best if isinstance(best, Fraction) else None
        methods = ("signature-scan-exhaustive",) if exhausted else ("signature-scan",)
        return NormInterval(lo, lo, 1.0, methods, radius,
                            exhausted or stabilized, exact)
    hi = f.l1_mass_float()
    return NormInterval(lo, hi, 1.0, ("signature-scan-partial", "l1-mass-upper"),
                        radius, False)


# ---------------------------------------------------------------------------
# l2 lower bounds (Krylov on the interior compression)
# ---------------------------------------------------------------------------


def _seed_vectors(n, count, rng_seed):
    """Base-coset indicator plus pseudorandom seeds; deterministic."""
    seeds = []
    e0 = np.zeros(n)
    e0[0] = 1.0
    seeds.append(e0)
    rng = np.random.default_rng(rng_seed)
    for _ in range(max(0, count - 1)):
        v = rng.standard_normal(n)
        seeds.append(v / np.linalg.norm(v))
    return seeds


def _certified_sigma_lower(a_cols, v):
    """||A v|| / ||v|| evaluated explicitly: immune to solver internals."""
    nv = np.linalg.norm(v)
    if nv == 0 or not np.isfinite(nv):
        return 0.0
    w = a_cols @ v
    r = np.linalg.norm(w) / nv
    if not np.isfinite(r):
        raise PfstarError("non-finite value in l2 iteration")
    return float(r)


REORTHO_DIM_LIMIT = 20_000


def _lanczos_top_vector(matvec, v0, iterations, reortho):
    """Ritz vector for the largest eigenvalue of a PSD operator.

    Plain symmetric Lanczos with full reorthogonalization below the
    dimension limit. Deterministic given v0; callers certify the result by
    re-evaluating the Rayleigh quotient, so loss of orthogonality can only
    cost sharpness, never soundness.
    """
    n = v0.shape[0]
    k = max(2, min(iterations, n))
    basis = np.zeros((k, n))
    alphas = np.zeros(k)
    betas = np.zeros(k)
    q = v0 / np.linalg.norm(v0)
    used = 0
    beta = 0.0
    q_prev = np.zeros(n)
    for j in range(k):
        basis[j] = q
        used = j + 1
        u = matvec(q)
        alpha = float(q @ u)
        alphas[j] = alpha
        u = u - alpha * q - beta * q_prev
        if reortho:
            u -= basis[: j + 1].T @ (basis[: j + 1] @ u)
        beta = float(np.linalg.norm(u))
        if beta < 1e-13 or j == k - 1:
            break
        betas[j] = beta
        q_prev = q
        q = u / beta
    tri_a = alphas[:used]
    tri_b = betas[: used - 1]
    if used == 1:
        return basis[0]
    vals, vecs = np.linalg.eigh(np.diag(tri_a) + np.diag(tri_b, 1) + np.diag(tri_b, -1))
    return basis[:used].T @ vecs[:, -1]


def norm_l2_lower(op: TruncatedOperator, iterations: int = 200, seeds: int = 3,
                  rng_seed: int = 0) -> NormInterval:
    """Certified lower bound for the l2 operator norm via the interior
    compression; the upper bound is exact only once the ball saturates.

    The Krylov iteration runs on the Gram operator of the interior-column
    submatrix, so every Ritz value is ||T v||^2 / ||v||^2 for a genuine
    vector v of the full operator. The returned ``lo`` re-evaluates that
    quotient explicitly instead of trusting the eigensolver's claim.
    """
    n = op.matrix.shape[0]
    interior = op.interior_columns
    if interior.size == 0:
        return NormInterval(0.0, math.inf, 2.0, ("no-interior-columns",),
                            op.ball.radius, False)
    a_cols = op.matrix[:, interior]
    m = interior.size
    lo = 0.0
    if m <= 64:
        dense = a_cols.toarray()
        svals = np.linalg.svd(dense, compute_uv=False)
        lo = float(svals[0]) * (1 - FLOAT_SLACK)
        method = "interior-svd"
    else:
        if op.is_real:
            a_t = a_cols.T.tocsr()
            matvec = lambda v: a_t @ (a_cols @ v)
        else:
            a_h = a_cols.conj().T.tocsr()
            # real Lanczos on the real structure of the Hermitian Gram form
            matvec = lambda v: np.real(a_h @ (a_cols @ v))
        reortho = m <= REORTHO_DIM_LIMIT
        for v0 in _seed_vectors(m, seeds, rng_seed):
            ritz = _lanczos_top_vector(matvec, v0, iterations, reortho)
            lo = max(lo, _certified_sigma_lower(a_cols, ritz))
        method = "gram-krylov-interior"

    if op.saturated:
        # the truncation IS the operator: dense or sparse exact upper
        if n <= 4000:
            svals = np.linalg.svd(op.matrix.toarray(), compute_uv=False)
            top = float(svals[0])
            return NormInterval(top * (1 - FLOAT_SLACK), top * (1 + FLOAT_SLACK),
                                2.0, (method, "saturated-svd"), op.ball.radius, True)
        abs_m = abs(op.matrix)
        hi1 = float(abs_m.sum(axis=0).max())
        hiinf = float(abs_m.sum(axis=1).max())
        fro = float(spla.norm(op.matrix, "fro"))
        hi = min(math.sqrt(hi1 * hiinf), fro) * (1 + FLOAT_SLACK)
        return NormInterval(lo, hi, 2.0, (method, "saturated-matrix-bounds"),
                            op.ball.radius, True)
    return NormInterval(lo, math.inf, 2.0, (method,), op.ball.radius, False)


# ---------------------------------------------------------------------------
# Radial compression on free groups (trivial subgroup, sphere-constant f)
# ---------------------------------------------------------------------------


def radial_profile(f: GroupRingElement, subgroup) -> Optional[dict]:
    """Sphere-constant coefficient profile, or None when not applicable.

    Needs a free ambient group, the trivial subgroup, real coefficients
    constant on each word-length sphere with full spheres in the support.
    Such an element is automatically self-adjoint (w and w^{-1} share a
    sphere). Memoized on the element: power sequences re-ask repeatedly.
    """
    if not isinstance(subgroup, TrivialSubgroup) or not isinstance(f.group, FreeGroup):
        return None
    if not f.is_real() or not f:
        return None

    def compute():
        rank = f.group.rank
        sums = {}
        counts = {}
        firsts = {}
        for key, coeff in f._data.items():
            length = len(key)
            counts[length] = counts.get(length, 0) + 1
            if length in firsts:
                if coeff != firsts[length]:
                    return None
            else:
                firsts[length] = coeff
        for length, count in counts.items():
            size = 1 if length == 0 else 2 * rank * (2 * rank - 1) ** (length - 1)
            if count != size:
                return None
            sums[length] = Fraction(firsts[length].re)
        return sums

    return f._memo("radial_profile", compute)


def radial_l2_lower(f: GroupRingElement, subgroup, radius: int) -> Optional[NormInterval]:
    """l2 lower bound through the sphere-averaged (radial) subspace.

    Radial functions form an invariant subspace for sphere-constant f, so
    the compression onto the orthonormal sphere basis is an exact block of
    the operator; eigenvalues of its interior truncation are Rayleigh
    quotients of genuine vectors. This reaches truncation depths far
    beyond what vertex-by-vertex enumeration can afford.
    """
    profile = radial_profile(f, subgroup)
    if profile is None:
        return None
    rank = f.group.rank
    q = 2 * rank - 1
    max_len = max(profile)
    size = radius + 2 * max_len + 2
    off = np.full(size - 1, math.sqrt(q))
    off[0] = math.sqrt(q + 1)
    jac = np.diag(off, 1) + np.diag(off, -1)
    # sphere-sum operators satisfy the tree Hecke recursion
    polys = [np.eye(size), jac.copy()]
    for k in range(2, max_len + 1):
        if k == 2:
            nxt = jac @ polys[1] - (q + 1) * polys[0]
        else:
            nxt = jac @ polys[k - 1] - q * polys[k - 2]
        polys.append(nxt)
    op = np.zeros((size, size))
    for length, coeff in profile.items():
        op += float(coeff) * polys[length]
    # rows/cols up to `radius` hold the exact infinite-compression entries
    block = op[: radius + 1, : radius + 1]
    eigs = np.linalg.eigvalsh((block + block.T) / 2.0)
    lo = float(max(abs(eigs[0]), abs(eigs[-1]))) * (1 - FLOAT_SLACK)
    return NormInterval(lo, math.inf, 2.0, ("radial-sphere-compression",), radius, False)


# ---------------------------------------------------------------------------
# l^p lower bounds (nonlinear power iteration of Boyd type)
# ---------------------------------------------------------------------------


def _dual_signed_power(y, exponent):
    """|y|^(exponent) with the phase of y preserved; 0 stays 0."""
    mag = np.abs(y)
    out = np.zeros_like(y)
    nz = mag > 0
    out[nz] = (mag[nz] ** exponent) * (y[nz] / mag[nz])
    return out


def boyd_lower(a_cols, p: float, iterations: int = 60, restarts: int = 3,
               rng_seed: int = 0) -> float:
    """Best certified ||A x||_p / ||x||_p found by the nonlinear power
    method. Every iterate's quotient is a valid lower bound; convergence
    to the global value is guaranteed only for nonnegative matrices."""
    if not 1 < p < math.inf:
        raise ValueError("boyd_lower needs 1 < p < inf")
    q = conjugate_exponent(p)
    m = a_cols.shape[1]
    rng = np.random.default_rng(rng_seed)
    starts = [np.ones(m)]
    e0 = np.zeros(m)
    e0[0] = 1.0
    starts.append(e0)
    for _ in range(max(0, restarts - 2)):
        starts.append(rng.standard_normal(m))
    best = 0.0
    for x in starts:
        x = x.astype(np.complex128 if a_cols.dtype.kind == "c" else np.float64)
        nx = np.linalg.norm(x, p)
        if nx == 0:
            continue
        x = x / nx
        for _ in range(iterations):
            y = a_cols @ x
            ny = float(np.linalg.norm(y, p))
            if not math.isfinite(ny):
                raise PfstarError("non-finite value in p-norm iteration")
            best = max(best, ny)
            if ny == 0:
                break
            z = a_cols.conj().T @ _dual_signed_power(y, p - 1)
            nz = np.linalg.norm(z, q)
            if nz == 0:
                break
            x_new = _dual_signed_power(z, q - 1)
            nxn = np.linalg.norm(x_new, p)
            if nxn == 0:
                break
            x = x_new / nxn
    return best


# ---------------------------------------------------------------------------
# Interpolation upper bounds and the full p-norm driver
# ---------------------------------------------------------------------------


def interpolation_upper(hi_a: float, a: float, hi_b: float, b: float, p: float) -> float:
    """Riesz-Thorin: ||T||_p <= ||T||_a^(1-t) ||T||_b^t on the segment."""
    inv = lambda e: 0.0 if e == math.inf else 1.0 / e
    if inv(a) == inv(b):
        raise ValueError("need distinct endpoint exponents")
    t = (inv(p) - inv(a)) / (inv(b) - inv(a))
    if not -1e-12 <= t <= 1 + 1e-12:
        raise ValueError(f"p={p} not between endpoints {a} and {b}")
    t = min(1.0, max(0.0, t))
    return (hi_a ** (1 - t)) * (hi_b ** t)


def grow_ball(group, subgroup, radius, generators=None,
              vertex_budget=DEFAULT_VERTEX_BUDGET):
    """Ball of the requested radius, or as far as the budget allows."""
    ball = SchreierBall(group, subgroup, generators=generators,
                        vertex_budget=vertex_budget)
    hit_budget = False
    try:
        ball.expand_to(radius)
    except BudgetExceeded:
        hit_budget = True
    ball.resolve_frontier_edges()
    return ball, hit_budget


def norm_p_bounds(f: GroupRingElement, group, subgroup, p, radius: int = 12,
                  iterations: int = 200, rng_seed: int = 0, margin: int = 2,
                  generators=None, vertex_budget=DEFAULT_VERTEX_BUDGET,
                  ball: Optional[SchreierBall] = None,
                  operator: Optional[TruncatedOperator] = None) -> NormInterval:
    """Certified bounds for the norm of lambda^p(f) on l^p(G/H)."""
    if p != math.inf and p < 1:
        raise ValueError(f"exponent p={p} outside [1, inf]")
    if not f:
        return NormInterval(0.0, 0.0, p, ("empty",), 0, True, Fraction(0))
    if p == 1 or p == math.inf:
        return norm_endpoint_exact(f, group, subgroup, p, margin, generators,
                                   vertex_budget)
    if p > 2:
        # ||lambda^p(f)|| = ||lambda^q(f*)|| via the adjoint matrix
        inner = norm_p_bounds(f.star(), group, subgroup, conjugate_exponent(p),
                              radius, iterations, rng_seed, margin, generators,
                              vertex_budget, ball=ball)
        return NormInterval(inner.lo, inner.hi, p,
                            inner.methods + ("star-transpose",),
                            inner.radius, inner.stabilized, inner.exact_value)

    e1 = norm_endpoint_exact(f, group, subgroup, 1, margin, generators, vertex_budget)
    einf = norm_endpoint_exact(f, group, subgroup, math.inf, margin, generators,
                               vertex_budget)
    methods = []
    hi = interpolation_upper(e1.hi, 1.0, einf.hi, math.inf, p)
    methods.append("interpolation-1-inf")
    stabilized = e1.stabilized and einf.stabilized

    # with a radial fast path available the vertex-by-vertex ball is only a
    # cross-check; keep it small instead of fighting the budget
    radial = radial_l2_lower(f, subgroup, radius) if p == 2 else None
    ball_radius = radius if radial is None else min(radius, 8)

    op = operator
    if op is None:
        if ball is None:
            ball, hit_budget = grow_ball(group, subgroup, ball_radius, generators,
                                         vertex_budget)
            if hit_budget:
                methods.append("ball-budget-capped")
        if len(f) * len(ball.reps) <= ASSEMBLY_WORK_BUDGET:
            op = assemble(f, ball)
        else:
            methods.append("assembly-skipped-work-budget")

    lo = 0.0
    reached_radius = op.ball.radius if op is not None else \
        (ball.radius if ball is not None else radius)
    if p == 2:
        if op is not None:
            l2 = norm_l2_lower(op, iterations=iterations, rng_seed=rng_seed)
            lo = l2.lo
            methods.extend(l2.methods)
            if l2.hi < hi:
                hi = l2.hi
                stabilized = stabilized and l2.stabilized
        if radial is not None and radial.lo > lo:
            lo = radial.lo
            methods.extend(radial.methods)
    elif op is not None:
        interior = op.interior_columns
        if interior.size:
            lo = boyd_lower(op.matrix[:, interior], p, iterations=min(iterations, 80),
                            rng_seed=rng_seed)
            methods.append("boyd-interior")
            if not f.is_real_nonnegative():
                methods.append("boyd-local-only")
        if op.saturated:
            # the compression is the whole operator: its p-norm upper via
            # interpolation of the matrix's own endpoint norms
            abs_m = abs(op.matrix)
            m1 = float(abs_m.sum(axis=0).max())
            minf = float(abs_m.sum(axis=1).max())
            hi_mat = interpolation_upper(m1, 1.0, minf, math.inf, p) * (1 + FLOAT_SLACK)
            if hi_mat < hi:
                hi = hi_mat
                methods.append("saturated-matrix-interpolation")

    if lo <= hi * (1 + 1e-9):
        lo = min(lo, hi)  # absorb float rounding when the two coincide
    # a genuinely inverted pair falls through and trips the interval check
    return NormInterval(lo, hi, p, tuple(dict.fromkeys(methods)), reached_radius,
                        stabilized, None)


def pf_star_bounds(f: GroupRingElement, group, subgroup, p, radius: int = 12,
                   iterations: int = 200, rng_seed: int = 0, margin: int = 2,
                   generators=None, vertex_budget=DEFAULT_VERTEX_BUDGET,
                   ball: Optional[SchreierBall] = None) -> NormInterval:
    """Bounds for max(||lambda^p(f)||, ||lambda^q(f)||), 1 <= p <= 2."""
    if not 1 <= p <= 2:
        raise ValueError(f"pf-star exponent must lie in [1, 2], got {p}")
    q = conjugate_exponent(p)
    ip = norm_p_bounds(f, group, subgroup, p, radius, iterations, rng_seed,
                       margin, generators, vertex_budget, ball=ball)
    if p == 2:
        return ip
    iq = norm_p_bounds(f, group, subgroup, q, radius, iterations, rng_seed,
                       margin, generators, vertex_budget, ball=ball)
    out = interval_max(ip, iq)
    return NormInterval(out.lo, out.hi, p, out.methods + ("pf-star-max",),
                        out.radius, out.stabilized, out.exact_value)
