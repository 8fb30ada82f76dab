"""Certified operator-norm and spectral-radius bounds for group-ring
elements acting on coset spaces l^p(G/H), with decision certificates for
quasi-Hermitian-type questions and Kesten co-amenability indices."""

from .errors import (
    BoundContradiction,
    BudgetExceeded,
    DescriptorMismatch,
    OutOfBall,
    PfstarError,
    WordParseError,
)
from .groups import (
    FiniteGroup,
    FreeGroup,
    GroupElement,
    ProductGroup,
    compose,
    invert,
    parse_word,
)
from .subgroups import (
    CosetTableSubgroup,
    FreeGeneratedSubgroup,
    HomKernelSubgroup,
    StallingsAutomaton,
    TrivialSubgroup,
    build_coset_table,
    contains,
    coset_index_if_finite,
    fold_stallings,
)
from .schreier import (
    SchreierBall,
    coset_of,
    expand_ball,
    partition_signature,
    signature_scan,
)
from .groupring import (
    ClassZeroResult,
    CosetFunction,
    GroupRingElement,
    class_is_zero,
    convolve,
    kernel_entry,
    power,
    star,
    tilde,
)
from .opnorms import (
    NormInterval,
    TruncatedOperator,
    assemble,
    norm_endpoint_exact,
    norm_l2_lower,
    norm_p_bounds,
    pf_star_bounds,
)
from .radius import (
    PowerRecord,
    RadiusEstimate,
    power_sequence,
    radius_bounds,
    radius_csv,
)
from .certificates import (
    Certificate,
    certify_not_quasi_hermitian,
    check_interpolation,
    coamenability_index,
    finite_index_spectrum,
    sigma_bound_check,
)
from .config import RunConfig, emit_config, parse_config
from .rationals import QQi

__version__ = "0.1.0"
