"""Cone membership, witnesses and partial-separability classes for three-qubit X-shaped states."""

from .certify import (
    Certificate,
    CertificateError,
    Decomposition,
    DictionaryGrid,
    NoCertificateError,
    decompose_constructive,
    decompose_dictionary,
    duality_fuzz,
    find_certificate,
    find_state_witness,
    find_witness_counterstate,
    verify_decomposition,
)
from .classify import (
    ClassLabel,
    LatticeConsistencyError,
    LatticeProfile,
    classify,
    lattice_profile,
    partition_class,
    permute_label,
    witness_profile,
)
from .criteria import (
    Cone,
    IneqKind,
    IneqReport,
    MembershipVerdict,
    eval_state_inequality,
    eval_witness_inequality,
    governing_inequalities,
    in_cone,
    necessary_check_general,
    state_in_cone,
    witness_in_cone,
)
from .estimators import ConeMembership, PartialSeparabilityClassifier, XPartProjector
from .extremals import Family, GeneratorParams, Term, ext_families, generator, sample_cone
from .xcore import (
    DEFAULT_TOL,
    DomainError,
    InvalidInputError,
    XMatrix,
    embed,
    ghz,
    make_x,
    pair_x,
    partial_transpose,
    x_part,
)

__version__ = "0.1.0"
