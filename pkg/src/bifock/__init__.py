"""Truncation-exact simulator of reduced bi-free products of pairs of faces.

Finite families of matrix-algebra face pairs are represented on a truncated
free-product Hilbert space; the package evaluates mixed moments exactly
within the truncation budget and runs the verification checks (commutation
witnesses, compressions to tensor products, isomorphism and kernel probes)
at desk scale.
"""

from .algebra import (
    GnsTriple,
    MatrixStarAlgebra,
    StateOnMatrices,
    close_algebra,
    gns,
    is_faithful,
    min_tensor,
    product_state,
)
from .bifree import (
    BiFreeProduct,
    BoundaryVector,
    FaceFamily,
    FacePair,
    OneSidedFreeProduct,
    TensorSplit,
    bifree_state,
    biindependence_defect,
    boundary_patterns,
    face_pair,
    recombine_split,
    reduced_bifree,
    splice_isometry,
    split_simple_tensor,
)
from .errors import (
    ConfigError,
    InvalidInputError,
    PartialMapError,
    UnsupportedStructureError,
)
from .fock import (
    FaceAction,
    FaceSpace,
    FockBasis,
    FockOperator,
    FockVector,
    Word,
    build_basis,
    compose,
    count_words,
    face_embedding,
    left_op,
    left_subspace,
    right_op,
    right_subspace,
    vacuum_expectation,
)
from .linalg import DEFAULT_TOL, Tolerance, hermitian_eig, kron, numeric_rank
from .verify import (
    IsoReport,
    ProbeReport,
    TensorInjectivityReport,
    WitnessReport,
    commutation_defect,
    moment_equivalence_report,
    nonfaithfulness_witness,
    pivot_compression_defect,
    pivot_embedding,
    state_kernel_probe,
    tensor_injectivity_dims,
    tensor_split_report,
)

__version__ = "0.1.0"
