"""distillcert: distillability certificates for low-rank bipartite states.

Analyzes small bipartite density matrices and, for the supported
low-rank families, synthesizes an explicit sequence of local operations
reducing the state to a terminal form whose distillability an
independent verifier can re-check.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .canonical import Sigma3Params, canonicalize_sigma3, sigma3_matrix, sigma3_vectors
from .criteria import (
    ENTANGLED_CERTIFIED,
    INCONCLUSIVE,
    NPT_ENTANGLED,
    SEPARABLE_CERTIFIED,
    NptWitness,
    ReductionWitness,
    lemma1_check,
    min_pt_eig,
    npt_threshold,
    peres_2xn_verdict,
    reduction_witness,
)
from .distill import (
    CLAIM_2XN,
    CLAIM_REDUCTION,
    Certificate,
    CertStep,
    ProjectorSearchResult,
    bbpssw_recurrence,
    certify,
    certify_rank2,
    certify_rank3,
    certify_rank4,
    equalize_reduction,
    project_to_two_qubit,
    search_projector_a,
)
from .ensembles import (
    Eq15Params,
    WernerParams,
    eq15_state,
    random_eq15_params,
    random_rank3_npt,
    random_rank_r,
    random_sigma3_params,
    rank3_with_product_in_range,
    rank4_with_product_in_range,
    sigma3_state,
    tiles_upb_state,
    uniform_marginal_span,
    werner,
)
from .rangesearch import (
    ProductFinding,
    find_product_vector,
    find_schmidt_rank2_combo,
    range_basis,
)
from .report import AnalysisReport, analyze_state
from .statecore import (
    BipartiteState,
    LocalOperator,
    PureVector,
    SpectralDecomposition,
    apply_local,
    partial_trace,
    partial_transpose,
    pure_state,
    rank_of,
    schmidt_decompose,
    spectral_decompose,
    state_from_matrix,
)
from .verifier import VerificationReport, verify

__version__ = "0.1.0"
