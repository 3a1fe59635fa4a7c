"""Quantifying Bell non-locality and steering of finite correlations, with key-rate bounds."""

from .boxes import (
    Correlation,
    InputDistribution,
    NsReport,
    QuantumModel,
    check_no_signaling,
    correlation_from_quantum,
    deterministic_box,
    isotropic_di_correlation,
    mix,
    pr_box,
    product,
    uniform_box,
    validate_correlation,
)
from .errors import BellkeyError
from .infotheory import CqState, JointDistribution, cmi, cmi_cq, shannon_entropy, von_neumann_entropy
from .keyrates import (
    BoundCurve,
    continuity_term,
    di_isotropic_upper,
    di_lower_devetak_winter,
    emit_curves,
    ree_isotropic,
    sdi_lower,
)
from .polytope import BellCertificate, LhvModel, chsh_value, is_local, isotropic_decomposition, local_vertices
from .steering import (
    Assemblage,
    assemblage_from_state,
    isotropic_assemblage,
    ris_trivial_bound,
    sdi_isotropic_upper,
    steering_faithfulness_bound,
)

__version__ = "0.1.0"
