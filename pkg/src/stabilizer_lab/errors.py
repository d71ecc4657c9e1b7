"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI when it
reports failures as JSON.
"""


class StabilizerLabError(ValueError):
    code = "error"


class NonHermitianInput(StabilizerLabError):
    code = "non_hermitian_input"


class ConvergenceFailure(StabilizerLabError):
    code = "convergence_failure"


class DimensionMismatch(StabilizerLabError):
    code = "dimension_mismatch"


class InvalidState(StabilizerLabError):
    code = "invalid_state"


class NonPhysicalDrift(StabilizerLabError):
    code = "non_physical_drift"


class PartitionMismatch(StabilizerLabError):
    code = "partition_mismatch"


class NonOrthonormalBasis(StabilizerLabError):
    code = "non_orthonormal_basis"


class WrongDimension(StabilizerLabError):
    code = "wrong_dimension"


class NotStabilizable(StabilizerLabError):
    code = "not_stabilizable"


class NOutOfRange(StabilizerLabError):
    code = "n_out_of_range"


class DegenerateDenominator(StabilizerLabError):
    code = "degenerate_denominator"


class NotTwoMode(StabilizerLabError):
    code = "not_two_mode"


class NotStandardForm(StabilizerLabError):
    code = "not_standard_form"


class SingularCovariance(StabilizerLabError):
    code = "singular_covariance"


class DefectivePairing(StabilizerLabError):
    code = "defective_pairing"


class NotPositiveDefinite(StabilizerLabError):
    code = "not_positive_definite"


class NotSymplectic(StabilizerLabError):
    code = "not_symplectic"


class InvalidSpectrum(StabilizerLabError):
    code = "invalid_spectrum"


class DegeneracyGroupingAmbiguous(StabilizerLabError):
    code = "degeneracy_grouping_ambiguous"


class MissingAlpha(StabilizerLabError):
    code = "missing_alpha"


class Infeasible(StabilizerLabError):
    code = "infeasible"


class SchemaError(StabilizerLabError):
    code = "schema_error"
