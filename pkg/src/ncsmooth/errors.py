"""Exception hierarchy shared by all modules."""


class NCSmoothError(Exception):
    """Base class; ``payload`` is a JSON-friendly dict used by the CLI."""

    code = "error"

    def __init__(self, message: str, **payload):
        super().__init__(message)
        self.payload = payload

    def to_dict(self) -> dict:
        out = {"error": self.code, "message": str(self)}
        out.update(self.payload)
        return out


def _make(name: str, code: str) -> type:
    return type(name, (NCSmoothError,), {"code": code})


JacobiViolation = _make("JacobiViolation", "jacobi_violation")
DimensionMismatch = _make("DimensionMismatch", "dimension_mismatch")
NotSolvable = _make("NotSolvable", "not_solvable")
NotNilpotent = _make("NotNilpotent", "not_nilpotent")
NotAnIdeal = _make("NotAnIdeal", "not_an_ideal")
NotTriangular = _make("NotTriangular", "not_triangular")
IrrationalEigenvalues = _make("IrrationalEigenvalues", "irrational_eigenvalues")
AlgebraMismatch = _make("AlgebraMismatch", "algebra_mismatch")
Unsupported = _make("Unsupported", "unsupported")
UnknownName = _make("UnknownName", "unknown_name")
SmoothUnsupported = _make("SmoothUnsupported", "smooth_unsupported")
ModeMismatch = _make("ModeMismatch", "mode_mismatch")
SystemIncomplete = _make("SystemIncomplete", "system_incomplete")
ChainMismatch = _make("ChainMismatch", "chain_mismatch")
SingularSolve = _make("SingularSolve", "singular_solve")
NonRealSpectrum = _make("NonRealSpectrum", "non_real_spectrum")
TruncationBudgetExceeded = _make("TruncationBudgetExceeded", "truncation_budget_exceeded")
NotCommuting = _make("NotCommuting", "not_commuting")
NotSubregion = _make("NotSubregion", "not_subregion")
NotACover = _make("NotACover", "not_a_cover")
DomainMismatch = _make("DomainMismatch", "domain_mismatch")
IllConditionedFit = _make("IllConditionedFit", "ill_conditioned_fit")
ParseError = _make("ParseError", "parse_error")
