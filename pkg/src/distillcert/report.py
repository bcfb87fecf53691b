"""Combined analysis report for a single state."""

from __future__ import annotations

from dataclasses import dataclass

from .criteria import lemma1_check, min_pt_eig, npt_threshold, reduction_witness
from .rangesearch import find_product_vector, range_basis
from .statecore import matrix_rank_hermitian, partial_trace, rank_of


@dataclass(frozen=True)
class AnalysisReport:
    dims: tuple
    rank: int
    rank_a: int
    rank_b: int
    min_pt_eig: float
    npt: bool
    reduction_value: float | None
    reduction_side: str | None
    lemma1: bool
    product_found: bool | None
    product_residual: float | None
    product_ambiguous: bool | None

    def as_dict(self):
        return {
            "dim_a": self.dims[0],
            "dim_b": self.dims[1],
            "rank": self.rank,
            "rank_a": self.rank_a,
            "rank_b": self.rank_b,
            "min_pt_eig": self.min_pt_eig,
            "npt": self.npt,
            "reduction_value": self.reduction_value,
            "reduction_side": self.reduction_side,
            "lemma1": self.lemma1,
            "product_found": self.product_found,
            "product_residual": self.product_residual,
            "product_ambiguous": self.product_ambiguous,
        }

    def lines(self):
        d = self.as_dict()
        return [f"{key}={_fmt(value)}" for key, value in d.items()]


def _fmt(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def analyze_state(state, *, search_products=None):
    """Ranks, partial-transpose minimum, reduction witness, and (for
    small low-rank states) the product-in-range finding."""
    r = rank_of(state)
    ra = matrix_rank_hermitian(partial_trace(state, "A"))
    rb = matrix_rank_hermitian(partial_trace(state, "B"))
    val, _ = min_pt_eig(state, "A")
    rw = reduction_witness(state)
    if search_products is None:
        search_products = r <= 4 and max(state.dims) <= 4 and min(state.dims) >= 2
    finding = None
    if search_products:
        finding = find_product_vector(range_basis(state))
    return AnalysisReport(
        dims=state.dims,
        rank=r,
        rank_a=ra,
        rank_b=rb,
        min_pt_eig=float(val),
        npt=val < -npt_threshold(),
        reduction_value=None if rw is None else rw.value,
        reduction_side=None if rw is None else rw.side,
        lemma1=lemma1_check(state),
        product_found=None if finding is None else finding.found,
        product_residual=None if finding is None else finding.residual,
        product_ambiguous=None if finding is None else finding.ambiguous,
    )
