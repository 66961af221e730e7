"""Dynamic fault tree / dynamic reliability block diagram algebra and analysis."""

from .algebra import (
    Always, Assignment, Basic, Block, DAnd, DBefore, DInclusiveBefore, DOr, DSimult, Fdep,
    Never, Pand, RAfter, RAnd, RInclusiveAfter, ROr, RSimult, RWsp, Wsp, dft_event_holds,
    drbd_event_holds, eval_dft, eval_drbd,
)
from .analytic import analyze_dft, analyze_drbd, pie_expand, union_probability
from .conversion import complement_report, convert_model, dft_to_drbd, drbd_to_dft
from .distributions import Exponential, SpareSpec, Weibull
from .dsl import Diagnostic, ModelSyntaxError, format_model, parse_model, validate
from .model import AnalysisResult, Estimate, Model
from .montecarlo import estimate_both, estimate_reliability, estimate_unreliability, sample_scenario
from .report import emit_report, load_report

__version__ = "0.1.0"

__all__ = [
    "Always", "Assignment", "Basic", "Block", "DAnd", "DBefore", "DInclusiveBefore", "DOr",
    "DSimult", "Fdep", "Never", "Pand", "RAfter", "RAnd", "RInclusiveAfter", "ROr", "RSimult",
    "RWsp", "Wsp", "dft_event_holds", "drbd_event_holds", "eval_dft", "eval_drbd",
    "analyze_dft", "analyze_drbd", "pie_expand", "union_probability",
    "complement_report", "convert_model", "dft_to_drbd", "drbd_to_dft",
    "Exponential", "SpareSpec", "Weibull",
    "Diagnostic", "ModelSyntaxError", "format_model", "parse_model", "validate",
    "AnalysisResult", "Estimate", "Model",
    "estimate_both", "estimate_reliability", "estimate_unreliability", "sample_scenario",
    "emit_report", "load_report",
]
