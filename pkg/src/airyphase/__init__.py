"""Wigner functions of Gaussian states after polynomial phase gates.

The analytic path writes the post-gate Wigner function as an Airy transform of
a Gaussian and evaluates it in closed form; ``airyphase.oracle`` provides the
brute-force quadrature it is checked against.
"""

from .engine import PhaseGate, apply_phase_gate, cpe_wigner, eval_log_at, tdw_gate
from .errors import AiryPhaseError
from .evaluator import WignerEvaluator
from .gaussian import GaussianState, displace, squeeze, thermal, tmss, vacuum
from .special import LogValue, airy_ai, log_airy_ai

__version__ = "0.1.0"

__all__ = [
    "AiryPhaseError",
    "GaussianState",
    "LogValue",
    "PhaseGate",
    "WignerEvaluator",
    "airy_ai",
    "apply_phase_gate",
    "cpe_wigner",
    "displace",
    "eval_log_at",
    "log_airy_ai",
    "squeeze",
    "tdw_gate",
    "thermal",
    "tmss",
    "vacuum",
]
