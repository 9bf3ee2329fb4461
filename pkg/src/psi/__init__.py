"""psi-calculus workbench: parse agents, compute transitions, decide bisimilarity."""

from .bisim import (
    BisimilarUpToBasis,
    GameConfig,
    Inconclusive,
    NotBisimilar,
    bisimilar,
    check_structural_laws,
    context_bisimilar,
    replay_witness,
    structural_normal_form,
)
from .demos import run_demo
from .errors import DepthExceeded, GoldenMismatch, IllFormed, PsiError, PsiSyntaxError
from .instance_api import Instance, check_requisites, check_substitution_laws
from .instances import REGISTRY, get_instance
from .semantics import (
    CandidateObjects,
    ClosedSystem,
    NameInstantiation,
    SymbolicOnly,
    build_lts,
    run_trace,
    transitions,
)
from .syntax import parse_agent, print_agent

__version__ = "0.1.0"

__all__ = [
    "BisimilarUpToBasis",
    "CandidateObjects",
    "ClosedSystem",
    "DepthExceeded",
    "GameConfig",
    "GoldenMismatch",
    "IllFormed",
    "Inconclusive",
    "Instance",
    "NameInstantiation",
    "NotBisimilar",
    "PsiError",
    "PsiSyntaxError",
    "REGISTRY",
    "SymbolicOnly",
    "bisimilar",
    "build_lts",
    "check_requisites",
    "check_structural_laws",
    "check_substitution_laws",
    "context_bisimilar",
    "get_instance",
    "parse_agent",
    "print_agent",
    "replay_witness",
    "run_demo",
    "run_trace",
    "structural_normal_form",
    "transitions",
]
