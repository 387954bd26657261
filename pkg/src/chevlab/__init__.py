"""Elementary Chevalley groups over finite rings, enumerated as matrix groups."""

from .chevgen import Representation, h, w, x, z
from .engine import BudgetExceeded, SubgroupSet, closure, commutator_subgroup, normal_closure
from .report import VerdictReport
from .rings import DualNumbers, Zmod, ideals_of, parse_ideal, parse_ring
from .rootsys import Root, RootSystem, roots_of
from .theorems import Lab, VerificationCase, run_case

__all__ = [
    "BudgetExceeded", "DualNumbers", "Lab", "Representation", "Root", "RootSystem", "SubgroupSet",
    "VerdictReport", "VerificationCase", "Zmod", "closure", "commutator_subgroup", "h", "ideals_of",
    "normal_closure", "parse_ideal", "parse_ring", "roots_of", "run_case", "w", "x", "z",
]
__version__ = "0.1.0"
