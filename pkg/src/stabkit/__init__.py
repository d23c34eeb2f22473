"""Stabilizer-state entanglement counting and random-ensemble sweeps.

Core objects: :class:`~stabkit.gf2.BitMatrix`/:class:`~stabkit.gf2.BitVector`
(packed GF(2) linear algebra), :class:`~stabkit.pauli.PauliOperator`,
:class:`~stabkit.stabilizer.StabilizerGroup` with
:class:`~stabkit.stabilizer.Partition`, and
:class:`~stabkit.clifford.CliffordElement`.  Entanglement counts live in
:mod:`stabkit.entanglement`, brute-force ground truth in
:mod:`stabkit.oracle`, and the Monte Carlo harness in
:mod:`stabkit.experiments`.
"""

from .clifford import CliffordElement
from .entanglement import (
    EntanglementReport,
    ghz_count,
    local_log_rank,
    mixed_epr_bound_detail,
    mixed_epr_lower_bound,
    pure_bipartite_entanglement,
)
from .errors import (
    ArityError,
    CapacityError,
    ConfigError,
    ParseError,
    SizeMismatchError,
    StabkitError,
    ValidityError,
)
from .experiments import ExperimentConfig, ExperimentReport, bound_value, run
from .gf2 import BitMatrix, BitVector
from .pauli import PauliOperator, parse_pauli
from .stabilizer import Partition, StabilizerGroup, canonical_form, purify, validate

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "BitMatrix",
    "BitVector",
    "CapacityError",
    "CliffordElement",
    "ConfigError",
    "EntanglementReport",
    "ExperimentConfig",
    "ExperimentReport",
    "ParseError",
    "Partition",
    "PauliOperator",
    "SizeMismatchError",
    "StabilizerGroup",
    "StabkitError",
    "ValidityError",
    "bound_value",
    "canonical_form",
    "ghz_count",
    "local_log_rank",
    "mixed_epr_bound_detail",
    "mixed_epr_lower_bound",
    "parse_pauli",
    "pure_bipartite_entanglement",
    "purify",
    "run",
    "validate",
    "__version__",
]
