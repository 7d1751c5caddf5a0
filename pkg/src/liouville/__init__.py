"""Liouville-property decision engine for symmetric nonlocal diffusion operators."""

__version__ = "0.1.0"

from .exactreal import (
    ConstantBasis,
    ExtendedRational,
    QValue,
    density_witness,
    parse_coordinate,
    q_of,
    rational_gcd,
    rational_ratio,
)
from .measures import LevyMeasure, lebesgue_split, parse_measure, serialize_measure, support_of
from .closure import (
    ClosedSubgroup,
    HyperplaneCertificate,
    closure_1d,
    closure_multid,
    decompose_measure,
    hyperplane_certificate,
    kronecker_check,
    lattice_hnf,
    orthogonalize,
)
from .decider import LiouvilleVerdict, decide, decide_1d
from .counterexample import Counterexample, build_counterexample, check_periodicity
from .numerics import OperatorEvaluator, PropagationState, density_probe, propagate

__all__ = [
    "ConstantBasis",
    "ExtendedRational",
    "QValue",
    "density_witness",
    "parse_coordinate",
    "q_of",
    "rational_gcd",
    "rational_ratio",
    "LevyMeasure",
    "parse_measure",
    "serialize_measure",
    "support_of",
    "lebesgue_split",
    "ClosedSubgroup",
    "HyperplaneCertificate",
    "closure_1d",
    "closure_multid",
    "lattice_hnf",
    "kronecker_check",
    "orthogonalize",
    "decompose_measure",
    "hyperplane_certificate",
    "LiouvilleVerdict",
    "decide",
    "decide_1d",
    "Counterexample",
    "build_counterexample",
    "check_periodicity",
    "OperatorEvaluator",
    "PropagationState",
    "propagate",
    "density_probe",
]
