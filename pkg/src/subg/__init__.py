"""Explicit-constant certificates for subgaussian random variables.

Submodules:

* :mod:`subg.certkit`: certificate value types and validation
* :mod:`subg.convert`: conversions between certificate kinds
* :mod:`subg.transform`: centering, shifting, sums and maxima
* :mod:`subg.deviation`: tail and martingale deviation bounds
* :mod:`subg.oracle`: reference distributions, verification, simulation
* :mod:`subg.cli`: the ``subg`` command
"""
from .certkit import CertKind, Certificate, SignConstraint, VariableContext, prefactor, validate
from .errors import (
    Diverges,
    DomainError,
    EmptyInputError,
    MeanNotZero,
    MissingLambda,
    NegativeInput,
    NoSuchEdge,
    NonFiniteError,
    ParamRegimeMismatch,
    SubgError,
    UnexpectedLambda,
)

__version__ = "0.1.0"

__all__ = [
    "CertKind",
    "Certificate",
    "SignConstraint",
    "VariableContext",
    "prefactor",
    "validate",
    "Diverges",
    "DomainError",
    "EmptyInputError",
    "MeanNotZero",
    "MissingLambda",
    "NegativeInput",
    "NoSuchEdge",
    "NonFiniteError",
    "ParamRegimeMismatch",
    "SubgError",
    "UnexpectedLambda",
]
