"""Delay-independent stability certificates for linear DDEs with discrete delays."""

from .model import (
    Certificate,
    CharRoot,
    ConditionResult,
    DdeSystem,
    ValidationError,
    Verdict,
    Witness,
    canonical_phases,
    load_system,
    s_of_phi,
    scalar_system,
    system_from_json_dict,
    validate_system,
)

__version__ = "0.1.0"
