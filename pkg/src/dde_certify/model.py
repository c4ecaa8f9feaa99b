"""Domain types for linear DDEs with discrete delays.

The system is ``x'(t) = A0 x(t) + sum_k Ak x(t - tau_k)``.  Delays are not
part of :class:`DdeSystem`; they are passed to the operations that need them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


class ValidationError(ValueError):
    """Raised when a system, delay vector or phase vector is malformed."""


@dataclass(frozen=True, eq=False)
class DdeSystem:
    """Coefficient matrices ``A0, A1, ..., Am`` of a linear DDE.

    Use :func:`validate_system` to build one from raw nested lists.
    """

    matrices: tuple

    def __post_init__(self):
        for a in self.matrices:
            a.setflags(write=False)

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.matrices) - 1

    @property
    def A0(self) -> np.ndarray:
        return self.matrices[0]

    @property
    def delayed(self) -> tuple:
        return self.matrices[1:]

    def norm_bound(self) -> float:
        """Sum of Frobenius norms of all coefficient matrices."""
        return float(sum(np.linalg.norm(a) for a in self.matrices))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "A": [
                [[[float(z.real), float(z.imag)] for z in row] for row in a]
                for a in self.matrices
            ],
        }

    def __repr__(self):
        return f"DdeSystem(n={self.n}, m={self.m})"


def validate_system(raw: Sequence) -> DdeSystem:
    """Build a :class:`DdeSystem` from a list of square matrices.

    Scalars and 1-D inputs are not accepted; a scalar system is written as a
    list of 1x1 matrices, e.g. ``[[[-1]], [[0.5]]]``.
    """
    if raw is None or len(raw) == 0:
        raise ValidationError("need at least A0 and one delayed matrix")
    mats = []
    for k, a in enumerate(raw):
        try:
            arr = np.array(a, dtype=complex)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"matrix {k} is not numeric: {exc}") from None
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValidationError(f"dimension mismatch: matrix {k} has shape {arr.shape}")
        mats.append(arr)
    if len(mats) < 2:
        raise ValidationError("m = 0: at least one delayed term is required")
    n = mats[0].shape[0]
    for k, arr in enumerate(mats):
        if arr.shape != (n, n):
            raise ValidationError(
                f"dimension mismatch: matrix {k} has shape {arr.shape}, expected {(n, n)}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"non-finite entry in matrix {k}")
    return DdeSystem(tuple(mats))


def scalar_system(*coeffs: complex) -> DdeSystem:
    """Shorthand for the scalar DDE with coefficients ``a0, a1, ..., am``."""
    return validate_system([[[c]] for c in coeffs])


def validate_delays(sys: DdeSystem, taus: Sequence[float]) -> np.ndarray:
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if taus.shape != (sys.m,):
        raise ValidationError(f"expected {sys.m} delays, got {taus.size}")
    if not np.all(np.isfinite(taus)) or np.any(taus < 0):
        raise ValidationError("delays must be finite and non-negative")
    return taus


def canonical_phases(phis: Sequence[float]) -> np.ndarray:
    """Phases reduced to ``[0, 2*pi)`` by true modulo."""
    phis = np.mod(np.atleast_1d(np.asarray(phis, dtype=float)), TWO_PI)
    # np.mod can round a tiny negative input up to exactly 2*pi
    phis[phis >= TWO_PI] = 0.0
    return phis


def validate_phases(sys: DdeSystem, phis: Sequence[float]) -> np.ndarray:
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    if phis.shape != (sys.m,):
        raise ValidationError(f"expected {sys.m} phases, got {phis.size}")
    if not np.all(np.isfinite(phis)):
        raise ValidationError("phases must be finite")
    return canonical_phases(phis)


def s_of_phi(sys: DdeSystem, phi: Sequence[float]) -> np.ndarray:
    """The phase-parameterised matrix ``A0 + sum_k Ak exp(i phi_k)``."""
    phi = validate_phases(sys, phi)
    out = sys.A0.copy()
    for a, p in zip(sys.delayed, phi):
        out += a * np.exp(1j * p)
    return out


def s_of_phi_batch(sys: DdeSystem, phis: np.ndarray) -> np.ndarray:
    """Stack of ``S(phi)`` for an array of phase vectors with shape ``(..., m)``."""
    phis = np.asarray(phis, dtype=float)
    z = np.exp(1j * phis)
    stack = np.stack(sys.delayed)  # (m, n, n)
    return sys.A0 + np.einsum("...k,kij->...ij", z, stack)


# -- certificates -----------------------------------------------------------


class Verdict(str, Enum):
    CERTIFIED_STABLE = "CertifiedStable"
    CERTIFIED_NOT = "CertifiedNot"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Witness:
    """Evidence for a negative verdict.

    For a resonance (``condition == "A1.3"``) ``omega`` and ``phi`` satisfy
    ``det(i*omega*I - S(phi)) = 0``.  A singular ``S(0)`` is reported as
    ``omega = 0, phi = 0``.  A non-Hurwitz ``A0`` without a resonance carries
    the offending eigenvalue and no frequency.
    """

    condition: str
    omega: Optional[float] = None
    phi: Optional[tuple] = None
    eigenvalue: Optional[complex] = None

    def to_json_dict(self) -> dict:
        return {
            "condition": self.condition,
            "omega": self.omega,
            "phi": list(self.phi) if self.phi is not None else None,
            "eigenvalue": _cplx(self.eigenvalue),
        }


@dataclass(frozen=True)
class ConditionResult:
    # passed is None when the margin lies inside the tolerance band
    passed: Optional[bool]
    margin: float
    detail: Mapping[str, Any] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {"passed": self.passed, "margin": self.margin, "detail": _jsonable(self.detail)}


@dataclass(frozen=True)
class Certificate:
    verdict: Verdict
    margin: float
    witness: Optional[Witness] = None
    condition_trace: Mapping[str, ConditionResult] = field(default_factory=dict)
    method: str = ""

    def __post_init__(self):
        if self.verdict is Verdict.CERTIFIED_NOT and self.witness is None:
            raise ValueError("a negative certificate needs a witness")

    @property
    def stable(self) -> Optional[bool]:
        if self.verdict is Verdict.INCONCLUSIVE:
            return None
        return self.verdict is Verdict.CERTIFIED_STABLE

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "method": self.method,
            "margin": self.margin,
            "witness": self.witness.to_json_dict() if self.witness else None,
            "condition_trace": {k: v.to_json_dict() for k, v in self.condition_trace.items()},
        }


@dataclass(frozen=True)
class CharRoot:
    value: complex
    residual: float
    multiplicity_hint: int = 1

    def to_json_dict(self) -> dict:
        return {
            "re": float(self.value.real),
            "im": float(self.value.imag),
            "residual": float(self.residual),
            "multiplicity_hint": int(self.multiplicity_hint),
        }


# -- JSON -------------------------------------------------------------------


def system_from_json_dict(data: Mapping) -> DdeSystem:
    """Parse ``{"n": int, "m": int, "A": [...]}`` with entries as ``[re, im]``."""
    try:
        n = data["n"]
        m = data["m"]
        raw = data["A"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"missing field {exc}") from None
    if not isinstance(n, int) or not isinstance(m, int) or n < 1 or m < 1:
        raise ValidationError("n and m must be positive integers")
    if not isinstance(raw, list) or len(raw) != m + 1:
        raise ValidationError(f"expected exactly m+1 = {m + 1} matrices")
    mats = []
    for k, mat in enumerate(raw):
        try:
            arr = np.array(mat, dtype=float)
        except (TypeError, ValueError):
            raise ValidationError(f"matrix {k} is not an n x n array of [re, im] pairs") from None
        if arr.shape != (n, n, 2):
            raise ValidationError(f"matrix {k} has shape {arr.shape[:2]}, expected {(n, n)}")
        mats.append(arr[..., 0] + 1j * arr[..., 1])
    return validate_system(mats)


def load_system(path) -> DdeSystem:
    with open(path) as fh:
        return system_from_json_dict(json.load(fh))


def _cplx(z):
    if z is None:
        return None
    return [float(np.real(z)), float(np.imag(z))]


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return _cplx(obj)
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj
