"""Figures of merit: fidelity, purity, negativity, populations.

Fidelity here is always the pure-target form ``<psi| rho |psi>``.
Negativity is built from the trace norm of the partially transposed state,

    N = (||rho^(T_split)||_1 - 1) / 2,      E_N = log2 ||rho^(T_split)||_1,

so the identity ``E_N = log2(2 N + 1)`` is exact by construction; a
product state across the split gives zero for both.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .linalg import partial_transpose, trace_norm

__all__ = [
    "MeasureReport",
    "fidelity",
    "purity",
    "negativity",
    "log_negativity",
    "population",
    "measure_state",
]

_FID_TOL = 1e-9
_NEG_TOL = 1e-9


@dataclass(frozen=True)
class MeasureReport:
    """One state's full scorecard."""

    fidelity: float
    purity: float
    negativity: float
    log_negativity: float
    populations: dict[str, float] = field(default_factory=dict)


def _expectation(rho: np.ndarray, psi: np.ndarray, what: str) -> float:
    rho = np.asarray(rho, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if rho.shape[0] != psi.shape[0] or rho.ndim != 2:
        raise ValueError(
            f"{what}: state dimension {psi.shape} does not match rho {rho.shape}"
        )
    value = np.real(psi.conj() @ rho @ psi)
    if value < -_FID_TOL or value > 1.0 + _FID_TOL:
        raise ValueError(f"{what} {value:.6g} outside [0, 1] beyond tolerance")
    return float(min(max(value, 0.0), 1.0))


def fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """Overlap ``<target| rho |target>`` with a pure target state."""
    return _expectation(rho, target, "fidelity")


def purity(rho: np.ndarray) -> float:
    """``Tr[rho^2]``; 1 for pure states, 1/d for the maximally mixed one."""
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.trace(rho @ rho)))


def _pt_trace_norm(rho: np.ndarray, dims: Sequence[int], split: int) -> float:
    return trace_norm(partial_transpose(rho, dims, split))


def negativity(rho: np.ndarray, dims: Sequence[int], split: int = 1) -> float:
    """Entanglement negativity across the bipartition at ``split``."""
    value = (_pt_trace_norm(rho, dims, split) - 1.0) / 2.0
    if value < -_NEG_TOL:
        raise ValueError(f"negativity {value:.6g} below zero beyond tolerance")
    return float(max(value, 0.0))


def log_negativity(rho: np.ndarray, dims: Sequence[int], split: int = 1) -> float:
    """Logarithmic negativity ``log2 ||rho^(T_split)||_1``."""
    value = np.log2(_pt_trace_norm(rho, dims, split))
    if value < -_NEG_TOL:
        raise ValueError(f"log-negativity {value:.6g} below zero beyond tolerance")
    return float(max(value, 0.0))


def population(rho: np.ndarray, basis_state: np.ndarray) -> float:
    """Occupation ``<psi| rho |psi>`` of a (not necessarily bare) state."""
    return _expectation(rho, basis_state, "population")


def measure_state(
    rho: np.ndarray,
    target: np.ndarray,
    dims: Sequence[int] | None = None,
    split: int = 1,
    populations: Mapping[str, np.ndarray] | None = None,
) -> MeasureReport:
    """Full scorecard of one state.

    Negativities are only defined for composite systems; for a bare system
    (``dims`` is None or has one entry) they are reported as zero.
    """
    if dims is not None and len(dims) > 1:
        tn = _pt_trace_norm(rho, dims, split)
        neg = max((tn - 1.0) / 2.0, 0.0)
        logneg = max(float(np.log2(tn)), 0.0)
    else:
        neg, logneg = 0.0, 0.0
    pops = {name: population(rho, psi) for name, psi in (populations or {}).items()}
    return MeasureReport(
        fidelity=fidelity(rho, target),
        purity=purity(rho),
        negativity=float(neg),
        log_negativity=logneg,
        populations=pops,
    )
