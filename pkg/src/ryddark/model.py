"""Level schemes, Hamiltonians and collapse operators for driven Rydberg atoms.

Two fixed schemes are provided:

* single atom, 4 levels ``(|0>, |1>, |p>, |R>)``: a ground pair, a
  short-lived intermediate state and a long-lived Rydberg state forming a
  driven ladder ``|1> -- Omega1 -- |p> -- Omega2 -- |R>`` with microwave
  coupling ``|0> <-> |1>``;
* two atoms, 7 levels each: atom 1 ``(|0>, |1>, |2>, |p0>, |p1>, |R0>,
  |R1>)`` carries ladders on ``|0>`` and ``|1>``, atom 2 ``(|0>, |1>, |2>,
  |p0>, |p2>, |R0>, |R2>)`` carries ladders on ``|0>`` and ``|2>``.  The
  joint 49-dimensional space is ordered atom-1 major.  The microwave drives
  ``|0> <-> |1>`` and ``|0> <-> |2>`` on both atoms with opposite signs
  (atom 1 gets ``+omega_mw``, atom 2 gets ``-omega_mw``), and the four
  Rydberg pair states ``|R_m>|R_n>`` are shifted by the interaction
  energies ``V_mn``.

All frequencies and rates are angular, in rad/us.  Builders are pure; the
returned ``ModelSystem`` values are safe to share between threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import dagger, kron

__all__ = [
    "AtomParams",
    "RRIMatrix",
    "ModelSystem",
    "DressedBasis",
    "EffectiveCouplingReport",
    "SINGLE_ATOM_LEVELS",
    "ATOM1_LEVELS",
    "ATOM2_LEVELS",
    "build_single_atom",
    "build_two_atom",
    "single_atom_dark_state",
    "dark_state",
    "dressed_basis",
    "target_state",
    "companion_dark_states",
    "ground_entangled_state",
    "initial_mixed_state",
    "effective_couplings",
]

SINGLE_ATOM_LEVELS = ("0", "1", "p", "R")
ATOM1_LEVELS = ("0", "1", "2", "p0", "p1", "R0", "R1")
ATOM2_LEVELS = ("0", "1", "2", "p0", "p2", "R0", "R2")

_IDX1 = {name: i for i, name in enumerate(ATOM1_LEVELS)}
_IDX2 = {name: i for i, name in enumerate(ATOM2_LEVELS)}


def _ketbra(dim: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def _basis(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


@dataclass(frozen=True)
class AtomParams:
    """Drive and decay parameters, all angular frequencies in rad/us.

    ``omega1`` couples ground <-> intermediate, ``omega2`` intermediate <->
    Rydberg, ``delta`` detunes the intermediate level, ``omega_mw`` is the
    microwave (or Raman) ground-state coupling, ``gamma_p`` / ``gamma_r``
    are the total decay rates of the intermediate and Rydberg levels.
    """

    omega1: float
    omega2: float
    gamma_p: float
    gamma_r: float = 0.0
    delta: float = 0.0
    omega_mw: float = 0.0

    def __post_init__(self):
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError("Rabi frequencies omega1, omega2 must be >= 0")
        if self.gamma_p <= 0:
            raise ValueError("gamma_p must be > 0")
        if self.gamma_r < 0:
            raise ValueError("gamma_r must be >= 0")
        if self.gamma_r >= self.gamma_p:
            warnings.warn(
                f"gamma_r={self.gamma_r:g} is not small against "
                f"gamma_p={self.gamma_p:g}; the scheme assumes a long-lived "
                "Rydberg state",
                stacklevel=2,
            )


@dataclass(frozen=True)
class RRIMatrix:
    """Rydberg pair interaction energies ``V_mn`` (rad/us).

    ``m`` indexes atom 1's Rydberg states (0, 1) and ``n`` atom 2's (0, 2).
    Preparing the entangled dark state relies on the asymmetry
    ``v00 << v10, v02, v12``.
    """

    v00: float
    v10: float
    v02: float
    v12: float

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {(0, 0): self.v00, (1, 0): self.v10, (0, 2): self.v02, (1, 2): self.v12}


@dataclass
class ModelSystem:
    """Assembled Hamiltonian, collapse operators and basis bookkeeping."""

    hamiltonian: np.ndarray
    collapse_ops: list[np.ndarray]
    dims: tuple[int, ...]
    basis_labels: tuple[tuple[str, ...], ...]

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))


@dataclass(frozen=True)
class DressedBasis:
    """Eigenbasis of the driven ladder: dark state plus bright pair.

    ``dark`` has eigenvalue ``e0 = 0``; ``zeta_plus`` / ``zeta_minus`` have
    ``e_plus = (delta + dtilde)/2`` / ``e_minus = (delta - dtilde)/2`` with
    ``dtilde = sqrt(delta^2 + 4 omega1^2 + 4 omega2^2)``.  Vectors live in
    the 4-level single-atom space and are orthonormal.
    """

    dark: np.ndarray
    zeta_plus: np.ndarray
    zeta_minus: np.ndarray
    e0: float
    e_plus: float
    e_minus: float
    n_plus: float
    n_minus: float


def build_single_atom(p: AtomParams) -> ModelSystem:
    """Four-level single-atom model.

    The Rydberg level decays with branching ``gamma_r/2`` each into ``|1>``
    and ``|p>``; the intermediate level decays into ``|1>`` at ``gamma_p``.
    """
    i0, i1, ip, ir = 0, 1, 2, 3
    coupling = (
        p.omega1 * _ketbra(4, i1, ip)
        + p.omega2 * _ketbra(4, ip, ir)
        + p.omega_mw * _ketbra(4, i0, i1)
    )
    h = p.delta * _ketbra(4, ip, ip) + coupling + dagger(coupling)
    collapse = [
        np.sqrt(p.gamma_r / 2) * _ketbra(4, i1, ir),
        np.sqrt(p.gamma_r / 2) * _ketbra(4, ip, ir),
        np.sqrt(p.gamma_p) * _ketbra(4, i1, ip),
    ]
    return ModelSystem(h, collapse, (4,), (SINGLE_ATOM_LEVELS,))


def _local_ladder(idx: dict[str, int], ground: str, pl: str, ryd: str,
                  p: AtomParams) -> np.ndarray:
    c = (p.omega1 * _ketbra(7, idx[ground], idx[pl])
         + p.omega2 * _ketbra(7, idx[pl], idx[ryd]))
    return c + dagger(c) + p.delta * _ketbra(7, idx[pl], idx[pl])


def _local_microwave(idx: dict[str, int], omega: float) -> np.ndarray:
    c = omega * (_ketbra(7, idx["0"], idx["1"]) + _ketbra(7, idx["0"], idx["2"]))
    return c + dagger(c)


def build_two_atom(p: AtomParams, v: RRIMatrix) -> ModelSystem:
    """Two-atom model: 49x49 Hamiltonian and the 24 collapse operators.

    Each Rydberg level decays at ``gamma_r/3`` and each intermediate level
    at ``gamma_p/3`` into every ground state of its own atom.
    """
    eye7 = np.eye(7, dtype=complex)

    h1 = (_local_ladder(_IDX1, "0", "p0", "R0", p)
          + _local_ladder(_IDX1, "1", "p1", "R1", p)
          + _local_microwave(_IDX1, p.omega_mw))
    h2 = (_local_ladder(_IDX2, "0", "p0", "R0", p)
          + _local_ladder(_IDX2, "2", "p2", "R2", p)
          + _local_microwave(_IDX2, -p.omega_mw))
    h = kron(h1, eye7) + kron(eye7, h2)
    for (m, n), vmn in v.as_dict().items():
        proj1 = _ketbra(7, _IDX1[f"R{m}"], _IDX1[f"R{m}"])
        proj2 = _ketbra(7, _IDX2[f"R{n}"], _IDX2[f"R{n}"])
        h += vmn * kron(proj1, proj2)

    collapse: list[np.ndarray] = []
    for src, rate in (("R0", p.gamma_r), ("R1", p.gamma_r),
                      ("p0", p.gamma_p), ("p1", p.gamma_p)):
        for j in ("0", "1", "2"):
            op = np.sqrt(rate / 3) * _ketbra(7, _IDX1[j], _IDX1[src])
            collapse.append(kron(op, eye7))
    for src, rate in (("R0", p.gamma_r), ("R2", p.gamma_r),
                      ("p0", p.gamma_p), ("p2", p.gamma_p)):
        for j in ("0", "1", "2"):
            op = np.sqrt(rate / 3) * _ketbra(7, _IDX2[j], _IDX2[src])
            collapse.append(kron(eye7, op))

    return ModelSystem(h, collapse, (7, 7), (ATOM1_LEVELS, ATOM2_LEVELS))


def _dark_amplitudes(omega1: float, omega2: float) -> tuple[float, float]:
    norm = np.hypot(omega1, omega2)
    if norm == 0:
        raise ValueError("dark state undefined for omega1 = omega2 = 0")
    return omega2 / norm, -omega1 / norm


def single_atom_dark_state(omega1: float, omega2: float) -> np.ndarray:
    """Ladder dark state in the 4-level space: annihilated by the drive."""
    cg, cr = _dark_amplitudes(omega1, omega2)
    return cg * _basis(4, 1) + cr * _basis(4, 3)


def dark_state(omega1: float, omega2: float, j: int) -> np.ndarray:
    """Dark state of ladder ``j`` in the 7-level local space.

    ``j = 0`` uses ``(|0>, |R0>)`` (present on both atoms); ``j = 1`` is
    atom 1's ladder, ``j = 2`` atom 2's; their ground and Rydberg
    components sit at the same local indices, so one vector serves both
    labelings.
    """
    if j not in (0, 1, 2):
        raise ValueError(f"ladder index must be 0, 1 or 2, got {j}")
    cg, cr = _dark_amplitudes(omega1, omega2)
    r_index = 5 if j == 0 else 6
    return cg * _basis(7, j) + cr * _basis(7, r_index)


def dressed_basis(p: AtomParams) -> DressedBasis:
    """Analytic eigenbasis of the single-atom ladder block."""
    o1, o2, d = p.omega1, p.omega2, p.delta
    dtilde = np.sqrt(d * d + 4 * o1 * o1 + 4 * o2 * o2)
    if dtilde == 0 or (o1 == 0 and o2 == 0):
        raise ValueError("ladder block is degenerate (omega1 = omega2 = delta = 0)")

    dark = single_atom_dark_state(o1, o2)
    zetas, norms = [], []
    for sign in (+1.0, -1.0):
        b = d + sign * dtilde
        n = np.sqrt(4 * o1 * o1 + b * b + 4 * o2 * o2)
        vec = (2 * o1 * _basis(4, 1) + b * _basis(4, 2) + 2 * o2 * _basis(4, 3)) / n
        zetas.append(vec)
        norms.append(float(n))
    return DressedBasis(
        dark=dark,
        zeta_plus=zetas[0],
        zeta_minus=zetas[1],
        e0=0.0,
        e_plus=(d + dtilde) / 2,
        e_minus=(d - dtilde) / 2,
        n_plus=norms[0],
        n_minus=norms[1],
    )


def _atom1_vec(omega1: float, omega2: float, which: str) -> np.ndarray:
    if which in ("D0", "D1"):
        return dark_state(omega1, omega2, int(which[1]))
    return _basis(7, _IDX1[which])


def _atom2_vec(omega1: float, omega2: float, which: str) -> np.ndarray:
    if which in ("D0", "D2"):
        return dark_state(omega1, omega2, int(which[1]))
    return _basis(7, _IDX2[which])


def _pair(omega1: float, omega2: float, a1: str, a2: str) -> np.ndarray:
    return np.kron(_atom1_vec(omega1, omega2, a1), _atom2_vec(omega1, omega2, a2))


def target_state(omega1: float, omega2: float) -> np.ndarray:
    """Three-dimensional entangled dark state of the two-atom scheme.

    Equal superposition of ``|D0>|D0>``, ``|D1>|1>`` and ``|2>|D2>``; for
    ``omega1 -> 0`` the dark states collapse onto bare ground levels and
    this becomes ``(|00> + |11> + |22>)/sqrt(3)``.
    """
    vec = (_pair(omega1, omega2, "D0", "D0")
           + _pair(omega1, omega2, "D1", "1")
           + _pair(omega1, omega2, "2", "D2"))
    return vec / np.linalg.norm(vec)


def companion_dark_states(omega1: float, omega2: float) -> tuple[np.ndarray, np.ndarray]:
    """The other two microwave-dark combinations of the two-atom scheme.

    Both are normalized here; neither is orthogonal to the target state by
    construction.  They matter as the competing steady states that the
    interaction asymmetry must de-stabilize.
    """
    d1 = (_pair(omega1, omega2, "D0", "D0")
          + _pair(omega1, omega2, "D1", "D2")
          + _pair(omega1, omega2, "2", "1"))
    d2 = (_pair(omega1, omega2, "D0", "1")
          + _pair(omega1, omega2, "D0", "D2")
          + _pair(omega1, omega2, "D1", "D0")
          + _pair(omega1, omega2, "2", "D0"))
    return d1 / np.linalg.norm(d1), d2 / np.linalg.norm(d2)


def ground_entangled_state() -> np.ndarray:
    """``(|00> + |11> + |22>)/sqrt(3)`` embedded in the 49-dim space."""
    vec = sum(np.kron(_basis(7, j), _basis(7, j)) for j in range(3))
    return vec / np.linalg.norm(vec)


def initial_mixed_state() -> np.ndarray:
    """Uniform mixture of the nine ground product states (49x49, trace 1)."""
    rho = np.zeros((49, 49), dtype=complex)
    for j in range(3):
        for jp in range(3):
            k = j * 7 + jp
            rho[k, k] = 1 / 9
    return rho


@dataclass(frozen=True)
class EffectiveCouplingReport:
    """Matrix-element diagnostics of the two-atom scheme.

    All entries are literal contractions against the assembled Hamiltonian
    (no closed forms are assumed).  ``rydberg_coupling[(m, n)]`` is the
    amplitude ``<R_m R_n| H |D_m D_n>`` that pumps a dark pair into the
    doubly excited Rydberg state; the asymmetry ratio compares the (0, 0)
    channel against the weakest of the other three (the scheme needs it
    to be small).  ``rydberg_coupling_closed_form`` evaluates
    ``V_mn * omega1^2 / (omega1^2 + omega2^2)``, which the contraction
    reproduces; ``rydberg_coupling_unnormalized`` evaluates the shorthand
    ``omega1^2 * V_mn`` that drops the dark-state normalization
    (dimensionally inconsistent; reported so the two conventions can be
    compared directly).
    """

    microwave_d0_2: float
    microwave_d0_d1: float
    microwave_d0_1: float
    microwave_d0_d2: float
    dark_pair_shift: dict[tuple[int, int], float] = field(default_factory=dict)
    rydberg_coupling: dict[tuple[int, int], float] = field(default_factory=dict)
    rydberg_coupling_closed_form: dict[tuple[int, int], float] = field(default_factory=dict)
    rydberg_coupling_unnormalized: dict[tuple[int, int], float] = field(default_factory=dict)
    asymmetry_ratio: float = np.inf


def effective_couplings(p: AtomParams, v: RRIMatrix) -> EffectiveCouplingReport:
    """Contract the full two-atom Hamiltonian into its effective couplings.

    Diagnostics only: propagation always uses the full model, never an
    effective one.
    """
    model = build_two_atom(p, v)
    h = model.hamiltonian
    o1, o2 = p.omega1, p.omega2

    hw1 = _local_microwave(_IDX1, p.omega_mw)
    hw2 = _local_microwave(_IDX2, -p.omega_mw)
    d0_1 = dark_state(o1, o2, 0)
    mw_d0_2 = float(np.real(d0_1.conj() @ hw1 @ _basis(7, _IDX1["2"])))
    mw_d0_d1 = float(np.real(d0_1.conj() @ hw1 @ dark_state(o1, o2, 1)))
    mw_d0_1 = float(np.real(d0_1.conj() @ hw2 @ _basis(7, _IDX2["1"])))
    mw_d0_d2 = float(np.real(d0_1.conj() @ hw2 @ dark_state(o1, o2, 2)))

    shift: dict[tuple[int, int], float] = {}
    coupling: dict[tuple[int, int], float] = {}
    closed: dict[tuple[int, int], float] = {}
    unnormalized: dict[tuple[int, int], float] = {}
    for (m, n), vmn in v.as_dict().items():
        dd = _pair(o1, o2, f"D{m}", f"D{n}")
        rr = np.kron(_basis(7, _IDX1[f"R{m}"]), _basis(7, _IDX2[f"R{n}"]))
        shift[(m, n)] = float(np.real(dd.conj() @ h @ dd))
        coupling[(m, n)] = float(np.real(rr.conj() @ h @ dd))
        closed[(m, n)] = vmn * o1 * o1 / (o1 * o1 + o2 * o2)
        unnormalized[(m, n)] = o1 * o1 * vmn

    others = [abs(coupling[k]) for k in ((1, 0), (0, 2), (1, 2))]
    ratio = abs(coupling[(0, 0)]) / min(others) if min(others) > 0 else np.inf

    return EffectiveCouplingReport(
        microwave_d0_2=mw_d0_2,
        microwave_d0_d1=mw_d0_d1,
        microwave_d0_1=mw_d0_1,
        microwave_d0_d2=mw_d0_d2,
        dark_pair_shift=shift,
        rydberg_coupling=coupling,
        rydberg_coupling_closed_form=closed,
        rydberg_coupling_unnormalized=unnormalized,
        asymmetry_ratio=ratio,
    )
