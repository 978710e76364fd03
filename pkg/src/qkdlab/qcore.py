"""Exact two-qubit quantum engine behind the protocol simulator.

Alice and Bob each prepare one of six single-qubit states (the Z, X and Y
eigenstates); the untrusted relay projects the incoming pair onto the two
odd-parity Bell states that a linear-optics analyzer can resolve.  This
module computes those outcome probabilities exactly from 4x4 density
matrices.  Finite-statistics sampling is layered on top in `simkit`.

Conventions
-----------
* Qubit amplitudes are written in the computational basis {|0>, |1>}.
* Two-qubit matrices use the product basis {|00>, |01>, |10>, |11>}.
* A reference-frame misalignment of angle ``beta`` between a sender and
  the relay acts on the transmitted qubit as the phase unitary
  diag(1, e^{i*beta}); the Z axis is untouched while the X/Y equator
  rotates by ``beta``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi
_SQRT_HALF = 1.0 / math.sqrt(2.0)

# Tolerances for state validation.
NORM_TOL = 1e-12
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10


class Basis(Enum):
    """Measurement/preparation basis of a single qubit."""

    Z = "Z"
    X = "X"
    Y = "Y"


class BellOutcome(Enum):
    """Relay announcement for one protocol round.

    The analyzer resolves only the two odd-parity Bell states; every
    other projection is lumped into ``NO_CLICK`` and never enters the
    coincidence record.
    """

    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"
    NO_CLICK = "no_click"


class OutcomeProbs(NamedTuple):
    """Probability triple for one prepared setting."""

    p_psi_plus: float
    p_psi_minus: float
    p_no_click: float


@dataclass(frozen=True)
class PureQubit:
    """Normalized single-qubit state amp0*|0> + amp1*|1>."""

    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm_sq = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"qubit amplitudes not normalized: |amp|^2 = {norm_sq!r}")

    def vector(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)


@dataclass(frozen=True)
class StatePrepSpec:
    """One entry of a sender's state menu.

    ``bit`` is +1 or -1 and selects the basis eigenstate.  ``phase_theta``
    only matters for the phase-freedom variant of the X+ check state and
    is ignored everywhere else (see :func:`make_state`).
    """

    basis: Basis
    bit: int
    phase_theta: float = 0.0

    def __post_init__(self):
        if self.bit not in (+1, -1):
            raise ValueError(f"bit must be +1 or -1, got {self.bit!r}")
        object.__setattr__(self, "phase_theta", float(self.phase_theta) % TWO_PI)


@dataclass(frozen=True)
class ChannelParams:
    """Frame rotations of the two quantum channels plus the analyzer phase.

    ``beta_a``/``beta_b`` are the misalignment angles between Alice/Bob
    and the relay; ``bsm_phase_offset`` models a non-ideal phase picked
    up at the relay's beamsplitter, which shifts all X/Y-sector fringes
    by the same amount.  Angles are reduced to [0, 2*pi) on construction.
    """

    beta_a: float = 0.0
    beta_b: float = 0.0
    bsm_phase_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "beta_a", float(self.beta_a) % TWO_PI)
        object.__setattr__(self, "beta_b", float(self.beta_b) % TWO_PI)
        object.__setattr__(self, "bsm_phase_offset", float(self.bsm_phase_offset) % TWO_PI)


@dataclass(frozen=True)
class NoiseParams:
    """Channel imperfections applied on top of the ideal model.

    ``depol_a``/``depol_b`` are per-arm depolarizing strengths;
    ``background_click`` is the per-round probability that the relay's
    announcement is replaced by a uniformly random odd-parity click
    (accidental coincidence).
    """

    depol_a: float = 0.0
    depol_b: float = 0.0
    background_click: float = 0.0

    def __post_init__(self):
        for name in ("depol_a", "depol_b", "background_click"):
            value = float(getattr(self, name))
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True, eq=False)
class TwoQubitDensity:
    """Validated 4x4 density matrix in the product computational basis."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=HERMITICITY_TOL):
            raise ValueError("density matrix is not Hermitian")
        trace = m.trace().real
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {trace!r}, expected 1")
        eigs = np.linalg.eigvalsh(m)
        if eigs.min() < EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix has negative eigenvalue {eigs.min()!r}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_product(cls, state_a: PureQubit, state_b: PureQubit) -> "TwoQubitDensity":
        """Density matrix of the product state |a>|b>."""
        vec = np.kron(state_a.vector(), state_b.vector())
        return cls(np.outer(vec, vec.conj()))


def make_state(spec: StatePrepSpec, phase_variant: bool = False) -> PureQubit:
    """Prepare the qubit described by ``spec``.

    The six standard states are |Z+> = |0>, |Z-> = |1>,
    |X+-> = (|0> +- |1>)/sqrt(2) and |Y+-> = (|0> +- i|1>)/sqrt(2).
    With ``phase_variant`` enabled, the X+ check state becomes the
    general equal superposition (|0> + e^{i*theta}|1>)/sqrt(2); every
    other state is unaffected by the flag.
    """
    if spec.basis is Basis.Z:
        return PureQubit(1.0, 0.0) if spec.bit > 0 else PureQubit(0.0, 1.0)
    if spec.basis is Basis.X:
        if phase_variant and spec.bit > 0:
            return PureQubit(_SQRT_HALF, cmath.exp(1j * spec.phase_theta) * _SQRT_HALF)
        return PureQubit(_SQRT_HALF, spec.bit * _SQRT_HALF)
    return PureQubit(_SQRT_HALF, 1j * spec.bit * _SQRT_HALF)


def apply_frame_rotation(state: PureQubit, beta: float) -> PureQubit:
    """Propagate a qubit through a channel misaligned by angle ``beta``.

    Acts as diag(1, e^{i*beta}): |0> and |1> amplitudes keep their moduli,
    so Z-basis states are invariant while equatorial states rotate by
    ``beta`` around the Z axis.
    """
    return PureQubit(state.amp0, state.amp1 * cmath.exp(1j * beta))


def apply_depolarizing(rho: TwoQubitDensity, arm: str, p: float) -> TwoQubitDensity:
    """Depolarize one arm of a two-qubit state with strength ``p``.

    The selected qubit is replaced by the maximally mixed state with
    probability ``p``:  rho -> (1-p)*rho + p*(I/2 (x) tr_arm rho).
    Trace and positivity are preserved for p in [0, 1].
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing strength must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return rho
    m = rho.matrix.reshape(2, 2, 2, 2)  # indices [a, b, a', b']
    half_identity = np.eye(2, dtype=complex) / 2.0
    if arm == "A":
        marginal_b = np.einsum("abac->bc", m)
        mixed = np.kron(half_identity, marginal_b)
    elif arm == "B":
        marginal_a = np.einsum("abcb->ac", m)
        mixed = np.kron(marginal_a, half_identity)
    else:
        raise ValueError(f"arm must be 'A' or 'B', got {arm!r}")
    return TwoQubitDensity((1.0 - p) * rho.matrix + p * mixed)


def bsm_outcome_probs(rho: TwoQubitDensity, bsm_phase_offset: float = 0.0) -> OutcomeProbs:
    """Outcome probabilities of the relay's Bell-state analyzer.

    The analyzer projects onto
    |Psi+-_phi> = (|01> +- e^{i*phi}|10>)/sqrt(2) with phi the
    beamsplitter phase offset; the remaining probability mass is a
    no-click.  The returned triple sums to 1.
    """
    phase = cmath.exp(1j * bsm_phase_offset)
    psi_plus = np.array([0.0, 1.0, phase, 0.0], dtype=complex) * _SQRT_HALF
    psi_minus = np.array([0.0, 1.0, -phase, 0.0], dtype=complex) * _SQRT_HALF
    p_plus = float(np.real(psi_plus.conj() @ rho.matrix @ psi_plus))
    p_minus = float(np.real(psi_minus.conj() @ rho.matrix @ psi_minus))
    p_plus = min(max(p_plus, 0.0), 1.0)
    p_minus = min(max(p_minus, 0.0), 1.0)
    p_no_click = max(1.0 - p_plus - p_minus, 0.0)
    return OutcomeProbs(p_plus, p_minus, p_no_click)
