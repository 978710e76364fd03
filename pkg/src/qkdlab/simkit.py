"""Protocol-round simulator: setting grids, sampling, coincidence tables.

A "setting" is one (Alice state, Bob state) preparation pair.  For every
setting in the active grid the simulator computes the exact outcome
distribution through :mod:`qkdlab.qcore`, then either stores the expected
counts directly (analytic mode) or draws one seeded multinomial sample
(Monte Carlo mode).  The result is a :class:`CountTable`, the raw record
every downstream estimator consumes.

Reproducibility: each setting samples from its own random stream derived
from ``(seed, *seed_path, setting_index)`` via ``numpy``'s
``SeedSequence`` spawn keys, so counts do not depend on evaluation order
or on how work is split across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigurationError
from .qcore import (
    Basis,
    ChannelParams,
    NoiseParams,
    OutcomeProbs,
    StatePrepSpec,
    TwoQubitDensity,
    apply_depolarizing,
    apply_frame_rotation,
    bsm_outcome_probs,
    make_state,
)

COUNT_CONSERVATION_TOL = 1e-6


class SimMode(Enum):
    ANALYTIC = "analytic"
    MONTECARLO = "montecarlo"

    @classmethod
    def parse(cls, name: str) -> "SimMode":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ConfigurationError(
                f"mode must be 'analytic' or 'montecarlo', got {name!r}"
            ) from None


class Party(Enum):
    ALICE = "alice"
    BOB = "bob"


class MenuMode(Enum):
    """How many check states a party sends besides the two key states.

    ``SIX`` is the conventional full menu (X+-, Y+- checks plus Z+- keys);
    ``FOUR_CHECK`` is the same six-state list named after its four check
    states.  ``TWO_CHECK`` drops the Y basis, ``ONE_CHECK`` keeps a single
    X+ check state; both reductions apply to Alice only.
    """

    SIX = "six"
    FOUR_CHECK = "four"
    TWO_CHECK = "two"
    ONE_CHECK = "one"

    @classmethod
    def parse(cls, name: str) -> "MenuMode":
        aliases = {
            "six": cls.SIX,
            "four": cls.FOUR_CHECK,
            "four_check": cls.FOUR_CHECK,
            "two": cls.TWO_CHECK,
            "two_check": cls.TWO_CHECK,
            "one": cls.ONE_CHECK,
            "one_check": cls.ONE_CHECK,
        }
        key = str(name).strip().lower()
        if key not in aliases:
            raise ConfigurationError(
                f"unknown state menu {name!r}; expected one of "
                "six, four, two, one"
            )
        return aliases[key]


# Canonical state order: basis Z, X, Y; bit +, - within each basis.
_FULL_ORDER = (
    (Basis.Z, +1),
    (Basis.Z, -1),
    (Basis.X, +1),
    (Basis.X, -1),
    (Basis.Y, +1),
    (Basis.Y, -1),
)

_MENU_STATES = {
    MenuMode.SIX: _FULL_ORDER,
    MenuMode.FOUR_CHECK: _FULL_ORDER,
    MenuMode.TWO_CHECK: _FULL_ORDER[:4],
    MenuMode.ONE_CHECK: _FULL_ORDER[:3],
}

FULL_MENU_MODES = (MenuMode.SIX, MenuMode.FOUR_CHECK)


@dataclass(frozen=True)
class StateMenu:
    """State list one party draws from; reductions are Alice-only."""

    mode: MenuMode
    party: Party

    def __post_init__(self):
        if self.mode not in FULL_MENU_MODES and self.party is not Party.ALICE:
            raise ConfigurationError(
                f"{self.party.value} cannot use the reduced menu "
                f"{self.mode.value!r}; only Alice's menu may shrink"
            )

    def state_specs(self, phase_theta: float = 0.0) -> tuple[StatePrepSpec, ...]:
        """Menu entries in canonical order.

        ``phase_theta`` is stamped onto the X+ entry so the phase-freedom
        variant can replace it with an arbitrary equal superposition; with
        the variant disabled the stamp is inert.
        """
        specs = []
        for basis, bit in _MENU_STATES[self.mode]:
            theta = phase_theta if (basis is Basis.X and bit > 0) else 0.0
            specs.append(StatePrepSpec(basis, bit, theta))
        return tuple(specs)


@dataclass(frozen=True)
class Setting:
    """One (Alice preparation, Bob preparation) pair of the grid."""

    alice: StatePrepSpec
    bob: StatePrepSpec


@dataclass(frozen=True)
class SettingOutcome:
    """Coincidence record of one setting.

    Counts are integers in Monte Carlo mode and expected (real-valued)
    counts in analytic mode; either way they sum to ``shots``.
    """

    setting: Setting
    n_psi_plus: float
    n_psi_minus: float
    n_no_click: float
    shots: float

    def __post_init__(self):
        total = self.n_psi_plus + self.n_psi_minus + self.n_no_click
        if abs(total - self.shots) > COUNT_CONSERVATION_TOL * max(1.0, self.shots):
            raise ValueError(
                f"counts sum to {total!r} but shots is {self.shots!r}"
            )

    @property
    def n_clicks(self) -> float:
        return self.n_psi_plus + self.n_psi_minus


@dataclass(frozen=True)
class CountTable:
    """Complete coincidence record of one protocol run plus its metadata."""

    settings: tuple[Setting, ...]
    outcomes: dict[Setting, "SettingOutcome"]
    channel: ChannelParams
    noise: NoiseParams
    mode: SimMode
    shots_per_setting: float
    seed: int
    alice_menu: MenuMode
    bob_menu: MenuMode
    phase_variant: bool = False
    phase_theta: float = 0.0
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for setting in self.settings:
            key = (setting.alice.basis, setting.alice.bit, setting.bob.basis, setting.bob.bit)
            if key in index:
                raise ValueError(f"duplicate setting for {key}")
            index[key] = self.outcomes[setting]
        object.__setattr__(self, "_index", index)

    def outcome(self, basis_a: Basis, bit_a: int, basis_b: Basis, bit_b: int) -> SettingOutcome:
        """Look a setting up by basis/bit, ignoring any variant phase."""
        return self._index[(basis_a, bit_a, basis_b, bit_b)]

    def has(self, basis_a: Basis, bit_a: int, basis_b: Basis, bit_b: int) -> bool:
        return (basis_a, bit_a, basis_b, bit_b) in self._index


def build_setting_grid(
    alice_menu: StateMenu,
    bob_menu: StateMenu,
    phase_theta: float = 0.0,
) -> list[Setting]:
    """Cartesian product of the two menus, Alice-major, canonical order."""
    alice_specs = alice_menu.state_specs(phase_theta=phase_theta)
    bob_specs = bob_menu.state_specs()
    return [Setting(a, b) for a in alice_specs for b in bob_specs]


def setting_distribution(
    setting: Setting,
    channel: ChannelParams,
    noise: NoiseParams,
    phase_variant: bool = False,
) -> OutcomeProbs:
    """Exact outcome distribution of one setting under channel and noise.

    Pipeline: prepare both qubits, rotate each by its arm's frame angle,
    depolarize each arm, evaluate the Bell-analyzer probabilities, then
    mix in background clicks (which land on the two odd-parity outcomes
    with equal weight).
    """
    state_a = apply_frame_rotation(
        make_state(setting.alice, phase_variant=phase_variant), channel.beta_a
    )
    state_b = apply_frame_rotation(make_state(setting.bob), channel.beta_b)
    rho = TwoQubitDensity.from_product(state_a, state_b)
    rho = apply_depolarizing(rho, "A", noise.depol_a)
    rho = apply_depolarizing(rho, "B", noise.depol_b)
    ideal = bsm_outcome_probs(rho, channel.bsm_phase_offset)
    bg = noise.background_click
    return OutcomeProbs(
        (1.0 - bg) * ideal.p_psi_plus + bg / 2.0,
        (1.0 - bg) * ideal.p_psi_minus + bg / 2.0,
        (1.0 - bg) * ideal.p_no_click,
    )


def simulate_setting(
    setting: Setting,
    channel: ChannelParams,
    noise: NoiseParams,
    shots: int,
    rng: np.random.Generator,
    phase_variant: bool = False,
) -> SettingOutcome:
    """Draw one multinomial sample of ``shots`` rounds for a setting."""
    if shots < 0:
        raise ValueError(f"shots must be non-negative, got {shots!r}")
    probs = setting_distribution(setting, channel, noise, phase_variant=phase_variant)
    pvals = np.array([probs.p_psi_plus, probs.p_psi_minus, probs.p_no_click])
    pvals = np.clip(pvals, 0.0, 1.0)
    pvals[-1] = max(1.0 - pvals[0] - pvals[1], 0.0)
    counts = rng.multinomial(shots, pvals)
    return SettingOutcome(
        setting=setting,
        n_psi_plus=int(counts[0]),
        n_psi_minus=int(counts[1]),
        n_no_click=int(counts[2]),
        shots=shots,
    )


def setting_stream(seed: int, index: int, seed_path: tuple[int, ...] = ()) -> np.random.Generator:
    """Independent random stream for setting ``index`` of one run.

    Streams are keyed on ``(seed, *seed_path, index)`` so permuting the
    simulation order, or splitting settings across workers, cannot change
    any setting's sample.
    """
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(*seed_path, index))
    return np.random.default_rng(seq)


def run_protocol(
    alice_menu: MenuMode,
    bob_menu: MenuMode,
    channel: ChannelParams,
    noise: NoiseParams,
    mode: SimMode = SimMode.ANALYTIC,
    shots: int = 100_000,
    seed: int = 0,
    phase_variant: bool = False,
    phase_theta: float = 0.0,
    seed_path: tuple[int, ...] = (),
) -> CountTable:
    """Simulate the full setting grid once and assemble the count table.

    Bob always transmits the full six-state menu; passing a reduced menu
    for him is a configuration error.  In analytic mode the table holds
    exact expected counts (probability times ``shots``), giving noiseless
    ground truth; in Monte Carlo mode each setting is sampled from its own
    deterministic substream.
    """
    if bob_menu not in FULL_MENU_MODES:
        raise ConfigurationError(
            f"bob_menu must be the full menu (six/four), got {bob_menu.value!r}"
        )
    if shots < 1:
        raise ConfigurationError(f"shots must be at least 1, got {shots!r}")
    alice = StateMenu(alice_menu, Party.ALICE)
    bob = StateMenu(bob_menu, Party.BOB)
    grid = build_setting_grid(alice, bob, phase_theta=phase_theta)

    outcomes = {}
    for index, setting in enumerate(grid):
        if mode is SimMode.MONTECARLO:
            outcome = simulate_setting(
                setting, channel, noise, shots,
                setting_stream(seed, index, seed_path),
                phase_variant=phase_variant,
            )
        else:
            probs = setting_distribution(setting, channel, noise, phase_variant=phase_variant)
            n_plus = probs.p_psi_plus * shots
            n_minus = probs.p_psi_minus * shots
            outcome = SettingOutcome(
                setting=setting,
                n_psi_plus=n_plus,
                n_psi_minus=n_minus,
                n_no_click=shots - n_plus - n_minus,
                shots=shots,
            )
        outcomes[setting] = outcome

    return CountTable(
        settings=tuple(grid),
        outcomes=outcomes,
        channel=channel,
        noise=noise,
        mode=mode,
        shots_per_setting=shots,
        seed=seed,
        alice_menu=alice_menu,
        bob_menu=bob_menu,
        phase_variant=phase_variant,
        phase_theta=phase_theta,
    )
