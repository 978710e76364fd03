"""Unit tests for the setting grid, sampling, and count tables."""

import math

import numpy as np
import pytest

from conftest import make_table
from qkdlab import (
    Basis,
    ChannelParams,
    ConfigurationError,
    MenuMode,
    NoiseParams,
    Party,
    SettingOutcome,
    SimMode,
    StateMenu,
    StatePrepSpec,
    build_setting_grid,
    run_protocol,
    setting_distribution,
    setting_stream,
    simulate_setting,
)

IDEAL = NoiseParams()
ALIGNED = ChannelParams()


class TestMenusAndGrid:
    @pytest.mark.parametrize(
        "mode,size",
        [(MenuMode.SIX, 36), (MenuMode.FOUR_CHECK, 36), (MenuMode.TWO_CHECK, 24), (MenuMode.ONE_CHECK, 18)],
    )
    def test_grid_sizes(self, mode, size):
        grid = build_setting_grid(StateMenu(mode, Party.ALICE), StateMenu(MenuMode.SIX, Party.BOB))
        assert len(grid) == size

    def test_grid_order_is_alice_major_canonical(self):
        grid = build_setting_grid(
            StateMenu(MenuMode.SIX, Party.ALICE), StateMenu(MenuMode.SIX, Party.BOB)
        )
        first_six = [(s.alice.basis, s.alice.bit, s.bob.basis, s.bob.bit) for s in grid[:6]]
        assert first_six[0] == (Basis.Z, +1, Basis.Z, +1)
        assert first_six[1] == (Basis.Z, +1, Basis.Z, -1)
        assert first_six[2] == (Basis.Z, +1, Basis.X, +1)
        # Alice holds Z+ for the whole first block
        assert all(entry[0] is Basis.Z and entry[1] == +1 for entry in first_six)

    def test_grid_order_stable_across_calls(self):
        menus = (StateMenu(MenuMode.SIX, Party.ALICE), StateMenu(MenuMode.SIX, Party.BOB))
        assert build_setting_grid(*menus) == build_setting_grid(*menus)

    def test_one_check_alice_states(self):
        specs = StateMenu(MenuMode.ONE_CHECK, Party.ALICE).state_specs()
        assert [(s.basis, s.bit) for s in specs] == [(Basis.Z, +1), (Basis.Z, -1), (Basis.X, +1)]

    def test_reduced_menu_for_bob_rejected(self):
        with pytest.raises(ConfigurationError):
            StateMenu(MenuMode.ONE_CHECK, Party.BOB)

    def test_variant_theta_stamped_on_x_plus_only(self):
        specs = StateMenu(MenuMode.SIX, Party.ALICE).state_specs(phase_theta=0.8)
        for spec in specs:
            if spec.basis is Basis.X and spec.bit > 0:
                assert spec.phase_theta == pytest.approx(0.8)
            else:
                assert spec.phase_theta == 0.0


class TestSettingDistribution:
    def _setting(self, basis_a, bit_a, basis_b, bit_b):
        from qkdlab import Setting

        return Setting(StatePrepSpec(basis_a, bit_a), StatePrepSpec(basis_b, bit_b))

    def test_antiparallel_z_ideal(self):
        probs = setting_distribution(self._setting(Basis.Z, +1, Basis.Z, -1), ALIGNED, IDEAL)
        assert probs == pytest.approx((0.5, 0.5, 0.0), abs=1e-14)

    def test_aligned_x_pair(self):
        channel = ChannelParams(beta_a=0.7, beta_b=0.7)
        probs = setting_distribution(self._setting(Basis.X, +1, Basis.X, +1), channel, IDEAL)
        assert probs == pytest.approx((0.5, 0.0, 0.5), abs=1e-14)

    @pytest.mark.parametrize("p", [0.0, 0.04, 0.2])
    def test_depolarizing_scales_click_asymmetry(self, p):
        channel = ChannelParams(beta_a=0.0, beta_b=1.05)
        noise = NoiseParams(depol_a=p, depol_b=p)
        probs = setting_distribution(self._setting(Basis.X, +1, Basis.X, +1), channel, noise)
        expected = (1 - p) ** 2 * math.cos(-1.05) / 2
        assert probs.p_psi_plus - probs.p_psi_minus == pytest.approx(expected, abs=1e-13)

    def test_background_click_mixing(self):
        bg = 0.02
        probs = setting_distribution(
            self._setting(Basis.Z, +1, Basis.Z, +1), ALIGNED, NoiseParams(background_click=bg)
        )
        # a never-clicking setting now clicks with probability bg, split evenly
        assert probs.p_psi_plus == pytest.approx(bg / 2, abs=1e-14)
        assert probs.p_psi_minus == pytest.approx(bg / 2, abs=1e-14)
        assert probs.p_no_click == pytest.approx(1 - bg, abs=1e-14)


class TestSampling:
    def _setting(self):
        from qkdlab import Setting

        return Setting(StatePrepSpec(Basis.Z, +1), StatePrepSpec(Basis.Z, -1))

    def test_zero_shots(self):
        outcome = simulate_setting(self._setting(), ALIGNED, IDEAL, 0, setting_stream(0, 0))
        assert (outcome.n_psi_plus, outcome.n_psi_minus, outcome.n_no_click) == (0, 0, 0)

    def test_impossible_outcomes_never_drawn(self):
        from qkdlab import Setting

        setting = Setting(StatePrepSpec(Basis.Z, +1), StatePrepSpec(Basis.Z, +1))
        outcome = simulate_setting(setting, ALIGNED, IDEAL, 100_000, setting_stream(1, 0))
        assert outcome.n_no_click == 100_000

    def test_click_split_within_binomial_error(self):
        shots = 100_000
        outcome = simulate_setting(self._setting(), ALIGNED, IDEAL, shots, setting_stream(2, 0))
        half_width = 5 * math.sqrt(shots * 0.25)
        assert abs(outcome.n_psi_plus - shots / 2) < half_width

    def test_counts_conserved_across_grid(self):
        table = make_table(beta_b=0.9, depol_a=0.02, background=0.01,
                           mode=SimMode.MONTECARLO, shots=5000, seed=11)
        for setting in table.settings:
            outcome = table.outcomes[setting]
            assert outcome.n_psi_plus + outcome.n_psi_minus + outcome.n_no_click == outcome.shots

    def test_conservation_enforced(self):
        from qkdlab import Setting

        setting = Setting(StatePrepSpec(Basis.Z, +1), StatePrepSpec(Basis.Z, -1))
        with pytest.raises(ValueError, match="counts sum"):
            SettingOutcome(setting, 1, 1, 1, 100)


class TestRunProtocol:
    def test_same_seed_same_table(self):
        kwargs = dict(beta_b=0.4, depol_a=0.03, mode=SimMode.MONTECARLO, shots=20_000, seed=9)
        table_one, table_two = make_table(**kwargs), make_table(**kwargs)
        assert table_one.settings == table_two.settings
        for setting in table_one.settings:
            assert table_one.outcomes[setting] == table_two.outcomes[setting]

    def test_different_seed_differs(self):
        table_one = make_table(beta_b=0.4, mode=SimMode.MONTECARLO, shots=20_000, seed=1)
        table_two = make_table(beta_b=0.4, mode=SimMode.MONTECARLO, shots=20_000, seed=2)
        assert any(
            table_one.outcomes[s] != table_two.outcomes[s] for s in table_one.settings
        )

    def test_substreams_independent_of_evaluation_order(self):
        """Re-simulating the grid in reverse order reproduces every count."""
        channel = ChannelParams(beta_a=0.0, beta_b=1.3)
        noise = NoiseParams(depol_a=0.02, depol_b=0.01, background_click=0.005)
        table = run_protocol(
            MenuMode.SIX, MenuMode.SIX, channel, noise,
            mode=SimMode.MONTECARLO, shots=4000, seed=17,
        )
        for index in reversed(range(len(table.settings))):
            setting = table.settings[index]
            redone = simulate_setting(
                setting, channel, noise, 4000, setting_stream(17, index)
            )
            assert redone == table.outcomes[setting]

    def test_analytic_zz_perfectly_anticorrelated(self):
        from qkdlab import expectation_full

        table = make_table(beta_a=0.3, beta_b=2.2)
        assert expectation_full(table, Basis.Z, Basis.Z).value == pytest.approx(-1.0, abs=1e-14)

    def test_analytic_one_check_grid_size(self):
        table = make_table(alice_menu=MenuMode.ONE_CHECK)
        assert len(table.settings) == 18

    def test_bob_reduced_menu_rejected(self):
        with pytest.raises(ConfigurationError, match="bob_menu"):
            run_protocol(MenuMode.SIX, MenuMode.ONE_CHECK, ALIGNED, IDEAL)

    def test_analytic_counts_are_expected_fractions(self):
        table = make_table(beta_b=0.6, shots=10_000)
        setting = table.settings[1]  # (Z+, Z-)
        outcome = table.outcomes[setting]
        assert outcome.n_psi_plus == pytest.approx(5000.0, abs=1e-9)
        assert outcome.n_no_click == pytest.approx(0.0, abs=1e-9)

    def test_monte_carlo_matches_analytic_within_five_sigma(self):
        shots = 100_000
        analytic = make_table(beta_b=0.8, depol_a=0.03, background=0.01, shots=shots)
        sampled = make_table(beta_b=0.8, depol_a=0.03, background=0.01,
                             mode=SimMode.MONTECARLO, shots=shots, seed=23)
        for setting in analytic.settings:
            expected = analytic.outcomes[setting]
            observed = sampled.outcomes[setting]
            for name in ("n_psi_plus", "n_psi_minus", "n_no_click"):
                mean = getattr(expected, name)
                p = mean / shots
                sigma = math.sqrt(shots * p * (1 - p))
                if sigma == 0.0:
                    assert getattr(observed, name) == mean
                else:
                    assert abs(getattr(observed, name) - mean) < 5 * sigma, (setting, name)


def test_table_lookup_ignores_variant_phase():
    table = make_table(alice_menu=MenuMode.ONE_CHECK, phase_variant=True, phase_theta=1.1)
    outcome = table.outcome(Basis.X, +1, Basis.Y, +1)
    assert outcome.setting.alice.phase_theta == pytest.approx(1.1)


def test_stream_determinism():
    a = setting_stream(42, 7, (3,)).integers(0, 2**31, size=4)
    b = setting_stream(42, 7, (3,)).integers(0, 2**31, size=4)
    c = setting_stream(42, 8, (3,)).integers(0, 2**31, size=4)
    np.testing.assert_array_equal(a, b)
    assert (a != c).any()
