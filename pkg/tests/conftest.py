"""Shared builders for the test suite."""

import math

from qkdlab import (
    ChannelParams,
    MenuMode,
    NoiseParams,
    SimMode,
    run_protocol,
)

TWO_PI = 2.0 * math.pi

# 61 evenly spaced frame angles over [0, 2*pi)
BETA_GRID_61 = [i * TWO_PI / 61 for i in range(61)]


def make_table(
    beta_a=0.0,
    beta_b=0.0,
    depol_a=0.0,
    depol_b=0.0,
    background=0.0,
    bsm_phase_offset=0.0,
    alice_menu=MenuMode.SIX,
    mode=SimMode.ANALYTIC,
    shots=100_000,
    seed=0,
    phase_variant=False,
    phase_theta=0.0,
):
    return run_protocol(
        alice_menu=alice_menu,
        bob_menu=MenuMode.SIX,
        channel=ChannelParams(beta_a=beta_a, beta_b=beta_b, bsm_phase_offset=bsm_phase_offset),
        noise=NoiseParams(depol_a=depol_a, depol_b=depol_b, background_click=background),
        mode=mode,
        shots=shots,
        seed=seed,
        phase_variant=phase_variant,
        phase_theta=phase_theta,
    )
