"""Sweep orchestration: one protocol run plus full analysis per grid point.

Reproduces the headline experiment layout: hold Alice's frame angle
fixed, sweep Bob's over a grid, and tabulate expectations, error rates,
check parameters and key rates per point.  Points are independent, so
they may fan out to worker threads; per-point seeds derive from the
master seed and the point index, which keeps results identical for any
worker count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .config import ExperimentConfig
from .errors import DomainError, EstimationError
from .qcore import Basis
from .secanalysis import (
    KeyRateBreakdown,
    SecurityEstimate,
    analyze,
    key_rate_mdi,
    key_rate_rfi,
)
from .simkit import run_protocol

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRow:
    """Analysis results of one sweep point.

    Estimator slots are ``None`` whenever the active menu cannot supply
    them or their evaluation failed; failures are also listed in
    ``errors`` (the CSV layer renders ``None`` as an empty cell).
    """

    beta_a: float
    beta_b: float
    estimate: SecurityEstimate
    r_mdi_raw: Optional[float]
    rfi44: Optional[KeyRateBreakdown]
    rfi24: Optional[KeyRateBreakdown]
    rfi14: Optional[KeyRateBreakdown]
    errors: tuple[str, ...] = ()


def _rfi_rate(q_z, c_estimate, label: str, errors: list[str]) -> Optional[KeyRateBreakdown]:
    if q_z is None or c_estimate is None:
        return None
    try:
        return key_rate_rfi(q_z, c_estimate.value, c_estimate.stderr)
    except (DomainError, EstimationError) as exc:
        errors.append(f"{label}: {exc}")
        return None


def evaluate_point(config: ExperimentConfig, beta_b: float, point_index: int = 0) -> SweepRow:
    """Run the protocol at one beta_b value and analyze the table."""
    table = run_protocol(
        alice_menu=config.alice_menu,
        bob_menu=config.bob_menu,
        channel=config.channel(beta_b=beta_b),
        noise=config.noise,
        mode=config.mode,
        shots=config.shots,
        seed=config.seed,
        phase_variant=config.phase_variant,
        phase_theta=config.phase_theta,
        seed_path=(point_index,),
    )
    estimate = analyze(table)
    errors: list[str] = []

    q_z = estimate.qbers.get(Basis.Z)
    q_x = estimate.qbers.get(Basis.X)
    r_mdi_raw = None
    if q_z is not None and q_x is not None:
        r_mdi_raw = key_rate_mdi(q_x, q_z)

    row = SweepRow(
        beta_a=config.beta_a,
        beta_b=beta_b,
        estimate=estimate,
        r_mdi_raw=r_mdi_raw,
        rfi44=_rfi_rate(q_z, estimate.c44, "r_rfi44", errors),
        rfi24=_rfi_rate(q_z, estimate.c24, "r_rfi24", errors),
        rfi14=_rfi_rate(q_z, estimate.c14, "r_rfi14", errors),
        errors=tuple(errors),
    )
    for message in errors:
        logger.warning("beta_b=%.6g: %s", beta_b, message)
    return row


def run_sweep(config: ExperimentConfig, workers: int = 1) -> list[SweepRow]:
    """Evaluate every sweep point, in beta_b order.

    ``workers`` only controls parallelism; outputs are byte-identical for
    any value because each point owns a seed substream keyed on its index.
    """
    if config.sweep is None:
        raise DomainError("config has no sweep specification on beta_b")
    betas = config.sweep.values()
    if workers <= 1:
        return [evaluate_point(config, beta, i) for i, beta in enumerate(betas)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(evaluate_point, config, beta, i) for i, beta in enumerate(betas)
        ]
        return [future.result() for future in futures]
