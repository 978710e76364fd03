"""Estimators and security math on top of coincidence-count tables.

Implements the two-party expectation values reconstructed from the
relay's Bell-state announcements, the per-basis error rates, the
rotation-invariant check parameter in its three flavors (estimated from
4, 2 or 1 of Alice's check states), and the secret-key-rate bounds for
the plain and the frame-tolerant protocol variants.

Estimator conventions
---------------------
For conjugate-basis pairs (both bases in {X, Y}) each odd-parity click
contributes the product of the two bit signs, with the sign flipped for
the antisymmetric Bell outcome; the denominator is the total click count
of the four settings of that basis pair.  For the key (Z, Z) pair both
Bell outcomes mark anti-correlation, so the plain parity sum is used
with no outcome flip.  Standard errors come from first-order (delta
method) propagation of the per-setting multinomial covariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import DomainError, EstimationError, InconsistentStatisticsError
from .qcore import Basis
from .simkit import CountTable, SettingOutcome

ENTROPY_DOMAIN_TOL = 1e-12
SQRT_CLIP_TOL = 1e-9
C_RANGE_TOL = 1e-9

CONJUGATE_BASES = (Basis.X, Basis.Y)
C_VARIANTS = ("c44", "c24", "c14")
BITS = (+1, -1)


@dataclass(frozen=True)
class Expectation:
    """Two-party correlation estimate with its standard error.

    ``n_effective`` is the click count in the estimator's denominator
    (real-valued for analytic tables).
    """

    value: float
    stderr: float
    n_effective: float


@dataclass(frozen=True)
class QberRecord:
    """Error rate of one basis, raw and after the optimal bit flip."""

    basis: Basis
    raw: float
    effective: float
    stderr: float

    @classmethod
    def from_raw(cls, basis: Basis, raw: float, stderr: float = 0.0) -> "QberRecord":
        if not 0.0 <= raw <= 1.0:
            raise DomainError(f"QBER must lie in [0, 1], got {raw!r}")
        return cls(basis=basis, raw=raw, effective=min(raw, 1.0 - raw), stderr=stderr)


@dataclass(frozen=True)
class CParameterEstimate:
    """Rotation-invariant check parameter with its standard error."""

    variant: str
    value: float
    stderr: float


@dataclass(frozen=True)
class SecurityEstimate:
    """Full per-run statistics bundle.

    Entries are ``None`` when the active state menu cannot supply the
    estimator (for example c44 with a one-check Alice menu).
    """

    expectations: dict
    qbers: dict
    c44: Optional[CParameterEstimate]
    c24: Optional[CParameterEstimate]
    c14: Optional[CParameterEstimate]


@dataclass(frozen=True)
class KeyRateBreakdown:
    """Secret-key-rate bound of the frame-tolerant protocol, itemized.

    ``u`` and ``v`` are the two conditional-correlation amplitudes that
    enter the eavesdropper-information bound ``i_e``; ``r`` is ``r_raw``
    clamped at zero for reporting.
    """

    u: float
    v: float
    i_e: float
    r_raw: float
    r: float


def _click_ratio(entries: Iterable[tuple[SettingOutcome, float, float]]):
    """Ratio statistic sum(w * clicks) / sum(clicks) with delta-method error.

    ``entries`` holds (outcome, weight for psi+, weight for psi-) per
    setting.  Settings are independent multinomials, so the variance is
    the sum of per-setting quadratic forms of the gradient against the
    multinomial covariance of the two click categories.
    """
    entries = list(entries)
    denominator = sum(o.n_clicks for o, _, _ in entries)
    if denominator <= 0.0:
        raise EstimationError("no Bell-state clicks in the requested settings")
    numerator = sum(
        w_plus * o.n_psi_plus + w_minus * o.n_psi_minus for o, w_plus, w_minus in entries
    )
    value = numerator / denominator

    variance = 0.0
    for outcome, w_plus, w_minus in entries:
        shots = outcome.shots
        if shots <= 0:
            continue
        p_plus = outcome.n_psi_plus / shots
        p_minus = outcome.n_psi_minus / shots
        g_plus = (w_plus - value) / denominator
        g_minus = (w_minus - value) / denominator
        variance += shots * (
            g_plus * g_plus * p_plus * (1.0 - p_plus)
            + g_minus * g_minus * p_minus * (1.0 - p_minus)
            - 2.0 * g_plus * g_minus * p_plus * p_minus
        )
    return value, math.sqrt(max(variance, 0.0)), denominator


def _pair_outcomes(table: CountTable, basis_a: Basis, basis_b: Basis):
    """The four (bit_a, bit_b) settings of a basis pair, or raise."""
    cells = []
    for bit_a in BITS:
        for bit_b in BITS:
            try:
                outcome = table.outcome(basis_a, bit_a, basis_b, bit_b)
            except KeyError:
                raise EstimationError(
                    f"table lacks the ({basis_a.value}{'+' if bit_a > 0 else '-'}, "
                    f"{basis_b.value}{'+' if bit_b > 0 else '-'}) setting"
                ) from None
            cells.append((bit_a, bit_b, outcome))
    return cells


def expectation_full(table: CountTable, basis_a: Basis, basis_b: Basis) -> Expectation:
    """Correlation estimate from all four settings of a basis pair.

    Conjugate pairs use the outcome-flipped sign convention; the (Z, Z)
    pair uses the plain bit-parity sum, because both resolvable Bell
    outcomes are anti-correlated in Z.
    """
    if basis_a is Basis.Z and basis_b is Basis.Z:
        flip = False
    elif basis_a in CONJUGATE_BASES and basis_b in CONJUGATE_BASES:
        flip = True
    else:
        raise ValueError(
            "expectation is defined for conjugate-basis pairs and (Z, Z), "
            f"not ({basis_a.value}, {basis_b.value})"
        )
    entries = []
    for bit_a, bit_b, outcome in _pair_outcomes(table, basis_a, basis_b):
        parity = float(bit_a * bit_b)
        entries.append((outcome, parity, -parity if flip else parity))
    value, stderr, n_eff = _click_ratio(entries)
    return Expectation(value=value, stderr=stderr, n_effective=n_eff)


def expectation_single_row(table: CountTable, basis_b: Basis) -> Expectation:
    """Correlation estimate from Alice's single X+ check state.

    Uses only the (X+, basis_b +-) settings; by the bit-flip symmetry of
    the Bell projections it estimates the same quantity as
    :func:`expectation_full` over the full basis pair.
    """
    if basis_b not in CONJUGATE_BASES:
        raise ValueError(f"single-row expectation needs basis X or Y, got {basis_b.value}")
    entries = []
    for bit_b in BITS:
        try:
            outcome = table.outcome(Basis.X, +1, basis_b, bit_b)
        except KeyError:
            raise EstimationError(
                f"table lacks the (X+, {basis_b.value}{'+' if bit_b > 0 else '-'}) setting"
            ) from None
        entries.append((outcome, float(bit_b), float(-bit_b)))
    value, stderr, n_eff = _click_ratio(entries)
    return Expectation(value=value, stderr=stderr, n_effective=n_eff)


def qber(table: CountTable, basis: Basis) -> QberRecord:
    """Quantum bit error rate of one basis.

    In Z, both Bell outcomes announce anti-correlated bits, so any
    equal-bit click is an error.  In the conjugate bases the symmetric
    outcome announces equal bits and the antisymmetric outcome opposite
    bits; clicks violating that rule are errors.  ``raw`` is reported as
    observed; ``effective`` folds rates above one half by flipping one
    party's bits.
    """
    entries = []
    for bit_a, bit_b, outcome in _pair_outcomes(table, basis, basis):
        equal = bit_a == bit_b
        if basis is Basis.Z:
            weight_plus = weight_minus = 1.0 if equal else 0.0
        else:
            weight_plus = 0.0 if equal else 1.0
            weight_minus = 1.0 if equal else 0.0
        entries.append((outcome, weight_plus, weight_minus))
    raw, stderr, _ = _click_ratio(entries)
    raw = min(max(raw, 0.0), 1.0)
    return QberRecord(basis=basis, raw=raw, effective=min(raw, 1.0 - raw), stderr=stderr)


def c_parameter(table: CountTable, variant: str) -> CParameterEstimate:
    """Rotation-invariant check parameter from 4, 2 or 1 check states.

    * ``c44``: sum of the four squared conjugate-basis correlations.
    * ``c24``: twice the squared (X, X) and (X, Y) correlations; Alice's
      Y row is omitted.
    * ``c14``: same as ``c24`` but from Alice's single X+ row.

    Equals 2 for ideal statistics and degrades quadratically with the
    fringe visibility.  The standard error is first-order propagation
    from the (independent) constituent expectations.
    """
    variant = variant.lower()
    if variant == "c44":
        pairs = [(Basis.X, Basis.X), (Basis.X, Basis.Y), (Basis.Y, Basis.X), (Basis.Y, Basis.Y)]
        expectations = [expectation_full(table, a, b) for a, b in pairs]
        scale = 1.0
    elif variant == "c24":
        expectations = [
            expectation_full(table, Basis.X, Basis.X),
            expectation_full(table, Basis.X, Basis.Y),
        ]
        scale = 2.0
    elif variant == "c14":
        expectations = [
            expectation_single_row(table, Basis.X),
            expectation_single_row(table, Basis.Y),
        ]
        scale = 2.0
    else:
        raise ValueError(f"unknown variant {variant!r}; expected one of {C_VARIANTS}")
    value = scale * sum(e.value * e.value for e in expectations)
    variance = sum((2.0 * scale * e.value * e.stderr) ** 2 for e in expectations)
    return CParameterEstimate(variant=variant, value=value, stderr=math.sqrt(variance))


def binary_entropy(x: float) -> float:
    """Shannon entropy of a bit with probability ``x``, in bits."""
    if x < -ENTROPY_DOMAIN_TOL or x > 1.0 + ENTROPY_DOMAIN_TOL:
        raise DomainError(f"binary entropy argument must lie in [0, 1], got {x!r}")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def key_rate_mdi(q_x: QberRecord, q_z: QberRecord) -> float:
    """Raw key-rate bound of the plain relay protocol.

    ``1 - H[Q_X] - H[Q_Z]`` over the effective (flip-folded) error rates;
    may be negative, callers clamp for reporting.
    """
    return 1.0 - binary_entropy(q_x.effective) - binary_entropy(q_z.effective)


def key_rate_rfi(q_z: QberRecord, c: float, c_stderr: float = 0.0) -> KeyRateBreakdown:
    """Key-rate bound of the frame-tolerant protocol from Q_Z and C.

    The eavesdropper information splits over the error and no-error
    fractions of the sifted key:

        i_e = q*H[(1+v)/2] + (1-q)*H[(1+u)/2]
        u   = min( sqrt(c/2) / (1-q), 1 )
        v   = sqrt( c/2 - (1-q)^2 u^2 ) / q

    with q the effective Z error rate.  Whenever ``u`` is unclamped the
    radicand vanishes identically and v = 0; at q = 0 the v term carries
    zero weight.  A statistical overshoot of ``c`` up to three standard
    errors above 2 is clipped; beyond that the inputs are rejected.
    ``v`` above 1 (after float tolerance) means the counts are mutually
    inconsistent and raises :class:`InconsistentStatisticsError`.
    """
    if c < -max(3.0 * c_stderr, C_RANGE_TOL):
        raise DomainError(f"check parameter must be non-negative, got {c!r}")
    if c > 2.0 + max(3.0 * c_stderr, C_RANGE_TOL):
        raise DomainError(f"check parameter must not exceed 2, got {c!r}")
    c = min(max(c, 0.0), 2.0)
    q = q_z.effective
    if not 0.0 <= q <= 0.5:
        raise DomainError(f"effective QBER must lie in [0, 0.5], got {q!r}")

    u = min(math.sqrt(c / 2.0) / (1.0 - q), 1.0) if q < 1.0 else 1.0
    if u < 1.0 or q == 0.0:
        v = 0.0
    else:
        radicand = c / 2.0 - (1.0 - q) ** 2 * u * u
        if radicand < -SQRT_CLIP_TOL:
            raise InconsistentStatisticsError(
                f"negative radicand {radicand!r} beyond float tolerance"
            )
        v = math.sqrt(max(radicand, 0.0)) / q
        if v > 1.0 + SQRT_CLIP_TOL:
            raise InconsistentStatisticsError(
                f"conditional correlation amplitude v = {v!r} exceeds 1; "
                "Q_Z and C are mutually inconsistent"
            )
        v = min(v, 1.0)

    i_e = (1.0 - q) * binary_entropy((1.0 + u) / 2.0)
    if q > 0.0:
        i_e += q * binary_entropy((1.0 + v) / 2.0)
    r_raw = 1.0 - binary_entropy(q) - i_e
    return KeyRateBreakdown(u=u, v=v, i_e=i_e, r_raw=r_raw, r=max(0.0, r_raw))


def analyze(table: CountTable) -> SecurityEstimate:
    """Every estimator the table's menu supports, bundled.

    Components whose settings are absent from the grid (reduced Alice
    menus) come back as ``None``; estimators that fail on the available
    counts (no clicks) do too.
    """
    expectations = {}
    for pair in [
        (Basis.Z, Basis.Z),
        (Basis.X, Basis.X),
        (Basis.X, Basis.Y),
        (Basis.Y, Basis.X),
        (Basis.Y, Basis.Y),
    ]:
        try:
            expectations[pair] = expectation_full(table, *pair)
        except EstimationError:
            pass

    qbers = {}
    for basis in (Basis.Z, Basis.X, Basis.Y):
        try:
            qbers[basis] = qber(table, basis)
        except EstimationError:
            pass

    c_values = {}
    for variant in C_VARIANTS:
        try:
            c_values[variant] = c_parameter(table, variant)
        except EstimationError:
            c_values[variant] = None

    return SecurityEstimate(
        expectations=expectations,
        qbers=qbers,
        c44=c_values["c44"],
        c24=c_values["c24"],
        c14=c_values["c14"],
    )
