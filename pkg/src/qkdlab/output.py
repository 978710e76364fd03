"""Flat-file emission: sweep CSV tables and static SVG panels.

Both writers are fully deterministic (no timestamps, no environment
metadata), so identical sweeps produce byte-identical files.  Numbers in
the CSV carry 12 significant digits and survive a parse round trip;
cells whose estimator the active menu cannot supply stay empty.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Callable, Optional

from .qcore import Basis
from .sweep import SweepRow

CSV_COLUMNS = [
    "beta_a", "beta_b",
    "exp_zz", "exp_zz_err",
    "exp_xx", "exp_xx_err",
    "exp_xy", "exp_xy_err",
    "exp_yx", "exp_yx_err",
    "exp_yy", "exp_yy_err",
    "q_z_raw", "q_z_eff", "q_z_err",
    "q_x_raw", "q_x_eff", "q_x_err",
    "q_y_raw", "q_y_eff", "q_y_err",
    "c44", "c44_err",
    "c24", "c24_err",
    "c14", "c14_err",
    "r_mdi_raw", "r_mdi",
    "r_rfi44_raw", "r_rfi44",
    "r_rfi24_raw", "r_rfi24",
    "r_rfi14_raw", "r_rfi14",
]

_EXPECTATION_PAIRS = [
    ("zz", (Basis.Z, Basis.Z)),
    ("xx", (Basis.X, Basis.X)),
    ("xy", (Basis.X, Basis.Y)),
    ("yx", (Basis.Y, Basis.X)),
    ("yy", (Basis.Y, Basis.Y)),
]

PANEL_NAMES = ("expectations", "qber", "cparam", "keyrate")

_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"]


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else format(float(value), ".12g")


def row_values(row: SweepRow) -> dict[str, Optional[float]]:
    """Flatten one sweep row into the documented column mapping."""
    out: dict[str, Optional[float]] = {name: None for name in CSV_COLUMNS}
    out["beta_a"] = row.beta_a
    out["beta_b"] = row.beta_b
    for short, pair in _EXPECTATION_PAIRS:
        expectation = row.estimate.expectations.get(pair)
        if expectation is not None:
            out[f"exp_{short}"] = expectation.value
            out[f"exp_{short}_err"] = expectation.stderr
    for basis, short in ((Basis.Z, "z"), (Basis.X, "x"), (Basis.Y, "y")):
        record = row.estimate.qbers.get(basis)
        if record is not None:
            out[f"q_{short}_raw"] = record.raw
            out[f"q_{short}_eff"] = record.effective
            out[f"q_{short}_err"] = record.stderr
    for name, estimate in (("c44", row.estimate.c44), ("c24", row.estimate.c24), ("c14", row.estimate.c14)):
        if estimate is not None:
            out[name] = estimate.value
            out[f"{name}_err"] = estimate.stderr
    if row.r_mdi_raw is not None:
        out["r_mdi_raw"] = row.r_mdi_raw
        out["r_mdi"] = max(0.0, row.r_mdi_raw)
    for name, breakdown in (("r_rfi44", row.rfi44), ("r_rfi24", row.rfi24), ("r_rfi14", row.rfi14)):
        if breakdown is not None:
            out[f"{name}_raw"] = breakdown.r_raw
            out[name] = breakdown.r
    return out


def emit_csv(rows: list[SweepRow], path) -> Path:
    """Write the sweep table; header plus one line per point, LF endings."""
    if not rows:
        raise ValueError("cannot emit an empty sweep")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            values = row_values(row)
            writer.writerow([_fmt(values[name]) for name in CSV_COLUMNS])
    return path


def read_csv(path) -> list[dict[str, Optional[float]]]:
    """Parse an emitted sweep table back into column mappings."""
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        return [
            {key: (float(cell) if cell != "" else None) for key, cell in line.items()}
            for line in reader
        ]


# ---------------------------------------------------------------------------
# SVG panels


def _panel_series(panel: str) -> list[tuple[str, Callable[[dict], Optional[float]]]]:
    if panel == "expectations":
        return [(f"<{s.upper()}>", (lambda k: lambda v: v[f"exp_{k}"])(s))
                for s, _ in _EXPECTATION_PAIRS]
    if panel == "qber":
        return [
            ("Q_Z", lambda v: v["q_z_raw"]),
            ("Q_X", lambda v: v["q_x_raw"]),
            ("Q_Y", lambda v: v["q_y_raw"]),
        ]
    if panel == "cparam":
        return [
            ("C44", lambda v: v["c44"]),
            ("C24", lambda v: v["c24"]),
            ("C14", lambda v: v["c14"]),
        ]
    if panel == "keyrate":
        return [
            ("r_MDI", lambda v: v["r_mdi_raw"]),
            ("r_RFI44", lambda v: v["r_rfi44_raw"]),
            ("r_RFI24", lambda v: v["r_rfi24_raw"]),
            ("r_RFI14", lambda v: v["r_rfi14_raw"]),
        ]
    raise ValueError(f"unknown panel {panel!r}")


_PANEL_LAYOUT = {
    # panel -> (title, y label, y range)
    "expectations": ("Two-party expectation values", "expectation value", (-1.05, 1.05)),
    "qber": ("Quantum bit error rates (raw)", "QBER", (0.0, 1.0)),
    "cparam": ("Rotation-invariant check parameter", "C", (0.0, 2.2)),
    "keyrate": ("Secret key rates (raw)", "key rate", (-1.05, 1.05)),
}

_WIDTH, _HEIGHT = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 62.0, 500.0, 46.0, 374.0


def _svg_panel(panel: str, rows: list[SweepRow]) -> str:
    title, y_label, (y_min, y_max) = _PANEL_LAYOUT[panel]
    values = [row_values(row) for row in rows]
    xs = [v["beta_b"] for v in values]
    x_min, x_max = min(xs), max(xs)
    if x_max == x_min:
        x_max = x_min + 1.0

    def x_pos(x: float) -> float:
        return _LEFT + (x - x_min) / (x_max - x_min) * (_RIGHT - _LEFT)

    def y_pos(y: float) -> float:
        return _BOTTOM - (y - y_min) / (y_max - y_min) * (_BOTTOM - _TOP)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{(_LEFT + _RIGHT) / 2:.2f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<rect x="{_LEFT:.2f}" y="{_TOP:.2f}" width="{_RIGHT - _LEFT:.2f}" '
        f'height="{_BOTTOM - _TOP:.2f}" fill="none" stroke="black" stroke-width="1"/>',
    ]

    for i in range(5):
        x_tick = x_min + i * (x_max - x_min) / 4.0
        px = x_pos(x_tick)
        parts.append(
            f'<line x1="{px:.2f}" y1="{_BOTTOM:.2f}" x2="{px:.2f}" y2="{_BOTTOM + 5:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{_BOTTOM + 18:.2f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{x_tick:.3g}</text>'
        )
        y_tick = y_min + i * (y_max - y_min) / 4.0
        py = y_pos(y_tick)
        parts.append(
            f'<line x1="{_LEFT - 5:.2f}" y1="{py:.2f}" x2="{_LEFT:.2f}" y2="{py:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_LEFT - 8:.2f}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{y_tick:.3g}</text>'
        )

    parts.append(
        f'<text x="{(_LEFT + _RIGHT) / 2:.2f}" y="{_HEIGHT - 8}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">beta_b (rad)</text>'
    )
    parts.append(
        f'<text x="16" y="{(_TOP + _BOTTOM) / 2:.2f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {(_TOP + _BOTTOM) / 2:.2f})">{y_label}</text>'
    )

    legend_y = _TOP + 10
    color_index = 0
    for label, extract in _panel_series(panel):
        points = [
            (x, extract(v)) for x, v in zip(xs, values) if extract(v) is not None
        ]
        if not points:
            continue  # menu cannot supply this estimator: no line, no legend
        color = _PALETTE[color_index % len(_PALETTE)]
        color_index += 1
        coords = " ".join(f"{x_pos(x):.2f},{y_pos(y):.2f}" for x, y in points)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>'
        )
        parts.append(
            f'<line x1="{_RIGHT + 10:.2f}" y1="{legend_y:.2f}" x2="{_RIGHT + 30:.2f}" '
            f'y2="{legend_y:.2f}" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_RIGHT + 35:.2f}" y="{legend_y + 4:.2f}" '
            f'font-family="sans-serif" font-size="11">{_escape(label)}</text>'
        )
        legend_y += 18

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def svg_filename(panel: str, beta_a: float) -> str:
    return f"panel_{panel}_betaA_{format(beta_a, '.6g')}.svg"


def emit_svg(rows: list[SweepRow], out_dir) -> list[Path]:
    """Write the four sweep panels as self-contained SVG files."""
    if not rows:
        raise ValueError("cannot plot an empty sweep")
    out_dir = Path(out_dir)
    beta_a = rows[0].beta_a
    paths = []
    for panel in PANEL_NAMES:
        path = out_dir / svg_filename(panel, beta_a)
        path.write_text(_svg_panel(panel, rows), encoding="utf-8")
        paths.append(path)
    return paths
