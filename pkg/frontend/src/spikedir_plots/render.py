"""Render simulation CSVs as multi-panel rejection-frequency figures.

Input is the study CSV (header
``n,p,regime,ell,t,test,kappa,nu,rejections,M,freq,asym_power,seed``).
Each regime becomes one panel: solid lines are empirical frequencies per
test (watson green, hybrid orange, z red), dashed lines the matching
limiting powers where the CSV provides them (the literal ``none`` marks
cells without a formula). A machine-readable sidecar JSON with the exact
plotted series accompanies every image so figure content is testable
without image diffing.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

__all__ = ["FigureSpec", "SchemaError", "load_rows", "build_panels", "render", "main"]

EXPECTED_HEADER = [
    "n", "p", "regime", "ell", "t", "test", "kappa", "nu",
    "rejections", "M", "freq", "asym_power", "seed",
]

TEST_COLORS = {"watson": "green", "hybrid": "orange", "z": "red"}

REGIME_ORDER = ["i", "ii", "iii", "iv", "va", "vb", "vc", "vi", "vii"]


class SchemaError(ValueError):
    """The input file does not conform to the study CSV schema."""


@dataclass(frozen=True)
class FigureSpec:
    """What to read, where to draw it, and at which resolution."""

    input_csv: str
    output_image: str
    dpi: int = 150
    sidecar: Optional[str] = None

    def sidecar_path(self) -> str:
        if self.sidecar is not None:
            return self.sidecar
        return str(Path(self.output_image).with_suffix(".json"))


@dataclass
class Row:
    regime: str
    ell: int
    test: str
    freq: float
    asym_power: Optional[float]


def _parse_row(raw: dict[str, str], lineno: int) -> Row:
    try:
        regime = raw["regime"]
        test = raw["test"]
        ell = int(raw["ell"])
        freq = float(raw["freq"])
        ap_text = raw["asym_power"]
        asym_power = None if ap_text == "none" else float(ap_text)
        rejections, big_m = int(raw["rejections"]), int(raw["M"])
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"line {lineno}: malformed row ({exc})") from None
    if test not in TEST_COLORS:
        raise SchemaError(f"line {lineno}: unknown test {test!r}")
    if regime not in REGIME_ORDER:
        raise SchemaError(f"line {lineno}: unknown regime {regime!r}")
    if not 0 <= rejections <= big_m:
        raise SchemaError(f"line {lineno}: rejections outside 0..M")
    if not (0.0 <= freq <= 1.0) or not math.isfinite(freq):
        raise SchemaError(f"line {lineno}: freq outside [0, 1]")
    return Row(regime=regime, ell=ell, test=test, freq=freq, asym_power=asym_power)


def load_rows(path: str) -> list[Row]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != EXPECTED_HEADER:
            raise SchemaError(
                f"unexpected header {reader.fieldnames}; expected {EXPECTED_HEADER}"
            )
        rows = [_parse_row(raw, lineno) for lineno, raw in enumerate(reader, start=2)]
    if not rows:
        raise SchemaError("no data rows")
    return rows


def build_panels(rows: list[Row]) -> list[dict]:
    """Group rows into one panel per regime, one solid series per test plus
    a dashed series where limiting powers are available."""
    regimes = sorted({r.regime for r in rows}, key=REGIME_ORDER.index)
    panels = []
    seen: set[tuple[str, str]] = set()
    for regime in regimes:
        series = []
        for test in TEST_COLORS:
            cells = sorted((r for r in rows if r.regime == regime and r.test == test),
                           key=lambda r: r.ell)
            if not cells:
                continue
            ells = [c.ell for c in cells]
            if len(set(ells)) != len(ells):
                raise SchemaError(f"duplicate (regime, ell, test) cell in panel {regime!r}")
            seen.add((regime, test))
            series.append({
                "test": test,
                "x": ells,
                "y": [c.freq for c in cells],
                "style": "solid",
                "color": TEST_COLORS[test],
            })
            dashed = [(c.ell, c.asym_power) for c in cells if c.asym_power is not None]
            if dashed:
                series.append({
                    "test": test,
                    "x": [e for e, _ in dashed],
                    "y": [a for _, a in dashed],
                    "style": "dashed",
                    "color": TEST_COLORS[test],
                })
        panels.append({"panel": regime, "series": series})
    assert len(seen) == len({(r.regime, r.test) for r in rows})
    return panels


def _infer_alpha(rows: list[Row]) -> float:
    for r in rows:
        if r.ell == 0 and r.asym_power is not None:
            return r.asym_power
    return 0.05


def render(spec: FigureSpec) -> list[dict]:
    """Draw the figure and sidecar JSON; returns the panel structure."""
    rows = load_rows(spec.input_csv)
    panels = build_panels(rows)
    alpha = _infer_alpha(rows)

    n_panels = len(panels)
    ncols = min(4, n_panels)
    nrows = (n_panels + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(3.2 * ncols, 2.8 * nrows), squeeze=False, sharey=True
    )
    for k, panel in enumerate(panels):
        ax = axes[k // ncols][k % ncols]
        for s in panel["series"]:
            ax.plot(
                s["x"], s["y"],
                color=s["color"],
                linestyle="-" if s["style"] == "solid" else "--",
                linewidth=1.4,
                marker="o" if s["style"] == "solid" else None,
                markersize=2.5,
            )
        ax.axhline(alpha, color="gray", linewidth=0.8, alpha=0.6)
        ax.set_ylim(0.0, 1.0)
        ax.set_title(f"({panel['panel']})", fontsize=10)
        ax.set_xlabel("$\\ell$", fontsize=9)
    for k in range(n_panels, nrows * ncols):
        axes[k // ncols][k % ncols].set_axis_off()
    fig.tight_layout()
    # strip the writer's timestamp/version stamps so identical input gives
    # identical bytes
    if spec.output_image.lower().endswith(".svg"):
        metadata = {"Date": None, "Creator": None}
    else:
        metadata = {"Software": None}
    fig.savefig(spec.output_image, dpi=spec.dpi, metadata=metadata)
    plt.close(fig)

    with open(spec.sidecar_path(), "w", encoding="utf-8") as fh:
        json.dump({"alpha": alpha, "panels": panels}, fh, indent=1, sort_keys=True)
    return panels


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="spikedir-plots",
        description="Render a simulation CSV as a multi-panel power figure.",
    )
    parser.add_argument("input_csv", help="study CSV produced by the simulation harness")
    parser.add_argument("--out", required=True, help="output image path (png or svg)")
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--sidecar", default=None,
                        help="sidecar JSON path (default: image path with .json)")
    args = parser.parse_args(argv)
    spec = FigureSpec(input_csv=args.input_csv, output_image=args.out,
                      dpi=args.dpi, sidecar=args.sidecar)
    try:
        render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {spec.output_image} and {spec.sidecar_path()}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
