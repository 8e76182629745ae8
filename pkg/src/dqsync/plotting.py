"""Render sweep-summary CSVs as figures.

Produces one figure per error family (rotation, translation) with a mean
curve per (method, fixed-parameter combination) against the swept
parameter, written as PNG files next to the delimited output.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_X_CANDIDATES = ("sigma_r_deg", "sigma_t", "p", "q")
_AXIS_LABELS = {
    "sigma_r_deg": "rotation noise sigma_r [deg]",
    "sigma_t": "translation noise sigma_t",
    "p": "edge presence probability p",
    "q": "non-corruption probability q",
}


def load_summary(path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _detect_x(rows: list[dict]) -> str:
    counts = {c: len({r[c] for r in rows}) for c in _X_CANDIDATES}
    best = max(counts, key=lambda c: counts[c])
    if counts[best] < 2:
        return "sigma_r_deg"
    return best


def render_figures(rows: list[dict], out_dir, x: str | None = None) -> list[Path]:
    """One PNG per error family; returns the written paths."""
    if not rows:
        raise ValueError("summary is empty; nothing to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    x = x or _detect_x(rows)
    if x not in _X_CANDIDATES:
        raise ValueError(f"unknown sweep column {x!r}")
    fixed = [c for c in _X_CANDIDATES if c != x]

    written = []
    families = (("rotation", "rot_err_mean", "mean rotation error [rad]"),
                ("translation", "trans_err_mean", "mean translation error"))
    for family, column, ylabel in families:
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        groups: dict[tuple, list[dict]] = {}
        for r in rows:
            key = (r["method"],) + tuple(r[c] for c in fixed)
            groups.setdefault(key, []).append(r)
        for key in sorted(groups):
            pts = [
                (float(r[x]), float(r[column]))
                for r in groups[key]
                if r[column] != ""
            ]
            if not pts:
                continue
            pts.sort()
            label = key[0].upper()
            extras = [
                f"{c}={v}"
                for c, v in zip(fixed, key[1:])
                if len({row[c] for row in rows}) > 1
            ]
            if extras:
                label += " (" + ", ".join(extras) + ")"
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=label)
        ax.set_xlabel(_AXIS_LABELS[x])
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        path = out_dir / f"{family}_errors.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
