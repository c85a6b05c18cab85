"""Optional matplotlib rendering for settlement reports.

Everything here is additive to the delimited outputs: the same data that
lands in the CSV files can be rendered to PNG for a quick look. matplotlib
is imported lazily with the Agg backend so headless runs and test machines
never touch a display.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .curve import LoadCurve, evaluate, grid
from .settlement import BillBreakdown
from .spectrum import FourierSpectrum
from .tariff import PricePlan

_DPI = 120


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def save_curves_figure(
    curves: Mapping[str, LoadCurve], path: "str | Path", samples: int = 1024
) -> Path:
    """Overlay the named curves across their interval."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for name in sorted(curves):
        p = curves[name]
        t = grid(p.interval, samples)
        ax.plot(t, np.asarray(evaluate(p, t)), label=name, linewidth=1.2)
    ax.set_xlabel("time")
    ax.set_ylabel("power")
    ax.grid(True, alpha=0.3)
    if curves:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_spectra_figure(spectra: Mapping[str, FourierSpectrum], path: "str | Path") -> Path:
    """Bar chart of coefficient magnitude per harmonic, one panel per curve."""
    plt = _pyplot()
    names = sorted(spectra)
    rows = max(1, len(names))
    fig, axes = plt.subplots(rows, 1, figsize=(8, 2.2 * rows), squeeze=False)
    for ax, name in zip(axes[:, 0], names):
        s = spectra[name]
        ns = [0] + [line.n for line in s.lines]
        mags = [abs(s.a0)] + [float(np.hypot(line.a, line.b)) for line in s.lines]
        ax.bar([str(n) for n in ns], mags, color="#4878a8")
        ax.set_ylabel(name, fontsize=8)
        ax.grid(True, axis="y", alpha=0.3)
    axes[-1, 0].set_xlabel("harmonic index")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_plans_figure(
    plans: Mapping[str, PricePlan], f_max: float, path: "str | Path"
) -> Path:
    """Price magnitude versus frequency for each plan, both channels."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 4.5))
    f = np.linspace(0.0, max(f_max, 1.0), 512)
    for name in sorted(plans):
        plan = plans[name]
        ax.plot(f, [plan.alpha_magnitude(x) for x in f], label=f"{name} alpha", linewidth=1.2)
        ax.plot(
            f,
            [plan.beta_magnitude(x) for x in f],
            label=f"{name} beta",
            linewidth=1.0,
            linestyle="--",
        )
    ax.set_xlabel("frequency")
    ax.set_ylabel("price magnitude")
    ax.grid(True, alpha=0.3)
    if plans:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_bills_figure(bills: Sequence[BillBreakdown], path: "str | Path") -> Path:
    """Stacked non-dynamic/dynamic totals per settled party."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ordered = sorted(bills, key=lambda b: (b.party, b.counterparty or ""))
    labels = [
        f"{b.party}\n({b.counterparty})" if b.counterparty else b.party for b in ordered
    ]
    non_dyn = [b.non_dynamic_total for b in ordered]
    dyn = [b.dynamic_total for b in ordered]
    x = np.arange(len(ordered))
    ax.bar(x, non_dyn, label="non-dynamic", color="#4878a8")
    ax.bar(x, dyn, bottom=non_dyn, label="dynamic", color="#d1a055")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("charge")
    ax.grid(True, axis="y", alpha=0.3)
    if len(ordered):
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
