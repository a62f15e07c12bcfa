"""Figure rendering for the CLI report paths.

Every figure is written next to its delimited output file; the CSV/JSON
tables remain the canonical results.  Uses the Agg backend so runs work
headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FAMILY_ORDER = ["0_1", "3_1", "4_1", "5_1", "5_2", "6_1", "6_2", "6_3",
                 "7_1", "7_2", "3_1#3_1", "3_1#4_1", "3_1#3_1#3_1", "other"]


def plot_trajectory(records, path, functional: str = "aun") -> None:
    """Chosen functional value per iteration with the candidate spread."""
    iterations = [r.iteration for r in records]
    chosen = [r.chosen_value for r in records]
    lo = [min(r.candidate_values) for r in records]
    hi = [max(r.candidate_values) for r in records]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.fill_between(iterations, lo, hi, alpha=0.25, label="candidate range")
    ax.plot(iterations, chosen, lw=1.8, label=f"chosen {functional.upper()}")
    if any(r.aun_value != r.chosen_value for r in records):
        ax.plot(iterations, [r.aun_value for r in records], lw=1.0, ls="--",
                label="AUN of chosen")
    ax.set_xlabel("iteration")
    ax.set_ylabel(functional.upper())
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_spectrum(weights: dict[str, float], path, title: str = "") -> None:
    names = sorted(weights, key=lambda n: -weights[n])
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(range(len(names)), [weights[n] for n in names])
    ax.set_xticks(range(len(names)), names, rotation=45, ha="right")
    ax.set_ylabel("fraction")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_kymograph(table, path) -> None:
    """Knot-type fraction versus length as a stacked heat map."""
    lengths = table.lengths
    names = [n for n in _FAMILY_ORDER
             if any(table.fraction(ln, n) > 0 for ln in lengths)]
    extra = sorted({name for (_, name) in table.fractions} - set(names))
    names += extra
    grid = np.array([[table.fraction(ln, nm) for ln in lengths] for nm in names])
    fig, ax = plt.subplots(figsize=(8, 0.5 * len(names) + 2))
    im = ax.imshow(grid, aspect="auto", origin="lower", cmap="viridis",
                   extent=(lengths[0], lengths[-1], -0.5, len(names) - 0.5))
    ax.set_yticks(range(len(names)), names)
    ax.set_xlabel("walk length (beads)")
    ax.set_title(f"knot spectrum, model = {table.model}")
    fig.colorbar(im, ax=ax, label="fraction of walks")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_ensemble_comparison(steered_series, undirected_series, path,
                             functional: str = "aun") -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    for series in undirected_series:
        ax.plot(range(len(series)), series, color="steelblue", alpha=0.35, lw=0.8)
    ax.plot([], [], color="steelblue", alpha=0.6, label="undirected runs")
    ax.plot(range(len(steered_series)), steered_series, color="purple", lw=2.0,
            label="steered")
    ax.set_xlabel("iteration")
    ax.set_ylabel(functional.upper())
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
