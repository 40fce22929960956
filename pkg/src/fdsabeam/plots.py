"""Figure rendering for the report subcommands.

Figures are an optional complement to the CSV output; each helper takes
already-computed arrays and writes one PNG/PDF (any extension that
matplotlib understands) to the given path.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_pattern_figure(path, theta_deg, range_m, gain_db, title="beampattern"):
    """Angle-range heatmap of the pattern gain in dB."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    floor = -60.0
    shown = np.clip(gain_db, floor, 0.0)
    mesh = ax.pcolormesh(theta_deg, range_m, shown.T, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="gain (dB)")
    ax.set_xlabel("theta (deg)")
    ax.set_ylabel("range (m)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_profile_figure(path, parameter, sr_bits, xlabel, title="secrecy-rate profile"):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(parameter, sr_bits, lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("secrecy rate (bits/s/Hz)")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trace_figure(path, iterations, values, ylabel, title="optimizer trace"):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(iterations, values, marker="o", ms=3, lw=1.0)
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    if np.all(np.asarray(values) > 0):
        ax.set_yscale("log")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sop_figure(path, rows, title="secrecy outage probability"):
    """rows: iterable of (foi_max_hz, gamma, sop), grouped by foi_max."""
    fig, ax = plt.subplots(figsize=(7, 4))
    by_bound: dict[float, list[tuple[float, float]]] = {}
    for bound, gamma, sop in rows:
        by_bound.setdefault(bound, []).append((gamma, sop))
    for bound, pts in by_bound.items():
        pts.sort()
        gammas = [p[0] for p in pts]
        sops = [p[1] for p in pts]
        ax.semilogy(gammas, np.maximum(sops, 1e-12), marker="o", ms=3,
                    label=f"bound {bound:g} Hz")
    ax.set_xlabel("threshold (bits/s/Hz)")
    ax.set_ylabel("outage probability")
    ax.legend(fontsize=8)
    ax.set_title(title)
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
