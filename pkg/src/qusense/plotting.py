"""Figure rendering for experiment reports.

Each function takes already-computed experiment data and writes one PNG next
to the delimited output.  Rendering is optional and never feeds back into the
numeric results.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_digitize(phis, image_local, image_qft, path) -> str:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), sharey=True)
    for ax, image, title in (
        (axes[0], image_local, "local Hadamard readout"),
        (axes[1], image_qft, "inverse QFT readout"),
    ):
        ax.pcolormesh(phis, np.arange(image.shape[1]), image.T, cmap="viridis", shading="nearest")
        ax.set_xlabel("phase (rad)")
        ax.set_title(title)
    axes[0].set_ylabel("register outcome")
    return _save(fig, path)


def plot_acfield(phis, image, estimates, path) -> str:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    axes[0].pcolormesh(phis, np.arange(image.shape[1]), image.T, cmap="viridis", shading="nearest")
    axes[0].set_xlabel("field phase (rad)")
    axes[0].set_ylabel("register outcome")
    axes[0].set_title("outcome image")
    axes[1].plot(phis, estimates, drawstyle="steps-post")
    axes[1].plot(phis, phis, lw=0.8, ls="--", color="gray")
    axes[1].set_xlabel("field phase (rad)")
    axes[1].set_ylabel("estimated phase (rad)")
    axes[1].set_title("phase staircase")
    return _save(fig, path)


def plot_correlate(times, p_memory, freqs, spectra, path) -> str:
    fig, axes = plt.subplots(2, 1, figsize=(7, 5.4))
    axes[0].plot(times * 1e3, p_memory[:, 0], label="memory 1")
    axes[0].plot(times * 1e3, p_memory[:, 1], label="memory 2")
    axes[0].set_xlabel("correlation time (ms)")
    axes[0].set_ylabel("flip probability")
    axes[0].legend()
    axes[1].plot(freqs / 1e3, spectra[:, 0], label="memory 1")
    axes[1].plot(freqs / 1e3, spectra[:, 1], label="memory 2")
    axes[1].set_xlabel("frequency (kHz)")
    axes[1].set_ylabel("|S|")
    axes[1].legend()
    return _save(fig, path)


def plot_fisher(table_rows, path) -> str:
    """table_rows: iterable of (n, strategy, qfi, cfi_mean)."""
    by_strategy: dict[str, list] = {}
    for n, strategy, qfi, cfi_mean in table_rows:
        by_strategy.setdefault(strategy, []).append((n, qfi, cfi_mean))
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for strategy, rows in sorted(by_strategy.items()):
        rows.sort()
        ns = [r[0] for r in rows]
        ax.plot(ns, [r[1] for r in rows], "o-", label=f"{strategy} QFI")
        ax.plot(ns, [r[2] for r in rows], "s--", label=f"{strategy} CFI")
    ax.set_yscale("log")
    ax.set_xlabel("qubits")
    ax.set_ylabel("Fisher information")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_purity(rows, path) -> str:
    """rows: iterable of (n, mapping, mean_purity, stderr)."""
    by_mapping: dict[str, list] = {}
    for n, mapping, mean_purity, stderr in rows:
        by_mapping.setdefault(mapping, []).append((n, mean_purity, stderr))
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for mapping, vals in sorted(by_mapping.items()):
        vals.sort()
        ax.errorbar(
            [v[0] for v in vals],
            [v[1] for v in vals],
            yerr=[v[2] for v in vals],
            marker="o",
            label=mapping,
        )
    ax.set_xlabel("qubits")
    ax.set_ylabel("mean purity after full dephasing")
    ax.set_ylim(0, 1.05)
    ax.legend()
    return _save(fig, path)
