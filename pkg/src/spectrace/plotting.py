"""Headless matplotlib rendering of reconstruction and spectrum figures."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_reconstruction(x, alpha_true, alpha_rec, alpha_init, path) -> Path:
    """Overlay true, recovered and initial-guess dampings; returns the path."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(x, alpha_true, color="tab:orange", lw=2.0, label="true")
    ax.plot(x, alpha_rec, color="tab:blue", lw=1.5, label="recovered")
    ax.plot(x, alpha_init, color="gray", ls="--", lw=1.0, label="initial")
    ax.set_xlabel("x")
    ax.set_ylabel(r"$\alpha(x)$")
    ax.set_xlim(0.0, 1.0)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_spectrum(spectrum, path) -> Path:
    """Scatter the labeled eigenvalues in the complex plane."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    eigs = np.asarray(spectrum.eigs)
    ax.scatter(eigs.real, eigs.imag, s=12, color="tab:blue")
    ax.axvline(0.0, color="gray", lw=0.5)
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
