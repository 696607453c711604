"""Figure rendering for the CLI report path (all files, no UI)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_solution_figure(path, grid, samples, residual_rel=None):
    """Plot the solution components u_i(t) over the grid."""
    fig, ax = plt.subplots(figsize=(7, 4))
    n = samples.shape[1]
    for i in range(n):
        ax.plot(grid.nodes, samples[:, i], lw=1.2,
                label=f"u_{i + 1}" if n <= 8 else None)
    ax.set_xlabel("t")
    ax.set_ylabel("u(t)")
    title = "solution components"
    if residual_rel is not None:
        title += f"  (relative residual {residual_rel:.2e})"
    ax.set_title(title)
    if n <= 8:
        ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_sweep_figure(path, rows, lambda0):
    """gamma and c4 against kappa, with the critical weights marked."""
    kappas = [r["kappa"] for r in rows]
    gammas = [r["gamma"] for r in rows]
    c4 = [r["c4"] if r["c4"] is not None else np.nan for r in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5.5), sharex=True)
    ax1.plot(kappas, gammas, "o-", ms=3, lw=1)
    ax1.axhline(0.0, color="k", lw=0.6)
    ax1.set_ylabel("gamma")
    ax2.semilogy(kappas, c4, "o-", ms=3, lw=1, color="tab:red")
    ax2.set_ylabel("c4 = 1/gamma")
    ax2.set_xlabel("kappa")
    for ax in (ax1, ax2):
        for s in (-1.0, 1.0):
            ax.axvline(2.0 * s * lambda0, color="gray", ls="--", lw=0.8)
        ax.grid(alpha=0.3)
    ax1.set_title(f"weight sweep (critical at |kappa| = {2 * lambda0:g})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_certificate_figure(path, certificate):
    """Bar chart of the contraction-sum contributions c_j * beta_j."""
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    labels = [f"j={j}" for j in (1, 2, 3, 4)]
    if certificate.c is None:
        contrib = [0.0] * 4
    else:
        contrib = [certificate.c[j] * certificate.beta[j] for j in range(4)]
    ax.bar(labels, contrib, color="tab:blue")
    ax.axhline(1.0, color="tab:red", lw=1, ls="--", label="certification threshold on q")
    total = certificate.q if certificate.q != float("inf") else float("nan")
    ax.set_title(f"q = {total:.4g}  ({certificate.verdict.value})")
    ax.set_ylabel("c_j * beta_j")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_verification_figure(path, margins):
    """Scatter of measured/bound ratios per check across the random trials."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, pairs in margins.items():
        if not pairs:
            continue
        xs, ys = zip(*pairs)
        ax.scatter(xs, ys, s=8, alpha=0.6, label=name)
    ax.axhline(1.0, color="tab:red", lw=1, ls="--")
    ax.set_xlabel("kappa / lambda0")
    ax.set_ylabel("measured / bound")
    ax.set_yscale("log")
    ax.set_title("verification margins (above 1 = violated)")
    ax.legend(fontsize=7, ncol=2)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
