"""Figure rendering for scenario results.

One entry point, `render(result, output_dir, stem)`, writes per-scenario
matplotlib figures next to the CSV/JSON artifacts and returns the file
paths.  Figures are diagnostics over the same records the CSV carries --
nothing here feeds back into claims.
"""

from __future__ import annotations

import math
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .scenarios.base import ScenarioResult


def render(result: ScenarioResult, output_dir, stem: str) -> list:
    renderer = _RENDERERS.get(result.scenario)
    if renderer is None:
        return []
    fig = renderer(result)
    path = os.path.join(output_dir, f"{stem}.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return [path]


def _column(result, key, variant=None):
    rows = result.records
    if variant is not None:
        rows = [r for r in rows if r.get("variant") == variant]
    return np.array([r[key] for r in rows])


def _plot_identities(result):
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    names = [r["check"] for r in result.records]
    values = [max(abs(r["observed"] - (r["reference"] if r["check"] != "averaged_squeezed_min_variance" else 0.0)), 1e-18)
              for r in result.records]
    ax.barh(names, values, color="tab:blue")
    ax.set_xscale("log")
    ax.set_xlabel("deviation from exact value")
    ax.set_title("phase-averaging identities (smaller is better)")
    return fig


def _plot_phase_locking(result):
    summary = result.summary
    has_decay = "decay_slope" in summary
    fig, axes = plt.subplots(1, 3 if has_decay else 2, figsize=(11 if has_decay else 8, 3.2))
    est0 = {}
    for row in result.records:
        if row["variant"] == "claim" and row["packet"] == 0:
            est0[row["run"]] = row["estimate"]
    axes[0].hist(np.mod(list(est0.values()), 2 * np.pi), bins=16, color="tab:blue")
    axes[0].set_xlabel(r"first estimate $\varphi_0$")
    axes[0].set_ylabel("runs")
    axes[0].set_title(f"uniformity: chi$^2$ p = {summary['phi0_chi2_p']:.3f}")

    for variant, color in (("claim", "tab:blue"), ("control", "tab:orange")):
        devs = []
        by_run = {}
        for row in result.records:
            if row["variant"] == variant:
                by_run.setdefault(row["run"], []).append(row)
        for rows in by_run.values():
            rows = sorted(rows, key=lambda r: r["packet"])
            devs.extend(np.angle(np.exp(1j * (r["estimate"] - rows[0]["estimate"]))) for r in rows[1:])
        axes[1].hist(devs, bins=48, range=(-np.pi, np.pi), histtype="step",
                     color=color, label=variant, density=True)
    axes[1].set_xlabel("later estimate $-$ first estimate")
    axes[1].legend(frameon=False)
    axes[1].set_title("lock persistence vs control")

    if has_decay:
        log_rho = summary["log_correlations"]
        dn = np.arange(1, len(log_rho) + 1)
        axes[2].plot(dn, log_rho, "o", color="tab:blue", label="measured")
        axes[2].plot(dn, summary["decay_expected"] * dn + (log_rho[0] - summary["decay_expected"]),
                     "--", color="tab:red", label="slope $-DT$")
        axes[2].set_xlabel("packet separation")
        axes[2].set_ylabel(r"$\ln$ correlation")
        axes[2].legend(frameon=False)
        axes[2].set_title("diffusing lock decay")
    fig.tight_layout()
    return fig


def _plot_atom(result):
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    same = _column(result, "p_excited", "same_laser")
    indep = _column(result, "p_excited", "independent_laser")
    ax.bar(["same laser", "independent"], [same.mean(), indep.mean()],
           color=["tab:blue", "tab:orange"])
    ax.axhline(1.0, ls="--", c="gray", lw=0.8)
    ax.axhline(0.5, ls="--", c="gray", lw=0.8)
    ax.set_ylabel("P(excited)")
    ax.set_title("second pi/2 pulse source")
    return fig


def _plot_squeezing(result):
    fig, axes = plt.subplots(1, 2, figsize=(8.5, 3.2))
    summary = result.summary
    r = summary["r"]
    angles = np.linspace(0, np.pi, 128)
    nbar = summary["averaged_mean_photons"]
    axes[0].plot(angles, np.full_like(angles, nbar + 0.5), c="tab:blue",
                 label="phase-averaged state")
    axes[0].plot(angles, 0.5 * np.exp(-2 * r) * np.cos(angles) ** 2
                 + 0.5 * np.exp(2 * r) * np.sin(angles) ** 2, c="tab:green",
                 label="single squeezed state")
    axes[0].axhline(0.5, ls="--", c="gray", lw=0.8, label="vacuum")
    axes[0].set_xlabel("LO angle")
    axes[0].set_ylabel("quadrature variance")
    axes[0].legend(frameon=False, fontsize=8)
    axes[0].set_title("averaging destroys squeezing")

    outcomes = _column(result, "outcome")
    axes[1].hist(outcomes, bins=60, density=True, color="tab:blue", alpha=0.6)
    grid = np.linspace(outcomes.min(), outcomes.max(), 200)
    var = summary["referenced_variance_target"]
    axes[1].plot(grid, np.exp(-grid**2 / (2 * var)) / math.sqrt(2 * math.pi * var),
                 c="tab:red", label=f"N(0, e$^{{-2r}}$/2), r={r}")
    axes[1].set_xlabel("beam-referenced homodyne outcome")
    axes[1].legend(frameon=False, fontsize=8)
    axes[1].set_title("squeezing recovered via the beam")
    fig.tight_layout()
    return fig


def _plot_entanglement(result):
    summary = result.summary
    has_decay = "diffusion_decay" in summary
    fig, axes = plt.subplots(1, 2 if has_decay else 1,
                             figsize=(8.5 if has_decay else 4.8, 3.2), squeeze=False)
    ax = axes[0][0]
    refs = sorted(float(a) for a in summary["conditional"])
    means = [summary["conditional"][str(a)]["mean"] for a in refs]
    errs = [summary["conditional"][str(a)]["se"] for a in refs]
    ax.errorbar(refs, means, yerr=errs, fmt="o-", color="tab:blue", capsize=3)
    ax.axhline(summary["pure_log_negativity"], ls="--", c="tab:red",
               label="pure two-mode squeezed value")
    ax.axhline(0.0, ls="-", c="gray", lw=0.8)
    ax.set_xlabel(r"reference amplitude $\alpha_{\rm ref}$")
    ax.set_ylabel("conditional log-negativity")
    ax.legend(frameon=False, fontsize=8)
    ax.set_title("entanglement distilled by reference light")
    if has_decay:
        ax2 = axes[0][1]
        dns = sorted(int(k) for k in summary["diffusion_decay"])
        means = [summary["diffusion_decay"][str(d)]["mean"] for d in dns]
        errs = [summary["diffusion_decay"][str(d)]["se"] for d in dns]
        ax2.errorbar(dns, means, yerr=errs, fmt="o-", color="tab:blue", capsize=3)
        ax2.set_xlabel("packet separation to reference")
        ax2.set_ylabel("conditional log-negativity")
        ax2.set_title("diffusion degrades the recovery")
    fig.tight_layout()
    return fig


def _plot_teleportation(result):
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    indep = _column(result, "fidelity_conditional", "independent")
    shared = _column(result, "fidelity_conditional", "shared")
    bins = np.linspace(0, 1, 50)
    ax.hist(shared, bins=bins, alpha=0.6, color="tab:blue", label="shared reference", density=True)
    ax.hist(indep, bins=bins, alpha=0.6, color="tab:orange", label="independent reference", density=True)
    ax.axvline(result.summary["oracle_shared"], ls="--", c="tab:blue", lw=1.2)
    ax.axvline(result.summary["oracle_scrambled"], ls="--", c="tab:orange", lw=1.2)
    ax.axvline(0.5, ls=":", c="gray", lw=1.0, label="classical boundary")
    ax.set_xlabel("per-run output fidelity")
    ax.set_ylabel("density")
    ax.legend(frameon=False, fontsize=8)
    ax.set_title("teleportation with and without a shared phase reference")
    return fig


_RENDERERS = {
    "identities": _plot_identities,
    "phase_locking": _plot_phase_locking,
    "atom_interference": _plot_atom,
    "squeezing": _plot_squeezing,
    "tmss_entanglement": _plot_entanglement,
    "teleportation": _plot_teleportation,
}
