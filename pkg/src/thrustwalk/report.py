"""Render summary figures from a telemetry log.

Each figure is written as a PNG next to (or into a chosen directory beside)
the delimited log: body states, foot trajectories, friction-constraint
margin, leg joint trajectories, and the estimated-vs-true ground reaction
force comparison.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .dynamics import LEG_NAMES  # noqa: E402
from .telemetry import read_csv  # noqa: E402

_FIGSIZE = (8.0, 6.0)


def _save(fig, outdir: Path, name: str, files: list[Path]) -> None:
    path = outdir / name
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    files.append(path)


def render_report(csv_path: str | Path, outdir: str | Path | None = None) -> list[Path]:
    """Render all figures for a log; returns the written file paths."""
    csv_path = Path(csv_path)
    out = Path(outdir) if outdir is not None else csv_path.parent
    out.mkdir(parents=True, exist_ok=True)
    cols, _meta = read_csv(csv_path)
    t = cols["t"]
    files: list[Path] = []

    # body states: position, attitude, velocity vs applied reference
    fig, axes = plt.subplots(3, 1, figsize=_FIGSIZE, sharex=True)
    for name in ("p_x", "p_y", "p_z"):
        axes[0].plot(t, cols[name], label=name)
    axes[0].set_ylabel("position [m]")
    axes[0].legend(loc="upper left", fontsize=8)
    for name in ("roll", "pitch", "yaw"):
        axes[1].plot(t, cols[name], label=name)
    axes[1].set_ylabel("attitude [rad]")
    axes[1].legend(loc="upper left", fontsize=8)
    axes[2].plot(t, cols["v_x"], label="v_x")
    axes[2].plot(t, cols["xw_x"], "--", label="applied ref")
    axes[2].set_ylabel("forward velocity [m/s]")
    axes[2].set_xlabel("time [s]")
    axes[2].legend(loc="lower right", fontsize=8)
    fig.suptitle("Body states")
    _save(fig, out, "body_states.png", files)

    # foot positions
    fig, axes = plt.subplots(2, 1, figsize=_FIGSIZE, sharex=True)
    for leg in LEG_NAMES:
        axes[0].plot(t, cols[f"foot_{leg}_x"], label=leg)
        axes[1].plot(t, cols[f"foot_{leg}_z"], label=leg)
    axes[0].set_ylabel("foot x [m]")
    axes[1].set_ylabel("foot z [m]")
    axes[1].set_xlabel("time [s]")
    axes[0].legend(loc="upper left", fontsize=8, ncol=4)
    fig.suptitle("Foot positions")
    _save(fig, out, "foot_positions.png", files)

    # constraint margin and per-foot friction ratio
    fig, axes = plt.subplots(2, 1, figsize=_FIGSIZE, sharex=True)
    axes[0].plot(t, cols["margin"], color="tab:blue")
    axes[0].axhline(0.0, color="k", lw=0.8)
    axes[0].set_ylabel("predicted margin [N]")
    for leg in LEG_NAMES:
        uz = cols[f"grf_{leg}_z"]
        ratio = np.where(uz > 1e-6, np.abs(cols[f"grf_{leg}_x"]) / np.maximum(uz, 1e-6), 0.0)
        axes[1].plot(t, ratio, label=leg, lw=0.7)
    axes[1].set_ylabel("|u_x| / u_z [-]")
    axes[1].set_xlabel("time [s]")
    axes[1].legend(loc="upper right", fontsize=8, ncol=4)
    fig.suptitle("Friction constraint satisfaction")
    _save(fig, out, "constraint_margin.png", files)

    # leg joints
    fig, axes = plt.subplots(3, 1, figsize=_FIGSIZE, sharex=True)
    for leg in LEG_NAMES:
        axes[0].plot(t, cols[f"gamma_{leg}"], label=leg, lw=0.8)
        axes[1].plot(t, cols[f"phi_{leg}"], lw=0.8)
        axes[2].plot(t, cols[f"len_{leg}"], lw=0.8)
    axes[0].set_ylabel("gamma [rad]")
    axes[1].set_ylabel("phi [rad]")
    axes[2].set_ylabel("length [m]")
    axes[2].set_xlabel("time [s]")
    axes[0].legend(loc="upper right", fontsize=8, ncol=4)
    fig.suptitle("Leg joints")
    _save(fig, out, "leg_joints.png", files)

    # estimator comparison on the generalized normal force + thrusts
    fig, axes = plt.subplots(2, 1, figsize=_FIGSIZE, sharex=True)
    axes[0].plot(t, cols["true_gen_2"], "k", lw=1.0, label="true")
    axes[0].plot(t, cols["obs_gen_2"], "tab:orange", lw=0.8, label="momentum observer")
    axes[0].plot(t, cols["con_gen_2"], "tab:green", lw=0.8, label="constrained model")
    axes[0].set_ylabel("normal generalized force [N]")
    axes[0].legend(loc="upper right", fontsize=8)
    for i in range(4):
        axes[1].plot(t, cols[f"thrust_{i}"], lw=0.8, label=f"fan {i}")
    axes[1].set_ylabel("thrust [N]")
    axes[1].set_xlabel("time [s]")
    axes[1].legend(loc="upper right", fontsize=8, ncol=4)
    fig.suptitle("GRF estimation and thruster activity")
    _save(fig, out, "grf_estimates.png", files)

    return files
