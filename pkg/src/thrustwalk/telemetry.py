"""Delimited telemetry output.

One row per (decimated) control step in a fixed, documented column order;
floats are written with repr so a parse-back reproduces the logged values
bit-exactly. Metadata travels in '#'-prefixed key=value header lines ahead
of the column header.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .dynamics import LEG_NAMES

_GEN = tuple(f"gen_{i}" for i in range(6))


def _per_leg(prefix: str, comps: tuple[str, ...] = ("x", "y", "z")) -> list[str]:
    return [f"{prefix}_{leg}_{c}" for leg in LEG_NAMES for c in comps]


def log_columns() -> list[str]:
    """The fixed column order (documented in the README)."""
    cols = ["t"]
    cols += ["p_x", "p_y", "p_z"]
    cols += ["roll", "pitch", "yaw"]
    cols += ["v_x", "v_y", "v_z"]
    cols += ["w_x", "w_y", "w_z"]
    cols += ["xw_x", "xw_y", "xw_z"]
    cols += ["margin"]
    cols += _per_leg("foot")
    cols += [f"contact_{leg}" for leg in LEG_NAMES]
    cols += _per_leg("grf")
    cols += [f"{name}_{leg}" for leg in LEG_NAMES for name in ("gamma", "phi", "len")]
    cols += [f"true_{g}" for g in _GEN]
    cols += [f"obs_{g}" for g in _GEN]
    cols += _per_leg("obsf")
    cols += _per_leg("lam")
    cols += [f"con_{g}" for g in _GEN]
    cols += [f"thrust_{i}" for i in range(4)]
    return cols


N_COLUMNS = len(log_columns())


def write_csv(rows: list[np.ndarray], path: str | Path, metadata: dict | None = None) -> None:
    """Write metadata lines, the header, and one row per record."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            for key, value in (metadata or {}).items():
                fh.write(f"# {key}={value}\n")
            writer = csv.writer(fh)
            writer.writerow(log_columns())
            for row in rows:
                writer.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write log to {path}: {exc}") from exc


def read_csv(path: str | Path) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    """Parse a log back into column arrays plus the metadata mapping."""
    path = Path(path)
    metadata: dict[str, str] = {}
    header: list[str] | None = None
    data: list[list[float]] = []
    with path.open() as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("# ")
                if "=" in body:
                    key, value = body.split("=", 1)
                    metadata[key] = value
                continue
            parts = line.split(",")
            if header is None:
                header = parts
                continue
            data.append([float(p) for p in parts])
    if header is None:
        raise ValueError(f"{path}: no header row found")
    table = np.asarray(data, dtype=float).reshape(len(data), len(header))
    return {name: table[:, i] for i, name in enumerate(header)}, metadata
