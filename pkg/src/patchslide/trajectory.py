"""Trajectory CSV persistence.

One row per completed step, fixed column order, floats at 17 significant
digits so that doubles round-trip exactly and downstream identification
can reconstruct impulses losslessly.  The same schema is written by the
simulate and translate commands and read back by sysid.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .core import AppliedImpulse, SliderState
from .errors import ValidationError
from .stepper import TrajectoryRecord
from .sysid import ObservedStep

__all__ = [
    "COLUMNS",
    "write_trajectory",
    "read_trajectory",
    "observed_steps",
    "write_plot_data",
]

COLUMNS = (
    "t", "q_x", "q_y", "theta_z", "v_x", "v_y", "w_z",
    "p_t", "p_o", "p_r", "sigma", "p_n", "a_x", "a_y",
    "in_hull", "in_patch",
    "p_x", "p_y", "p_xtau", "p_ytau", "p_ztau",
    "newton_iters", "residual_norm",
)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _record_row(rec: TrajectoryRecord) -> list[str]:
    s = rec.state
    i = rec.impulses
    e = rec.ecp
    a = rec.applied
    d = rec.diagnostics
    return [
        _fmt(s.t), _fmt(s.q_x), _fmt(s.q_y), _fmt(s.theta_z),
        _fmt(s.v_x), _fmt(s.v_y), _fmt(s.w_z),
        _fmt(i.p_t), _fmt(i.p_o), _fmt(i.p_r), _fmt(i.sigma), _fmt(i.p_n),
        _fmt(e.a_x), _fmt(e.a_y),
        "1" if e.in_hull else "0", "1" if e.in_patch else "0",
        _fmt(a.p_x), _fmt(a.p_y), _fmt(a.p_xtau), _fmt(a.p_ytau), _fmt(a.p_ztau),
        str(d.newton_iters), _fmt(d.residual_norm),
    ]


def write_trajectory(records: list[TrajectoryRecord], path: str | Path) -> None:
    """Write records to CSV; a run with no steps yields a header-only file."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for rec in records:
            writer.writerow(_record_row(rec))


def read_trajectory(path: str | Path) -> list[dict]:
    """Read a trajectory CSV into one dict per row, with numeric types
    restored.  Raises ValidationError when the header does not match the
    schema or a value fails to parse."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file, expected a trajectory header") from None
        if tuple(header) != COLUMNS:
            raise ValidationError(
                f"{path}: header does not match the trajectory schema "
                f"(got {header!r})"
            )
        rows = []
        for ln, raw in enumerate(reader, start=2):
            if len(raw) != len(COLUMNS):
                raise ValidationError(f"{path}:{ln}: expected {len(COLUMNS)} fields, got {len(raw)}")
            row: dict = {}
            try:
                for key, val in zip(COLUMNS, raw):
                    if key in ("in_hull", "in_patch"):
                        row[key] = bool(int(val))
                    elif key == "newton_iters":
                        row[key] = int(val)
                    else:
                        row[key] = float(val)
            except ValueError as e:
                raise ValidationError(f"{path}:{ln}: {e}") from None
            rows.append(row)
    return rows


def _row_state(row: dict) -> SliderState:
    return SliderState(
        q_x=row["q_x"], q_y=row["q_y"], theta_z=row["theta_z"],
        v_x=row["v_x"], v_y=row["v_y"], w_z=row["w_z"], t=row["t"],
    )


def observed_steps(rows: list[dict]) -> list[ObservedStep]:
    """Pair consecutive rows into observed transitions for identification.

    Row k holds the state after step k and the impulse applied during
    step k, so the transition from row k to row k+1 uses row k+1's
    applied and normal impulses.  N rows yield N-1 transitions; the
    initial state is not recoverable from the file.
    """
    steps = []
    for prev, cur in zip(rows, rows[1:]):
        applied = AppliedImpulse(
            p_x=cur["p_x"], p_y=cur["p_y"], p_z=0.0,
            p_xtau=cur["p_xtau"], p_ytau=cur["p_ytau"], p_ztau=cur["p_ztau"],
        )
        steps.append(
            ObservedStep(
                state_u=_row_state(prev),
                state_u1=_row_state(cur),
                applied=applied,
                p_n=cur["p_n"],
            )
        )
    return steps


def write_plot_data(rows: list[dict], prefix: str | Path) -> list[Path]:
    """Emit one two-column (t, value) file per numeric column, named
    <prefix>.<column>.dat, ready for external plotting tools."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for col in COLUMNS:
        if col == "t":
            continue
        out = prefix.with_name(f"{prefix.name}.{col}.dat")
        with open(out, "w") as fh:
            for row in rows:
                fh.write(f"{_fmt(row['t'])}\t{_fmt(float(row[col]))}\n")
        written.append(out)
    return written
