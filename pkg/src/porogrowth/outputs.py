"""CSV emission: mid-node time series, field maps, diagnostics.

All floating values are written with repr (shortest round-trip form) so
repeated runs of the same configuration are byte-identical.
"""

import os

from .errors import PorogrowthError
from .scenario import SECONDS_PER_DAY

FIELD_NAMES = ("p", "c", "xi", "u")

TIMESERIES_HEADER = "t_days,phi_n,phi_v,phi_q,phi_ecm,phi_fl,c,p,xi"


def _fmt(value):
    if isinstance(value, (int,)):
        return str(value)
    return repr(float(value))


def _write(path, lines):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise PorogrowthError(f"cannot write {path}: {exc}") from exc


def emit_outputs(trajectory, config, out_dir):
    """Write the configured CSV files into out_dir; returns their paths."""
    if not trajectory.states:
        raise PorogrowthError("trajectory is empty")
    os.makedirs(out_dir, exist_ok=True)
    written = []

    if config.emit_timeseries:
        lines = [TIMESERIES_HEADER]
        series = trajectory.mid_series
        for i, t in enumerate(trajectory.series_times):
            row = [_fmt(t / SECONDS_PER_DAY)]
            for key in ("phi_n", "phi_v", "phi_q", "phi_ecm", "phi_fl", "c", "p"):
                row.append(_fmt(series[key][i]))
            row.append(str(series["xi"][i]))
            lines.append(",".join(row))
        path = os.path.join(out_dir, "timeseries.csv")
        _write(path, lines)
        written.append(path)

    if config.emit_fields or config.emit_xi_map:
        names = [n for n in FIELD_NAMES
                 if config.emit_fields or n == "xi"]
        if not config.emit_xi_map:
            names = [n for n in names if n != "xi"]
        for name in names:
            lines = ["t_days,x_cm,value"]
            for t, state in zip(trajectory.times, trajectory.states):
                values = _field_values(trajectory, name, t, state)
                t_days = _fmt(t / SECONDS_PER_DAY)
                for x, value in zip(trajectory.mesh.nodes, values):
                    if name == "xi":
                        lines.append(f"{t_days},{_fmt(x)},{int(value)}")
                    else:
                        lines.append(f"{t_days},{_fmt(x)},{_fmt(value)}")
            path = os.path.join(out_dir, f"field_{name}.csv")
            _write(path, lines)
            written.append(path)

    if config.emit_diagnostics:
        lines = ["step,t_days,fp_iters,fp_residual"]
        for d in trajectory.diagnostics:
            lines.append(
                f"{d.step},{_fmt(d.time / SECONDS_PER_DAY)},"
                f"{d.iterations},{_fmt(d.residual)}")
        path = os.path.join(out_dir, "diagnostics.csv")
        _write(path, lines)
        written.append(path)

    return written


def _field_values(trajectory, name, t, state):
    if name == "xi":
        step = trajectory.series_times.index(t)
        return trajectory.xi_series[step]
    return getattr(state, name)
