"""Plot-data emission: two-column .dat files plus one SVG per standard figure.

Everything is regenerated from the on-disk artifacts (diagnostics.csv and
morawetz.ini), so `plot --run <dir>` works offline on any finished run
directory and the runner itself goes through the same code path.
"""

from __future__ import annotations

import configparser
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["render_run", "read_csv_columns"]

_FIG_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 100,
    "svg.hashsalt": "inls-lab",
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def read_csv_columns(csv_path: Path) -> dict[str, list]:
    """Column name -> list of (t, value) pairs, skipping empty cells."""
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        names = [c for c in reader.fieldnames if c != "t"]
        out: dict[str, list] = {name: [] for name in names}
        for row in reader:
            t = float(row["t"])
            for name in names:
                cell = row[name]
                if cell != "":
                    out[name].append((t, float(cell)))
    return out


def _write_dat(path: Path, pairs) -> Path:
    lines = [f"{t:.17g} {v:.17g}" for t, v in pairs]
    path.write_text("\n".join(lines) + ("\n" if lines else ""))
    return path


def _save(fig, path: Path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def render_run(run_dir) -> list[Path]:
    run_dir = Path(run_dir)
    csv_path = run_dir / "diagnostics.csv"
    if not csv_path.exists():
        raise FileNotFoundError(f"no diagnostics.csv under {run_dir}")
    plot_dir = run_dir / "plots"
    plot_dir.mkdir(exist_ok=True)
    columns = read_csv_columns(csv_path)
    written: list[Path] = []

    with plt.rc_context(_FIG_STYLE):
        # 1. threshold margins vs t
        fig, ax = plt.subplots()
        for key, label in (
            ("threshold_energy_margin", "energy margin"),
            ("threshold_kinetic_margin", "kinetic margin"),
        ):
            pairs = columns.get(key, [])
            written.append(_write_dat(plot_dir / f"{key}.dat", pairs))
            if pairs:
                tt, vv = zip(*pairs)
                ax.plot(tt, vv, label=label)
        ax.axhline(1.0, color="k", lw=0.8, ls="--", label="threshold")
        ax.set_xlabel("t")
        ax.set_ylabel("margin")
        ax.set_title("threshold margins")
        ax.legend()
        written.append(_save(fig, plot_dir / "margins.svg"))

        # 2. local mass vs t (one curve per configured radius)
        fig, ax = plt.subplots()
        for key in sorted(k for k in columns if k.startswith("local_mass_R")):
            pairs = columns[key]
            written.append(_write_dat(plot_dir / f"{key}.dat", pairs))
            if pairs:
                tt, vv = zip(*pairs)
                ax.plot(tt, vv, label=key.replace("local_mass_", "ball "))
        ax.set_xlabel("t")
        ax.set_ylabel("mass in ball")
        ax.set_title("local mass")
        if ax.get_legend_handles_labels()[0]:
            ax.legend()
        written.append(_save(fig, plot_dir / "local_mass.svg"))

        # 3. interaction-representation Cauchy increments vs t
        fig, ax = plt.subplots()
        pairs = columns.get("cauchy_increment", [])
        written.append(_write_dat(plot_dir / "cauchy_increments.dat", pairs))
        if pairs:
            tt, vv = zip(*pairs)
            ax.plot(tt, vv, marker="o")
            positive = [v for v in vv if v > 0]
            if positive and max(positive) / max(min(positive), 1e-300) > 50:
                ax.set_yscale("log")
        ax.set_xlabel("t")
        ax.set_ylabel("H1 increment")
        ax.set_title("interaction-representation increments")
        written.append(_save(fig, plot_dir / "cauchy_increments.svg"))

        # 4. fitted space-time-average constant vs horizon
        fig, ax = plt.subplots()
        pairs = _morawetz_pairs(run_dir / "morawetz.ini")
        written.append(_write_dat(plot_dir / "morawetz_constant.dat", pairs))
        if pairs:
            tt, vv = zip(*pairs)
            ax.plot(tt, vv, marker="s")
        ax.set_xlabel("horizon T")
        ax.set_ylabel("average / (R/T + R^-b)")
        ax.set_title("fitted space-time bound constant")
        written.append(_save(fig, plot_dir / "morawetz_constant.svg"))

    return written


def _morawetz_pairs(ini_path: Path) -> list:
    if not ini_path.exists():
        return []
    parser = configparser.ConfigParser(interpolation=None)
    parser.read(ini_path)
    pairs = []
    for section in parser.sections():
        try:
            pairs.append(
                (parser.getfloat(section, "T"), parser.getfloat(section, "fitted_constant"))
            )
        except (configparser.Error, ValueError):
            continue
    pairs.sort()
    return pairs
