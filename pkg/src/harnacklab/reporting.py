"""Report containers and file emission shared across the check modules.

The verdict logic is deliberately centralized: a check whose curvature
hypothesis fails must surface as "hypothesis-not-met" (with the witness
values recorded), never as "violated": negative margins are only a
violation when the hypothesis actually held.

File output is deterministic by construction: floats are serialized with
repr (shortest round-trip form), header metadata is sorted, and nothing
time- or path-dependent is written, so identical inputs give byte-identical
CSVs.
"""

import io
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class InequalityReport:
    """Flat sample table: locations, taus and margins share one length."""

    check: str
    locations: np.ndarray
    taus: np.ndarray
    margins: np.ndarray
    tolerance: float
    hypothesis: str
    hypothesis_met: bool
    resolution: int
    note: str = ""
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("locations", "taus", "margins"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        if not (self.locations.shape == self.taus.shape == self.margins.shape):
            raise ValueError("locations, taus and margins must have matching shapes")

    @property
    def worst_margin(self):
        return float(np.min(self.margins))

    @property
    def verdict(self):
        if not self.hypothesis_met:
            return "hypothesis-not-met"
        return "holds" if self.worst_margin >= -self.tolerance else "violated"

    def worst_location(self):
        k = int(np.argmin(self.margins))
        return float(self.locations[k]), float(self.taus[k])


def format_value(x):
    """Stable scalar serialization: shortest round-trip repr for floats."""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def render_csv(meta, columns, rows):
    """CSV text with '# key = value' header lines, metadata sorted by key."""
    out = io.StringIO()
    for key in sorted(meta):
        out.write(f"# {key} = {format_value(meta[key])}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(format_value(v) for v in row) + "\n")
    return out.getvalue()


def write_csv(path, meta, columns, rows):
    rows = list(rows)
    if not rows:
        raise ValueError("refusing to write an empty result table")
    text = render_csv(meta, columns, rows)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def write_line_plot(path, x, series, meta, band=None, xlabel="", ylabel="", title=""):
    """SVG line plot with an optional symmetric tolerance band around zero.

    Uses the Agg backend and strips the date stamp; the svg hash salt is
    pinned to the config hash so element ids do not wander between runs.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with plt.rc_context({"svg.hashsalt": str(meta.get("config_hash", "harnacklab"))}):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for label, ys in series.items():
            ax.plot(x, ys, label=label)
        if band is not None:
            ax.axhspan(-band, band, color="0.85", zorder=0, label=f"tolerance {band:g}")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
