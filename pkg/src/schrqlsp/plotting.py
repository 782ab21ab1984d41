"""PNG figures for demo and sweep tables (Agg backend, no display needed)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 150,
    "figure.figsize": (4.5, 3.2),
}


def _finite(vals):
    out = []
    for v in vals:
        try:
            out.append(float(v))
        except (TypeError, ValueError):
            out.append(np.nan)
    return np.array(out)


def convergence_figure(rows: list[dict], path, title: str = "", loglog: bool = True) -> Path:
    """Errors against level_or_T; L2 and (when present) H1 columns."""
    path = Path(path)
    x = _finite(r["level_or_T"] for r in rows)
    series = {"l2_error": "L2 / l2 error", "h1_error_or_blank": "H1 error", "residual": "residual"}
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for key, label in series.items():
            y = _finite(r.get(key) for r in rows)
            if np.any(np.isfinite(y) & (y > 0)):
                ax.plot(x, y, "o-", label=label)
        if loglog:
            ax.set_yscale("log")
        ax.set_xlabel("level / T")
        ax.set_ylabel("error")
        if title:
            ax.set_title(title)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def solution_figure(x_exact, x_approx, path, title: str = "") -> Path:
    """Nodal exact vs approximate values."""
    path = Path(path)
    x_exact = np.real(np.asarray(x_exact))
    x_approx = np.real(np.asarray(x_approx))
    idx = np.arange(x_exact.size)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(idx, x_exact, "-", label="exact")
        ax.plot(idx, x_approx, "x", label="approx")
        ax.set_xlabel("index")
        if title:
            ax.set_title(title)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
