"""Gap histograms for campaign results."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def figsize(width_pt: float = 345.0, scale: float = 1.0) -> tuple[float, float]:
    """Width from a text width in points, height by the golden mean."""
    golden_mean = (math.sqrt(5.0) - 1.0) / 2.0
    w = width_pt / 72.27 * scale
    return w, w * golden_mean


def _gaps(results) -> dict[str, tuple[np.ndarray, int, int]]:
    by_suite: dict[str, list] = {}
    for r in results:
        by_suite.setdefault(r.suite, []).append(r.report)
    out = {}
    for suite, reps in by_suite.items():
        finite = np.array([rep.gap for rep in reps if math.isfinite(rep.gap)], dtype=float)
        vacuous = sum(rep.vacuous for rep in reps)
        failed = sum(not rep.passed for rep in reps)
        out[suite] = (finite, vacuous, failed)
    return out


def gap_histograms(results, out_dir) -> list[Path]:
    """One PNG per suite with the histogram of finite gaps; returns the file paths.

    Gaps span many decades, so the horizontal axis is ``symlog``. The
    negated tolerance is drawn as a dashed line.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tols = {}
    for r in results:
        tols.setdefault(r.suite, r.report.tol)
    paths = []
    with plt.rc_context(RC):
        for suite, (gaps, vacuous, failed) in sorted(_gaps(results).items()):
            fig, ax = plt.subplots(figsize=figsize())
            if gaps.size:
                lo, hi = float(gaps.min()), float(gaps.max())
                if lo == hi:
                    lo, hi = lo - 1e-12, hi + 1e-12
                ax.hist(gaps, bins=min(40, max(5, gaps.size // 3)), range=(lo, hi), color="0.35")
                ax.set_xscale("symlog", linthresh=1e-10)
            tol = tols.get(suite)
            if tol:
                ax.axvline(-tol, color="C3", ls="--", lw=0.8, label=f"-tol = {-tol:g}")
                ax.legend(frameon=False)
            ax.set_xlabel("gap = lhs - rhs")
            ax.set_ylabel("trials")
            ax.set_title(f"{suite}: {gaps.size + vacuous} trials, {failed} failed, {vacuous} vacuous")
            path = out_dir / f"{suite}_gaps.png"
            fig.savefig(path)
            plt.close(fig)
            paths.append(path)
    return paths
