"""Rating-analysis figures written next to the analysis CSV.

One grouped bar chart per pair type: mean rating per question for each of
the two explanations, with sample-standard-deviation error bars.
"""

from __future__ import annotations

import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .study import AnalysisRow


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", label).strip("_")


def render_analysis_figures(rows: list[AnalysisRow], out_dir: str | Path) -> list[Path]:
    """Write one PNG per pair label; returns the created paths in order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_pair: dict[str, list[AnalysisRow]] = {}
    for row in rows:
        by_pair.setdefault(row.pair, []).append(row)

    created: list[Path] = []
    for pair, pair_rows in by_pair.items():
        pair_rows = sorted(pair_rows, key=lambda r: r.question_number)
        questions = [f"Q{r.question_number}" for r in pair_rows]
        x = np.arange(len(questions))
        width = 0.38

        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.bar(
            x - width / 2,
            [r.avg_exp1 for r in pair_rows],
            width,
            yerr=[r.sd_exp1 for r in pair_rows],
            capsize=3,
            label="Explanation 1",
            color="#2b4c7e",
        )
        ax.bar(
            x + width / 2,
            [r.avg_exp2 for r in pair_rows],
            width,
            yerr=[r.sd_exp2 for r in pair_rows],
            capsize=3,
            label="Explanation 2",
            color="#d9a528",
        )
        ax.set_xticks(x)
        ax.set_xticklabels(questions)
        ax.set_ylim(0, 7.5)
        ax.set_ylabel("Mean rating")
        ax.set_title(pair)
        ax.legend(loc="lower right", fontsize=8)
        fig.tight_layout()
        path = out / f"{_slug(pair)}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        created.append(path)
    return created
