"""
ROC curve files: per-model CSV (threshold, fpr, tpr) and SVG plots.
"""

import logging
from pathlib import Path
from typing import Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from .scores import RocCurve  # noqa: E402

logger = logging.getLogger(__name__)

# fixed hash salt; savefig also drops the date
_SVG_RC = {"svg.hashsalt": "idsbench-roc", "svg.fonttype": "path"}


def write_roc_csv(curve: RocCurve, path: Path) -> None:
    path = Path(path)
    frame = pd.DataFrame({"threshold": curve.thresholds, "fpr": curve.fpr, "tpr": curve.tpr})
    try:
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise OSError(f"Cannot write ROC curve to {path}: {e}") from e


def read_roc_csv(path: Path) -> RocCurve:
    frame = pd.read_csv(path, float_precision="round_trip")
    return RocCurve(
        fpr=frame["fpr"].to_numpy(dtype=np.float64),
        tpr=frame["tpr"].to_numpy(dtype=np.float64),
        thresholds=frame["threshold"].to_numpy(dtype=np.float64),
    )


def plot_roc_svg(curves: Sequence[Tuple[str, RocCurve, float]], path: Path, title: str = "ROC") -> None:
    """
    Draw one polyline per model on the unit square with the chance diagonal.

    Args:
        curves: (model name, curve, AUC) triples in legend order
        path (Path): Output .svg file
        title (str): Plot title
    """
    path = Path(path)
    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        try:
            ax.plot([0, 1], [0, 1], color="grey", linestyle="--", linewidth=1)
            for name, curve, auc_value in curves:
                ax.plot(curve.fpr, curve.tpr, linewidth=1.5, label=f"{name} (AUC = {auc_value:.4f})")
            ax.set_xlim(0.0, 1.0)
            ax.set_ylim(0.0, 1.0)
            ax.set_xlabel("False Positive Rate")
            ax.set_ylabel("True Positive Rate")
            ax.set_title(title)
            ax.legend(loc="lower right")
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as e:
            raise OSError(f"Cannot write ROC plot to {path}: {e}") from e
        finally:
            plt.close(fig)
    logger.debug(f"Wrote {path} ({len(curves)} curves)")
