"""
Results table and report files.

results.json and table.txt depend only on the evaluation results, so the
same results always produce the same bytes. Timings live in manifest.json.
"""

import json
import logging
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from ..metrics.roc_export import plot_roc_svg, write_roc_csv
from ..metrics.scores import ConfusionMatrix, EvalReport, RocCurve

logger = logging.getLogger(__name__)

ROW_ORDER = ("LR", "RF", "GBM", "DL", "SL1", "SL2")
BASE_IDS = ("LR", "RF", "GBM", "DL")
SUPER_IDS = ("SL1", "SL2")
ROW_NAMES = {
    "LR": "Logistic Regression",
    "RF": "Random Forest",
    "GBM": "Gradient Boosting",
    "DL": "Deep Learning",
    "SL1": "SL1: DL",
    "SL2": "SL2: GBM",
}
CANDIDATE_ANNOTATION = "RF, DL, GBM"
# a super learner may trail the best base by this much
SUPER_TOLERANCE = 0.002


def four_decimals(x: float) -> str:
    return str(Decimal(repr(float(x))).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))


@dataclass
class ResultsTable:
    scenario: str
    seed: int
    rows: List[EvalReport]
    checks: Dict[str, bool] = field(default_factory=dict)
    reference: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        ids = tuple(r.model_id for r in self.rows)
        if ids != ROW_ORDER:
            raise ValueError(f"Results rows must be {ROW_ORDER}, got {ids}")

    def row(self, model_id: str) -> EvalReport:
        return next(r for r in self.rows if r.model_id == model_id)

    def best(self, ids) -> str:
        # first in table order wins ties
        return max(ids, key=lambda i: (self.row(i).auc, -ROW_ORDER.index(i)))

    def to_dict(self) -> Dict[str, Any]:
        rows = []
        for r in self.rows:
            entry = r.to_dict()
            entry["name"] = ROW_NAMES[r.model_id]
            entry["candidates"] = CANDIDATE_ANNOTATION if r.model_id in SUPER_IDS else None
            rows.append(entry)
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "rows": rows,
            "checks": dict(self.checks),
            "reference": self.reference,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ResultsTable":
        rows = []
        for entry in d["rows"]:
            c = entry["confusion"]
            rows.append(EvalReport(
                model_id=entry["model"],
                auc=float(entry["auc"]),
                accuracy=float(entry["accuracy"]),
                f_score=float(entry["f_score"]),
                confusion=ConfusionMatrix(tp=c["tp"], fp=c["fp"], tn=c["tn"], fn=c["fn"], threshold=c["threshold"]),
                n_pos=int(entry["n_pos"]),
                n_neg=int(entry["n_neg"]),
            ))
        return cls(
            scenario=d["scenario"],
            seed=int(d["seed"]),
            rows=rows,
            checks={k: bool(v) for k, v in d.get("checks", {}).items()},
            reference=d.get("reference", {}),
        )

    def render(self) -> str:
        """Plain-text grid in row order; '*' marks the strongest base and super learner by AUC."""
        best = {self.best(BASE_IDS), self.best(SUPER_IDS)}
        header = f"{'Classifier':<22}{'Candidate':<14}{'AUC':>8}{'Accuracy':>10}{'F-score':>10}"
        lines = [f"Scenario: {self.scenario} (seed {self.seed})", "", header, "-" * len(header)]
        for r in self.rows:
            mark = "*" if r.model_id in best else " "
            candidates = CANDIDATE_ANNOTATION if r.model_id in SUPER_IDS else "-"
            lines.append(
                f"{mark}{ROW_NAMES[r.model_id]:<21}{candidates:<14}"
                f"{four_decimals(r.auc):>8}{four_decimals(r.accuracy):>10}{four_decimals(r.f_score):>10}"
            )
        lines.append("")
        lines.append("* strongest base classifier / super learner by AUC")
        if self.checks:
            lines.append("")
            lines.append("Ordering checks:")
            for name in sorted(self.checks):
                lines.append(f"  {name}: {'pass' if self.checks[name] else 'FAIL'}")
        if self.reference:
            lines.append("")
            lines.append("Reference values:")
            for model_id in ROW_ORDER:
                ref = self.reference.get(model_id)
                if ref:
                    lines.append(
                        f" {ROW_NAMES[model_id]:<21}{'':<14}{four_decimals(ref['auc']):>8}"
                        f"{four_decimals(ref['accuracy']):>10}{four_decimals(ref['f_score']):>10}"
                    )
        return "\n".join(lines) + "\n"


def ordering_checks(rows: Mapping[str, EvalReport]) -> Dict[str, bool]:
    """LR lowest base AUC, GBM highest base AUC, each super learner within tolerance of the best base."""
    base_auc = {i: rows[i].auc for i in BASE_IDS}
    best_base = max(base_auc.values())
    checks = {
        "lr_lowest_base_auc": base_auc["LR"] <= min(base_auc.values()),
        "gbm_highest_base_auc": base_auc["GBM"] >= best_base,
    }
    for sl in SUPER_IDS:
        checks[f"{sl.lower()}_within_tolerance_of_best_base"] = rows[sl].auc >= best_base - SUPER_TOLERANCE
    return checks


def dumps_document(document: Mapping[str, Any]) -> str:
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OSError(f"Cannot write {path}: {e}") from e


def render_plots(table: ResultsTable, curves: Mapping[str, RocCurve], out_dir: Path) -> None:
    out_dir = Path(out_dir)
    everything = [(ROW_NAMES[i], curves[i], table.row(i).auc) for i in ROW_ORDER if i in curves]
    supers = [(ROW_NAMES[i], curves[i], table.row(i).auc) for i in SUPER_IDS if i in curves]
    plot_roc_svg(everything, out_dir / "roc_all.svg", title=f"ROC: {table.scenario}")
    plot_roc_svg(supers, out_dir / "roc_super.svg", title=f"ROC super learners: {table.scenario}")


def export_report(
    table: ResultsTable,
    curves: Mapping[str, RocCurve],
    manifest: Optional[Mapping[str, Any]],
    out_dir: Path,
) -> List[Path]:
    """
    Write results.json, table.txt, roc_<model>.csv, roc_all.svg, roc_super.svg and manifest.json.

    Args:
        table (ResultsTable): Evaluation results
        curves: ROC curve per model id
        manifest: Run manifest document; skipped when None
        out_dir (Path): Output directory, created if needed

    Returns:
        List[Path]: The written files

    Raises:
        OSError: With the offending path if a file cannot be written
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"Cannot create output directory {out_dir}: {e}") from e

    written = []
    results_path = out_dir / "results.json"
    _write_text(results_path, dumps_document(table.to_dict()))
    written.append(results_path)

    table_path = out_dir / "table.txt"
    _write_text(table_path, table.render())
    written.append(table_path)

    for model_id in ROW_ORDER:
        if model_id in curves:
            path = out_dir / f"roc_{model_id.lower()}.csv"
            write_roc_csv(curves[model_id], path)
            written.append(path)

    render_plots(table, curves, out_dir)
    written += [out_dir / "roc_all.svg", out_dir / "roc_super.svg"]

    if manifest is not None:
        manifest_path = out_dir / "manifest.json"
        _write_text(manifest_path, dumps_document(manifest))
        written.append(manifest_path)
    logger.info(f"Exported {len(written)} files to {out_dir}")
    return written


def load_results(path: Path) -> ResultsTable:
    with open(path, "r", encoding="utf-8") as f:
        return ResultsTable.from_dict(json.load(f))
