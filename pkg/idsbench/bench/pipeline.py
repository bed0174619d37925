"""
End-to-end scenario run: ingest, balance, split, encode, train the four
bases and both super learners, evaluate on the held-out split, export.
"""

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from .. import __version__
from ..ensemble.super_learner import (
    build_meta_features,
    default_super_learner_spec,
    fold_candidate_seed,
    predict_super,
    refit_seed,
    save_super_learner,
    train_super_learner,
)
from ..errors import IdsBenchError, MissingFile, StageError
from ..ingest.csv_loader import load_csv, summarize
from ..learners.base import predict_proba, train_model
from ..learners.serialization import save_model
from ..metrics.scores import evaluate, roc_points
from ..preprocess.encoder import encode, fit_encoder
from ..preprocess.sampling import SamplerConfig, kfold, stratified_split, undersample
from ..utils.digest import file_digest
from ..utils.seeding import derive_seed
from .config import ScenarioConfig
from .report import BASE_IDS, ROW_ORDER, ResultsTable, dumps_document, export_report, ordering_checks

logger = logging.getLogger(__name__)

# standalone rows reuse the super learners' full-data refits, in candidate order
REFIT_ROWS = ("RF", "GBM", "DL")


@dataclass
class RunManifest:
    config: Dict[str, Any]
    version: str = __version__
    dataset_sha256: Optional[str] = None
    stage_seconds: Dict[str, float] = field(default_factory=dict)
    seeds: Dict[str, int] = field(default_factory=dict)
    counts: Dict[str, Any] = field(default_factory=dict)
    dry_run: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "version": self.version,
            "dataset_sha256": self.dataset_sha256,
            "stage_seconds": dict(self.stage_seconds),
            "seeds": dict(self.seeds),
            "counts": dict(self.counts),
            "dry_run": self.dry_run,
        }


class ScenarioRun:
    """
    One scenario run with its manifest.

    Every stage runs under ``stage(name)``, which times it and wraps any
    failure in a StageError carrying the manifest so far.
    """

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.tag = f"[{config.scenario}_{config.seed}]"
        self.manifest = RunManifest(config=config.resolved())

    @contextmanager
    def stage(self, name: str):
        logger.info(f"{self.tag} {name}: start")
        start = time.perf_counter()
        try:
            yield
        except (IdsBenchError, OSError) as e:
            self.manifest.stage_seconds[name] = round(time.perf_counter() - start, 3)
            logger.debug(f"{self.tag} {name} failed", exc_info=True)
            raise StageError(name, self.config.scenario, e, self.manifest.to_dict()) from e
        elapsed = time.perf_counter() - start
        self.manifest.stage_seconds[name] = round(elapsed, 3)
        logger.info(f"{self.tag} {name}: done in {elapsed:.2f}s")

    def record_seeds(self, sl_seed: int) -> None:
        seed = self.config.seed
        seeds = {
            "root": seed,
            "undersample": derive_seed(seed, "undersample"),
            "split": derive_seed(seed, "split"),
            "LR": derive_seed(seed, "LR"),
            "superlearner": sl_seed,
            "superlearner.kfold": derive_seed(sl_seed, "kfold"),
            "superlearner.meta": derive_seed(sl_seed, "meta"),
        }
        for f in range(self.config.k):
            for j, name in enumerate(REFIT_ROWS):
                seeds[f"superlearner.fold.{f}.{name}"] = fold_candidate_seed(sl_seed, f, j)
        for j, name in enumerate(REFIT_ROWS):
            seeds[f"superlearner.refit.{name}"] = refit_seed(sl_seed, j)
        self.manifest.seeds = seeds

    def execute(self, dry_run: bool = False) -> Optional[ResultsTable]:
        config = self.config
        out = Path(config.out)
        sl_seed = derive_seed(config.seed, "superlearner")
        self.record_seeds(sl_seed)

        with self.stage("resolve"):
            schema = config.load_schema()
            if not Path(config.data).is_file():
                raise MissingFile(str(config.data))
            self.manifest.dataset_sha256 = file_digest(config.data)

        if dry_run:
            self.manifest.dry_run = True
            with self.stage("export"):
                export_manifest_only(self.manifest.to_dict(), out)
            logger.info(f"{self.tag} dry run: resolved config and manifest written to {out}")
            return None

        with self.stage("ingest"):
            dataset = load_csv(config.data, schema)
            summary = summarize(dataset)
            self.manifest.counts["ingest"] = {
                "n_rows": summary.n_rows, "count_y0": summary.count_y0,
                "count_y1": summary.count_y1, "n_features": summary.n_features,
            }

        with self.stage("balance"):
            keep = undersample(dataset.labels, SamplerConfig(seed=config.seed))
            balanced = dataset.take(keep)
            self.manifest.counts["balanced"] = int(keep.size)

        with self.stage("split"):
            plan = stratified_split(balanced.labels, config.test_fraction, config.seed)
            train_rows = balanced.take(plan.train_idx)
            test_rows = balanced.take(plan.test_idx)
            self.manifest.counts["train"] = int(plan.train_idx.size)
            self.manifest.counts["test"] = int(plan.test_idx.size)

        with self.stage("encode"):
            state = fit_encoder(train_rows)
            train = encode(state, train_rows)
            test = encode(state, test_rows)
            self.manifest.counts["encoded_width"] = state.width
            self.manifest.counts["unseen_levels_test"] = dict(test.unseen_counts)

        with self.stage("train"):
            lr = train_model(config.learner_spec("glm", seed=derive_seed(config.seed, "LR")), train.X, train.y)
            sl1_spec = default_super_learner_spec(
                "SL1", sl_seed, config.k, config.overrides, config.overrides.get("sl1_meta"))
            sl2_spec = default_super_learner_spec(
                "SL2", sl_seed, config.k, config.overrides, config.overrides.get("sl2_meta"))
            folds = kfold(train.y, config.k, sl_seed)
            meta_features = build_meta_features(train.X, train.y, sl1_spec, folds=folds, workers=config.workers)
            sl1 = train_super_learner(train.X, train.y, sl1_spec, meta_features=meta_features, workers=config.workers)
            sl2 = train_super_learner(
                train.X, train.y, sl2_spec, meta_features=meta_features,
                refit_bases=sl1.bases, workers=config.workers,
            )
            models = {"LR": lr, **dict(zip(REFIT_ROWS, sl1.bases))}
            supers = {"SL1": sl1, "SL2": sl2}
            self.manifest.stage_seconds.update(
                {f"train.{i}": round(m.wall_time, 3) for i, m in models.items()}
            )

        with self.stage("evaluate"):
            scores = {i: predict_proba(m, test.X) for i, m in models.items()}
            scores.update({i: predict_super(m, test.X) for i, m in supers.items()})
            reports = {i: evaluate(scores[i], test.y, i) for i in ROW_ORDER}
            curves = {i: roc_points(scores[i], test.y) for i in ROW_ORDER}
            checks = ordering_checks(reports)
            for name, passed in checks.items():
                if not passed:
                    logger.warning(f"{self.tag} ordering check failed: {name}")
            table = ResultsTable(
                scenario=config.scenario,
                seed=config.seed,
                rows=[reports[i] for i in ROW_ORDER],
                checks=checks,
                reference={k: dict(v) for k, v in schema.reference_results.items()},
            )

        with self.stage("export"):
            model_dir = out / "models"
            model_dir.mkdir(parents=True, exist_ok=True)
            for i in BASE_IDS:
                save_model(models[i], model_dir / f"{i.lower()}.json")
            for i, m in supers.items():
                save_super_learner(m, model_dir / f"{i.lower()}.json")
            export_report(table, curves, self.manifest.to_dict(), out)

        return table


def export_manifest_only(manifest: Dict[str, Any], out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "manifest.json"
    path.write_text(dumps_document(manifest), encoding="utf-8")
    return path


def run_scenario(config: ScenarioConfig, dry_run: bool = False) -> Tuple[Optional[ResultsTable], RunManifest]:
    """
    Run one scenario end to end.

    Args:
        config (ScenarioConfig): Resolved run config
        dry_run (bool): Resolve the config and write the manifest only

    Returns:
        Tuple: (results table or None on a dry run, run manifest)

    Raises:
        StageError: Wrapping the failure with the stage name, scenario and manifest so far
    """
    run = ScenarioRun(config)
    table = run.execute(dry_run=dry_run)
    return table, run.manifest
