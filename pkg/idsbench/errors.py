"""
Exception hierarchy shared by every stage of the benchmark.

Each family carries the process exit code the CLI reports for it.
"""

from functools import partial
from typing import Any, Dict, Iterable, Optional


class IdsBenchError(Exception):
    """Base class for all benchmark errors."""
    exit_code = 1

    def __new__(cls, *args, **kwargs):
        self = super().__new__(cls, *args)
        self._init_args = args
        self._init_kwargs = kwargs
        return self

    def __reduce__(self):
        # rebuild through __init__ so errors survive joblib worker processes
        return partial(self.__class__, **self._init_kwargs), self._init_args, self.__dict__


# Configuration ---------------------------------------------------------------

class ConfigError(IdsBenchError):
    exit_code = 2


class InvalidConfig(ConfigError):
    """Raised when a config file, schema document or CLI flag is invalid."""
    pass


class InvalidHyperparameters(ConfigError):
    """Raised when a learner's hyperparameters fail validation."""

    def __init__(self, family: str, detail: str):
        self.family = family
        self.detail = detail
        super().__init__(f"Invalid hyperparameters for {family}: {detail}")


# Data ------------------------------------------------------------------------

class DataError(IdsBenchError):
    exit_code = 3


class MissingFile(DataError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"Data file not found: {path}")


class MalformedCsv(DataError):
    def __init__(self, path: str, detail: str):
        self.path = path
        self.detail = detail
        super().__init__(f"Cannot parse {path}: {detail}")


class HeaderMismatch(DataError):
    def __init__(self, unexpected: Iterable[str], absent: Iterable[str]):
        self.unexpected = sorted(unexpected)
        self.absent = sorted(absent)
        super().__init__(
            f"Header does not match schema: unexpected={self.unexpected} absent={self.absent}"
        )


class UnmappedToken(DataError):
    def __init__(self, token: str, row: int):
        self.token = token
        self.row = row
        super().__init__(f"Label token {token!r} (first seen at row {row}) is not covered by the label spec")


class LabelParseFailure(DataError):
    def __init__(self, row: int, token: str):
        self.row = row
        self.token = token
        super().__init__(f"Cannot parse label token {token!r} at row {row}")


class LabelCountMismatch(DataError):
    def __init__(self, expected: Dict[str, int], observed: Dict[str, int]):
        self.expected = expected
        self.observed = observed
        super().__init__(f"Class counts {observed} do not match expected {expected}")


class EmptySampleWithoutOverrides(DataError):
    def __init__(self, columns: Iterable[str]):
        self.columns = list(columns)
        super().__init__(f"No sample rows to infer kinds for columns: {self.columns}")


class SingleClassInput(DataError):
    def __init__(self, present: Optional[int] = None):
        self.present = present
        super().__init__(f"Both classes are required, only class {present} is present")


class DegenerateSplit(DataError):
    def __init__(self, label: int, n_train: int, n_test: int):
        self.label = label
        self.n_train = n_train
        self.n_test = n_test
        super().__init__(
            f"Class {label} would get {n_train} train / {n_test} test rows"
        )


class EmptyTrainingSet(DataError):
    def __init__(self):
        super().__init__("Cannot fit an encoder on zero training rows")


class SchemaMismatch(DataError):
    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"Rows do not conform to the fitted schema: {detail}")


class TooFewRowsPerClass(DataError):
    def __init__(self, k: int, counts: Dict[int, int]):
        self.k = k
        self.counts = counts
        super().__init__(f"k={k} folds need at least k rows per class, got {counts}")


# Training --------------------------------------------------------------------

class TrainingError(IdsBenchError):
    exit_code = 4


class NonFiniteLoss(TrainingError):
    def __init__(self, family: str, step: int):
        self.family = family
        self.step = step
        super().__init__(f"{family} loss became non-finite at step {step}")


class WidthMismatch(TrainingError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"Input width {got} does not match trained width {expected}")


class CandidateTrainingError(TrainingError):
    def __init__(self, fold: Optional[int], candidate: str, cause: Exception):
        self.fold = fold
        self.candidate = candidate
        self.cause = cause
        where = "full-data refit" if fold is None else f"fold {fold}"
        super().__init__(f"Candidate {candidate} failed during {where}: {cause}")


# Expectations / orchestration --------------------------------------------------

class ExpectationFailure(IdsBenchError):
    exit_code = 5

    def __init__(self, diffs: Dict[str, Any]):
        self.diffs = diffs
        super().__init__(f"Observed values differ from expectations: {diffs}")


class StageError(IdsBenchError):
    """Wraps a failure inside a pipeline stage with the run context."""

    def __init__(self, stage: str, scenario: str, cause: Exception, manifest: Optional[Dict[str, Any]] = None):
        self.stage = stage
        self.scenario = scenario
        self.cause = cause
        self.manifest = manifest or {}
        self.exit_code = 3 if isinstance(cause, OSError) else getattr(cause, "exit_code", 1)
        super().__init__(f"[{scenario}] stage '{stage}' failed: {cause}")
