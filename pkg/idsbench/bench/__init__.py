from .config import ScenarioConfig, read_config_file, resolve_config
from .report import ROW_NAMES, ROW_ORDER, ResultsTable, export_report, load_results, ordering_checks, render_plots
from .pipeline import RunManifest, ScenarioRun, run_scenario

__all__ = [
    'ScenarioConfig', 'read_config_file', 'resolve_config',
    'ROW_NAMES', 'ROW_ORDER', 'ResultsTable', 'export_report', 'load_results', 'ordering_checks', 'render_plots',
    'RunManifest', 'ScenarioRun', 'run_scenario',
]
