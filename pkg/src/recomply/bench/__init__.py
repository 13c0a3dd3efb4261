from .experiments import (
    check_comparison,
    run_comparison,
    run_first_compliance,
    run_retest,
)
from .figures import render_figures
from .report import ExperimentReport, IOFailure, ReportRow, emit_report
from .spec import (
    ExperimentSpec,
    NetworkParams,
    default_comparison_spec,
    desk_suite,
    load_spec,
    save_spec,
)

__all__ = [
    "ExperimentReport",
    "ExperimentSpec",
    "IOFailure",
    "NetworkParams",
    "ReportRow",
    "check_comparison",
    "default_comparison_spec",
    "desk_suite",
    "emit_report",
    "load_spec",
    "render_figures",
    "run_comparison",
    "run_first_compliance",
    "run_retest",
    "save_spec",
]
