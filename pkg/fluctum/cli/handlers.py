# --- fluctum/cli/handlers.py ---
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from fluctum.cli.executor import run_grid
from fluctum.cli.resolver import GridPoint, resolve_scenario
from fluctum.config.settings import Settings
from fluctum.core.fluctuation import (
    Partition,
    correction_term,
    generalized_jarzynski,
    high_temperature_correction,
    low_temperature_correction,
)
from fluctum.core.nonunitality import bounds_report
from fluctum.models.scenario import Scenario
from fluctum.utils.error_handling import (
    DegenerateSpectrumError,
    ErrorCodes,
    ErrorHandler,
    ScenarioError,
)
from fluctum.utils.report_log import ReportLog

logger = logging.getLogger(__name__)

DEGENERATE_GROUND_STATE = "degenerate_ground_state"

VERIFY_COLUMNS = [
    "channel_id", "N", "beta0", "beta1", "lhs", "z_ratio", "correction", "rhs",
    "residual", "mean_work", "delta_F", "jensen_rhs", "flags",
]
BOUNDS_COLUMNS = [
    "channel_id", "N", "unitality_defect", "map_norm", "hs_norm", "tau_norm",
    "bound_prop2", "bound_dim", "bound_rscmn", "bound_tau", "slack_prop2",
    "slack_dim", "slack_rscmn", "slack_tau", "choi_lhs", "choi_rhs", "violations",
]
SWEEP_COLUMNS = [
    "channel_id", "N", "beta", "theta", "params", "exact", "high_t", "low_t",
    "high_t_error", "low_t_error", "analytic", "analytic_error", "flags",
]
REPORT_COLUMNS = {"verify": VERIFY_COLUMNS, "bounds": BOUNDS_COLUMNS, "sweep": SWEEP_COLUMNS}


@dataclass
class PointOutcome:
    """Report row of one grid point plus the checks it failed"""
    row: Optional[Dict[str, Any]]
    failures: List[Dict[str, Any]] = field(default_factory=list)
    # full channel report for the JSON document
    detail: Optional[Dict[str, Any]] = None


@dataclass
class RunResult:
    exit_code: int
    report_path: Optional[Path] = None
    failures: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


def load_scenario(path: Path) -> Scenario:
    try:
        return Scenario.load(path)
    except OSError as e:
        raise ScenarioError(f"Cannot read scenario file {path}: {e}") from e


def _bounds_failures(point: GridPoint, tolerance: float) -> Tuple[Dict[str, Any], List[Dict[str, Any]], Dict[str, Any]]:
    report = bounds_report(point.channel)
    row = report.to_row(point.channel_label, tolerance)
    failures = [
        ErrorHandler.format_failure("bound", point.channel_label, f"bound '{name}' violated", bound=name)
        for name in report.violations(tolerance)
    ]
    return row, failures, {"channel_id": point.channel_label, **report.to_dict()}


def cmd_verify(point: GridPoint, tolerance: float) -> PointOutcome:
    """Generalized Jarzynski identity at one grid point, plus bound checks on each channel's first point."""
    report = generalized_jarzynski(point.channel, point.H0, point.H1, point.beta0, point.beta1)
    failures = []
    if not report.residual <= tolerance:
        failures.append(
            ErrorHandler.format_failure(
                "residual", point.channel_id, f"identity residual {report.residual:.3e} exceeds {tolerance:.1e}",
                beta0=point.beta0, beta1=point.beta1, residual=report.residual,
            )
        )
    if not report.jensen_holds(tolerance):
        failures.append(
            ErrorHandler.format_failure(
                "jensen", point.channel_id, "mean work is below the corrected free-energy bound",
                beta0=point.beta0, mean_work=report.mean_work, jensen_rhs=report.jensen_rhs,
            )
        )
    if point.primary:
        failures.extend(_bounds_failures(point, tolerance)[1])
    return PointOutcome(report.to_row(point.channel_id), failures)


def cmd_bounds(point: GridPoint, tolerance: float) -> PointOutcome:
    """Nonunitality bounds, once per channel."""
    if not point.primary:
        return PointOutcome(None)
    row, failures, detail = _bounds_failures(point, tolerance)
    return PointOutcome(row, failures, detail)


def cmd_sweep(point: GridPoint, tolerance: float) -> PointOutcome:
    """Exact correction term against its high- and low-temperature forms and any closed form."""
    phi, H1, beta = point.channel, point.H1, point.beta1
    exact = correction_term(phi, H1, beta)
    high_t = high_temperature_correction(phi, H1, beta)
    flags = []
    try:
        low_t = low_temperature_correction(phi, H1)
    except DegenerateSpectrumError:
        low_t = None
        flags.append(DEGENERATE_GROUND_STATE)

    failures = []
    if point.analytic_high_t is not None:
        closed = point.analytic_high_t(beta)
        first_order = high_temperature_correction(phi, H1, beta, Partition.INFINITE_TEMPERATURE)
        if not abs(closed - first_order) <= tolerance * max(1.0, abs(closed)):
            failures.append(
                ErrorHandler.format_failure(
                    "analytic", point.channel_id, "high-temperature closed form differs from the first-order term",
                    beta=beta, first_order=first_order, analytic=closed,
                )
            )
    if point.analytic_low_t is not None and low_t is not None and not abs(point.analytic_low_t - low_t) <= tolerance:
        failures.append(
            ErrorHandler.format_failure(
                "analytic", point.channel_id, "low-temperature closed form differs from the ground-state limit",
                low_t=low_t, analytic=point.analytic_low_t,
            )
        )

    analytic = analytic_error = None
    if point.analytic is not None:
        analytic = point.analytic(beta)
        analytic_error = abs(analytic - exact)
        if not analytic_error <= tolerance:
            failures.append(
                ErrorHandler.format_failure(
                    "analytic", point.channel_id, f"closed form differs from the numeric correction by {analytic_error:.3e}",
                    beta=beta, exact=exact, analytic=analytic,
                )
            )
    elif point.analytic_low_t is not None:
        # ground-state limit; the error column shows how far beta is from it
        analytic = point.analytic_low_t
        analytic_error = abs(analytic - exact)

    row = {
        "channel_id": point.channel_id,
        "N": phi.dim_out,
        "beta": beta,
        "theta": point.theta,
        "params": point.params_label(),
        "exact": exact,
        "high_t": high_t,
        "low_t": low_t,
        "high_t_error": abs(high_t - exact),
        "low_t_error": None if low_t is None else abs(low_t - exact),
        "analytic": analytic,
        "analytic_error": analytic_error,
        "flags": ";".join(flags),
    }
    return PointOutcome(row, failures)


class CommandHandler:
    """Runs one CLI command over a scenario and writes its report"""

    def __init__(self, run_settings: Settings):
        self.settings = run_settings
        self.commands: Dict[str, Callable[[GridPoint, float], PointOutcome]] = {
            "verify": cmd_verify,
            "bounds": cmd_bounds,
            "sweep": cmd_sweep,
        }

    def run(self, command: str, scenario_path: Path, out: Optional[Path], seed: int, jobs: int) -> RunResult:
        """
        Load, resolve, evaluate and save.

        Args:
            command: verify, bounds or sweep
            scenario_path: Scenario JSON file
            out: Report CSV path, defaults to <scenario id>_<command>.csv
            seed: Base seed for random channels and Hamiltonians
            jobs: Grid points evaluated concurrently

        Returns:
            RunResult with the exit code of the contract and every failure record
        """
        if command not in self.commands:
            raise ScenarioError(f"Unknown command: {command}")
        evaluate = self.commands[command]
        tolerance = self.settings.tolerances.verification

        scenario_path = Path(scenario_path)
        scenario = load_scenario(scenario_path)
        points = resolve_scenario(scenario, seed, scenario_path.parent)
        logger.info("Running %s on '%s' (%d points, tolerance %.1e)", command, scenario.id, len(points), tolerance)

        results = run_grid(points, lambda point: evaluate(point, tolerance), jobs)

        report_log = ReportLog(REPORT_COLUMNS)
        codes = []
        details = []
        for point, result in zip(points, results):
            if isinstance(result, BaseException):
                failure = ErrorHandler.log_and_format_error(result, point.channel_id)
                report_log.fail(failure)
                codes.append(failure["code"])
                continue
            if result.row is not None:
                report_log.log(command, result.row)
            if result.detail is not None:
                details.append(result.detail)
            for failure in result.failures:
                report_log.fail(failure)
                codes.append(failure["code"])

        out = Path(out) if out is not None else Path(f"{scenario.id}_{command}.csv")
        report_path = None
        if "csv" in scenario.outputs:
            report_path = report_log.save(command, out, self.settings.csv_float_format)

        summary = {"command": command, "scenario": scenario.id, **report_log.get_summary()}
        if "json" in scenario.outputs:
            summary_path = out.with_suffix(".json")
            summary_path.parent.mkdir(parents=True, exist_ok=True)
            document = {**summary, "failures": report_log.failures}
            if details:
                document["channels"] = details
            summary_path.write_text(json.dumps(document, indent=2, default=float))
            report_path = report_path or summary_path

        exit_code = max(codes, default=ErrorCodes.OK)
        logger.info("%s finished: %s", command, summary)
        return RunResult(exit_code, report_path, list(report_log.failures), summary)
