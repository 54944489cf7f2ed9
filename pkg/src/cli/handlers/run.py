import logging
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Tuple

from src.cli.handlers.common import EXIT_OK, command, load_scenario
from src.config.manager import RunManifest, ScenarioConfig
from src.config.settings import OUTPUT_DIR, RUN_WORKERS
from src.managers.trace_generator import SlaModel, generate
from src.services.benchmark_service import RegretReport
from src.services.experiment_service import run_batch
from src.services.report_service import format_summary_table, write_report_csv, write_summary_csv
from src.services.trace_io import load_trace_csv
from src.utils.log_setup import run_context
from src.utils.loss import TraceSlot

logger = logging.getLogger(__name__)


def _alpha_tag(value: float) -> str:
    return f"{value:g}"


def _traces(scenario: ScenarioConfig, trace_path: Optional[str]) -> List[Tuple[str, List[TraceSlot]]]:
    """Пары (суффикс файла, трасса); свип по α_min даёт по трассе на значение"""
    if trace_path:
        return [("", load_trace_csv(trace_path))]
    if not scenario.sla_alpha_sweep:
        return [("", generate(scenario.trace))]
    result = []
    for alpha_min in scenario.sla_alpha_sweep:
        sla = SlaModel(alpha_min=alpha_min, beta_min=scenario.sla_beta_min)
        result.append((f"__alpha{_alpha_tag(alpha_min)}", generate(replace(scenario.trace, sla=sla))))
    return result


async def run_scenario(
    scenario: ScenarioConfig,
    out_dir: Path,
    trace_path: Optional[str] = None,
    workers: int = RUN_WORKERS,
) -> List[RegretReport]:
    """Все комбинации на общей трассе: отчёты, summary.csv и manifest.yaml"""
    out_dir.mkdir(parents=True, exist_ok=True)
    reports: List[RegretReport] = []
    outputs: List[str] = []
    for suffix, trace in _traces(scenario, trace_path):
        batch = await run_batch(scenario.experiments, trace, workers=workers)
        for report in batch:
            path = write_report_csv(report, out_dir / f"{report.label}{suffix}.csv")
            outputs.append(path.name)
            if suffix:
                report = replace(report, label=f"{report.label}{suffix}")
            reports.append(report)

    write_summary_csv(reports, out_dir / "summary.csv")
    outputs.append("summary.csv")
    manifest = RunManifest(
        scenario=scenario.scenario,
        config_hash=scenario.config_hash,
        trace_source=f"csv:{trace_path}" if trace_path else f"generated:seed={scenario.seed}",
        outputs=tuple(outputs),
        config=scenario.resolved,
    )
    manifest.write(out_dir / "manifest.yaml")
    return reports


@command
async def run_command(args) -> int:
    """run --config F [--trace F] --out-dir D"""
    scenario = load_scenario(args.config, args.set, args.seed)
    out_dir = Path(args.out_dir or OUTPUT_DIR)
    with run_context(scenario=scenario.scenario):
        reports = await run_scenario(scenario, out_dir, args.trace)
        print(format_summary_table(reports))
        # без статического бенчмарка bound_holds() равен None
        failed = [r.label for r in reports if r.learner == "oolr" and r.bound_holds() is False]
        if failed:
            logger.warning(f"Оценка регрета нарушена для: {', '.join(failed)}")
    return EXIT_OK
