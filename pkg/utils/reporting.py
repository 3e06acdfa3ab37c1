"""
Text and JSON rendering of command results
"""
import json
from typing import List

from pydantic import BaseModel

from core.models import (
    CheckOutcome,
    CorpusSummary,
    DerivationTrace,
    OutputFormat,
    ParsedIdentity,
    ProofVerdict,
    VerifyReport,
)

# Fields that change between otherwise identical runs
TIMING_FIELDS = ("elapsed_ms",)


def to_json(model: BaseModel, include_timing: bool = True) -> str:
    """Deterministic JSON: sorted keys, optional timing fields"""
    data = model.model_dump(mode="json")
    if not include_timing:
        data = strip_timing(data)
    return json.dumps(data, indent=2, sort_keys=True)


def strip_timing(data):
    if isinstance(data, dict):
        return {k: strip_timing(v) for k, v in data.items() if k not in TIMING_FIELDS}
    if isinstance(data, list):
        return [strip_timing(v) for v in data]
    return data


def _point(point) -> str:
    return ", ".join(f"{name}={value}" for name, value in point.items()) or "(no indices)"


def render_parsed(parsed: ParsedIdentity) -> str:
    lines = [parsed.identity, f"  free indices: {', '.join(parsed.free_indices) or 'none'}"]
    if parsed.constraints:
        lines.append(f"  constraints: {'; '.join(parsed.constraints)}")
    if parsed.families:
        lines.append(f"  families: {', '.join(parsed.families)}")
    return "\n".join(lines)


def render_verdict(verdict: ProofVerdict) -> str:
    lines = [f"{verdict.identity_id or verdict.identity}: {verdict.verdict.value.upper()}"]
    if verdict.identity_id:
        lines.append(f"  identity: {verdict.identity}")
    lines.append(f"  parameters: p={verdict.parameters.get('p')}, q={verdict.parameters.get('q')}")
    for case in verdict.cases:
        signs = ", ".join(f"(-1)^{name}={sign}" for name, sign in case.signs.items()) or "all indices"
        status = "zero" if case.zero else f"residue {case.residue}"
        lines.append(f"  case {signs}: {status}")
    for condition in verdict.side_conditions:
        lines.append(f"  assuming {condition}")
    return "\n".join(lines)


def render_report(report: VerifyReport) -> str:
    status = "PASSED" if report.ok else "FAILED"
    lines = [f"{report.identity_id or report.identity}: {status} ({report.mode})"]
    if report.identity_id:
        lines.append(f"  identity: {report.identity}")
    grid = ", ".join(f"{name}={lo}..{hi}" for name, (lo, hi) in report.grid.items())
    lines.append(f"  grid: {grid or 'single point'}")
    lines.append(f"  cases: {report.cases}, passed: {report.passed}, failed: {report.failed}, skipped: {report.skipped}")
    for skipped in report.skipped_points[:5]:
        lines.append(f"  skipped {_point(skipped.point)}: {skipped.reason}")
    if report.counterexample is not None:
        ce = report.counterexample
        lines.append(f"  counterexample at {_point(ce.point)}: lhs = {ce.lhs}, rhs = {ce.rhs}")
        if ce.note:
            lines.append(f"  note: {ce.note}")
    return "\n".join(lines)


def render_outcome(outcome: CheckOutcome) -> str:
    parts: List[str] = []
    if outcome.note:
        parts.append(f"note: {outcome.note}")
    if outcome.verdict is not None:
        parts.append(render_verdict(outcome.verdict))
    if outcome.report is not None:
        parts.append(render_report(outcome.report))
    return "\n".join(parts)


def render_trace(trace: DerivationTrace) -> str:
    lines = [f"source: {trace.source}", f"d/d{trace.wrt}, {trace.component.value} part"]
    for number, step in enumerate(trace.steps, 1):
        lines.append(f"  {number}. {step.step}: {step.output}")
    lines.append(f"result: {trace.result}")
    if trace.check is not None:
        lines.append(render_outcome(trace.check))
    return "\n".join(lines)


def render_summary(summary: CorpusSummary) -> str:
    width = max([len(r.id) for r in summary.entries] + [5])
    lines = [f"{'entry':<{width}}  {'mode':<8}{'status':<10}file"]
    for result in summary.entries:
        lines.append(f"{result.id:<{width}}  {result.mode.value:<8}{result.status.value:<10}{result.file}")
        if result.error:
            lines.append(f"{'':<{width}}  error: {result.error}")
        for note in result.notes:
            lines.append(f"{'':<{width}}  {note}")
    lines.append(f"{summary.passed}/{summary.total} entries passed")
    failures = [r.id for r in summary.entries if not r.ok]
    if failures:
        lines.append(f"failed: {', '.join(failures)}")
    return "\n".join(lines)


RENDERERS = {
    ParsedIdentity: render_parsed,
    ProofVerdict: render_verdict,
    VerifyReport: render_report,
    CheckOutcome: render_outcome,
    DerivationTrace: render_trace,
    CorpusSummary: render_summary,
}


def render(model: BaseModel, output_format: OutputFormat = OutputFormat.TEXT) -> str:
    if output_format == OutputFormat.JSON:
        return to_json(model)
    return RENDERERS[type(model)](model)
