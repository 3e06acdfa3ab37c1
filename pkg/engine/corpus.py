"""
Corpus loading and execution

A corpus is a directory of TOML files. Each file may declare families
and holds [[entry]] tables of three kinds: identities to prove, verify
or check numerically, derivations that rerun the pipeline from another
entry, and derivative-rule checks for one family.
"""
import logging
import time
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from core.config import settings
from core.exceptions import BinetLabError, CorpusError, NoEntriesError
from core.models import (
    CheckMode,
    CheckOutcome,
    CorpusEntry,
    CorpusFile,
    CorpusSummary,
    EntryKind,
    EntryResult,
    FamilyDecl,
    FamilyRole,
    ParameterSample,
    Verdict,
)
from engine.expressions import Identity
from engine.numeric import verify_derivative_rules
from engine.parser import parse_identity
from engine.pipeline import check_identity, derive_identity
from families.base import FamilyTable, build_family, default_family_table

logger = logging.getLogger(__name__)

# Roles whose (p, q) follow a parameter sample
SAMPLED_ROLES = (FamilyRole.LUCAS_U, FamilyRole.LUCAS_V, FamilyRole.HORADAM)

Located = Tuple[CorpusFile, CorpusEntry]


def load_corpus_file(path: Path) -> CorpusFile:
    """
    Parse and validate one TOML corpus file

    Raises:
        CorpusError: invalid TOML or schema violations
    """
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise CorpusError(f"cannot read corpus file {path}: {e}")
    try:
        corpus = CorpusFile.model_validate({**data, "path": str(path)})
    except ValidationError as e:
        raise CorpusError(f"invalid corpus file {path}: {e}")
    for name, decl in corpus.families.items():
        decl.name = decl.name or name
    return corpus


def load_corpus(directory: Optional[Path] = None) -> List[CorpusFile]:
    """
    Load every *.toml file of a corpus directory in name order

    Raises:
        CorpusError: unreadable files or duplicate entry ids
    """
    directory = Path(directory or settings.corpus_dir)
    if not directory.is_dir():
        raise CorpusError(f"corpus directory {directory} does not exist")
    files = [load_corpus_file(path) for path in sorted(directory.glob("*.toml"))]
    seen: Dict[str, str] = {}
    for corpus in files:
        for entry in corpus.entries:
            if entry.id in seen:
                raise CorpusError(f"duplicate entry id {entry.id} in {corpus.path} and {seen[entry.id]}")
            seen[entry.id] = corpus.path
    logger.info(f"Loaded {len(seen)} corpus entries from {len(files)} file(s) in {directory}")
    return files


def family_table(corpus: CorpusFile, sample: Optional[ParameterSample] = None) -> FamilyTable:
    """Default families plus the file's declarations, with (p, q) taken from the sample if given"""
    p, q = (sample.p, sample.q) if sample else (1, -1)
    decls: List[FamilyDecl] = []
    for decl in corpus.families.values():
        if sample and decl.role in SAMPLED_ROLES:
            decl = decl.model_copy(update={"p": sample.p, "q": sample.q})
        decls.append(decl)
    try:
        declared = FamilyTable(build_family(decl) for decl in decls)
    except ValueError as e:
        raise CorpusError(f"{corpus.path}: {e}")
    return default_family_table(p, q).merged(declared)


def _entry_identity(corpus: CorpusFile, entry: CorpusEntry, sample: Optional[ParameterSample] = None) -> Identity:
    return parse_identity(entry.identity, family_table(corpus, sample), entry.constraints, provenance=entry.source)


def _grid(entry: CorpusEntry) -> Optional[Dict[str, Tuple[int, int]]]:
    return dict(entry.grid) or None


def _samples(entry: CorpusEntry) -> List[Optional[ParameterSample]]:
    if entry.samples:
        return list(entry.samples)
    if "sampled" in entry.tags:
        return [ParameterSample(p=p, q=q) for p, q in settings.parameter_samples]
    return [None]


def _status(mode: CheckMode, outcomes: Sequence[CheckOutcome]) -> Verdict:
    ok = all(outcome.ok for outcome in outcomes)
    proved = all(outcome.verdict is not None for outcome in outcomes)
    if mode == CheckMode.PROVE and proved:
        return Verdict.PROVED if ok else Verdict.REFUTED
    return Verdict.PASSED if ok else Verdict.FAILED


def _collect(result: EntryResult, outcome: CheckOutcome, label: str = "") -> None:
    if outcome.verdict is not None:
        result.verdicts.append(outcome.verdict)
    if outcome.report is not None:
        result.reports.append(outcome.report)
    if outcome.note:
        result.notes.append(f"{label}{outcome.note}")


def _run_identity(corpus: CorpusFile, entry: CorpusEntry, result: EntryResult) -> List[CheckOutcome]:
    outcomes = []
    for sample in _samples(entry):
        label = f"p={sample.p}, q={sample.q}: " if sample else ""
        identity = _entry_identity(corpus, entry, sample)
        outcome = check_identity(
            identity,
            entry.mode,
            grid=_grid(entry),
            seeds=entry.seeds,
            precision=entry.precision,
            identity_id=entry.id,
        )
        if sample and outcome.mode != entry.mode:
            result.notes.append(f"{label}checked by {outcome.mode.value}")
        _collect(result, outcome, label)
        outcomes.append(outcome)
    return outcomes


def _run_derivation(
    corpus: CorpusFile, entry: CorpusEntry, index: Dict[str, Located], result: EntryResult
) -> List[CheckOutcome]:
    spec = entry.derivation
    if spec.source not in index:
        raise CorpusError(f"entry {entry.id}: unknown source entry {spec.source}")
    source_file, source_entry = index[spec.source]
    identity = _entry_identity(source_file, source_entry)
    derived, trace = derive_identity(
        identity,
        spec.wrt,
        component=spec.component,
        shift=spec.shift,
        pivot=spec.pivot,
        combine=spec.combine,
        simplify=False,
    )
    result.derived = trace.result
    outcomes = [trace.check]
    _collect(result, trace.check, "derived: ")
    if spec.target:
        if spec.target not in index:
            raise CorpusError(f"entry {entry.id}: unknown target entry {spec.target}")
        target_file, target_entry = index[spec.target]
        target = _entry_identity(target_file, target_entry)
        outcome = check_identity(target, target_entry.mode, grid=_grid(target_entry), identity_id=target_entry.id)
        _collect(result, outcome, "target: ")
        outcomes.append(outcome)
    logger.debug(f"{entry.id}: derived {derived}")
    return outcomes


def _run_derivative_rules(corpus: CorpusFile, entry: CorpusEntry, result: EntryResult) -> List[CheckOutcome]:
    outcomes = []
    lo, hi = entry.grid.get("j", (-10, 10))
    for sample in _samples(entry):
        table = family_table(corpus, sample)
        if entry.family not in table:
            raise CorpusError(f"entry {entry.id}: unknown family {entry.family}")
        report = verify_derivative_rules(
            table[entry.family], range(lo, hi + 1), entry.precision, seeds=entry.seeds, identity_id=entry.id
        )
        outcome = CheckOutcome(mode=CheckMode.NUMERIC, ok=report.ok, report=report)
        _collect(result, outcome)
        outcomes.append(outcome)
    return outcomes


def run_entry(corpus: CorpusFile, entry: CorpusEntry, index: Optional[Dict[str, Located]] = None) -> EntryResult:
    """
    Run one corpus entry; library and arithmetic errors become an ERROR result instead of propagating
    """
    start = time.perf_counter()
    index = index if index is not None else {e.id: (corpus, e) for e in corpus.entries}
    if entry.kind == EntryKind.DERIVATIVE_RULES:
        mode = CheckMode.NUMERIC
    elif entry.kind == EntryKind.DERIVATION:
        mode = CheckMode.PROVE
    else:
        mode = entry.mode
    result = EntryResult(id=entry.id, file=Path(corpus.path).name, mode=mode, status=Verdict.ERROR)
    try:
        if entry.kind == EntryKind.IDENTITY:
            outcomes = _run_identity(corpus, entry, result)
        elif entry.kind == EntryKind.DERIVATION:
            outcomes = _run_derivation(corpus, entry, index, result)
        else:
            outcomes = _run_derivative_rules(corpus, entry, result)
        result.status = _status(mode, outcomes)
    except BinetLabError as e:
        logger.error(f"{entry.id}: {e.message}")
        result.error = e.message
    except (ArithmeticError, RuntimeError, ValueError) as e:
        logger.error(f"{entry.id} failed: {e}")
        result.error = f"{type(e).__name__}: {e}"
    result.elapsed_ms = (time.perf_counter() - start) * 1000
    logger.info(f"{entry.id}: {result.status.value}")
    return result


def select_entries(files: Iterable[CorpusFile], tags: Sequence[str] = ()) -> List[Located]:
    """Entries carrying every requested tag"""
    wanted = set(tags)
    return [(corpus, entry) for corpus in files for entry in corpus.entries if wanted <= set(entry.tags)]


def run_corpus(
    directory: Optional[Path] = None,
    tags: Sequence[str] = (),
    max_workers: Optional[int] = None,
) -> CorpusSummary:
    """
    Run the selected corpus entries in parallel

    Returns:
        CorpusSummary with results ordered by entry id

    Raises:
        CorpusError: malformed corpus files
        NoEntriesError: the tag filter matched nothing
    """
    start = time.perf_counter()
    files = load_corpus(directory)
    index = {entry.id: (corpus, entry) for corpus in files for entry in corpus.entries}
    selected = select_entries(files, tags)
    if not selected:
        raise NoEntriesError(f"no entries match tags {', '.join(tags)}" if tags else "the corpus has no entries")

    try:
        with ThreadPoolExecutor(max_workers=max_workers or settings.max_workers) as executor:
            results = list(executor.map(lambda located: run_entry(*located, index=index), selected))
    except Exception as e:
        raise RuntimeError(f"Corpus run failed: {e}")

    results.sort(key=lambda r: r.id)
    passed = sum(1 for r in results if r.ok)
    summary = CorpusSummary(
        entries=results,
        total=len(results),
        passed=passed,
        failed=len(results) - passed,
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )
    logger.info(f"Corpus: {passed}/{len(results)} entries passed")
    return summary
