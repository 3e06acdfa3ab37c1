"""
Derivation pipeline: differentiate, take a component, optionally shift,
recombine and simplify, then check the result
"""
import logging
from typing import Mapping, Optional, Tuple

from core.config import settings
from core.exceptions import PreconditionError
from core.models import CheckMode, CheckOutcome, Component, DerivationTrace, TraceStep
from engine.differentiator import differentiate
from engine.expressions import Identity
from engine.numeric import numeric_verify
from engine.parser import parse_subscript
from engine.printer import print_identity
from engine.prover import prove_identity
from engine.simplify import simplify as simplify_identity
from engine.transforms import (
    apply_imag_part,
    apply_real_part,
    binet_combine,
    conjugate_swap,
    fresh_family_name,
    fresh_index_name,
    shift_normalize,
)
from engine.verifier import Grid, verify_instances

logger = logging.getLogger(__name__)


def check_identity(
    identity: Identity,
    mode: CheckMode = CheckMode.PROVE,
    grid: Optional[Grid] = None,
    seeds: Optional[Mapping[str, int]] = None,
    precision: Optional[int] = None,
    identity_id: str = "",
) -> CheckOutcome:
    """
    Check an identity in the requested mode

    Proofs that hit a precondition (sums with symbolic bounds, arctan,
    degenerate fields) fall back to exact verification, and the outcome
    notes why.
    """
    if mode == CheckMode.NUMERIC:
        report = numeric_verify(identity, precision=precision, grid=grid, seeds=seeds, identity_id=identity_id)
        return CheckOutcome(mode=mode, ok=report.ok, report=report)
    if mode == CheckMode.PROVE:
        try:
            verdict = prove_identity(identity, identity_id=identity_id)
            return CheckOutcome(mode=mode, ok=verdict.proved, verdict=verdict)
        except PreconditionError as e:
            logger.info(f"{identity_id or 'identity'}: proof not available ({e.message}); verifying instead")
            note = f"proof not available: {e.message}"
    else:
        note = None
    report = verify_instances(identity, grid=grid, seeds=seeds, identity_id=identity_id, precision=precision)
    used = CheckMode.NUMERIC if report.mode == "numeric" else CheckMode.VERIFY
    return CheckOutcome(mode=used, ok=report.ok, report=report, note=note)


def derive_identity(
    identity: Identity,
    wrt: str,
    component: Component = Component.REAL,
    shift: Optional[str] = None,
    pivot: Optional[str] = None,
    combine: Optional[str] = None,
    simplify: bool = False,
    check: bool = True,
) -> Tuple[Identity, DerivationTrace]:
    """
    Run the derivation pipeline on an identity

    real:  differentiate -> real part [-> simplify]
    imag:  differentiate -> imaginary part [-> shift [-> conjugate swap -> combine]] [-> simplify]

    Args:
        identity: Source identity
        wrt: Free index to differentiate with respect to
        component: Which component of the derivative to keep
        shift: Fresh index for the shift; defaults to settings.default_shift or the next unused variant (s2, s3, ...)
        pivot: Exponent (subscript text) that becomes the fresh index
        combine: Family name for Binet recombination; a name the identity already uses gets a numbered variant (G2, G3, ...)
        simplify: Run the Fibonacci/Lucas rewrite rules on the result
        check: Prove (or verify) the result and attach the outcome

    Returns:
        (derived identity, trace)

    Raises:
        PreconditionError: a step is undefined for its input; the message
            names the step
        NoNewIdentityError: the derivative collapsed to a trivial identity
    """
    trace = DerivationTrace(
        source=print_identity(identity),
        wrt=wrt,
        component=component,
        shift=shift,
        pivot=pivot,
        combine=combine,
        simplify=simplify,
    )
    names = identity.family_names()
    p, q = identity.families.parameters_of(names)
    trace.parameters = {"p": str(p), "q": str(q)}

    form = differentiate(identity, wrt)
    trace.steps.append(TraceStep(step="differentiate", output=str(form)))

    if component == Component.REAL:
        if shift or pivot or combine:
            raise PreconditionError("--shift, --pivot and --combine apply to the imaginary component", hint=None)
        result = apply_real_part(form)
        trace.steps.append(TraceStep(step="real part", output=print_identity(result)))
    else:
        sid = apply_imag_part(form)
        trace.steps.append(TraceStep(step="imaginary part", output=str(sid)))
        if shift or combine or pivot:
            fresh = shift or fresh_index_name(sid.identity, settings.default_shift)
            trace.shift = fresh
            sid = shift_normalize(sid, fresh, parse_subscript(pivot) if pivot else None)
            trace.steps.append(TraceStep(step="shift", output=str(sid)))
        if combine:
            name = fresh_family_name(sid.identity, combine)
            if name != combine:
                logger.info(f"Family {combine} is taken; combining into {name}")
            trace.combine = name
            swapped = conjugate_swap(sid)
            trace.steps.append(TraceStep(step="conjugate swap", output=str(swapped)))
            result = binet_combine(swapped, name)
            trace.steps.append(TraceStep(step="combine", output=print_identity(result)))
        else:
            result = sid.identity

    if simplify:
        result = simplify_identity(result)
        trace.steps.append(TraceStep(step="simplify", output=print_identity(result)))

    trace.result = print_identity(result)
    logger.info(f"Derived {trace.result} from {trace.source}")
    if check:
        trace.check = check_identity(result, CheckMode.PROVE)
    return result, trace
