"""
Exact verification of identities by instantiation over an index grid
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from core.config import settings
from core.exceptions import BinetLabError, DegenerateFieldError, EmptyGridError, PreconditionError
from core.models import Counterexample, SkippedPoint, VerifyReport
from engine.expressions import (
    FORMAL,
    MARKERS,
    Add,
    Arctan,
    Binom,
    BoundedSum,
    Const,
    Div,
    ExpConst,
    Expr,
    Identity,
    IndexPow,
    IndexValue,
    MinusOnePow,
    Mul,
    Neg,
    Param,
    Pow,
    Radical,
    Seed,
    SeqTerm,
    SigmaPow,
    Subtract,
    TauPow,
    contains,
    sum_bound_indices,
)
from engine.printer import print_identity
from engine.quadext import QuadContext
from engine.seedpoly import SeedPoly

logger = logging.getLogger(__name__)

Grid = Dict[str, Tuple[int, int]]
Value = Tuple[SeedPoly, SeedPoly]


class SkipPoint(Exception):
    """The identity is undefined at this grid point"""


def generalized_binomial(n: int, j: int) -> Fraction:
    """binom(n, j) with 0 for j < 0 and for j > n >= 0; n may be negative"""
    if j < 0 or (n >= 0 and j > n):
        return Fraction(0)
    value = Fraction(1)
    for i in range(j):
        value = value * (n - i)
    return value / math.factorial(j)


def build_grid(identity: Identity, overrides: Optional[Grid] = None) -> Grid:
    """Index ranges: overrides first, then the bound range for indices in sum bounds or binomial tops"""
    overrides = overrides or {}
    bounded = set(sum_bound_indices(identity.lhs)) | set(sum_bound_indices(identity.rhs))
    grid: Grid = {}
    for name in identity.free_indices:
        if name in overrides:
            grid[name] = tuple(overrides[name])
        elif name in bounded:
            grid[name] = tuple(settings.bound_range)
        else:
            grid[name] = tuple(settings.index_range)
    return grid


def grid_points(identity: Identity, grid: Grid) -> List[Dict[str, int]]:
    """Admissible points in lexicographic order of the identity's free indices"""
    names = list(identity.free_indices)
    if not names:
        return [{}]
    axes = [np.arange(grid[name][0], grid[name][1] + 1) for name in names]
    mesh = np.meshgrid(*axes, indexing="ij")
    stacked = np.stack([m.ravel() for m in mesh], axis=1) if all(a.size for a in axes) else []
    points = []
    for row in stacked:
        point = {name: int(value) for name, value in zip(names, row)}
        if all(c.index is None or c.admits(point[c.index]) for c in identity.constraints):
            points.append(point)
    return points


@dataclass
class _Evaluator:
    identity: Identity
    params: Tuple[Fraction, Fraction]
    context: Optional[QuadContext]
    degenerate: Optional[DegenerateFieldError]
    seeds: Mapping[str, int]

    def field(self) -> QuadContext:
        if self.context is None:
            raise self.degenerate or DegenerateFieldError("no field context")
        return self.context

    def index(self, sub, env: Mapping[str, int]) -> int:
        try:
            return sub.evaluate(env)
        except ValueError as e:
            raise SkipPoint(str(e))

    def run(self, expr: Expr, env: Mapping[str, int]) -> Value:
        one = SeedPoly.one()
        if isinstance(expr, Const):
            return SeedPoly.constant(expr.value), one
        if isinstance(expr, Radical):
            return SeedPoly.constant(self.field().sqrt()), one
        if isinstance(expr, Param):
            return SeedPoly.constant(self.params[0] if expr.name == "p" else self.params[1]), one
        if isinstance(expr, Seed):
            if expr.name in self.seeds:
                return SeedPoly.constant(self.seeds[expr.name]), one
            return SeedPoly.symbol(expr.name), one
        if isinstance(expr, SeqTerm):
            value = self.identity.families[expr.family].term_at(self.index(expr.sub, env))
            if self.seeds:
                value = value.partial_substitute(self.seeds)
            return value, one
        if isinstance(expr, (TauPow, SigmaPow)):
            tau, sigma = self.field().roots(self.params[0])
            root = tau if isinstance(expr, TauPow) else sigma
            return SeedPoly.constant(root ** self.index(expr.sub, env)), one
        if isinstance(expr, MinusOnePow):
            return SeedPoly.constant(-1 if self.index(expr.sub, env) % 2 else 1), one
        if isinstance(expr, ExpConst):
            return SeedPoly.constant(Fraction(expr.base) ** self.index(expr.sub, env)), one
        if isinstance(expr, IndexValue):
            return SeedPoly.constant(self.index(expr.sub, env)), one
        if isinstance(expr, Binom):
            n, j = self.index(expr.top, env), self.index(expr.bottom, env)
            return SeedPoly.constant(generalized_binomial(n, j)), one
        if isinstance(expr, BoundedSum):
            lower, upper = self.index(expr.lower, env), self.index(expr.upper, env)
            total: Value = (SeedPoly.zero(), one)
            for value in range(lower, upper + 1):
                n, d = self.run(expr.body, {**env, expr.var: value})
                total = _add(total, (n, d))
            return total
        if isinstance(expr, (Add, Subtract)):
            left, right = self.run(expr.left, env), self.run(expr.right, env)
            if isinstance(expr, Subtract):
                right = (-right[0], right[1])
            return _add(left, right)
        if isinstance(expr, Mul):
            (n1, d1), (n2, d2) = self.run(expr.left, env), self.run(expr.right, env)
            return _reduce(n1 * n2, d1 * d2)
        if isinstance(expr, Neg):
            n, d = self.run(expr.operand, env)
            return -n, d
        if isinstance(expr, Pow):
            n, d = self.run(expr.base, env)
            if expr.exponent < 0:
                if not n:
                    raise SkipPoint("zero raised to a negative power")
                n, d = d, n
            return _reduce(n ** abs(expr.exponent), d ** abs(expr.exponent))
        if isinstance(expr, IndexPow):
            n, d = self.run(expr.base, env)
            exponent = self.index(expr.sub, env)
            if exponent < 0:
                if not n:
                    raise SkipPoint("zero raised to a negative power")
                n, d = d, n
            return _reduce(n ** abs(exponent), d ** abs(exponent))
        if isinstance(expr, Div):
            (n1, d1), (n2, d2) = self.run(expr.left, env), self.run(expr.right, env)
            if not n2:
                raise SkipPoint("denominator vanishes")
            return _reduce(n1 * d2, d1 * n2)
        if isinstance(expr, Arctan) or isinstance(expr, MARKERS + FORMAL):
            raise PreconditionError(f"{type(expr).__name__} cannot be evaluated exactly", hint="use numeric checks")
        raise PreconditionError(f"cannot evaluate node {type(expr).__name__}", hint=None)


def _reduce(num: SeedPoly, den: SeedPoly) -> Value:
    if den.is_constant:
        return num / den.constant_value(), SeedPoly.one()
    return num, den


def _add(left: Value, right: Value) -> Value:
    (n1, d1), (n2, d2) = left, right
    if d1 == d2:
        return n1 + n2, d1
    return _reduce(n1 * d2 + n2 * d1, d1 * d2)


def format_value(value: Value) -> str:
    num, den = value
    if den == 1:
        return str(num)
    return f"({num})/({den})"


def _field_of(identity: Identity):
    names = identity.family_names()
    params = identity.families.parameters_of(names)
    try:
        return params, identity.families.context(names), None
    except DegenerateFieldError as e:
        return params, None, e


def _check_point(evaluator: _Evaluator, point: Dict[str, int]) -> Tuple[str, str, str]:
    """Return (status, lhs, rhs) with status pass, fail or a skip reason"""
    try:
        lhs = evaluator.run(evaluator.identity.lhs, point)
        rhs = evaluator.run(evaluator.identity.rhs, point)
    except (SkipPoint, ZeroDivisionError) as e:
        return f"skip:{e}", "", ""
    equal = lhs[0] * rhs[1] == rhs[0] * lhs[1]
    return ("pass" if equal else "fail"), format_value(lhs), format_value(rhs)


def verify_instances(
    identity: Identity,
    grid: Optional[Grid] = None,
    seeds: Optional[Mapping[str, int]] = None,
    identity_id: str = "",
    max_workers: Optional[int] = None,
    precision: Optional[int] = None,
) -> VerifyReport:
    """
    Check an identity exactly at every admissible grid point

    Args:
        identity: Identity to check; arctan identities go to numeric_verify
        grid: Per-index (lo, hi) overrides of the default ranges
        seeds: Values for symbolic seeds; unbound seeds stay symbolic
        identity_id: Label for the report
        max_workers: Thread pool size, defaults to settings.max_workers
        precision: Digits for the numeric route taken by arctan identities

    Returns:
        VerifyReport; the counterexample is the first failing point in
        lexicographic order

    Raises:
        EmptyGridError: no admissible point
    """
    if contains(identity.lhs, Arctan) or contains(identity.rhs, Arctan):
        from engine.numeric import numeric_verify
        logger.info(f"{identity_id or 'identity'} contains arctan; checking numerically")
        return numeric_verify(identity, precision=precision, grid=grid, seeds=seeds, identity_id=identity_id)

    start = time.perf_counter()
    ranges = build_grid(identity, grid)
    points = grid_points(identity, ranges)
    if not points:
        raise EmptyGridError(f"no admissible grid point for {print_identity(identity)} over {ranges}")
    params, context, degenerate = _field_of(identity)
    evaluator = _Evaluator(identity, params, context, degenerate, dict(seeds or {}))

    try:
        with ThreadPoolExecutor(max_workers=max_workers or settings.max_workers) as executor:
            outcomes = list(executor.map(lambda point: _check_point(evaluator, point), points))
    except BinetLabError:
        raise
    except Exception as e:
        raise RuntimeError(f"Verification failed: {e}")

    passed = failed = 0
    skipped: List[SkippedPoint] = []
    counterexample = None
    for point, (status, lhs, rhs) in zip(points, outcomes):
        if status == "pass":
            passed += 1
        elif status == "fail":
            failed += 1
            if counterexample is None:
                counterexample = Counterexample(point=point, lhs=lhs, rhs=rhs)
        else:
            skipped.append(SkippedPoint(point=point, reason=status[len("skip:"):]))

    parameters = {"p": str(params[0]), "q": str(params[1])}
    parameters.update({name: str(value) for name, value in sorted((seeds or {}).items())})
    report = VerifyReport(
        identity_id=identity_id,
        identity=print_identity(identity),
        mode="exact",
        grid=ranges,
        parameters=parameters,
        cases=len(points),
        passed=passed,
        failed=failed,
        skipped=len(skipped),
        skipped_points=skipped,
        counterexample=counterexample,
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )
    logger.info(f"{identity_id or report.identity}: {passed} passed, {failed} failed, {len(skipped)} skipped")
    return report
