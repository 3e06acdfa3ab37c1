"""
Floating-point checks at a chosen mpmath precision

Used for identities that leave the exact domain (arctan) and for
checking the derivative rules of a family against numerical
differentiation of its Binet form.
"""
import logging
import threading
import time
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

import mpmath

from core.config import settings
from core.exceptions import EmptyGridError, PreconditionError
from core.models import Counterexample, SkippedPoint, VerifyReport
from engine.expressions import (
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
)
from engine.printer import print_identity
from engine.sequences import SequenceSpec, binet_coefficients
from engine.verifier import SkipPoint, build_grid, generalized_binomial, grid_points

logger = logging.getLogger(__name__)

# mpmath working precision is process-global
_MP_LOCK = threading.Lock()


def _check_precision(precision: int) -> None:
    if precision < settings.min_precision:
        raise PreconditionError(
            f"precision {precision} is below the minimum of {settings.min_precision} digits", hint=None
        )


def seed_bindings(families: Iterable[SequenceSpec], seeds: Optional[Mapping[str, int]] = None) -> Dict[str, int]:
    """Values for every symbolic seed: explicit bindings first, then the configured defaults"""
    seeds = dict(seeds or {})
    bindings: Dict[str, int] = {}
    for spec in families:
        for index, poly in enumerate((spec.seed0, spec.seed1)):
            for symbol in poly.symbols():
                bindings[symbol] = seeds.get(symbol, settings.default_seed_values[str(index)])
    return bindings


def _mpf(value) -> mpmath.mpf:
    return mpmath.mpf(value.numerator) / value.denominator


class _NumericEvaluator:
    def __init__(self, identity: Identity, bindings: Mapping[str, int]):
        self.identity = identity
        self.bindings = bindings
        names = identity.family_names()
        self.p, self.q = identity.families.parameters_of(names)
        self.arguments: List = []

    def radical(self):
        return mpmath.sqrt(_mpf(self.p * self.p - 4 * self.q))

    def index(self, sub, env: Mapping[str, int]) -> int:
        try:
            return sub.evaluate(env)
        except ValueError as e:
            raise SkipPoint(str(e))

    def run(self, expr: Expr, env: Mapping[str, int]):
        if isinstance(expr, Const):
            return _mpf(expr.value)
        if isinstance(expr, Radical):
            return self.radical()
        if isinstance(expr, Param):
            return _mpf(self.p if expr.name == "p" else self.q)
        if isinstance(expr, Seed):
            return mpmath.mpf(self.bindings[expr.name])
        if isinstance(expr, SeqTerm):
            term = self.identity.families[expr.family].term_at(self.index(expr.sub, env))
            return term.substitute(self.bindings).to_mpmath()
        if isinstance(expr, (TauPow, SigmaPow)):
            sign = 1 if isinstance(expr, TauPow) else -1
            root = (_mpf(self.p) + sign * self.radical()) / 2
            return mpmath.power(root, self.index(expr.sub, env))
        if isinstance(expr, MinusOnePow):
            return mpmath.mpf(-1 if self.index(expr.sub, env) % 2 else 1)
        if isinstance(expr, ExpConst):
            return mpmath.power(expr.base, self.index(expr.sub, env))
        if isinstance(expr, IndexValue):
            return mpmath.mpf(self.index(expr.sub, env))
        if isinstance(expr, Binom):
            return _mpf(generalized_binomial(self.index(expr.top, env), self.index(expr.bottom, env)))
        if isinstance(expr, BoundedSum):
            lower, upper = self.index(expr.lower, env), self.index(expr.upper, env)
            return mpmath.fsum(self.run(expr.body, {**env, expr.var: v}) for v in range(lower, upper + 1))
        if isinstance(expr, Add):
            return self.run(expr.left, env) + self.run(expr.right, env)
        if isinstance(expr, Subtract):
            return self.run(expr.left, env) - self.run(expr.right, env)
        if isinstance(expr, Mul):
            return self.run(expr.left, env) * self.run(expr.right, env)
        if isinstance(expr, Neg):
            return -self.run(expr.operand, env)
        if isinstance(expr, Pow):
            return mpmath.power(self.run(expr.base, env), expr.exponent)
        if isinstance(expr, IndexPow):
            base = self.run(expr.base, env)
            exponent = self.index(expr.sub, env)
            if exponent < 0 and base == 0:
                raise SkipPoint("zero base with a negative exponent")
            return mpmath.power(base, exponent)
        if isinstance(expr, Div):
            den = self.run(expr.right, env)
            if den == 0:
                raise SkipPoint("denominator vanishes")
            return self.run(expr.left, env) / den
        if isinstance(expr, Arctan):
            arg = self.run(expr.arg, env)
            self.arguments.append(arg)
            return mpmath.atan(arg)
        raise PreconditionError(f"cannot evaluate node {type(expr).__name__} numerically", hint=None)


def _pi_multiple(residual) -> bool:
    """True when the residual is a nonzero integer multiple of pi"""
    ratio = residual / mpmath.pi
    nearest = mpmath.nint(mpmath.re(ratio))
    return nearest != 0 and abs(ratio - nearest) < mpmath.mpf(10) ** (-(mpmath.mp.dps // 2))


def _region(arguments) -> Tuple[int, ...]:
    """Signs of the arctan arguments met while evaluating one point"""
    return tuple(int(mpmath.sign(arg)) for arg in arguments)


def numeric_verify(
    identity: Identity,
    precision: Optional[int] = None,
    grid: Optional[Dict] = None,
    seeds: Optional[Mapping[str, int]] = None,
    identity_id: str = "",
) -> VerifyReport:
    """
    Compare both sides in floating point over the grid

    A point passes when |lhs - rhs| <= 10^-(precision-4) * max(1, |lhs|, |rhs|).
    Each point records the signs of its arctan arguments. A failure whose
    residual is a multiple of pi, at a point whose signs differ from every
    passing point, is annotated as a branch crossing of arctan.

    Raises:
        PreconditionError: precision below the configured minimum
        EmptyGridError: no admissible point
    """
    precision = precision or settings.precision
    _check_precision(precision)
    start = time.perf_counter()
    ranges = build_grid(identity, grid)
    points = grid_points(identity, ranges)
    if not points:
        raise EmptyGridError(f"no admissible grid point for {print_identity(identity)} over {ranges}")
    used = [identity.families[name] for name in identity.family_names()]
    bindings = seed_bindings(used, seeds)
    evaluator = _NumericEvaluator(identity, bindings)

    passed = failed = 0
    skipped: List[SkippedPoint] = []
    counterexample = None
    regions: Set[Tuple[int, ...]] = set()
    first_region: Optional[Tuple[int, ...]] = None
    with _MP_LOCK, mpmath.workdps(precision):
        tolerance = mpmath.mpf(10) ** (-(precision - 4))
        for point in points:
            evaluator.arguments = []
            try:
                lhs = evaluator.run(identity.lhs, point)
                rhs = evaluator.run(identity.rhs, point)
            except (SkipPoint, ZeroDivisionError) as e:
                skipped.append(SkippedPoint(point=point, reason=str(e)))
                continue
            residual = lhs - rhs
            region = _region(evaluator.arguments)
            if abs(residual) <= tolerance * max(1, abs(lhs), abs(rhs)):
                passed += 1
                regions.add(region)
                continue
            failed += 1
            if counterexample is None:
                counterexample = Counterexample(point=point, lhs=mpmath.nstr(lhs, 15), rhs=mpmath.nstr(rhs, 15))
                first_region = region if _pi_multiple(residual) else None
    # regions of later passing points count too
    if first_region is not None:
        counterexample.note = "multiple of pi" if first_region in regions else "branch crossing"

    parameters = {"p": str(evaluator.p), "q": str(evaluator.q), "precision": str(precision)}
    parameters.update({name: str(value) for name, value in sorted(bindings.items())})
    report = VerifyReport(
        identity_id=identity_id,
        identity=print_identity(identity),
        mode="numeric",
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
    logger.info(f"{identity_id or report.identity}: numeric {passed} passed, {failed} failed")
    return report


def verify_derivative_rules(
    spec: SequenceSpec,
    js: Iterable[int],
    precision: Optional[int] = None,
    seeds: Optional[Mapping[str, int]] = None,
    identity_id: str = "",
) -> VerifyReport:
    """
    Differentiate A*tau^x + B*sigma^x numerically (principal logarithm) and
    compare its parts with the closed-form rules at each integer j

    real part (q = -1):      (W[j+1] + W[j-1]) / sqrt(D) * ln(tau)
    imaginary part (q < 0):  B * sigma^j * pi

    Raises:
        PreconditionError: q >= 0 with q != -1 leaves no rule to check, or
            the precision is too low
        DegenerateFieldError: the family has no real quadratic field
    """
    precision = precision or settings.precision
    _check_precision(precision)
    js = list(js)
    if not js:
        raise EmptyGridError(f"no indices to check for family {spec.name}")
    check_real = spec.q == -1
    check_imag = spec.q < 0
    if not (check_real or check_imag):
        raise PreconditionError(f"family {spec.name} has q={spec.q} > 0; neither derivative rule applies", hint=None)

    start = time.perf_counter()
    bindings = seed_bindings([spec], seeds)
    pair = binet_coefficients(spec)
    tau, sigma = spec.roots()
    passed = failed = 0
    counterexample = None
    with _MP_LOCK, mpmath.workdps(precision):
        a = pair.A.substitute(bindings).to_mpmath()
        b = pair.B.substitute(bindings).to_mpmath()
        tau_f, sigma_f = tau.to_mpmath(), sigma.to_mpmath()
        log_tau = mpmath.log(tau_f)
        log_sigma = mpmath.log(mpmath.mpc(sigma_f))
        radical = spec.context.sqrt().to_mpmath()
        tolerance = mpmath.mpf("1e-12")

        def binet(x):
            return a * mpmath.exp(x * log_tau) + b * mpmath.exp(x * log_sigma)

        for j in js:
            derivative = mpmath.diff(binet, j)
            checks = []
            if check_real:
                neighbours = spec.term_at(j + 1) + spec.term_at(j - 1)
                expected = neighbours.substitute(bindings).to_mpmath() / radical * log_tau
                checks.append(("real part", mpmath.re(derivative), expected))
            if check_imag:
                expected = b * mpmath.power(sigma_f, j) * mpmath.pi
                checks.append(("imaginary part", mpmath.im(derivative), expected))
            for label, got, expected in checks:
                if abs(got - expected) <= tolerance * max(1, abs(expected)):
                    passed += 1
                    continue
                failed += 1
                if counterexample is None:
                    counterexample = Counterexample(
                        point={"j": j}, lhs=mpmath.nstr(got, 15), rhs=mpmath.nstr(expected, 15), note=label
                    )

    parameters = {"p": str(spec.p), "q": str(spec.q), "precision": str(precision)}
    parameters.update({name: str(value) for name, value in sorted(bindings.items())})
    report = VerifyReport(
        identity_id=identity_id,
        identity=f"d/dj {spec.name}[j]",
        mode="numeric",
        grid={"j": (min(js), max(js))},
        parameters=parameters,
        cases=passed + failed,
        passed=passed,
        failed=failed,
        counterexample=counterexample,
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )
    logger.info(f"derivative rules for {spec.name}: {passed} passed, {failed} failed")
    return report
