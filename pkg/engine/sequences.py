"""
Second-order recurrence families and their Binet coefficients
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import List, Tuple

from core.models import FamilyRole
from engine.quadext import QuadContext, QuadExt
from engine.seedpoly import SeedPoly

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SequenceSpec:
    """
    Recurrence W_j = p*W_{j-1} - q*W_{j-2} with seeds W_0, W_1

    The Fibonacci and Lucas numbers are the p=1, q=-1 instances with seeds
    (0, 1) and (2, 1). Seeds are seed polynomials so that numeric and
    symbolic families share one code path.

    Args:
        name: Family symbol as written in identities (F, L, G, W, ...)
        p: First recurrence parameter
        q: Second recurrence parameter
        seed0: W_0
        seed1: W_1
        role: Which family the spec plays (decides the derivative rules)
    """

    name: str
    p: Fraction
    q: Fraction
    seed0: SeedPoly
    seed1: SeedPoly
    role: FamilyRole = FamilyRole.HORADAM
    _forward: List[SeedPoly] = field(default_factory=list, repr=False)
    _backward: List[SeedPoly] = field(default_factory=list, repr=False)
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "seed0", SeedPoly.coerce(self.seed0))
        object.__setattr__(self, "seed1", SeedPoly.coerce(self.seed1))
        if self.p == 0:
            raise ValueError(f"family {self.name}: p must be nonzero")
        if self.q == 0:
            raise ValueError(f"family {self.name}: q must be nonzero")

    @property
    def key(self) -> Tuple:
        return (self.name, self.role, self.p, self.q, self.seed0, self.seed1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SequenceSpec):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def parameters(self) -> Tuple[Fraction, Fraction]:
        return self.p, self.q

    @property
    def is_symbolic(self) -> bool:
        return not (self.seed0.is_constant and self.seed1.is_constant)

    @cached_property
    def context(self) -> QuadContext:
        """Field context Q(sqrt(p^2 - 4q)); raises DegenerateFieldError"""
        return QuadContext.for_parameters(self.p, self.q)

    def roots(self) -> Tuple[QuadExt, QuadExt]:
        return self.context.roots(self.p)

    def term_at(self, j: int) -> SeedPoly:
        """
        Exact term W_j for any integer j

        Negative indices use W_{-m} = (p*W_{-m+1} - W_{-m+2}) / q.
        """
        with self._lock:
            if not self._forward:
                self._forward.extend([self.seed0, self.seed1])
            if j >= 0:
                while len(self._forward) <= j:
                    self._forward.append(self._forward[-1] * self.p - self._forward[-2] * self.q)
                return self._forward[j]
            while len(self._backward) < -j:
                m = len(self._backward) + 1
                w_next = self._forward[0] if m == 1 else self._backward[m - 2]
                if m == 1:
                    w_after = self._forward[1]
                elif m == 2:
                    w_after = self._forward[0]
                else:
                    w_after = self._backward[m - 3]
                self._backward.append((w_next * self.p - w_after) / self.q)
            return self._backward[-j - 1]

    def __str__(self) -> str:
        return f"{self.name}[{self.role.value}; p={self.p}, q={self.q}; {self.seed0}, {self.seed1}]"


@dataclass(frozen=True)
class BinetPair:
    """Coefficients of W_j = A*tau^j + B*sigma^j"""

    A: SeedPoly
    B: SeedPoly


def term_at(spec: SequenceSpec, j: int) -> SeedPoly:
    return spec.term_at(j)


def binet_coefficients(spec: SequenceSpec) -> BinetPair:
    """
    Solve A + B = W_0 and A*tau + B*sigma = W_1

    A = (W_1 - W_0*sigma) / (tau - sigma), B = (W_0*tau - W_1) / (tau - sigma)
    """
    tau, sigma = spec.roots()
    delta = tau - sigma
    a = (spec.seed1 - spec.seed0 * sigma) / delta
    b = (spec.seed0 * tau - spec.seed1) / delta
    return BinetPair(A=a, B=b)


def binet_value(spec: SequenceSpec, j: int) -> SeedPoly:
    """A*tau^j + B*sigma^j, the closed form of term_at"""
    pair = binet_coefficients(spec)
    tau, sigma = spec.roots()
    return pair.A * tau ** j + pair.B * sigma ** j


def lemma_combination(spec: SequenceSpec, j: int) -> SeedPoly:
    """
    Return (W_{j+1} - q*W_{j-1}) / sqrt(D), checked against A*tau^j - B*sigma^j
    """
    tau, sigma = spec.roots()
    delta = tau - sigma
    value = (spec.term_at(j + 1) - spec.term_at(j - 1) * spec.q) / delta
    pair = binet_coefficients(spec)
    closed = pair.A * tau ** j - pair.B * sigma ** j
    if value != closed:
        logger.error(f"Binet difference mismatch for {spec.name} at j={j}: {value} != {closed}")
        raise RuntimeError(f"Binet difference check failed for {spec.name} at j={j}")
    return value
