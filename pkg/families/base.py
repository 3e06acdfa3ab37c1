import logging
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from core.exceptions import FieldContextError
from core.models import FamilyDecl, FamilyRole
from engine.quadext import QuadContext
from engine.sequences import SequenceSpec

logger = logging.getLogger(__name__)

# Role registry
FAMILY_BUILDERS: Dict[FamilyRole, Callable[[FamilyDecl], SequenceSpec]] = {}

# Real-part rules pair each family with its companion
COMPANION_ROLES = {
    FamilyRole.FIBONACCI: (FamilyRole.LUCAS, "L"),
    FamilyRole.LUCAS: (FamilyRole.FIBONACCI, "F"),
    FamilyRole.LUCAS_U: (FamilyRole.LUCAS_V, "V"),
    FamilyRole.LUCAS_V: (FamilyRole.LUCAS_U, "U"),
}


def register_family_role(role: FamilyRole):
    """
    Register a builder turning a declaration of the given role into a SequenceSpec
    """
    def decorator(builder):
        FAMILY_BUILDERS[role] = builder
        return builder
    return decorator


def build_family(decl: FamilyDecl) -> SequenceSpec:
    """
    Build the sequence spec for a family declaration

    Args:
        decl: Family declaration with name, role and parameters

    Returns:
        SequenceSpec for the declared family
    """
    # Lazy loading of the role builders
    if len(FAMILY_BUILDERS) == 0:
        import families.lucas  # noqa: F401
        import families.gibonacci  # noqa: F401

    if decl.role not in FAMILY_BUILDERS:
        raise ValueError(f"Family role '{decl.role}' not found")
    if not decl.name:
        raise ValueError("family declarations need a name")
    return FAMILY_BUILDERS[decl.role](decl)


class FamilyTable(Mapping[str, SequenceSpec]):
    """
    Immutable mapping from family symbol to its sequence spec
    """

    def __init__(self, specs: Iterable[SequenceSpec] = ()):
        self._specs: Dict[str, SequenceSpec] = {}
        for spec in specs:
            self._specs[spec.name] = spec

    @classmethod
    def from_decls(cls, decls: Iterable[FamilyDecl]) -> "FamilyTable":
        return cls(build_family(decl) for decl in decls)

    def __getitem__(self, name: str) -> SequenceSpec:
        return self._specs[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._specs)

    def __len__(self) -> int:
        return len(self._specs)

    def __repr__(self) -> str:
        return f"FamilyTable({', '.join(self._specs)})"

    def with_family(self, spec: SequenceSpec) -> "FamilyTable":
        return FamilyTable([*(s for n, s in self._specs.items() if n != spec.name), spec])

    def merged(self, other: "FamilyTable") -> "FamilyTable":
        """Families of other override families of the same name in self"""
        return FamilyTable([*(s for n, s in self._specs.items() if n not in other), *other.values()])

    def seed_owner(self, seed: str) -> Optional[str]:
        for name, spec in self._specs.items():
            if seed in spec.seed0.symbols() or seed in spec.seed1.symbols():
                return name
        return None

    def is_seed(self, token: str) -> bool:
        return self.seed_owner(token) is not None

    def parameters_of(self, names: Iterable[str]) -> Tuple[Fraction, Fraction]:
        """
        Shared (p, q) of the named families; defaults to (1, -1) for none

        Raises:
            FieldContextError: the families disagree on p or q
        """
        params: Optional[Tuple[Fraction, Fraction]] = None
        owner = None
        for name in names:
            spec = self._specs[name]
            if params is None:
                params, owner = spec.parameters, name
            elif spec.parameters != params:
                raise FieldContextError(
                    f"families {owner} (p={params[0]}, q={params[1]}) and {name} "
                    f"(p={spec.p}, q={spec.q}) do not share one field context"
                )
        return params if params is not None else (Fraction(1), Fraction(-1))

    def context(self, names: Iterable[str]) -> QuadContext:
        """
        Field context Q(sqrt(D)) shared by the named families

        Raises:
            FieldContextError: parameters disagree
            DegenerateFieldError: D is not positive or is a rational square
        """
        return QuadContext.for_parameters(*self.parameters_of(names))

    def companion(self, name: str) -> Tuple["FamilyTable", SequenceSpec]:
        """
        The F<->L or U<->V partner of a family, declared on demand

        Returns:
            (table containing the companion, companion spec)
        """
        spec = self._specs[name]
        if spec.role not in COMPANION_ROLES:
            raise ValueError(f"family {name} ({spec.role.value}) has no companion family")
        role, default_name = COMPANION_ROLES[spec.role]
        candidates = [s for s in self._specs.values() if s.role == role and s.parameters == spec.parameters]
        for candidate in candidates:
            if candidate.name == default_name:
                return self, candidate
        if candidates:
            return self, candidates[0]
        new_name = default_name if default_name not in self._specs else self.fresh_name(default_name)
        created = build_family(FamilyDecl(name=new_name, role=role, p=int(spec.p), q=int(spec.q)))
        logger.debug(f"Declared companion family {new_name} for {name}")
        return self.with_family(created), created

    def fresh_name(self, prefix: str) -> str:
        if prefix not in self._specs:
            return prefix
        index = 2
        while f"{prefix}{index}" in self._specs:
            index += 1
        return f"{prefix}{index}"

    def describe(self) -> List[str]:
        return [str(spec) for spec in self._specs.values()]


def default_family_table(p: int = 1, q: int = -1) -> FamilyTable:
    """
    Families available to inline identities: F, L, G, H and the U, V, W family with (p, q)
    """
    decls = [
        FamilyDecl(name="F", role=FamilyRole.FIBONACCI),
        FamilyDecl(name="L", role=FamilyRole.LUCAS),
        FamilyDecl(name="G", role=FamilyRole.GIBONACCI),
        FamilyDecl(name="H", role=FamilyRole.GIBONACCI),
        FamilyDecl(name="U", role=FamilyRole.LUCAS_U, p=p, q=q),
        FamilyDecl(name="V", role=FamilyRole.LUCAS_V, p=p, q=q),
        FamilyDecl(name="W", role=FamilyRole.HORADAM, p=p, q=q),
    ]
    return FamilyTable.from_decls(decls)
