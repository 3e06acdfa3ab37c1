"""
Fibonacci, Lucas and the two Lucas sequences U, V
"""
from core.models import FamilyDecl, FamilyRole
from engine.sequences import SequenceSpec
from families.base import register_family_role


def _require_golden(decl: FamilyDecl) -> None:
    if (decl.p, decl.q) != (1, -1):
        raise ValueError(f"family {decl.name}: role {decl.role.value} fixes p=1, q=-1")


@register_family_role(FamilyRole.FIBONACCI)
def build_fibonacci(decl: FamilyDecl) -> SequenceSpec:
    _require_golden(decl)
    return SequenceSpec(decl.name, 1, -1, 0, 1, role=FamilyRole.FIBONACCI)


@register_family_role(FamilyRole.LUCAS)
def build_lucas(decl: FamilyDecl) -> SequenceSpec:
    _require_golden(decl)
    return SequenceSpec(decl.name, 1, -1, 2, 1, role=FamilyRole.LUCAS)


@register_family_role(FamilyRole.LUCAS_U)
def build_lucas_u(decl: FamilyDecl) -> SequenceSpec:
    # U_0 = 0, U_1 = 1
    return SequenceSpec(decl.name, decl.p, decl.q, 0, 1, role=FamilyRole.LUCAS_U)


@register_family_role(FamilyRole.LUCAS_V)
def build_lucas_v(decl: FamilyDecl) -> SequenceSpec:
    # V_0 = 2, V_1 = p
    return SequenceSpec(decl.name, decl.p, decl.q, 2, decl.p, role=FamilyRole.LUCAS_V)
