"""
Families with arbitrary seeds: gibonacci (p=1, q=-1) and Horadam (any p, q)
"""
from core.models import FamilyDecl, FamilyRole
from engine.seedpoly import SeedPoly
from engine.sequences import SequenceSpec
from families.base import register_family_role


def _seeds(decl: FamilyDecl):
    if decl.seeds is not None:
        return SeedPoly.constant(decl.seeds[0]), SeedPoly.constant(decl.seeds[1])
    return SeedPoly.symbol(f"{decl.name}0"), SeedPoly.symbol(f"{decl.name}1")


@register_family_role(FamilyRole.GIBONACCI)
def build_gibonacci(decl: FamilyDecl) -> SequenceSpec:
    if (decl.p, decl.q) != (1, -1):
        raise ValueError(f"family {decl.name}: gibonacci families have p=1, q=-1; declare it horadam")
    seed0, seed1 = _seeds(decl)
    return SequenceSpec(decl.name, 1, -1, seed0, seed1, role=FamilyRole.GIBONACCI)


@register_family_role(FamilyRole.HORADAM)
def build_horadam(decl: FamilyDecl) -> SequenceSpec:
    seed0, seed1 = _seeds(decl)
    return SequenceSpec(decl.name, decl.p, decl.q, seed0, seed1, role=FamilyRole.HORADAM)
