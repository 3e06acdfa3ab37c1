import logging

from commands.base import BaseCommand, CommandResult, load_identity, register_command
from core.models import RunConfig
from engine.pipeline import derive_identity

logger = logging.getLogger(__name__)


@register_command
class DeriveCommand(BaseCommand):
    """Differentiate an identity, take a component and check the result"""

    name = "derive"

    def run(self, cfg: RunConfig) -> CommandResult:
        identity = load_identity(cfg)
        _, trace = derive_identity(
            identity,
            cfg.wrt,
            component=cfg.component,
            shift=cfg.shift,
            pivot=cfg.pivot,
            combine=cfg.combine,
            simplify=cfg.simplify,
        )
        ok = trace.check is None or trace.check.ok
        return CommandResult(exit_code=0 if ok else 1, payload=trace)
