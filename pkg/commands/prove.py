import logging

from commands.base import BaseCommand, CommandResult, load_identity, register_command
from core.models import RunConfig
from engine.prover import prove_identity

logger = logging.getLogger(__name__)


@register_command
class ProveCommand(BaseCommand):
    """Prove an identity through its canonical Laurent form"""

    name = "prove"

    def run(self, cfg: RunConfig) -> CommandResult:
        identity = load_identity(cfg)
        verdict = prove_identity(identity)
        return CommandResult(exit_code=0 if verdict.proved else 1, payload=verdict)
