import logging

from commands.base import BaseCommand, CommandResult, load_identity, register_command
from core.models import RunConfig
from engine.verifier import verify_instances

logger = logging.getLogger(__name__)


@register_command
class VerifyCommand(BaseCommand):
    """Check an identity exactly at every point of the index grid"""

    name = "verify"

    def run(self, cfg: RunConfig) -> CommandResult:
        identity = load_identity(cfg)
        report = verify_instances(identity, grid=cfg.grid or None, seeds=cfg.seeds, precision=cfg.precision)
        return CommandResult(exit_code=0 if report.ok else 1, payload=report)
