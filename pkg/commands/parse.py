import logging

from commands.base import BaseCommand, CommandResult, load_identity, register_command
from core.models import ParsedIdentity, RunConfig
from engine.printer import format_expr, print_identity

logger = logging.getLogger(__name__)


@register_command
class ParseCommand(BaseCommand):
    """Parse an identity and print its normalized form"""

    name = "parse"

    def run(self, cfg: RunConfig) -> CommandResult:
        identity = load_identity(cfg)
        parsed = ParsedIdentity(
            identity=print_identity(identity),
            lhs=format_expr(identity.lhs),
            rhs=format_expr(identity.rhs),
            free_indices=list(identity.free_indices),
            constraints=[c.text for c in identity.constraints],
            families=[str(identity.families[name]) for name in identity.family_names()],
        )
        logger.debug(f"Parsed {parsed.identity}")
        return CommandResult(exit_code=0, payload=parsed)
