from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict
import logging

from pydantic import BaseModel

from core.exceptions import PreconditionError
from core.models import RunConfig
from engine.expressions import Identity
from engine.parser import parse_identity
from families.base import default_family_table

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    """Exit code plus the model the CLI renders"""

    exit_code: int
    payload: BaseModel


class BaseCommand(ABC):
    """
    Base class for all command-line commands
    """

    name: str = ""

    @abstractmethod
    def run(self, cfg: RunConfig) -> CommandResult:
        """
        Execute the command

        Args:
            cfg: Validated run configuration

        Returns:
            CommandResult with exit code and report model
        """
        pass


# Command registry
COMMAND_REGISTRY: Dict[str, BaseCommand] = {}


def register_command(command_class):
    """
    Register a command class in the registry
    """
    instance = command_class()
    COMMAND_REGISTRY[instance.name] = instance
    return command_class


def get_command(name: str) -> BaseCommand:
    """
    Get a command instance by name
    """
    # Lazy loading of command implementations
    if len(COMMAND_REGISTRY) == 0:
        import commands.parse  # noqa: F401
        import commands.derive  # noqa: F401
        import commands.prove  # noqa: F401
        import commands.verify  # noqa: F401
        import commands.corpus  # noqa: F401

    if name not in COMMAND_REGISTRY:
        raise ValueError(f"Command '{name}' not found")
    return COMMAND_REGISTRY[name]


def load_identity(cfg: RunConfig) -> Identity:
    """
    Parse the inline identity or the --input file against the default families for (p, q)

    Blank lines and lines starting with # are ignored; an input file holds
    the identity on its first remaining line and optional constraints such
    as "k even" on the lines after it.
    """
    table = default_family_table(cfg.p, cfg.q)
    constraints = []
    if cfg.identity is not None:
        text = cfg.identity
    else:
        try:
            raw = cfg.input_path.read_text(encoding="utf-8")
        except OSError as e:
            raise PreconditionError(f"cannot read {cfg.input_path}: {e}", hint=None)
        lines = [line.strip() for line in raw.splitlines() if line.strip() and not line.strip().startswith("#")]
        if not lines:
            raise PreconditionError(f"{cfg.input_path} holds no identity", hint=None)
        text, constraints = lines[0], lines[1:]
    return parse_identity(text, table, constraints, provenance=str(cfg.input_path or "inline"))
