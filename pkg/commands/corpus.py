import logging

from commands.base import BaseCommand, CommandResult, register_command
from core.config import Settings
from core.models import RunConfig
from engine.corpus import run_corpus

logger = logging.getLogger(__name__)


@register_command
class CorpusCommand(BaseCommand):
    """Run the corpus, optionally filtered by tags"""

    name = "corpus"

    def run(self, cfg: RunConfig) -> CommandResult:
        # Fresh read of BINETLAB_CORPUS_DIR
        directory = cfg.corpus_dir or Settings().corpus_dir
        summary = run_corpus(directory, tags=cfg.tags)
        if not summary.ok:
            logger.error(f"{summary.failed} corpus entries failed")
        return CommandResult(exit_code=0 if summary.ok else 1, payload=summary)
