"""
Base class for the toolkit's management commands.

Adds the shared GlobalOptions flags, exit-code conventions and provenance
headers on top of Django's BaseCommand:
- usage errors (bad flags, invalid option values) exit with 1
- runtime failures (domain errors, I/O) exit with 2
"""
import logging
import sys
from functools import partial

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from pydantic import ValidationError

from apps.core.exceptions import GahError
from apps.core.utils import provenance_header
from apps.core.validators import GlobalOptions

logger = logging.getLogger(__name__)

USAGE_ERROR = 1
RUNTIME_ERROR = 2


def _usage_error(parser, message):
    """argparse error hook: print usage and exit with USAGE_ERROR."""
    if parser.called_from_command_line:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{parser.prog}: error: {message}\n")
        sys.exit(USAGE_ERROR)
    raise CommandError(f"Error: {message}", returncode=USAGE_ERROR)


class AnalysisCommand(BaseCommand):
    """
    Base for every analysis subcommand.

    Subclasses implement add_command_arguments() and run(**options);
    self.global_options and self.header are available inside run().
    """

    # Commands do not touch the database unless they opt in
    requires_system_checks = []
    requires_migrations_checks = False

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(_usage_error, parser)
        return parser

    def run_from_argv(self, argv):
        self._invocation = list(argv[1:])
        super().run_from_argv(argv)

    def add_arguments(self, parser):
        """Add shared options, then the subcommand's own."""
        parser.add_argument(
            "--threads",
            type=int,
            default=None,
            help="Worker count (0 = all cores; default from GAH_THREADS)",
        )
        parser.add_argument(
            "--seed",
            type=int,
            default=None,
            help="Root seed for all randomness (default from GAH_SEED)",
        )
        parser.add_argument(
            "--log-level",
            default=None,
            help="Override log level for this invocation",
        )
        parser.add_argument(
            "--output-format",
            choices=["csv", "json"],
            default=None,
            help="Tabular output format",
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        """Subcommand-specific arguments."""

    def handle(self, *args, **options):
        try:
            self.global_options = GlobalOptions(
                threads=options["threads"] if options["threads"] is not None
                else settings.GAH_THREADS,
                seed=options["seed"] if options["seed"] is not None else settings.GAH_SEED,
                log_level=options["log_level"] or settings.GAH_LOG_LEVEL or None,
                output_format=options["output_format"] or settings.GAH_OUTPUT_FORMAT,
            )
        except ValidationError as exc:
            raise CommandError(f"Invalid options: {exc}", returncode=USAGE_ERROR) from exc

        if self.global_options.log_level:
            logging.getLogger("apps").setLevel(self.global_options.log_level)

        invocation = getattr(self, "_invocation", None) or [self._command_name()]
        self.header = provenance_header(invocation)

        try:
            self.run(**options)
        except ValidationError as exc:
            raise CommandError(f"Invalid options: {exc}", returncode=USAGE_ERROR) from exc
        except (GahError, OSError) as exc:
            logger.error(f"{self._command_name()} failed: {exc}")
            raise CommandError(str(exc), returncode=RUNTIME_ERROR) from exc

    def run(self, **options):
        raise NotImplementedError("subclasses of AnalysisCommand must provide a run() method")

    def _command_name(self):
        return self.__module__.rsplit(".", 1)[-1]

    def usage_error(self, message):
        """Reject an invalid flag combination (exit code 1)."""
        raise CommandError(message, returncode=USAGE_ERROR)

    def success(self, message):
        self.stdout.write(self.style.SUCCESS(message))
