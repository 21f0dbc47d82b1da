"""
Unified command-line entry point.

`gah <subcommand> ...` runs the matching management command. The
hyphenated subcommand names (compute-gt, build-graph, ...) map onto the
underscore command modules; every other Django command stays reachable.
"""
import os
import sys
from collections.abc import Sequence

SUBCOMMANDS = (
    'make-dataset',
    'compute-gt',
    'build-graph',
    'graph-stats',
    'delta0',
    'me',
    'hardness',
    'measure-effort',
    'correlate',
    'gen-workload',
    'benchmark',
    'summarize-ndc',
    'split-queries',
)


def _command_name(name: str) -> str:
    return name.replace('-', '_') if name in SUBCOMMANDS else name


def dispatch(argv: Sequence[str] | None = None) -> int:
    """
    Run one subcommand and return its exit code.

    0 on success, 1 on usage errors (unknown subcommand or flag, invalid
    option values), 2 on runtime failures.
    """
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings.local')

    from django.core.management import execute_from_command_line

    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith('-'):
        argv[0] = _command_name(argv[0])

    try:
        execute_from_command_line(['gah', *argv])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0


def main() -> None:
    sys.exit(dispatch())
