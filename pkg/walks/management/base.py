"""
Shared plumbing for the walk management commands.

Exit codes: 0 success, 1 I/O (and other runtime failures), 2 usage or
validation, 3 first-order regime violation.
"""
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from walks.exceptions import InvalidArgument, RegimeViolation, WalkError
from walks.serializers import CHANNEL_CHOICES, COIN_INIT_CHOICES, FORMAT_CHOICES

logger = logging.getLogger(__name__)

EXIT_IO = 1
EXIT_USAGE = 2
EXIT_REGIME = 3


class WalkCommand(BaseCommand):
    """Validates flags through `options_serializer`, then calls `run`."""

    options_serializer = None

    # ============================================================
    # ARGUMENT HELPERS
    # ============================================================

    def add_coin_argument(self, parser):
        parser.add_argument(
            "--coin-init",
            choices=COIN_INIT_CHOICES,
            default=settings.QWALK["DEFAULT_COIN_INIT"],
            help="Initial coin state: plus |+1>, minus |-1>, symmetric (|-1> + i|+1>)/sqrt2",
        )

    def add_channel_argument(self, parser, many=False):
        parser.add_argument(
            "--channel",
            choices=CHANNEL_CHOICES,
            nargs="+" if many else None,
            default=["both"] if many else "both",
        )

    def add_jobs_argument(self, parser):
        parser.add_argument(
            "--jobs",
            type=int,
            default=settings.QWALK["DEFAULT_JOBS"],
            help="Worker processes",
        )

    def add_output_arguments(self, parser, with_format=True):
        parser.add_argument("--out", required=True, help="Output directory")
        if with_format:
            parser.add_argument("--format", choices=FORMAT_CHOICES, default="csv")

    # ============================================================
    # VALIDATION AND ERROR MAPPING
    # ============================================================

    def validated(self, options):
        fields = self.options_serializer().fields
        data = {name: options[name] for name in fields if options.get(name) is not None}
        serializer = self.options_serializer(data=data)
        if not serializer.is_valid():
            logger.error(f"Invalid input: {serializer.errors}")
            raise CommandError(f"Invalid input: {dict(serializer.errors)}", returncode=EXIT_USAGE)
        return serializer.validated_data

    def handle(self, *args, **options):
        data = self.validated(options)
        try:
            self.run(data)
        except RegimeViolation as e:
            logger.error(f"Regime violation: {e}")
            raise CommandError(str(e), returncode=EXIT_REGIME)
        except InvalidArgument as e:
            logger.error(f"Validation error: {e}")
            raise CommandError(str(e), returncode=EXIT_USAGE)
        except WalkError as e:
            logger.exception(f"Engine failure: {e}")
            raise CommandError(str(e), returncode=EXIT_IO)
        except OSError as e:
            logger.error(f"I/O failure: {e}")
            raise CommandError(f"I/O failure: {e}", returncode=EXIT_IO)

    def run(self, data):
        raise NotImplementedError
