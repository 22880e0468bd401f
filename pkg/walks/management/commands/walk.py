"""
Exact unitary walk.

Usage Examples:
---------------
$ python manage.py walk --T 100 --coin-init plus --out results/walk
$ python manage.py walk --T 2 --coin-init symmetric --out results/walk2 --format json
"""
import logging

from walks.analysis import moments
from walks.channels import WalkConfig
from walks.exporters import ResultWriter
from walks.lattice import distribution, evolve_pure
from walks.management.base import WalkCommand
from walks.serializers import WalkOptionsSerializer

logger = logging.getLogger(__name__)


class Command(WalkCommand):
    help = "Evolve the ideal Hadamard walk for T steps and write its distribution and moments"
    options_serializer = WalkOptionsSerializer

    def add_arguments(self, parser):
        parser.add_argument("--T", type=int, required=True, help="Number of steps")
        self.add_coin_argument(parser)
        self.add_output_arguments(parser)

    def run(self, data):
        config = WalkConfig(T=data["T"], initial_coin=data["coin_init"])
        dist = distribution(evolve_pure(config))
        record = moments(dist)

        writer = ResultWriter(
            data["out"],
            data["format"],
            metadata={"command": "walk", "T": data["T"], "coin_init": data["coin_init"]},
        )
        writer.write_distribution(dist)
        writer.write_moments([record])

        self.stdout.write(
            self.style.SUCCESS(f"Walk T={record.T}: sigma={record.sigma:.6f}, mean={record.mean:.6f}")
        )
