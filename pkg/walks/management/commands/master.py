"""
Master-equation evolution under coin, position or joint dephasing.

At p = 0 the master equation is the unitary walk, so the pure engine is
used and the moments rows match `walk` byte for byte, channel "none"
included.

Usage Examples:
---------------
$ python manage.py master --T 100 --p 1 --channel both --out results/classical
$ python manage.py master --T 200 --p 0.0005 --channel coin --coin-init plus --out results/coin
"""
import logging

from walks.analysis import moments
from walks.channels import WalkConfig, diagonal_distribution, evolve_master
from walks.exporters import ResultWriter
from walks.lattice import distribution, evolve_pure
from walks.management.base import WalkCommand
from walks.serializers import MasterOptionsSerializer

logger = logging.getLogger(__name__)


class Command(WalkCommand):
    help = "Evolve the discrete master equation and write the diagonal distribution and moments"
    options_serializer = MasterOptionsSerializer

    def add_arguments(self, parser):
        parser.add_argument("--T", type=int, required=True, help="Number of steps")
        parser.add_argument("--p", type=float, required=True, help="Decoherence probability per step")
        self.add_channel_argument(parser)
        self.add_coin_argument(parser)
        self.add_output_arguments(parser)

    def run(self, data):
        config = WalkConfig(T=data["T"], p=data["p"], channel=data["channel"], initial_coin=data["coin_init"])
        if config.p == 0:
            dist = distribution(evolve_pure(config))
            record = moments(dist)
        else:
            dist = diagonal_distribution(evolve_master(config))
            record = moments(dist, config.p, config.channel)

        writer = ResultWriter(
            data["out"],
            data["format"],
            metadata={
                "command": "master",
                "T": config.T,
                "p": config.p,
                "channel": config.channel.value,
                "coin_init": data["coin_init"],
            },
        )
        writer.write_distribution(dist)
        writer.write_moments([record])

        self.stdout.write(
            self.style.SUCCESS(
                f"Master T={record.T}, p={record.p}, channel={record.channel}: sigma={record.sigma:.6f}"
            )
        )
