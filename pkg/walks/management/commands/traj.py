"""
Trajectory (Monte-Carlo) estimate of the decohered distribution.

Usage Examples:
---------------
$ python manage.py traj --T 50 --p 0.1 --channel both --runs 100000 --seed 7 --jobs 8 --out results/traj
"""
import logging

from walks.analysis import moments
from walks.channels import WalkConfig
from walks.exporters import ResultWriter
from walks.management.base import WalkCommand
from walks.serializers import TrajectoryOptionsSerializer
from walks.trajectories import TrajectoryConfig, estimate_distribution

logger = logging.getLogger(__name__)


class Command(WalkCommand):
    help = "Estimate the distribution from pure-state trajectories with random projective collapses"
    options_serializer = TrajectoryOptionsSerializer

    def add_arguments(self, parser):
        parser.add_argument("--T", type=int, required=True, help="Number of steps")
        parser.add_argument("--p", type=float, required=True, help="Decoherence probability per step")
        parser.add_argument("--runs", type=int, required=True, help="Number of trajectories")
        parser.add_argument("--seed", type=int, default=0, help="Master seed (64-bit)")
        self.add_jobs_argument(parser)
        self.add_channel_argument(parser)
        self.add_coin_argument(parser)
        self.add_output_arguments(parser)

    def run(self, data):
        walk = WalkConfig(T=data["T"], p=data["p"], channel=data["channel"], initial_coin=data["coin_init"])
        estimate = estimate_distribution(
            TrajectoryConfig(walk=walk, n_runs=data["runs"], seed=data["seed"]),
            jobs=data["jobs"],
        )
        record = moments(estimate.probs, walk.p, walk.channel)

        writer = ResultWriter(
            data["out"],
            data["format"],
            metadata={
                "command": "traj",
                "T": walk.T,
                "p": walk.p,
                "channel": walk.channel.value,
                "coin_init": data["coin_init"],
                "runs": data["runs"],
                "seed": data["seed"],
            },
        )
        writer.write_distribution(estimate.probs, estimate.standard_errors)
        writer.write_moments([record])

        self.stdout.write(
            self.style.SUCCESS(
                f"{data['runs']} trajectories T={walk.T}, p={walk.p}: sigma={record.sigma:.6f}"
            )
        )
