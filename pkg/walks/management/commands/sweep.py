"""
Grid sweep of sigma(T, p) over channels, reproducing the decoherence curves.

Grid options:
-------------
* --p P [P ...]            explicit values
* --p-log START STOP NUM   log-spaced values between START > 0 and STOP
* --p-lin START STOP NUM   linearly spaced values
* --crossover-grid         preset: T in {20, 50, 100, 200, 300, 500},
                           25 log-spaced p in [1e-4, 1]

Rows are sorted by (channel, T, p); output is identical for any --jobs.

Usage Examples:
---------------
$ python manage.py sweep --T 20 100 --p 0 1 --channel both --out results/endpoints
$ python manage.py sweep --crossover-grid --channel both coin position --jobs 8 --out results/crossover
$ python manage.py sweep --T 50 --p 0.1 --engine trajectory --runs 20000 --seed 3 --out results/mc
"""
import logging

import numpy as np
from django.core.management.base import CommandError

from walks.exporters import ResultWriter
from walks.management.base import EXIT_USAGE, WalkCommand
from walks.serializers import ENGINE_CHOICES, SweepSpecSerializer
from walks.sweep import CROSSOVER_T_VALUES, SweepSpec, crossover_p_values, run_sweep

logger = logging.getLogger(__name__)


class Command(WalkCommand):
    help = "Sweep sigma(T, p) over a (channel, T, p) grid and write one moments row per point"
    options_serializer = SweepSpecSerializer

    def add_arguments(self, parser):
        parser.add_argument("--T", type=int, nargs="+", help="Step counts")
        grid = parser.add_mutually_exclusive_group()
        grid.add_argument("--p", type=float, nargs="+", help="Explicit p values")
        grid.add_argument("--p-log", type=float, nargs=3, metavar=("START", "STOP", "NUM"))
        grid.add_argument("--p-lin", type=float, nargs=3, metavar=("START", "STOP", "NUM"))
        parser.add_argument("--crossover-grid", action="store_true", help="Preset quantum-to-classical grid over T and p")
        parser.add_argument("--engine", choices=ENGINE_CHOICES, default="master")
        parser.add_argument("--runs", type=int, default=10_000, help="Trajectories per grid point")
        parser.add_argument("--seed", type=int, default=0, help="Master seed (64-bit)")
        self.add_jobs_argument(parser)
        self.add_channel_argument(parser, many=True)
        self.add_coin_argument(parser)
        self.add_output_arguments(parser)

    def validated(self, options):
        options["p"] = self._resolve_p_grid(options)
        if options.get("T") is None and options["crossover_grid"]:
            options["T"] = list(CROSSOVER_T_VALUES)
        return super().validated(options)

    def _resolve_p_grid(self, options):
        if options.get("p") is not None:
            return options["p"]
        for flag, spacing in (("p_log", "log"), ("p_lin", "lin")):
            spec = options.get(flag)
            if spec is None:
                continue
            start, stop, num = spec
            if num < 1 or num != int(num):
                raise CommandError(f"Grid size must be a positive integer, got {num}", returncode=EXIT_USAGE)
            if spacing == "log":
                if start <= 0 or stop <= 0:
                    raise CommandError("Log grid bounds must be positive", returncode=EXIT_USAGE)
                values = np.logspace(np.log10(start), np.log10(stop), int(num))
            else:
                values = np.linspace(start, stop, int(num))
            return [float(v) for v in values]
        if options["crossover_grid"]:
            return crossover_p_values()
        return None

    def run(self, data):
        spec = SweepSpec(
            T_values=data["T"],
            p_values=data["p"],
            channels=data["channel"],
            initial_coin=data["coin_init"],
            engine=data["engine"],
            n_runs=data["runs"],
            seed=data["seed"],
        )
        self.stdout.write(f"Sweeping {spec.grid_size()} grid points with {data['jobs']} job(s)...")
        records = run_sweep(spec, jobs=data["jobs"])

        writer = ResultWriter(
            data["out"],
            data["format"],
            metadata={
                "command": "sweep",
                "engine": spec.engine,
                "seed": spec.seed,
                "runs": spec.n_runs if spec.engine == "trajectory" else None,
                "coin_init": data["coin_init"],
                "grid": {
                    "T": sorted(set(spec.T_values)),
                    "p": sorted(set(spec.p_values)),
                    "channel": sorted(set(spec.channels)),
                },
            },
        )
        path = writer.write_moments(records)
        self.stdout.write(self.style.SUCCESS(f"Sweep complete: {len(records)} rows -> {path}"))
