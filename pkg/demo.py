#!/usr/bin/env python
"""
Demo script for the decoherent quantum walk engines
Walks through the quantum-to-classical crossover in a couple of seconds
"""
import os
import time
from datetime import datetime

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "qwalk_decoherence.settings")
django.setup()

from walks.analysis import fit_bracket_coefficients, moments  # noqa: E402
from walks.channels import ChannelKind, WalkConfig, diagonal_distribution, evolve_master  # noqa: E402
from walks.lattice import distribution, evolve_pure  # noqa: E402
from walks.theory import BOUND_P, asymptotic_sigma, sigma_bound  # noqa: E402
from walks.trajectories import TrajectoryConfig, estimate_distribution  # noqa: E402


class Colors:
    """ANSI color codes for terminal output"""
    HEADER = '\033[95m'
    OKCYAN = '\033[96m'
    OKGREEN = '\033[92m'
    WARNING = '\033[93m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'


def print_header(text):
    print(f"\n{Colors.HEADER}{Colors.BOLD}{'='*70}{Colors.ENDC}")
    print(f"{Colors.HEADER}{Colors.BOLD}{text.center(70)}{Colors.ENDC}")
    print(f"{Colors.HEADER}{Colors.BOLD}{'='*70}{Colors.ENDC}\n")


def print_success(text):
    print(f"{Colors.OKGREEN}✓ {text}{Colors.ENDC}")


def print_info(text):
    print(f"{Colors.OKCYAN}ℹ {text}{Colors.ENDC}")


class CrossoverDemo:
    """Runs each engine once and tabulates sigma"""

    def __init__(self, T=100):
        self.T = T
        self.results = []

    def show_ideal_walk(self):
        print_header(f"IDEAL WALK (T={self.T})")
        for start in ("plus", "minus", "symmetric"):
            record = moments(distribution(evolve_pure(WalkConfig(T=self.T, initial_coin=start))))
            print_info(f"{start:<10} mean={record.mean:>9.4f}  sigma={record.sigma:>9.4f}")
        print_success(f"Closed form sigma = {asymptotic_sigma(self.T):.4f}")

    def show_crossover(self):
        print_header("DECOHERENCE SWEEP")
        print(f"  {'p':<10} {'both':>10} {'coin':>10} {'position':>10}")
        print(f"  {'-'*44}")
        for p in (0.0, 1e-3, 1e-2, 1e-1, 1.0):
            start_time = time.time()
            sigmas = [
                moments(diagonal_distribution(evolve_master(WalkConfig(T=self.T, p=p, channel=channel)))).sigma
                for channel in ChannelKind
            ]
            elapsed = time.time() - start_time
            print(f"  {p:<10g} " + " ".join(f"{s:>10.4f}" for s in sigmas))
            self.results.append({"p": p, "sigmas": sigmas, "time": elapsed})
        print_success(f"Classical limit sigma = sqrt(T) = {self.T ** 0.5:.4f}")

    def show_bound(self):
        print_header("SMALL-p BOUND")
        p = 0.05 / self.T
        exact = moments(diagonal_distribution(evolve_master(WalkConfig(T=self.T, p=p)))).sigma
        print_info(f"p={p:g}: simulated sigma={exact:.4f}, bound={sigma_bound(self.T, p):.4f}")
        fit = fit_bracket_coefficients([self.T // 2, self.T, 2 * self.T], sigma_fn=sigma_bound)
        print_info(f"Self-test fit on the bound: c2={fit.c2:.7f} (expected {BOUND_P:.7f})")

    def show_trajectories(self):
        print_header("TRAJECTORY ESTIMATE")
        walk = WalkConfig(T=20, p=0.3)
        estimate = estimate_distribution(TrajectoryConfig(walk=walk, n_runs=5000, seed=7))
        exact = moments(diagonal_distribution(evolve_master(walk))).sigma
        print_info(f"5000 runs: sigma={moments(estimate.probs).sigma:.4f} (master equation {exact:.4f})")

    def run_full_demo(self):
        print_header("DECOHERENT QUANTUM WALK - DEMO")
        print(f"Time: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        self.show_ideal_walk()
        self.show_crossover()
        self.show_bound()
        self.show_trajectories()

        total = sum(r["time"] for r in self.results)
        print(f"\n  Master-equation sweep time: {total:.3f}s")


def main():
    CrossoverDemo().run_full_demo()


if __name__ == "__main__":
    main()
