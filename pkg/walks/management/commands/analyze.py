"""
Small-p analyses of the decohered walk.

Modes:
------
* slope        scaled slope -d sigma/dp / T^2 at one T (default grid {0, 0.05/T, 0.1/T})
* coefficient  joint fit of sigma(T,p)/sigma(T,0) ~ 1 - c1 pT + c2 p + c3 (pT)^2 over several T
               (--self-test feeds the fit with the closed-form bound instead of simulations)
* finite-t     coefficient k of sigma(T) ~ k (T - 1/T) for the ideal walk

A p grid with pT > 0.2 exits with status 3 and writes nothing.

Usage Examples:
---------------
$ python manage.py analyze --mode slope --T 200 --out results/slope
$ python manage.py analyze --mode coefficient --T 100 200 300 --jobs 8 --out results/c2
$ python manage.py analyze --mode coefficient --T 100 200 300 --self-test --out results/selftest
"""
import logging

from walks.analysis import P_FRACTIONS, fit_bracket_coefficients, scaled_small_p_slope, sigma_coefficient_fit
from walks.exporters import ResultWriter
from walks.management.base import WalkCommand
from walks.serializers import ANALYSIS_MODES, AnalyzeOptionsSerializer, BracketFitSerializer, SlopeEstimateSerializer
from walks.theory import BOUND_P, SPREAD_COEFFICIENT, sigma_bound

logger = logging.getLogger(__name__)


class Command(WalkCommand):
    help = "Fit small-p slopes and expansion coefficients of sigma(T, p)"
    options_serializer = AnalyzeOptionsSerializer

    def add_arguments(self, parser):
        parser.add_argument("--mode", choices=ANALYSIS_MODES, required=True)
        parser.add_argument("--T", type=int, nargs="+", required=True, help="Step count(s)")
        parser.add_argument("--p-grid", type=float, nargs="+", help="Slope mode: p values, starting at 0")
        parser.add_argument("--p-fractions", type=float, nargs="+", help="Coefficient mode: pT values per T")
        parser.add_argument("--self-test", action="store_true", help="Fit synthetic bound data")
        self.add_jobs_argument(parser)
        self.add_channel_argument(parser)
        self.add_coin_argument(parser)
        self.add_output_arguments(parser, with_format=False)

    def run(self, data):
        inputs = {key: value for key, value in data.items() if key != "out"}
        handler = {
            "slope": self._slope,
            "coefficient": self._coefficient,
            "finite-t": self._finite_t,
        }[data["mode"]]
        result = handler(data)

        writer = ResultWriter(data["out"], "json", metadata={"command": "analyze", "inputs": inputs})
        path = writer.write_analysis({"mode": data["mode"], **result})
        self.stdout.write(self.style.SUCCESS(f"Analysis '{data['mode']}' written to {path}"))

    def _slope(self, data):
        T = data["T"][0]
        p_grid = data.get("p_grid") or [0.0, 0.05 / T, 0.1 / T]
        estimate = scaled_small_p_slope(
            T, data["channel"], p_grid, initial_coin=data["coin_init"], jobs=data["jobs"]
        )
        return SlopeEstimateSerializer(estimate).data

    def _coefficient(self, data):
        fit = fit_bracket_coefficients(
            data["T"],
            data["channel"],
            initial_coin=data["coin_init"],
            sigma_fn=sigma_bound if data["self_test"] else None,
            p_fractions=data.get("p_fractions") or P_FRACTIONS,
            jobs=data["jobs"],
        )
        return {**BracketFitSerializer(fit).data, "bound_c2": BOUND_P, "synthetic": data["self_test"]}

    def _finite_t(self, data):
        k = sigma_coefficient_fit(data["T"], initial_coin=data["coin_init"])
        return {"k": k, "expected": SPREAD_COEFFICIENT}
