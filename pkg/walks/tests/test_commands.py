"""
Tests for the management commands and the files they write
"""
import csv
import json
import shutil
import tempfile
from io import StringIO
from pathlib import Path

import pytest
from django.core.management import ManagementUtility, call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from walks.management.base import EXIT_REGIME, EXIT_USAGE


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class CommandTestCase(SimpleTestCase):
    """Runs commands against a scratch output directory"""

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, self.tmp, ignore_errors=True)

    def run_command(self, name, *args):
        out = StringIO()
        call_command(name, *args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def assertExitCode(self, code, name, *args):
        with self.assertRaises(CommandError) as cm:
            self.run_command(name, *args)
        self.assertEqual(cm.exception.returncode, code)


class WalkCommandTest(CommandTestCase):
    """Test `walk`"""

    def test_two_steps_from_plus(self):
        """T=2 from |+1>: four cells of 1/4"""
        self.run_command("walk", "--T", "2", "--coin-init", "plus", "--out", str(self.tmp))
        rows = read_csv(self.tmp / "distribution.csv")
        self.assertEqual(list(rows[0]), ["t", "x", "a", "prob"])
        self.assertEqual([(r["x"], r["a"]) for r in rows][:2], [("-2", "-1"), ("-2", "1")])
        table = {(int(r["x"]), int(r["a"])): float(r["prob"]) for r in rows}
        for cell in [(-2, -1), (0, -1), (0, 1), (2, 1)]:
            self.assertAlmostEqual(table[cell], 0.25, places=9)
        self.assertEqual(table[(2, -1)], 0.0)
        self.assertTrue(all(r["t"] == "2" for r in rows))

        moments = read_csv(self.tmp / "moments.csv")
        self.assertEqual(list(moments[0]), ["channel", "T", "p", "mean", "second_moment", "sigma"])
        self.assertEqual(moments[0]["channel"], "none")
        self.assertAlmostEqual(float(moments[0]["second_moment"]), 2.0, places=9)

    def test_zero_steps(self):
        """T=0 writes the start cell only"""
        self.run_command("walk", "--T", "0", "--out", str(self.tmp))
        rows = read_csv(self.tmp / "distribution.csv")
        self.assertEqual(len(rows), 2)
        self.assertAlmostEqual(sum(float(r["prob"]) for r in rows), 1.0, places=9)
        self.assertEqual(read_csv(self.tmp / "moments.csv")[0]["sigma"], "0")

    def test_json_format(self):
        """JSON output carries rows and metadata"""
        self.run_command("walk", "--T", "3", "--format", "json", "--out", str(self.tmp))
        payload = json.loads((self.tmp / "distribution.json").read_text())
        self.assertEqual(payload["metadata"]["command"], "walk")
        self.assertEqual(len(payload["rows"]), 8)
        moments = json.loads((self.tmp / "moments.json").read_text())["rows"][0]
        self.assertEqual(moments["T"], 3)

    def test_negative_T(self):
        """T < 0 is a usage error"""
        self.assertExitCode(EXIT_USAGE, "walk", "--T", "-1", "--out", str(self.tmp))
        self.assertFalse((self.tmp / "distribution.csv").exists())

    def test_negative_T_from_command_line(self):
        """The process exits with status 2"""
        utility = ManagementUtility(["manage.py", "walk", "--T", "-1", "--out", str(self.tmp)])
        with self.assertRaises(SystemExit) as cm:
            utility.execute()
        self.assertEqual(cm.exception.code, EXIT_USAGE)

    def test_unknown_channel_from_command_line(self):
        """argparse rejects unknown channels with status 2"""
        utility = ManagementUtility(
            ["manage.py", "master", "--T", "3", "--p", "0.1", "--channel", "spin", "--out", str(self.tmp)]
        )
        with self.assertRaises(SystemExit) as cm:
            utility.execute()
        self.assertEqual(cm.exception.code, 2)


class MasterCommandTest(CommandTestCase):
    """Test `master`"""

    def test_classical_endpoint(self):
        """T=100, p=1 gives sigma = 10"""
        self.run_command("master", "--T", "100", "--p", "1", "--channel", "both", "--out", str(self.tmp))
        record = read_csv(self.tmp / "moments.csv")[0]
        self.assertEqual(record["channel"], "both")
        self.assertAlmostEqual(float(record["sigma"]), 10.0, places=6)

    def test_zero_p_matches_walk(self):
        """p = 0 writes the same bytes as walk, channel none included"""
        self.run_command("walk", "--T", "40", "--out", str(self.tmp / "walk"))
        self.run_command("master", "--T", "40", "--p", "0", "--channel", "coin", "--out", str(self.tmp / "master"))
        for name in ("distribution.csv", "moments.csv"):
            self.assertEqual(
                (self.tmp / "walk" / name).read_bytes(),
                (self.tmp / "master" / name).read_bytes(),
            )
        self.assertEqual(read_csv(self.tmp / "master" / "moments.csv")[0]["channel"], "none")

    def test_p_out_of_range(self):
        """p > 1 is a usage error"""
        self.assertExitCode(EXIT_USAGE, "master", "--T", "3", "--p", "1.5", "--out", str(self.tmp))


class TrajCommandTest(CommandTestCase):
    """Test `traj`"""

    def test_writes_standard_errors(self):
        """Distribution gains a stderr column"""
        self.run_command(
            "traj", "--T", "4", "--p", "0.5", "--runs", "200", "--seed", "1", "--out", str(self.tmp)
        )
        rows = read_csv(self.tmp / "distribution.csv")
        self.assertEqual(list(rows[0]), ["t", "x", "a", "prob", "stderr"])
        self.assertAlmostEqual(sum(float(r["prob"]) for r in rows), 1.0, places=9)

    def test_reproducible_across_jobs(self):
        """Same seed, different --jobs, identical files"""
        for jobs in ("1", "2"):
            self.run_command(
                "traj", "--T", "6", "--p", "0.3", "--runs", "3000", "--seed", "42",
                "--jobs", jobs, "--out", str(self.tmp / jobs),
            )
        self.assertEqual(
            (self.tmp / "1" / "distribution.csv").read_bytes(),
            (self.tmp / "2" / "distribution.csv").read_bytes(),
        )

    def test_zero_runs(self):
        """--runs 0 is a usage error"""
        self.assertExitCode(EXIT_USAGE, "traj", "--T", "4", "--p", "0.5", "--runs", "0", "--out", str(self.tmp))


class SweepCommandTest(CommandTestCase):
    """Test `sweep`"""

    def test_endpoints(self):
        """Four rows sorted by (T, p); decoherence shrinks sigma"""
        self.run_command("sweep", "--T", "100", "20", "--p", "1", "0", "--out", str(self.tmp))
        rows = read_csv(self.tmp / "moments.csv")
        self.assertEqual([(r["T"], r["p"]) for r in rows], [("20", "0"), ("20", "1"), ("100", "0"), ("100", "1")])
        self.assertGreater(float(rows[0]["sigma"]), float(rows[1]["sigma"]))
        self.assertAlmostEqual(float(rows[3]["sigma"]), 10.0, places=6)

    def test_identical_across_jobs(self):
        """Output bytes do not depend on --jobs"""
        for jobs in ("1", "2"):
            self.run_command(
                "sweep", "--T", "10", "20", "--p", "0", "0.5", "1", "--channel", "both", "coin",
                "--jobs", jobs, "--out", str(self.tmp / jobs),
            )
        self.assertEqual(
            (self.tmp / "1" / "moments.csv").read_bytes(),
            (self.tmp / "2" / "moments.csv").read_bytes(),
        )

    def test_trajectory_engine_identical_across_jobs(self):
        """Trajectory sweeps are seeded per grid point"""
        for jobs in ("1", "2"):
            self.run_command(
                "sweep", "--T", "6", "8", "--p", "0.2", "--engine", "trajectory", "--runs", "500",
                "--seed", "9", "--jobs", jobs, "--out", str(self.tmp / jobs),
            )
        self.assertEqual(
            (self.tmp / "1" / "moments.csv").read_bytes(),
            (self.tmp / "2" / "moments.csv").read_bytes(),
        )

    def test_log_grid(self):
        """--p-log START STOP NUM expands to NUM points"""
        self.run_command("sweep", "--T", "10", "--p-log", "1e-4", "1", "5", "--format", "json", "--out", str(self.tmp))
        payload = json.loads((self.tmp / "moments.json").read_text())
        self.assertEqual(len(payload["rows"]), 5)
        self.assertEqual(len(payload["metadata"]["grid"]["p"]), 5)

    def test_bad_log_grid(self):
        """Non-positive log bounds are a usage error"""
        self.assertExitCode(EXIT_USAGE, "sweep", "--T", "10", "--p-log", "0", "1", "5", "--out", str(self.tmp))

    def test_missing_grid(self):
        """A sweep without p values is a usage error"""
        self.assertExitCode(EXIT_USAGE, "sweep", "--T", "10", "--out", str(self.tmp))


class AnalyzeCommandTest(CommandTestCase):
    """Test `analyze`"""

    def read_result(self):
        return json.loads((self.tmp / "analysis.json").read_text())["rows"][0]

    def test_regime_violation_writes_nothing(self):
        """pT > 0.2 exits with status 3 and no file"""
        out = self.tmp / "slope"
        self.assertExitCode(
            EXIT_REGIME, "analyze", "--mode", "slope", "--T", "200", "--p-grid", "0", "0.01", "--out", str(out)
        )
        self.assertFalse(out.exists())

    def test_self_test_recovers_bound(self):
        """Synthetic bound data gives c2 = 0.2071068"""
        self.run_command(
            "analyze", "--mode", "coefficient", "--T", "100", "200", "300", "--self-test", "--out", str(self.tmp)
        )
        result = self.read_result()
        self.assertEqual(result["mode"], "coefficient")
        self.assertTrue(result["synthetic"])
        self.assertAlmostEqual(result["c2"], 0.2071068, delta=1e-5)
        self.assertAlmostEqual(result["c3"], 0.0, delta=1e-6)

    def test_finite_t(self):
        """Ideal spread coefficient near sqrt(1 - 1/sqrt2)"""
        self.run_command("analyze", "--mode", "finite-t", "--T", "50", "100", "--coin-init", "plus", "--out", str(self.tmp))
        result = self.read_result()
        self.assertAlmostEqual(result["k"], 0.541196, delta=0.01)

    def test_slope_needs_one_T(self):
        """Slope mode takes exactly one T"""
        self.assertExitCode(EXIT_USAGE, "analyze", "--mode", "slope", "--T", "50", "100", "--out", str(self.tmp))

    def test_self_test_only_for_coefficient(self):
        """--self-test belongs to the coefficient mode"""
        self.assertExitCode(
            EXIT_USAGE, "analyze", "--mode", "finite-t", "--T", "50", "--self-test", "--out", str(self.tmp)
        )


@pytest.mark.slow
class SlowCommandTest(CommandTestCase):
    """Full-size runs"""

    def test_slope_at_T200(self):
        """Scaled slope at T=200 in [0.055, 0.070]"""
        self.run_command("analyze", "--mode", "slope", "--T", "200", "--jobs", "3", "--out", str(self.tmp))
        result = json.loads((self.tmp / "analysis.json").read_text())["rows"][0]
        self.assertGreaterEqual(result["scaled_slope"], 0.055)
        self.assertLessEqual(result["scaled_slope"], 0.070)

    def test_crossover_grid(self):
        """Preset grid over all channels"""
        self.run_command("sweep", "--crossover-grid", "--channel", "both", "--jobs", "4", "--out", str(self.tmp))
        rows = read_csv(self.tmp / "moments.csv")
        self.assertEqual(len(rows), 6 * 25)
