from __future__ import print_function

import json
import os
import tempfile
import unittest

import mock

from superjet import config
from superjet.bihss import build_pair
from superjet.errors import ValidationError
from superjet.scenario import SCENARIO_SUITE, Scenario, bundled_scenario, run_scenario


def scenario(tasks, f=("1",), n=1, c=None, conformal=None):
    structure = {"n": n, "f": list(f)}
    if c is not None:
        structure["c"] = list(c)
    if conformal is not None:
        structure["conformal"] = conformal
    return {"schema": 1, "structure": structure, "tasks": tasks}


class BundledScenarioTester(unittest.TestCase):
    def tearDown(self):
        config.reset()

    def testKdVPasses(self):
        """
        The shipped KdV scenario passes every task.
        """
        report = run_scenario(bundled_scenario("kdv"))
        self.assertEqual(report.status, "pass")
        self.assertEqual(report.exit_code, 0)
        data = json.loads(report.to_json())
        self.assertEqual(data["schema"], 1)
        self.assertTrue(all(t["status"] == "pass" for t in data["tasks"]))
        byname = dict((t["name"], t) for t in data["tasks"])
        self.assertEqual(byname["tau-indices"]["outputs"]["indices"], ["-3"])
        self.assertEqual(byname["conformal"]["outputs"]["d"], ["0"])
        self.assertFalse(byname["window"]["outputs"]["vbh_guaranteed_zero"])

    def testBundledName(self):
        """
        A bare name finds the shipped file.
        """
        loaded = Scenario.from_file("kdv")
        self.assertEqual(loaded.path, bundled_scenario("kdv"))
        self.assertEqual(loaded.inventory()[0], ("pair", "check-bihamiltonian"))

    def testPairBuiltOnce(self):
        """
        Tasks share one verified pair.
        """
        with mock.patch("superjet.scenario.build_pair", wraps=build_pair) as built:
            run_scenario(bundled_scenario("kdv"))
        self.assertEqual(built.call_count, 1)
        self.assertTrue(built.call_args[1]["verify"])


class ValidationTester(unittest.TestCase):
    def assertInvalid(self, doc):
        self.assertRaises(ValidationError, Scenario, doc)

    def testSchema(self):
        """
        Documents outside the scenario schema are refused.
        """
        self.assertInvalid([])
        self.assertInvalid({"schema": 2, "structure": {"n": 1, "f": ["1"]}})
        self.assertInvalid(scenario([{"name": "w", "task": "window", "p": "one", "d": 2}]))
        self.assertInvalid(scenario([{"name": "x", "task": "bogus"}]))

    def testStructure(self):
        """
        n, f and c must agree.
        """
        self.assertInvalid({"schema": 1, "structure": {"n": 1}, "tasks": []})
        self.assertInvalid(scenario([], f=["1"], n=2))
        self.assertInvalid(scenario([], c=["1", "1"]))
        self.assertInvalid(scenario([], f=["th[1,0]"]))
        self.assertInvalid(scenario([], f=["u[2]"]))
        self.assertInvalid(scenario([], n=0))

    def testTaskNames(self):
        """
        Names are unique and refs point backwards.
        """
        tau = {"name": "tau", "task": "tau"}
        self.assertInvalid(scenario([tau, tau]))
        self.assertInvalid(scenario([{"name": "ind", "task": "indices", "ref": "tau"}, tau]))
        self.assertInvalid(scenario([{"name": "ind", "task": "indices"}]))
        self.assertInvalid(scenario([{"task": "tau"}]))

    def testExpressions(self):
        """
        Unparsable expressions are caught before anything runs.
        """
        with self.assertRaises(ValidationError) as cm:
            Scenario(scenario([{"name": "b", "task": "schouten", "p": "int(th1", "q": "0"}]))
        self.assertIn("b.p", str(cm.exception))

    def testNotJson(self):
        """
        A file that is not JSON is a validation error.
        """
        fd, path = tempfile.mkstemp(suffix=".json")
        self.addCleanup(os.remove, path)
        with os.fdopen(fd, "w") as stream:
            stream.write("{not json")
        self.assertRaises(ValidationError, Scenario.from_file, path)

    def testExtraMembers(self):
        """
        Unknown members of a task are ignored.
        """
        doc = scenario([{"name": "t", "task": "window", "p": 1, "d": 2, "note": "extra"}])
        self.assertEqual(Scenario(doc).inventory(), [("t", "window")])
        self.assertTrue(SCENARIO_SUITE.match_variant("task", doc["tasks"][0]))


class RunnerTester(unittest.TestCase):
    def tearDown(self):
        config.reset()

    def run_doc(self, doc):
        report = run_scenario(Scenario(doc))
        return report, dict((t.name, t) for t in report.tasks)

    def testBuildErrorSkipsGroup(self):
        """
        f = 0 is an error; later tasks of the group are skipped, others run.
        """
        report, tasks = self.run_doc(scenario(
            [{"name": "pair", "task": "check-bihamiltonian"},
             {"name": "tau", "task": "tau"},
             {"name": "w", "task": "window", "p": 1, "d": 2, "group": "lookup"}],
            f=["0"], c=["1"]))
        self.assertEqual(tasks["pair"].status, "error")
        self.assertEqual(tasks["pair"].error["type"], "ZeroMetricEntry")
        self.assertEqual(tasks["tau"].status, "skipped")
        self.assertEqual(tasks["w"].status, "pass")
        self.assertEqual(report.exit_code, 1)

    def testFailedExpectation(self):
        """
        A wrong expect fails the task without stopping the run.
        """
        p = "int(1/2*th1*th1')"
        report, tasks = self.run_doc(scenario(
            [{"name": "bad", "task": "schouten", "p": p, "q": p, "expect": "int(th1)"},
             {"name": "good", "task": "schouten", "p": p, "q": p, "expect": "int(0)"}]))
        self.assertEqual(tasks["bad"].status, "fail")
        self.assertEqual(tasks["bad"].error["type"], "TaskFailed")
        self.assertEqual(tasks["good"].status, "pass")
        self.assertEqual(report.status, "fail")
        self.assertTrue(report.summary()[0].startswith("FAIL"))
        self.assertEqual(report.summary()[-1], "1/2 tasks passed")

    def testReference(self):
        """
        normalize can take tau through ref.
        """
        _, tasks = self.run_doc(scenario(
            [{"name": "tau", "task": "tau"},
             {"name": "normal", "task": "normalize", "ref": "tau"},
             {"name": "ind", "task": "indices", "ref": "normal", "expect": ["-3"]}],
            c=["1"]))
        self.assertEqual(tasks["normal"].status, "pass")
        self.assertEqual(tasks["normal"].outputs["X"], {"1,1": "-3"})
        self.assertEqual(tasks["ind"].status, "pass")

    def testProbe(self):
        """
        A bounded probe reports its bound.
        """
        _, tasks = self.run_doc(scenario(
            [{"name": "probe", "task": "probe", "p": 1, "d": 2, "udeg_bound": 1, "expect": 0}]))
        probe = tasks["probe"]
        self.assertEqual(probe.status, "pass")
        self.assertEqual(probe.bounds, {"udeg": 1})
        self.assertEqual(probe.to_dict()["outputs"]["dimension"], 0)

    def testProbeDefaultBound(self):
        """
        Without udeg_bound the configured bound applies.
        """
        config.update({"udeg_bound": 1})
        _, tasks = self.run_doc(scenario([{"name": "probe", "task": "probe", "p": 1, "d": 2}]))
        self.assertEqual(tasks["probe"].bounds, {"udeg": 1})

    def testWindowAndAtlas(self):
        """
        Lookups need no pair.
        """
        _, tasks = self.run_doc(scenario(
            [{"name": "w", "task": "window", "p": 1, "d": 4},
             {"name": "a", "task": "atlas", "space": "C_lambda_dtheta", "p_max": 4, "d_max": 4}],
            f=["0"]))
        self.assertTrue(tasks["w"].outputs["vbh_guaranteed_zero"])
        self.assertEqual(tasks["a"].outputs["occupied"], [[1, 0], [2, 0], [2, 1], [3, 1]])

    def testMissingConformal(self):
        """
        euler without a conformal block is an error.
        """
        _, tasks = self.run_doc(scenario([{"name": "e", "task": "euler"}]))
        self.assertEqual(tasks["e"].status, "error")
        self.assertEqual(tasks["e"].error["type"], "ValidationError")


if __name__ == '__main__':
    unittest.main()
