"""
Scenario documents: a structure block plus an ordered list of tasks, run
against one bihamiltonian pair and reported as JSON.

A scenario looks like::

    {"schema": 1,
     "structure": {"n": 1, "f": ["1"],
                   "conformal": {"lambda0": "0", "lambda1": "2", "mu": "1"},
                   "c": ["1"]},
     "tasks": [{"name": "pair", "task": "check-bihamiltonian"},
               {"name": "tau", "task": "tau"},
               {"name": "ind", "task": "indices", "ref": "tau"}]}

Tasks run in order. Later tasks may name an earlier task's result with
``ref``. An error (as opposed to a failed check) skips the remaining tasks
of the same ``group``.
"""
from __future__ import absolute_import

import json
import logging
import os
import time

from superjet import config
from superjet.bihss import (ConformalData, build_pair, build_tau, conformal_central_invariants,
                            conformal_check, delta_minus_one, euler_field, index_ode_check,
                            indices, is_cocycle, normalize_cocycle)
from superjet.cohomolab import (AnsatzProblem, ansatz_solve, atlas, index_set,
                                omega_lambda_window, vbh_guaranteed_zero, window_cases)
from superjet.errors import ConformalityFailed, ParseError, SuperjetError, ValidationError
from superjet.exprparse import is_coefficient, parse_expr, to_text
from superjet.forms import OneForm, ReducedOneForm, lie_derivative, reduce_mod_dx
from superjet.functionals import LocalFunctional, derivation_of, is_bihamiltonian, schouten
from superjet.jetring import _ONE_KEY, DiffPoly
from superjet.schema import parse_suite

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "scenarios")

SCENARIO_SUITE = parse_suite("""
%% scenario {schema: 1, structure: &structure, tasks: [&task, ...]}

&structure = {n: int, f: [string, ...], conformal: &conformal, c: [string, ...]}
&conformal = {lambda0: string, lambda1: string, mu: string}

&task = {name: string, group: string, task: "check-bihamiltonian"}
&task = {name: string, group: string, task: "schouten", p: string, q: string, expect: string}
&task = {name: string, group: string, task: "derivation", p: string}
&task = {name: string, group: string, task: "lie", p: string, form: string, with: string,
         expect: string}
&task = {name: string, group: string, task: "indices", form: string, ref: string,
         expect: [string, ...]}
&task = {name: string, group: string, task: "tau", expect: string}
&task = {name: string, group: string, task: "normalize", form: string, ref: string}
&task = {name: string, group: string, task: "conformal", expect: [string, ...]}
&task = {name: string, group: string, task: "euler"}
&task = {name: string, group: string, task: "central-invariants"}
&task = {name: string, group: string, task: "delta-minus-one", expr: string}
&task = {name: string, group: string, task: "window", p: int, d: int}
&task = {name: string, group: string, task: "atlas", space: string, p_max: int, d_max: int}
&task = {name: string, group: string, task: "probe", p: int, d: int, udeg_bound: int,
         mode: string, target: string, through: string, expect: int}
""")

TASK_KINDS = ("check-bihamiltonian", "schouten", "derivation", "lie", "indices", "tau",
              "normalize", "conformal", "euler", "central-invariants", "delta-minus-one",
              "window", "atlas", "probe")

# expression-valued parameters, checked before anything runs
_EXPRESSION_FIELDS = {
    "schouten": ("p", "q", "expect"),
    "derivation": ("p",),
    "lie": ("p", "form", "expect"),
    "indices": ("form",),
    "tau": ("expect",),
    "normalize": ("form",),
    "delta-minus-one": ("expr",),
    "probe": ("target",),
}

# the check did not hold; anything else raised is an error
_CHECK_FAILURES = (ConformalityFailed,)


class TaskFailed(SuperjetError):
    default_msg = "check failed"


def bundled_scenario(name):
    """Path of a scenario shipped with the package, e.g. 'kdv'."""
    return os.path.join(SCENARIO_DIR, name if name.endswith(".json") else name + ".json")


def _scalar(text, n):
    value = parse_expr(str(text), n=n)
    if not isinstance(value, DiffPoly) or not is_coefficient(value):
        raise ValidationError("'{text}' is not a coefficient", text=text)
    return value.terms.get(_ONE_KEY, value.tower.zero())


def _functional(value):
    if isinstance(value, LocalFunctional):
        return value
    if isinstance(value, DiffPoly):
        return LocalFunctional(value)
    raise ValidationError("expected a local functional, got {kind}", kind=type(value).__name__)


def _reduced(value):
    if isinstance(value, ReducedOneForm):
        return value
    if isinstance(value, OneForm):
        return reduce_mod_dx(value)
    raise ValidationError("expected a 1-form, got {kind}", kind=type(value).__name__)


class Scenario(object):
    """
    A validated scenario document.
    """

    def __init__(self, doc, path=None):
        self.doc = doc
        self.path = path
        self.validate()
        structure = doc["structure"]
        self.n = int(structure["n"])
        self.tasks = doc.get("tasks") or []
        self._pair = None
        self._pair_error = None

    @classmethod
    def from_file(cls, path):
        """
        :raises ValidationError: for unreadable JSON or a document that does
            not fit the scenario schema
        """
        if not os.path.exists(path) and os.path.exists(bundled_scenario(path)):
            path = bundled_scenario(path)
        try:
            with open(path) as stream:
                doc = json.load(stream)
        except ValueError as exc:
            raise ValidationError("{path}: not JSON: {err}", path=path, err=str(exc))
        return cls(doc, path=path)

    def validate(self):
        doc = self.doc
        if not isinstance(doc, dict):
            raise ValidationError("a scenario is a JSON object")
        SCENARIO_SUITE.valid_document("scenario", doc, raises=ValidationError)
        if doc.get("schema") != SCHEMA_VERSION:
            raise ValidationError("unsupported schema {schema}", schema=doc.get("schema"))
        structure = doc.get("structure") or {}
        n = structure.get("n")
        if n is None or int(n) < 1:
            raise ValidationError("structure.n must be a positive integer")
        n = int(n)
        for key in ("f", "c"):
            values = structure.get(key)
            if key == "f" and values is None:
                raise ValidationError("structure.f is required")
            if values is not None and len(values) != n:
                raise ValidationError("structure.{key} needs {n} entries, got {m}",
                                      key=key, n=n, m=len(values))
            for text in values or ():
                self._check_parse(lambda: _scalar(text, n), "structure." + key)
        seen = set()
        for record in doc.get("tasks") or ():
            name = record.get("name")
            kind = record.get("task")
            if not name:
                raise ValidationError("every task needs a name")
            if name in seen:
                raise ValidationError("duplicate task name '{name}'", name=name)
            if kind not in TASK_KINDS:
                raise ValidationError("task '{name}': unknown kind '{kind}'", name=name, kind=kind)
            ref = record.get("ref")
            if ref is not None and ref not in seen:
                raise ValidationError("task '{name}': ref '{ref}' does not name an earlier task",
                                      name=name, ref=ref)
            if kind in ("indices", "normalize") and ref is None and not record.get("form"):
                raise ValidationError("task '{name}' needs form or ref", name=name)
            for field in _EXPRESSION_FIELDS.get(kind, ()):
                text = record.get(field)
                if text is not None:
                    self._check_parse(lambda: parse_expr(str(text), n=n), "%s.%s" % (name, field))
            seen.add(name)

    @staticmethod
    def _check_parse(thunk, where):
        try:
            thunk()
        except ParseError as exc:
            raise ValidationError("{where}: {err}", where=where, err=str(exc))
        except SuperjetError as exc:
            raise ValidationError("{where}: {err}", where=where, err=exc.msg)

    # structure

    @property
    def structure(self):
        return self.doc["structure"]

    def parse(self, text):
        return parse_expr(str(text), n=self.n)

    def pair(self):
        """The SemisimpleHydroPair, built on first use; a build error repeats."""
        if self._pair_error is not None:
            raise self._pair_error
        if self._pair is None:
            try:
                f = [_scalar(text, self.n) for text in self.structure["f"]]
                self._pair = build_pair(f, verify=config.get("verify_pairs"))
            except SuperjetError as exc:
                self._pair_error = exc
                raise
        return self._pair

    def central_invariants(self):
        c = self.structure.get("c")
        if not c:
            raise ValidationError("structure.c is required for this task")
        return [_scalar(text, self.n) for text in c]

    def conformal_data(self):
        block = self.structure.get("conformal")
        if not block:
            raise ValidationError("structure.conformal is required for this task")
        d = conformal_check(self.pair().f)
        return ConformalData(d, block["lambda0"], block["lambda1"], block["mu"])

    def inventory(self):
        """(name, task) pairs in run order."""
        return [(record["name"], record["task"]) for record in self.tasks]


class TaskResult(object):
    def __init__(self, record):
        self.name = record["name"]
        self.task = record["task"]
        self.group = record.get("group", "default")
        self.status = "pass"
        self.outputs = {}
        self.elapsed = 0.0
        self.error = None
        self.bounds = None
        self.value = None

    def to_dict(self):
        out = {"name": self.name, "task": self.task, "status": self.status,
               "outputs": self.outputs, "elapsed": round(self.elapsed, 6)}
        if self.error is not None:
            out["error"] = self.error
        if self.bounds is not None:
            out["bounds"] = self.bounds
        return out


class Report(object):
    """
    Per-task outcomes of one scenario run.
    """

    def __init__(self, path):
        self.path = path
        self.tasks = []

    @property
    def status(self):
        return "pass" if all(t.status == "pass" for t in self.tasks) else "fail"

    @property
    def exit_code(self):
        return 0 if self.status == "pass" else 1

    def to_dict(self):
        return {"schema": SCHEMA_VERSION, "scenario": self.path, "status": self.status,
                "tasks": [t.to_dict() for t in self.tasks]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def summary(self):
        """Human-readable lines, one per task plus a total."""
        lines = []
        for t in self.tasks:
            line = "%-6s %-20s %s" % (t.status.upper(), t.task, t.name)
            if t.error:
                line += ": %s" % t.error["message"]
            lines.append(line)
        passed = sum(1 for t in self.tasks if t.status == "pass")
        lines.append("%d/%d tasks passed" % (passed, len(self.tasks)))
        return lines


class Runner(object):
    """
    Executes the tasks of a Scenario in order.
    """

    def __init__(self, scenario):
        self.scenario = scenario
        self.values = {}

    def run(self):
        report = Report(self.scenario.path)
        aborted = set()
        for record in self.scenario.tasks:
            result = TaskResult(record)
            report.tasks.append(result)
            if result.group in aborted:
                result.status = "skipped"
                continue
            start = time.time()
            try:
                self.dispatch(record, result)
            except TaskFailed as exc:
                result.status = "fail"
                result.error = {"type": "TaskFailed", "message": exc.msg}
            except _CHECK_FAILURES as exc:
                result.status = "fail"
                result.error = {"type": type(exc).__name__, "message": exc.msg}
            except SuperjetError as exc:
                result.status = "error"
                result.error = {"type": type(exc).__name__, "message": exc.msg}
                aborted.add(result.group)
            result.elapsed = time.time() - start
            if result.value is not None:
                self.values[result.name] = result.value
            log.info("task %s: %s", result.name, result.status,
                     extra={"task_name": result.name, "task_kind": result.task,
                            "status": result.status, "elapsed": result.elapsed})
        return report

    def dispatch(self, record, result):
        handler = getattr(self, "task_" + record["task"].replace("-", "_"))
        handler(record, result)

    # helpers

    def _form(self, record):
        ref = record.get("ref")
        if ref is not None:
            value = self.values.get(ref)
            if value is None:
                raise ValidationError("ref '{ref}' produced no value", ref=ref)
            return value
        return _reduced(self.scenario.parse(record["form"]))

    def _expect(self, record, actual):
        text = record.get("expect")
        if text is None:
            return
        expected = self.scenario.parse(text)
        if isinstance(actual, LocalFunctional):
            expected = _functional(expected)
        elif isinstance(actual, ReducedOneForm):
            expected = _reduced(expected)
        if expected != actual:
            raise TaskFailed("expected {expected}, got {actual}",
                             expected=to_text(expected), actual=to_text(actual))

    # tasks

    def task_check_bihamiltonian(self, record, result):
        S = self.scenario.pair()
        brackets = {}
        for label, (a, b) in (("[P0,P0]", (S.P0, S.P0)), ("[P0,P1]", (S.P0, S.P1)),
                              ("[P1,P1]", (S.P1, S.P1))):
            brackets[label] = schouten(a, b).to_text()
        result.outputs = {"P0": S.P0.to_text(), "P1": S.P1.to_text(), "brackets": brackets}
        if not is_bihamiltonian(S.P0, S.P1):
            raise TaskFailed("the Schouten brackets of the pair do not vanish")

    def task_schouten(self, record, result):
        P = _functional(self.scenario.parse(record["p"]))
        Q = _functional(self.scenario.parse(record["q"]))
        bracket = schouten(P, Q)
        result.outputs = {"bracket": bracket.to_text()}
        result.value = bracket
        self._expect(record, bracket)

    def task_derivation(self, record, result):
        X = derivation_of(_functional(self.scenario.parse(record["p"])))
        outputs = {"superdeg": X.superdeg}
        for i in range(1, X.n + 1):
            outputs["u[%d]" % i] = X.image("even", i).to_text()
            outputs["th[%d]" % i] = X.image("odd", i).to_text()
        result.outputs = outputs

    def task_lie(self, record, result):
        which = record.get("with")
        if which is not None:
            S = self.scenario.pair()
            try:
                X = {"P0": S.D0, "P1": S.D1}[which]
            except KeyError:
                raise ValidationError("lie: 'with' must be P0 or P1")
        else:
            X = derivation_of(_functional(self.scenario.parse(record["p"])))
        form = self.scenario.parse(record["form"])
        if not isinstance(form, (OneForm, ReducedOneForm)):
            raise ValidationError("lie: form must be a 1-form")
        image = lie_derivative(X, form)
        reduced = reduce_mod_dx(image)
        result.outputs = {"result": image.to_text(), "reduced": reduced.to_text()}
        result.value = reduced
        self._expect(record, reduced)

    def task_indices(self, record, result):
        S = self.scenario.pair()
        ind = indices(S, self._form(record))
        result.outputs = {"indices": ind.to_text(), "single_variable": True}
        ind.check_single_variable()
        expect = record.get("expect")
        if expect is not None:
            wanted = [_scalar(text, S.n) for text in expect]
            if ind != wanted:
                raise TaskFailed("expected indices {expected}, got {actual}",
                                 expected=[w.to_text() for w in wanted], actual=ind.to_text())

    def task_tau(self, record, result):
        S = self.scenario.pair()
        tau = build_tau(S, self.scenario.central_invariants())
        cocycle = is_cocycle(S, tau)
        result.outputs = {"tau": to_text(tau), "cocycle": cocycle,
                          "indices": indices(S, tau).to_text()}
        result.value = tau
        if not cocycle:
            raise TaskFailed("tau is not a cocycle")
        self._expect(record, tau)

    def task_normalize(self, record, result):
        S = self.scenario.pair()
        normal, gauge = normalize_cocycle(S, self._form(record))
        outputs = normal.to_dict()
        outputs["form"] = to_text(normal.form)
        outputs["gauge"] = {"gamma": to_text(gauge.gamma), "alpha": to_text(gauge.alpha),
                            "beta": to_text(gauge.beta)}
        result.outputs = outputs
        result.value = normal.form

    def task_conformal(self, record, result):
        d = conformal_check(self.scenario.pair().f)
        result.outputs = {"d": [str(x) for x in d]}
        expect = record.get("expect")
        if expect is not None and [str(x) for x in d] != [str(x) for x in expect]:
            raise TaskFailed("expected d = {expected}, got {actual}",
                             expected=list(expect), actual=[str(x) for x in d])

    def task_euler(self, record, result):
        S = self.scenario.pair()
        cd = self.scenario.conformal_data()
        E = euler_field(S, cd)
        outputs = {}
        for i in range(1, S.n + 1):
            for s in range(3):
                outputs["u[%d,%d]" % (i, s)] = str(E.u_weight(i, s))
                outputs["th[%d,%d]" % (i, s)] = str(E.th_weight(i, s))
        result.outputs = {"weights": outputs}

    def task_central_invariants(self, record, result):
        S = self.scenario.pair()
        cd = self.scenario.conformal_data()
        law = conformal_central_invariants(cd)
        result.outputs = {"exponents": [str(m) for m in law.exponents]}
        if self.scenario.structure.get("c"):
            residual = index_ode_check(S, cd, self.scenario.central_invariants())
            result.outputs["residual"] = residual.to_text()
            if not residual.is_zero():
                raise TaskFailed("c does not satisfy the central invariant equation")

    def task_delta_minus_one(self, record, result):
        S = self.scenario.pair()
        target = self.scenario.parse(record["expr"])
        if isinstance(target, LocalFunctional):
            target = target.density
        once = delta_minus_one(S, target)
        twice = delta_minus_one(S, once)
        result.outputs = {"result": once.to_text(), "square_zero": not twice}
        if twice:
            raise TaskFailed("Delta_{-1} squared does not vanish")

    def task_window(self, record, result):
        n, p, d = self.scenario.n, int(record["p"]), int(record["d"])
        result.outputs = {"in_index_set": (p, d) in index_set(n),
                          "vbh_guaranteed_zero": vbh_guaranteed_zero(n, p, d),
                          "omega_lambda": omega_lambda_window(n, p, d),
                          "cases": sorted(window_cases(n, p, d))}

    def task_atlas(self, record, result):
        result.outputs = atlas(record["space"], self.scenario.n,
                               int(record["p_max"]), int(record["d_max"])).to_dict()

    def task_probe(self, record, result):
        S = self.scenario.pair()
        target = record.get("target")
        if target is not None:
            target = _reduced(self.scenario.parse(target))
        bound = record.get("udeg_bound")
        problem = AnsatzProblem(int(record["p"]), int(record["d"]),
                                udeg_bound=None if bound is None else int(bound),
                                mode=record.get("mode") or "kernel2", target=target,
                                through=record.get("through") or "D0D1")
        probe = ansatz_solve(S, problem)
        result.outputs = probe.to_dict()
        result.bounds = {"udeg": problem.udeg_bound}
        expect = record.get("expect")
        if expect is not None:
            got = probe.dimension if problem.mode == "kernel2" else probe.in_image
            if got != (int(expect) if problem.mode == "kernel2" else bool(expect)):
                raise TaskFailed("expected {expected}, got {actual}", expected=expect, actual=got)


def load_scenario(path):
    return Scenario.from_file(path)


def run_scenario(path):
    """
    Validate and run the scenario at path.

    :returns: Report
    :raises ValidationError: before anything runs, if the document is invalid
    """
    scenario = path if isinstance(path, Scenario) else Scenario.from_file(path)
    log.debug("running scenario", extra={"scenario": scenario.path, "tasks": len(scenario.tasks)})
    return Runner(scenario).run()
