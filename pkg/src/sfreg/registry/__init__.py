"""Bundled catalog of worked examples with their expected blow-ups and verdicts."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from ..errors import NotOnCriticalSet, SfregError, UnknownId
from ..expr import parse_expr, to_polynomial
from ..psvf import PSVF, classify_sigma_point, sliding_equilibria
from ..regularize import SF_VARS, NonlinearFamily, blowup_linear, blowup_nonlinear
from ..sfgeom import classify_generic, predict_linear, predict_nonlinear, theorem_a_report
from ..transition import TransitionFunction, parse_rational

__all__ = ["ExampleRecord", "VerifyReport", "list_examples", "load", "verify", "verify_record",
           "load_all"]


@dataclass(frozen=True)
class ExampleRecord:
    id: str
    description: str
    kind: str
    data: dict = field(repr=False)

    @classmethod
    def from_json(cls, obj: dict) -> "ExampleRecord":
        return cls(obj["id"], obj.get("description", ""), obj.get("kind", "linear"), obj)

    def to_json(self) -> dict:
        return copy.deepcopy(self.data)

    def param_sets(self) -> list:
        """Base parameters merged with each sweep value (a single set without a sweep)."""
        base = dict(self.data.get("params", {}))
        sweep = self.data.get("sweep")
        if not sweep:
            return [base]
        (name, values), = sweep.items()
        return [{**base, name: v} for v in values]

    def params(self, override=None) -> dict:
        p = dict(self.data.get("params", {}))
        p.update(override or {})
        return p

    def psvf(self, params=None) -> PSVF:
        if self.kind == "nonlinear":
            return self.family(params).psvf()
        return PSVF.from_json(self.data["psvf"], self.params(params))

    def family(self, params=None) -> NonlinearFamily:
        return NonlinearFamily.from_json(self.data["family"], self.params(params))

    def phi(self, params=None) -> TransitionFunction:
        return TransitionFunction.from_json(self.data["phi"], self.params(params))

    def blowup(self, params=None):
        if self.kind == "nonlinear":
            return blowup_nonlinear(self.family(params), self.phi(params))
        return blowup_linear(self.psvf(params), self.phi(params))


def _data_dir():
    return resources.files(__package__).joinpath("data")


def _read_all() -> dict:
    out = {}
    for entry in _data_dir().iterdir():
        if entry.name.endswith(".json"):
            obj = json.loads(entry.read_text(encoding="utf-8"))
            out[obj["id"]] = obj
    return dict(sorted(out.items()))


def list_examples() -> list:
    return [{"id": k, "description": v.get("description", ""), "kind": v.get("kind", "linear")}
            for k, v in _read_all().items()]


def load(example_id: str) -> ExampleRecord:
    records = _read_all()
    if example_id not in records:
        raise UnknownId(f"no example {example_id!r}; known ids: {', '.join(records)}")
    return ExampleRecord.from_json(records[example_id])


def load_all() -> list:
    return [ExampleRecord.from_json(v) for v in _read_all().values()]


@dataclass
class VerifyReport:
    id: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    @property
    def blowup_match(self):
        found = [c["pass"] for c in self.checks if c["name"].startswith("blowup")]
        return all(found) if found else None

    def failures(self) -> list:
        return [c for c in self.checks if not c["pass"]]

    def to_json(self) -> dict:
        return {"id": self.id, "pass": self.passed, "blowup_match": self.blowup_match,
                "checks": self.checks}


def _label(params: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in sorted(params.items()))


def _poly_diff(expected, computed) -> list:
    """Coefficients on which two polynomials differ, as readable strings."""
    a = expected.with_vars(SF_VARS).terms
    b = computed.with_vars(SF_VARS).terms
    out = []
    for mono in sorted(set(a) | set(b), reverse=True):
        ea, eb = a.get(mono, Fraction(0)), b.get(mono, Fraction(0))
        if ea != eb:
            name = "*".join(f"{v}^{e}" for v, e in zip(SF_VARS, mono) if e) or "1"
            out.append(f"{name}: expected {ea}, computed {eb}")
    return out


def _check_phi(rec: ExampleRecord, params: dict) -> dict:
    name = f"phi[{_label(params)}]"
    try:
        tf = rec.phi(params)
        p = rec.params(params)
        e = parse_expr(rec.data["expected_phi"], set(p) | {"t"})
        e = e.substitute({k: parse_rational(v) for k, v in p.items()}) if p else e
        expected = to_polynomial(e, ("t",)).coeffs()
        got = list(tf.coeffs)
        n = max(len(expected), len(got))
        expected += [Fraction(0)] * (n - len(expected))
        got += [Fraction(0)] * (n - len(got))
        diff = [f"t^{k}: expected {a}, computed {b}" for k, (a, b) in enumerate(zip(expected, got)) if a != b]
        return {"name": name, "pass": not diff, "detail": diff or "exact match"}
    except SfregError as exc:
        return {"name": name, "pass": False, "detail": f"{type(exc).__name__}: {exc}"}


def _check_blowup(rec: ExampleRecord, params: dict) -> dict:
    name = f"blowup[{_label(params)}]"
    try:
        sfs = rec.blowup(params)
        p = {k: parse_rational(v) for k, v in rec.params(params).items()}
        allowed = set(SF_VARS) | set(p)
        diffs = []
        computed = sfs.polynomials()
        for label, text, got in (("f", rec.data["expected_blowup"]["f"], computed[0]),
                                 ("g", rec.data["expected_blowup"]["g"], computed[1])):
            e = parse_expr(text, allowed)
            e = e.substitute(p) if p else e
            exp = to_polynomial(e, SF_VARS)
            diffs += [f"{label} {d}" for d in _poly_diff(exp, got)]
        return {"name": name, "pass": not diffs, "detail": diffs or "exact match"}
    except SfregError as exc:
        return {"name": name, "pass": False, "detail": f"{type(exc).__name__}: {exc}"}


def _verdict(rec, params, point, method):
    if method == "generic":
        try:
            return classify_generic(rec.blowup(params), point).verdict
        except NotOnCriticalSet:
            return "off_critical_set"
    if method == "linear":
        return predict_linear(rec.psvf(params), rec.phi(params), y0=point[1], x0=point[0]).verdict
    if method == "nonlinear":
        return predict_nonlinear(rec.family(params), rec.phi(params), point).verdict
    raise ValueError(f"unknown method {method!r}")


def _check_verdicts(rec: ExampleRecord) -> list:
    out = []
    for item in rec.data.get("expected", []):
        params = item.get("params", {})
        point = tuple(float(parse_rational(v)) for v in item["point"])
        for method in item.get("methods", ["generic"]):
            name = f"verdict[{method}@({item['point'][0]},{item['point'][1]}),{_label(params)}]"
            try:
                got = _verdict(rec, params, point, method)
            except SfregError as exc:
                got = f"{type(exc).__name__}: {exc}"
            ok = got == item["verdict"]
            out.append({"name": name, "pass": ok,
                        "detail": got if ok else f"expected {item['verdict']}, computed {got}"})
    return out


def _lookup(report: dict, path: str):
    node = report
    for key in path.split("."):
        node = node[key]
    return node


def _check_theorem_a(rec: ExampleRecord) -> list:
    expect = rec.data.get("theorem_a")
    if not expect:
        return []
    params = rec.data.get("theorem_a_params", {})
    report = theorem_a_report(rec.psvf(params), rec.phi(params))
    out = []
    for path, want in expect.items():
        got = _lookup(report, path)
        out.append({"name": f"theorem_a[{path},{_label(params)}]", "pass": got == want,
                    "detail": f"expected {want}, computed {got}"})
    return out


def _check_sigma(rec: ExampleRecord) -> list:
    out = []
    for item in rec.data.get("sigma", []):
        params = item.get("params", {})
        got = classify_sigma_point(rec.psvf(params), float(parse_rational(item["y"]))).kind
        out.append({"name": f"sigma[y={item['y']},{_label(params)}]", "pass": got == item["kind"],
                    "detail": f"expected {item['kind']}, computed {got}"})
    if "sliding_equilibria" in rec.data:
        want = [float(parse_rational(v)) for v in rec.data["sliding_equilibria"]]
        got = sliding_equilibria(rec.psvf())
        ok = len(got) == len(want) and all(abs(a - b) <= 1e-10 for a, b in zip(sorted(got), sorted(want)))
        out.append({"name": "sliding_equilibria", "pass": ok,
                    "detail": f"expected {want}, computed {got}"})
    return out


def verify_record(obj) -> VerifyReport:
    """Recompute everything a record asserts and diff it against the stored values."""
    rec = obj if isinstance(obj, ExampleRecord) else ExampleRecord.from_json(obj)
    checks = []
    for params in rec.param_sets():
        if "expected_phi" in rec.data:
            checks.append(_check_phi(rec, params))
        if "expected_blowup" in rec.data:
            checks.append(_check_blowup(rec, params))
    checks += _check_verdicts(rec)
    checks += _check_theorem_a(rec)
    checks += _check_sigma(rec)
    return VerifyReport(rec.id, checks)


def verify(example_id: str) -> VerifyReport:
    return verify_record(load(example_id))
