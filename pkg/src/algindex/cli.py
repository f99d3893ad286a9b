"""Batch front end: parse a job document, dispatch computations, emit results.

A job document (YAML, schema in schema.json) declares named algebroids,
metrics, connections, densities, forms, domains and groupoids, plus a list
of requested computations.  Subcommands filter the computation list by
operation family; ``run`` executes everything.  Output is deterministic:
byte-identical for identical documents and budgets.

Exit codes: 0 success, 1 diagnostic/violation, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

try:
    from importlib import resources as _resources
except ImportError:  # pragma: no cover
    _resources = None

import jsonschema
import yaml

from . import algebroid as alg
from . import chern_weil as cw
from . import groupoid as gp
from . import thom_index as ti
from .forms import AlgForm, MixedForm, Representation, cohomology_const
from .quadrature import QuadratureError
from .scalars import Chart, scalar_to_string


class DocumentError(Exception):
    """Parse or schema problem: exit code 2."""


class ComputationError(Exception):
    """Semantic violation or failed check: exit code 1."""


_OP_FAMILIES = {
    "validate": ("validate",),
    "cohomology": ("cohomology",),
    "charclass": ("charclass",),
    "curvature": ("curvature",),
    "index": ("index",),
    "groupoid": ("groupoid-cohomology", "convolution-table", "trace"),
    "thom-check": ("thom-check", "modular-cocycle"),
}


def load_schema():
    data = _resources.files("algindex").joinpath("schema.json").read_text()
    return json.loads(data)


def load_document(path):
    if path == "-":
        text = sys.stdin.read()
        name = "<stdin>"
    else:
        try:
            with open(path, "r") as handle:
                text = handle.read()
        except OSError as exc:
            raise DocumentError(f"cannot read {path}: {exc}") from exc
        name = path
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise DocumentError(f"{name}: YAML parse error{where}: {exc}") from exc
    if not isinstance(data, dict):
        raise DocumentError(f"{name}: document must be a mapping")
    try:
        jsonschema.validate(data, load_schema())
    except jsonschema.ValidationError as exc:
        path_str = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise DocumentError(f"{name}: schema violation at {path_str}: {exc.message}")
    return data


# ---------------------------------------------------------------------------
# building the declared objects
# ---------------------------------------------------------------------------


class JobContext:
    def __init__(self, document):
        self.document = document
        backend = document.get("backend", "poly")
        names = tuple(document.get("coordinates", ()))
        self.chart = Chart(names, backend)
        self.algebroids = {}
        self.metrics = {}
        self.connections = {}
        self.representations = {}
        self.densities = {}
        self.forms = {}
        self.domains = {}
        self.groupoids = {}
        try:
            self._build()
        except (ValueError, KeyError, alg.PresentationError) as exc:
            raise DocumentError(f"document error: {exc}") from exc

    def _build(self):
        for name, spec in sorted((self.document.get("algebroids") or {}).items()):
            self.algebroids[name] = self._build_algebroid(name, spec)
        for name, spec in sorted((self.document.get("metrics") or {}).items()):
            self.metrics[name] = self._build_metric(spec)
        for name, spec in sorted((self.document.get("connections") or {}).items()):
            self.connections[name] = self._build_connection(spec)
        for name, spec in sorted((self.document.get("representations") or {}).items()):
            conn = self._build_connection(spec)
            rep = Representation(conn.algebroid, conn.bundle_rank, conn.matrices)
            if not cw.validate_representation(rep):
                raise DocumentError(
                    f"representation {name!r} is not flat (nonzero curvature)"
                )
            self.representations[name] = rep
        for name, spec in sorted((self.document.get("densities") or {}).items()):
            A = self._algebroid(spec["algebroid"])
            self.densities[name] = ti.Density(A, spec.get("coefficient", 1))
        for name, spec in sorted((self.document.get("forms") or {}).items()):
            self.forms[name] = self._build_form(spec)
        for name, spec in sorted((self.document.get("domains") or {}).items()):
            self.domains[name] = self._build_domain(spec)
        for name, spec in sorted((self.document.get("groupoids") or {}).items()):
            self.groupoids[name] = self._build_groupoid(spec)

    def _algebroid(self, name):
        if name not in self.algebroids:
            raise DocumentError(f"unknown algebroid {name!r}")
        return self.algebroids[name]

    def _build_algebroid(self, name, spec):
        kind = spec["kind"]
        if kind == "tangent":
            return alg.tangent(self.chart.dim, self.chart, name)
        if kind == "abelian":
            return alg.abelian_bundle(
                self.chart.dim, spec["rank"], self.chart, name
            )
        if kind in ("lie_algebra", "action", "explicit"):
            rank = spec["rank"]
            chart = Chart((), "poly") if kind == "lie_algebra" else self.chart
            structure = {}
            for key, row in (spec.get("structure") or {}).items():
                a, b = (int(i) - 1 for i in key.split(","))
                coeffs = [chart.zero()] * rank
                for c, value in row.items():
                    coeffs[int(c) - 1] = chart.parse(str(value))
                structure[(a, b)] = coeffs
            if kind == "lie_algebra":
                anchor = [[] for _ in range(rank)]
            else:
                anchor = [
                    [chart.parse(str(v)) for v in row] for row in spec["anchor"]
                ]
            A = alg.AlgebroidPresentation(chart, rank, anchor, structure, name)
            A.pullback_data = None
            return A
        if kind == "pullback":
            parent = self._algebroid(spec["parent"])
            return alg.pullback(parent, spec.get("fiber_dim", parent.rank), name=name)
        if kind == "product":
            return alg.product(
                self._algebroid(spec["left"]), self._algebroid(spec["right"]), name
            )
        raise DocumentError(f"unknown algebroid kind {kind!r}")

    def _build_metric(self, spec):
        A = self._algebroid(spec["algebroid"])
        kind = spec.get("kind", "matrix")
        if kind == "identity":
            return cw.Metric.identity(A)
        if kind == "conformal":
            metric = cw.Metric.conformal(A, A.chart.parse(str(spec["factor"])))
        elif kind == "matrix":
            entries = [
                [A.chart.parse(str(v)) for v in row] for row in spec["entries"]
            ]
            metric = cw.Metric(A, entries)
        else:
            raise DocumentError(f"unknown metric kind {kind!r}")
        if not metric.check_positive_definite():
            raise DocumentError(
                f"metric on {A.name!r} is not positive definite"
            )
        return metric

    def _build_connection(self, spec):
        A = self._algebroid(spec["algebroid"])
        m = spec.get("bundle_rank", A.rank)
        if spec.get("kind") == "zero":
            return cw.GConnection.zero(A, m)
        if spec.get("kind") == "levi_civita":
            return cw.levi_civita(A, self._metric(spec["metric"]))
        if spec.get("kind") == "adjoint":
            mats = [
                [[A.bracket(a, b)[c] for b in range(A.rank)] for c in range(A.rank)]
                for a in range(A.rank)
            ]
            return cw.GConnection(A, A.rank, mats)
        matrices = [
            [[A.chart.parse(str(v)) for v in row] for row in mat]
            for mat in spec["matrices"]
        ]
        return cw.GConnection(A, m, matrices)

    def _metric(self, name):
        if name not in self.metrics:
            raise DocumentError(f"unknown metric {name!r}")
        return self.metrics[name]

    def _build_form(self, spec):
        A = self._algebroid(spec["algebroid"])
        degree = spec["degree"]
        coeffs = {}
        for key, value in (spec.get("coefficients") or {}).items():
            indices = tuple(int(i) - 1 for i in str(key).split(",")) if key else ()
            coeffs[indices] = (A.chart.parse(str(value)),)
        return AlgForm(A, degree, coeffs)

    def _build_domain(self, spec):
        kind = spec["type"]
        if kind == "point":
            return ti.PointDomain()
        if kind == "box":
            return ti.BoxDomain([(Fraction(str(lo)), Fraction(str(hi)))
                                 for lo, hi in spec["bounds"]])
        if kind == "plane":
            return ti.PlaneDomain()
        raise DocumentError(f"unknown domain type {kind!r}")

    def _build_groupoid(self, spec):
        kind = spec["kind"]
        if kind == "pair":
            return gp.pair_groupoid(spec["size"])
        if kind == "cyclic":
            return gp.cyclic_group_groupoid(spec["order"])
        if kind == "explicit":
            return gp.FiniteGroupoid(
                spec["objects"],
                [tuple(a) if isinstance(a, list) else a for a in spec["arrows"]],
                spec["source"],
                spec["target"],
                spec["unit"],
                spec["inverse"],
                {tuple(k.split("|")): v for k, v in spec["compose"].items()},
            )
        raise DocumentError(f"unknown groupoid kind {kind!r}")


# ---------------------------------------------------------------------------
# serialization helpers (canonical, deterministic)
# ---------------------------------------------------------------------------


def _fmt_float(value) -> str:
    return f"{float(value):.12g}"


def _fmt_value(value):
    if isinstance(value, Fraction):
        return str(value)
    return _fmt_float(value)


def _serialize_form(form: AlgForm):
    return [
        [",".join(str(i + 1) for i in indices), scalar_to_string(values[0])]
        for indices, values in sorted(form.coeffs.items())
    ]


def _serialize_mixed(mixed: MixedForm):
    return {
        str(degree): _serialize_form(part)
        for degree, part in sorted(mixed.components.items())
    }


def _serialize_report(report):
    return {
        "status": "valid" if report.ok else "invalid",
        "violations": [
            {
                "kind": v.kind,
                "indices": list(v.indices),
                "residual": scalar_to_string(v.residual),
            }
            for v in report.violations
        ],
    }


def _serialize_integral(result: ti.IntegrationResult):
    return {
        "value": _fmt_value(result.value),
        "exact": result.value_is_exact,
        "error": _fmt_float(result.error),
    }


# ---------------------------------------------------------------------------
# computation dispatch
# ---------------------------------------------------------------------------


def _lookup(table, name, kind, required=True):
    if name is None:
        if required:
            raise DocumentError(f"missing required {kind} reference")
        return None
    if name not in table:
        raise DocumentError(f"unknown {kind} {name!r}")
    return table[name]


def _run_computation(ctx: JobContext, comp, overrides):
    op = comp["op"]
    if op == "validate":
        targets = [comp["algebroid"]] if "algebroid" in comp else sorted(ctx.algebroids)
        results = {}
        ok = True
        for name in targets:
            report = ctx._algebroid(name).validate()
            results[name] = _serialize_report(report)
            ok = ok and report.ok
        if not ok:
            raise ComputationError(json.dumps(results, sort_keys=True))
        return results

    if op == "cohomology":
        A = ctx._algebroid(comp["algebroid"])
        rep = _lookup(ctx.representations, comp.get("representation"),
                      "representation", required=False)
        betti = cohomology_const(A, rep, comp.get("max_degree"))
        return {"betti": betti}

    if op == "curvature":
        conn = _lookup(ctx.connections, comp["connection"], "connection")
        R = cw.curvature(conn)
        return {
            "curvature": [[_serialize_form(f) for f in row] for row in R.entries]
        }

    if op == "charclass":
        genus = comp["genus"]
        truncate = overrides.get("truncate") or comp.get("truncate")
        metric = ctx._metric(comp["metric"]) if "metric" in comp else None
        if genus == "euler":
            if metric is None:
                raise DocumentError("the euler class needs a metric")
            form = ti.euler_class(metric.algebroid, metric)
            return {"class": _serialize_mixed(MixedForm.from_form(form))}
        if "connection" in comp:
            source = _lookup(ctx.connections, comp["connection"], "connection")
        elif metric is not None:
            source = cw.levi_civita(metric.algebroid, metric)
        else:
            raise DocumentError("charclass needs a connection or a metric")
        chern_degree = None
        if genus in ("chern1", "chern2", "chern3", "chern4"):
            chern_degree = int(genus[-1])
            genus = "chern"
        mixed = cw.char_class(
            source, genus, truncate, metric=metric, chern_degree=chern_degree
        )
        return {"class": _serialize_mixed(mixed)}

    if op == "index":
        kind = comp["kind"]
        A = ctx._algebroid(comp["algebroid"])
        metric = ctx._metric(comp["metric"])
        density = _lookup(ctx.densities, comp["density"], "density")
        domain = _lookup(ctx.domains, comp.get("domain"), "domain", required=False)
        nu = _lookup(ctx.forms, comp.get("nu"), "form", required=False)
        E = _lookup(ctx.connections, comp.get("connection"), "connection",
                    required=False)
        tol = float(overrides.get("tolerance") or comp.get("tolerance", 1e-9))
        budget = int(overrides.get("budget") or comp.get("budget", 4000))
        try:
            if kind == "euler":
                result = ti.index_euler(A, metric, density, domain, tol, budget)
            elif kind == "signature":
                result = ti.index_signature(
                    A, metric, nu, density, domain, E, tol, budget
                )
            elif kind == "dirac":
                result = ti.index_dirac(A, metric, E, nu, density, domain, tol, budget)
            else:
                result = ti.index_general(
                    A, metric, E, nu, density, kind, domain, tol, budget
                )
        except (ti.NonInvariantDensityError, ti.UnresolvedEulerDivisionError,
                QuadratureError, ValueError) as exc:
            raise ComputationError(str(exc)) from exc
        out = _serialize_integral(result.integral)
        out["i_power"] = result.i_power
        if result.note:
            out["note"] = result.note
        return out

    if op == "modular-cocycle":
        A = ctx._algebroid(comp["algebroid"])
        density = _lookup(ctx.densities, comp["density"], "density")
        cocycle = ti.modular_cocycle(A, density)
        return {
            "cocycle": _serialize_form(cocycle),
            "unimodular": cocycle.is_zero(),
        }

    if op == "thom-check":
        A = ctx._algebroid(comp["algebroid"])
        form = _lookup(ctx.forms, comp["form"], "form")
        density = _lookup(ctx.densities, comp["density"], "density")
        domain = _lookup(ctx.domains, comp.get("domain"), "domain", required=False)
        tol = float(overrides.get("tolerance") or comp.get("tolerance", 1e-9))
        budget = int(overrides.get("budget") or comp.get("budget", 4000))
        try:
            check = ti.thom_compatibility(A, form, density, domain, tol, budget)
        except (ti.NonInvariantDensityError, QuadratureError, ValueError) as exc:
            raise ComputationError(str(exc)) from exc
        result = {
            "base": _serialize_integral(check.base),
            "mapped": _serialize_integral(check.mapped),
            "compatible": check.compatible,
            "theta_closed": check.theta_closed,
            "theta_nondegenerate": check.theta_nondegenerate,
            "roundtrip_identity": check.roundtrip_identity,
        }
        if not (check.compatible and check.theta_closed
                and check.theta_nondegenerate and check.roundtrip_identity):
            raise ComputationError(json.dumps(result, sort_keys=True))
        return result

    if op == "groupoid-cohomology":
        G = _lookup(ctx.groupoids, comp["groupoid"], "groupoid")
        rep = gp.FiniteRep.trivial(G, comp.get("fiber_dim", 1))
        betti = gp.groupoid_cohomology(G, rep, comp.get("max_degree", 2))
        return {"betti": betti}

    if op == "convolution-table":
        G = _lookup(ctx.groupoids, comp["groupoid"], "groupoid")
        table = {}
        for g1 in sorted(G.arrows, key=str):
            f1 = gp.delta(G, g1)
            for g2 in sorted(G.arrows, key=str):
                conv = gp.convolve(f1, gp.delta(G, g2), G)
                support = {
                    str(g): str(v) for g, v in sorted(conv.items(), key=lambda kv: str(kv[0])) if v
                }
                if support:
                    table[f"{g1}*{g2}"] = support
        return {"table": table}

    if op == "trace":
        G = _lookup(ctx.groupoids, comp["groupoid"], "groupoid")
        weights = {x: Fraction(str(w)) for x, w in zip(G.objects, comp["weights"])}
        f = {g: Fraction(str(v)) for g, v in zip(G.arrows, comp["function"])}
        try:
            value = gp.trace(f, weights, G)
        except gp.GroupoidError as exc:
            raise ComputationError(str(exc)) from exc
        return {"trace": str(value)}

    raise DocumentError(f"unknown operation {op!r}")


def run_document(ctx: JobContext, families=None, overrides=None):
    """Execute the document's computations (optionally one family only)."""
    overrides = overrides or {}
    computations = ctx.document.get("computations", [])
    if families is not None:
        computations = [c for c in computations if c["op"] in families]
        if not computations and "validate" in families:
            # bare `validate` runs every declared algebroid
            computations = [
                {"op": "validate", "algebroid": name, "label": name}
                for name in sorted(ctx.algebroids)
            ]
    results = []
    failures = 0
    for position, comp in enumerate(computations):
        label = comp.get("label", f"{comp['op']}#{position}")
        try:
            outcome = _run_computation(ctx, comp, overrides)
            results.append({"label": label, "op": comp["op"], "ok": True,
                            "result": outcome})
        except ComputationError as exc:
            failures += 1
            results.append({"label": label, "op": comp["op"], "ok": False,
                            "error": str(exc)})
    return results, failures


def _emit(results, failures, fmt, out=None):
    out = out or sys.stdout
    if fmt == "json":
        payload = {"results": results, "failures": failures}
        out.write(json.dumps(payload, sort_keys=True, indent=2))
        out.write("\n")
        return
    for item in results:
        status = "ok" if item["ok"] else "FAIL"
        body = json.dumps(item.get("result", item.get("error")), sort_keys=True)
        out.write(f"{status} {item['op']} {item['label']}: {body}\n")
    out.write(f"{len(results) - failures}/{len(results)} computations succeeded\n")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="algindex",
        description="Lie algebroid characteristic calculus: batch computations "
        "from a YAML job document.",
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in list(_OP_FAMILIES) + ["run"]:
        p = sub.add_parser(command)
        p.add_argument("document", help="job document path, or - for stdin")
        p.add_argument("--truncate", type=int, default=None)
        p.add_argument("--tolerance", type=float, default=None)
        p.add_argument("--budget", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        document = load_document(args.document)
        ctx = JobContext(document)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    families = None if args.command == "run" else _OP_FAMILIES[args.command]
    overrides = {
        "truncate": args.truncate,
        "tolerance": args.tolerance,
        "budget": args.budget,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    try:
        results, failures = run_document(ctx, families, overrides)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(results, failures, args.format)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
