"""Scenario files: parse, validate, emit, and run them into certified reports.

A scenario is a JSON document with the fields ``field``, ``base_map``,
``r``, ``modules``, ``triples`` and ``tasks``.  Relation matrices have one
row per generator and one column per relation; alpha matrices have one row
per target generator.
"""

from __future__ import annotations

import json
import time
from importlib import resources
from dataclasses import dataclass, field

from .errors import DegreeError, ParseError, Pbk0Error, ScenarioError, TripleError
from .grmod import GradedFreeModule, GradedMap, GradedModulePresentation
from .k0 import (
    K0FormalClass,
    class_invariants,
    det_invariant,
    det_text,
    eta_coerce,
    hilbert_vector,
    phi_decompose,
    rank_vector,
    regularize_class,
    roundtrip_verify,
    triangularity,
    u_map,
    v_map,
)
from .polyalg.field import FieldSpec
from .polyalg.ring import BaseRingSpec, PolyRing
from .quillen import koszul_resolution, quillen_resolution, relative_quillen_resolution
from .relcat import validate_triple
from .sheafcoh import (
    DEFAULT_MAX_TWIST,
    BaseMap,
    ProjBundleMap,
    Sheaf,
    is_mumford_regular,
    is_vector_bundle,
    pushforward_module,
    sheaf_cohomology_dim,
)

FIELDS = ("field", "base_map", "r", "modules", "triples", "tasks")
OPS = (
    "sheaf_cohomology_dim",
    "is_mumford_regular",
    "is_vector_bundle",
    "hilbert_vector",
    "pushforward",
    "quillen_resolution",
    "koszul_resolution",
    "u_map",
    "v_map",
    "phi_decompose",
    "regularize_class",
    "det_invariant",
    "roundtrip_verify",
    "triangularity",
)


@dataclass
class Scenario:
    data: dict
    field: FieldSpec
    base_map: BaseMap
    r: int
    context: ProjBundleMap
    modules: dict
    triples: dict
    tasks: list


@dataclass
class Config:
    max_twist: int = DEFAULT_MAX_TWIST
    field: str | None = None


# -- parsing ----------------------------------------------------------------------------


def _line_of(text, needle):
    if text is None:
        return None
    for k, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return k
    return None


def _fail(message, fld, text=None, needle=None):
    raise ScenarioError(message, fld, _line_of(text, needle) if needle else None)


def _parse_poly(ring, s, path, text):
    if not isinstance(s, str):
        _fail(f"expected a polynomial string, got {s!r}", path, text)
    try:
        return ring.parse(s)
    except ParseError as e:
        _fail(str(e), path, text, json.dumps(s))


def _build_module(name, spec, base, r, text):
    path = f"modules.{name}"
    if not isinstance(spec, dict) or "twists" not in spec:
        _fail("module needs 'twists'", path, text, json.dumps(name))
    over = spec.get("over", "bundle")
    if over not in ("bundle", "base"):
        _fail(f"unknown 'over' value {over!r}", path + ".over", text, json.dumps(name))
    ring = PolyRing(base, r if over == "bundle" else None)
    twists = spec["twists"]
    if not isinstance(twists, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in twists):
        _fail("twists must be a list of integers", path + ".twists", text, json.dumps(name))
    if over == "base" and any(twists):
        _fail("modules over the base have twists 0", path + ".twists", text, json.dumps(name))
    rows = spec.get("relations", [])
    if rows and (len(rows) != len(twists) or len({len(row) for row in rows}) != 1):
        _fail("relation matrix needs one row per generator and equal row lengths", path + ".relations", text, json.dumps(name))
    ncols = len(rows[0]) if rows else 0
    polys = [[_parse_poly(ring, s, f"{path}.relations[{i}][{j}]", text) for j, s in enumerate(row)] for i, row in enumerate(rows)]
    cols = []
    for j in range(ncols):
        degs = set()
        v = {}
        for i in range(len(twists)):
            p = polys[i][j]
            if p.is_zero():
                continue
            if not p.is_homogeneous():
                _fail(f"relation entry ({i},{j}) is not homogeneous", f"{path}.relations[{i}][{j}]", text, json.dumps(rows[i][j]))
            degs.add(p.xdegree() - twists[i])
            for e, c in p.terms.items():
                v[(i, e)] = c
        if len(degs) > 1:
            _fail(f"degree mismatch in relation column {j}", f"{path}.relations", text, json.dumps(name))
        cols.append(v)
    P = GradedModulePresentation.from_vectors(ring, twists, cols)
    norm = {"twists": list(twists), "relations": [[str(p) for p in row] for row in polys]}
    if over == "base":
        norm["over"] = "base"
    return P, norm


def _build_triple(name, spec, modules, context, text):
    path = f"triples.{name}"
    for k in ("left", "right", "alpha"):
        if k not in spec:
            _fail(f"triple needs {k!r}", path, text, json.dumps(name))
    for k in ("left", "right"):
        if spec[k] not in modules:
            _fail(f"undefined module {spec[k]!r}", f"{path}.{k}", text, json.dumps(spec[k]))
    L, R = modules[spec["left"]], modules[spec["right"]]
    over_bundle = L.ring.r is not None
    if (R.ring.r is not None) != over_bundle:
        _fail("left and right live over different spaces", path, text, json.dumps(name))
    ctx = context if over_bundle else context.base_map
    ring_B = PolyRing(context.base_map.target, L.ring.r)
    rows = spec["alpha"]
    if len(rows) != R.rank or any(len(row) != L.rank for row in rows):
        _fail(f"alpha must be {R.rank}x{L.rank}", f"{path}.alpha", text, json.dumps(name))
    M = [[_parse_poly(ring_B, s, f"{path}.alpha[{i}][{j}]", text) for j, s in enumerate(row)] for i, row in enumerate(rows)]
    try:
        alpha = GradedMap(GradedFreeModule(ring_B, list(L.twists)), GradedFreeModule(ring_B, list(R.twists)), M)
    except DegreeError as e:
        _fail(f"degree mismatch: {e}", f"{path}.alpha[{e.row}][{e.col}]", text, json.dumps(name))
    wrap = Sheaf if over_bundle else (lambda P: P)
    try:
        T = validate_triple(wrap(L), alpha, wrap(R), ctx)
    except TripleError as e:
        _fail(f"invalid triple ({e.reason}): {e}", path, text, json.dumps(name))
    norm = {"left": spec["left"], "right": spec["right"], "alpha": [[str(p) for p in row] for row in M]}
    return T, norm


def _check_refs(args, modules, triples, earlier, path, text):
    def walk(x, p):
        if isinstance(x, dict):
            for k, v in x.items():
                if k == "module" and v not in modules:
                    _fail(f"undefined module {v!r}", f"{p}.module", text, json.dumps(v))
                if k == "triple" and v not in triples:
                    _fail(f"undefined triple {v!r}", f"{p}.triple", text, json.dumps(v))
                if k == "ref" and v not in earlier:
                    _fail(f"undefined task result {v!r}", f"{p}.ref", text, json.dumps(v))
                walk(v, f"{p}.{k}")
        elif isinstance(x, list):
            for i, v in enumerate(x):
                walk(v, f"{p}[{i}]")

    walk(args, path)


def build_scenario(data: dict, text: str | None = None, field_override: str | None = None) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    for k in data:
        if k not in FIELDS:
            _fail(f"unknown field {k!r}", k, text, json.dumps(k))
    for k in FIELDS:
        if k not in data:
            raise ScenarioError(f"missing field {k!r}", k)
    try:
        fld = FieldSpec.parse(field_override or data["field"])
    except Pbk0Error as e:
        _fail(str(e), "field", text, '"field"')
    r = data["r"]
    if not isinstance(r, int) or isinstance(r, bool) or not 1 <= r <= 3:
        _fail("r out of range", "r", text, '"r"')
    bm = data["base_map"]
    if not isinstance(bm, dict) or bm.get("kind") not in BaseMap.KINDS:
        kind = bm.get("kind") if isinstance(bm, dict) else bm
        _fail(f"unknown base-map kind {kind!r}", "base_map.kind", text, '"kind"')
    try:
        src = BaseRingSpec.parse(bm["source"], fld)
        tgt = BaseRingSpec.parse(bm["target"], fld)
        f = BaseMap(src, tgt, bm["kind"])
    except (KeyError, Pbk0Error) as e:
        _fail(f"bad base map: {e}", "base_map", text, '"base_map"')
    ctx = ProjBundleMap(f, r)
    modules, mnorm = {}, {}
    for name, spec in data["modules"].items():
        modules[name], mnorm[name] = _build_module(name, spec, src, r, text)
    triples, tnorm = {}, {}
    for name, spec in data["triples"].items():
        if name in modules:
            _fail(f"name {name!r} is used twice", f"triples.{name}", text, json.dumps(name))
        triples[name], tnorm[name] = _build_triple(name, spec, modules, ctx, text)
    tasks, earlier = [], set()
    for k, task in enumerate(data["tasks"]):
        path = f"tasks[{k}]"
        if not isinstance(task, dict) or task.get("op") not in OPS:
            op = task.get("op") if isinstance(task, dict) else task
            _fail(f"unknown operation {op!r}", f"{path}.op", text, json.dumps(op))
        args = task.get("args", {})
        _check_refs(args, modules, triples, earlier, f"{path}.args", text)
        t = {"op": task["op"], "args": args}
        if "expect" in task:
            t["expect"] = task["expect"]
        if "name" in task:
            if task["name"] in earlier:
                _fail(f"task name {task['name']!r} is used twice", f"{path}.name", text, json.dumps(task["name"]))
            earlier.add(task["name"])
            t["name"] = task["name"]
        tasks.append(t)
    norm = {
        "field": str(fld),
        "base_map": {"kind": f.kind, "source": str(src), "target": str(tgt)},
        "r": r,
        "modules": mnorm,
        "triples": tnorm,
        "tasks": tasks,
    }
    return Scenario(norm, fld, f, r, ctx, modules, triples, tasks)


def parse_scenario(text: str, field_override: str | None = None) -> Scenario:
    """Parse and fully validate a scenario document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e.msg}", None, e.lineno) from None
    return build_scenario(data, text, field_override)


def bundled_text(name: str) -> str:
    """Text of a scenario shipped with the package, e.g. ``"euler_p1"``."""
    return resources.files("pbk0").joinpath("data", f"{name}.json").read_text(encoding="utf-8")


def emit_scenario(s: Scenario) -> str:
    """Canonical JSON text; emit(parse(emit(s))) is byte-identical."""
    return json.dumps(s.data, sort_keys=True, indent=2) + "\n"


# -- running ----------------------------------------------------------------------------


@dataclass
class TaskResult:
    index: int
    op: str
    status: str
    result: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    message: str = ""
    name: str | None = None
    seconds: float = 0.0

    def to_dict(self):
        d = {"index": self.index, "op": self.op, "status": self.status, "result": self.result, "certificates": self.certificates}
        if self.message:
            d["message"] = self.message
        if self.name:
            d["name"] = self.name
        return d


@dataclass
class Report:
    tasks: list = field(default_factory=list)

    def counts(self):
        out = {"PASS": 0, "FAIL": 0, "ERROR": 0}
        for t in self.tasks:
            out[t.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        c = self.counts()
        if c["ERROR"]:
            return 2
        return 1 if c["FAIL"] else 0

    def to_json(self) -> str:
        # timing stays out of the machine-readable form so reruns are identical
        doc = {"tasks": [t.to_dict() for t in self.tasks], "summary": self.counts()}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = []
        for t in self.tasks:
            label = f" [{t.name}]" if t.name else ""
            lines.append(f"task {t.index} {t.op}{label}: {t.status}")
            for k, v in t.certificates.items():
                lines.append(f"  {k}: {'PASS' if v else 'FAIL'}")
            for k, v in t.result.items():
                lines.append(f"  {k}: {_fmt(v)}")
            if t.message:
                lines.append(f"  message: {t.message}")
            lines.append(f"  time: {t.seconds:.3f} s")
        c = self.counts()
        lines.append(f"summary: {c['PASS']} PASS, {c['FAIL']} FAIL, {c['ERROR']} ERROR")
        return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, list) and all(isinstance(x, (int, str)) for x in v):
        return "(" + ", ".join(str(x) for x in v) + ")"
    return json.dumps(v, sort_keys=True) if not isinstance(v, str) else v


class _Env:
    def __init__(self, s: Scenario, config: Config):
        self.s = s
        self.config = config
        self.results = {}

    def module(self, name):
        P = self.s.modules[name]
        return Sheaf(P) if P.ring.r is not None else P

    def klass(self, spec, over_bundle=None):
        if isinstance(spec, dict) and "ref" in spec:
            c = self.results[spec["ref"]]
            if not isinstance(c, K0FormalClass):
                raise Pbk0Error(f"result {spec['ref']!r} is not a class")
            return c
        if isinstance(spec, dict):
            spec = [spec]
        flavor = "Q"
        terms = []
        for term in spec:
            T = self.s.triples[term["triple"]]
            terms.append((T, int(term.get("mult", 1))))
            flavor = term.get("flavor", flavor)
        if terms:
            ctx = terms[0][0].context
        else:
            ctx = self.s.context if over_bundle in (None, True) else self.s.base_map
        return K0FormalClass(ctx, terms, flavor)

    def vector(self, spec):
        if isinstance(spec, dict) and "ref" in spec:
            return self.results[spec["ref"]]
        return [self.klass(c, over_bundle=False) for c in spec]


def _class_text(c: K0FormalClass):
    return [f"{m} * {T.key()}" for T, m in c.terms]


def _run_task(env: _Env, task: dict):
    op, a = task["op"], task.get("args", {})
    s = env.s
    res, certs, store = {}, {}, None
    if op == "sheaf_cohomology_dim":
        res["value"] = sheaf_cohomology_dim(env.module(a["module"]), int(a.get("d", 0)), int(a["q"]))
    elif op == "is_mumford_regular":
        res["value"] = is_mumford_regular(env.module(a["module"]))
    elif op == "is_vector_bundle":
        res["value"] = is_vector_bundle(env.module(a["module"]), int(a["n"]))
    elif op == "hilbert_vector":
        target = env.module(a["module"]) if "module" in a else env.klass(a["class"])
        res["value"] = hilbert_vector(target)
    elif op == "pushforward":
        pf = pushforward_module(env.module(a["module"]))
        res["rank"] = pf.rank
        certs["sections certified"] = pf.certified
    elif op == "quillen_resolution":
        if "triple" in a:
            rq = relative_quillen_resolution(s.triples[a["triple"]])
            res["ranks"] = [lr[0] for lr in rq.ranks]
            res["alphas"] = [[[str(p) for p in row] for row in st.alpha.matrix] for st in rq.stages]
            certs["Z_r = 0"] = rq.certificate["Z_r_zero"]
            certs["left long exact"] = rq.certificate["left"]["long_exact"]
            certs["right long exact"] = rq.certificate["right"]["long_exact"]
            certs["squares commute"] = rq.certificate["squares_commute"]
        else:
            q = quillen_resolution(env.module(a["module"]))
            res["ranks"] = list(q.ranks)
            certs["Z_r = 0"] = q.certificate["Z_r_zero"]
            certs["stages exact"] = q.certificate["sequences_exact"]
            certs["long exact"] = q.certificate["long_exact"]
    elif op == "koszul_resolution":
        X = s.triples[a["triple"]] if "triple" in a else env.module(a["module"])
        kz = koszul_resolution(X)
        res["ranks"] = [F.rank for F in kz.terms]
        certs["exact"] = kz.certificate["exact"]
    elif op == "u_map":
        store = u_map(env.vector(a["vector"]), s.r)
        res["class"] = _class_text(store)
    elif op == "v_map":
        store = v_map(env.klass(a["class"]), int(a["i"]))
        res["class"] = _class_text(store)
        res["ranks"] = rank_vector([store])
    elif op == "phi_decompose":
        store = phi_decompose(env.klass(a["class"]))
        res["vector"] = [_class_text(c) for c in store]
        res["ranks"] = rank_vector(store)
        res["det_vector"] = [det_text(det_invariant(eta_coerce(c) if c.flavor == "Q" else c)) for c in store]
    elif op == "regularize_class":
        rg = regularize_class(env.klass(a["class"]), env.config.max_twist)
        store = rg.cls
        res["class"] = _class_text(store)
        res["rounds"] = rg.rounds
        certs["koszul exact"] = all(c["koszul_exact"] for c in rg.certificates)
        inv = class_invariants(store)
        res["hilbert"] = inv["hilbert"]
    elif op == "det_invariant":
        c = env.klass(a["class"])
        res["value"] = det_text(det_invariant(eta_coerce(c) if c.flavor == "Q" else c))
    elif op == "roundtrip_verify":
        inp = env.klass(a["class"]) if "class" in a else env.vector(a["vector"])
        rep = roundtrip_verify(inp, max_twist=env.config.max_twist)
        certs["(a) relative resolutions exact"] = rep.checks["a"]
        certs["(b) triangularity"] = rep.checks["b"]
        certs["(c) invariants agree"] = rep.checks["c"]
        if "det_vector" in rep.details:
            res["det_vector"] = [x if isinstance(x, str) else det_text(x) for x in rep.details["det_vector"]]
        if "ranks" in rep.details:
            res["ranks"] = rep.details["ranks"]
        if rep.witness:
            res["witness"] = rep.witness
    elif op == "triangularity":
        T = s.triples[a["triple"]]
        tri = triangularity(T, int(a["j"]), s.r)
        for (i, j), ok in sorted(tri.items()):
            certs[f"v{i} u{j}"] = ok
    return res, certs, store


def _compare(expect, res):
    bad = []
    for k, want in expect.items():
        got = json.loads(json.dumps(res.get(k)))
        if got != want:
            bad.append(f"{k}: expected {json.dumps(want)}, got {json.dumps(got)}")
    return bad


def run_scenario(s: Scenario, config: Config | None = None) -> Report:
    """Run tasks in order; failures and errors are captured per task."""
    config = config or Config()
    env = _Env(s, config)
    report = Report()
    for k, task in enumerate(s.tasks):
        t0 = time.perf_counter()
        tr = TaskResult(k, task["op"], "PASS", name=task.get("name"))
        try:
            res, certs, store = _run_task(env, task)
            tr.result, tr.certificates = res, certs
            if task.get("name") is not None:
                env.results[task["name"]] = store
            problems = [f"certificate {c} failed" for c, ok in certs.items() if not ok]
            problems += _compare(task.get("expect", {}), res)
            if problems:
                tr.status, tr.message = "FAIL", "; ".join(problems)
        except (Pbk0Error, KeyError, ValueError, TypeError) as e:
            tr.status = "ERROR"
            tr.message = f"{type(e).__name__}: {e}"
        tr.seconds = time.perf_counter() - t0
        report.tasks.append(tr)
    return report
