"""Property suites over the seeded corpus, shared by the tests and ``pbk0 corpus``.

Each suite returns a list of ``Check`` records; nothing here raises on a
failed property, so a report can name every failing item.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import comb

from . import corpus as C
from .errors import Pbk0Error
from .grmod import GradedMap, hilbert_function, short_exact_cert
from .k0 import (
    K0FormalClass,
    class_invariants,
    det_invariant,
    eta_coerce,
    hilbert_vector,
    regularize_class,
    roundtrip_verify,
    triangularity,
    triple_det,
)
from .polyalg.field import QQ
from .polyalg.ring import BaseRingSpec, PolyRing
from .quillen import koszul_resolution, quillen_resolution, relative_quillen_resolution
from .relcat import make_morphism, sequence_exact
from .scenario import Report, TaskResult
from .sheafcoh import (
    BaseMap,
    ProjBundleMap,
    Sheaf,
    cech_line_bundle_dims,
    epsilon_map,
    is_mumford_regular,
    pullback_base_change,
    pullback_presentation,
    pushforward_module,
    saturated_section_dim,
    sheaf_cohomology_dim,
)


@dataclass
class Check:
    suite: str
    name: str
    ok: bool
    detail: str = ""


def _guard(suite, name, fn):
    try:
        ok, detail = fn()
        return Check(suite, name, bool(ok), detail)
    except Pbk0Error as e:
        return Check(suite, name, False, f"{type(e).__name__}: {e}")


# -- 1. cohomology of line bundles ------------------------------------------------------


def serre_closed_form(a, r, q):
    if q == 0:
        return comb(a + r, r) if a >= 0 else 0
    if q == r:
        return comb(-a - 1, r) if a <= -r - 1 else 0
    return 0


def serre_suite(rs=(1, 2), twists=range(-6, 7)):
    out = []
    for r in rs:
        ring = C.field_ring(QQ, r)
        for a in twists:
            F = Sheaf(C.line_bundle(ring, a))
            cech = cech_line_bundle_dims([a], r, 0)
            for q in range(r + 1):
                ext = sheaf_cohomology_dim(F, 0, q)
                want = serre_closed_form(a, r, q)
                out.append(Check("serre", f"P{r} O({a}) h^{q}", ext == cech[q] == want, f"ext={ext} cech={cech[q]} closed={want}"))
    return out


# -- 2. regularity suite ----------------------------------------------------------------


def _sheaf_props(item):
    F = item.value
    if not is_mumford_regular(F):
        return [Check("regularity", f"{item.name} not regular (skipped)", True)]
    out = []

    def twists():
        bad = [n for n in (1, 2, 3) if not is_mumford_regular(F.twist(n))]
        return not bad, f"non-regular twists {bad}"

    def eps():
        _, _, cert = epsilon_map(F)
        return cert["cokernel_zero_sheaf"], ""

    def projective():
        pf = pushforward_module(F)
        h0 = hilbert_function(pf.model, 0)
        return pf.certified and not pf.presentation.rels and pf.rank == h0, f"rank {pf.rank}, h0 {h0}"

    def base_change():
        fld = F.base.field
        g = BaseMap(F.base, BaseRingSpec(fld, ("t1",), ()))
        pf = pushforward_module(F)
        G = pullback_base_change(F, g)
        left = pushforward_module(G).presentation
        right = pullback_presentation(pf.presentation, g)
        return left.key() == right.key(), f"{left.key()} vs {right.key()}"

    out.append(_guard("regularity", f"{item.name} twists stay regular", twists))
    out.append(_guard("regularity", f"{item.name} coker(eps) = 0", eps))
    out.append(_guard("regularity", f"{item.name} pushforward projective", projective))
    out.append(_guard("regularity", f"{item.name} flat base change", base_change))
    return out


def ses_checks(fld=QQ, rs=(1, 2)):
    out = []
    for r in rs:
        for ses in C.ses_corpus(fld, r):
            def run(ses=ses):
                cert = short_exact_cert(ses.A, ses.f_cols, ses.B, ses.g_cols, ses.C)
                sheaves = [Sheaf(P) for P in (ses.A, ses.B, ses.C)]
                regular = all(is_mumford_regular(S) for S in sheaves)
                dims = [saturated_section_dim(S, 0) for S in sheaves]
                return cert["exact"] and regular and dims[1] == dims[0] + dims[2], f"exact={cert['exact']} regular={regular} h0={dims}"

            out.append(_guard("regularity", f"{fld}-P{r} {ses.name}: sections exact", run))
    return out


def regularity_suite(seed=0, rs=(1, 2)):
    items = C.sheaf_corpus(seed, rs=rs)
    out = []
    for it in items:
        out.extend(_sheaf_props(it))
    for fld in (QQ, C.GF(101)):
        out.extend(ses_checks(fld, rs))
    return out, len(items)


# -- 3. Quillen resolutions -------------------------------------------------------------


def quillen_suite(seed=0, rs=(1, 2)):
    out = []
    for it in C.sheaf_corpus(seed, rs=rs):
        F = it.value
        if not is_mumford_regular(F):
            continue

        def run(F=F):
            q = quillen_resolution(F)
            hv = hilbert_vector(F)
            signed = [(-1) ** i * n for i, n in enumerate(q.ranks)]
            ok = q.certificate["Z_r_zero"] and q.certificate["long_exact"] and signed == hv
            return ok, f"ranks {q.ranks}, hilbert {hv}"

        out.append(_guard("quillen", it.name, run))
    for r, want in ((1, [2, 1]), (2, [3, 3, 1])):
        ring = C.field_ring(QQ, r)
        F = Sheaf(C.line_bundle(ring, 1))

        def ranks(F=F, want=want):
            q = quillen_resolution(F)
            oracle = [abs(x) for x in hilbert_vector(F)]
            return q.ranks == want == oracle, f"ranks {q.ranks}, oracle {oracle}"

        out.append(_guard("quillen", f"O_P{r}(1) ranks", ranks))
    return out


# -- 4. relative resolutions ------------------------------------------------------------


def relative_suite(seed=0, rs=(1, 2), n=10):
    out = []
    count = 0
    for r in rs:
        for it in C.mr_triple_corpus(seed, r, n=n):
            count += 1

            def run(T=it.value):
                rq = relative_quillen_resolution(T)
                c = rq.certificate
                bundles = all(not S.left_presentation.rels and not S.right_presentation.rels for S in rq.stages)
                ok = c["left"]["long_exact"] and c["right"]["long_exact"] and c["squares_commute"] and c["Z_r_zero"] and bundles
                return ok, f"ranks {rq.ranks}"

            out.append(_guard("relative", f"P{r} {it.name}", run))
    return out, count


# -- 5. Koszul --------------------------------------------------------------------------


def koszul_suite(seed=0, rs=(1, 2)):
    out = []
    for r in (1, 2, 3):
        ring = C.field_ring(QQ, r)
        kz = koszul_resolution(Sheaf(C.line_bundle(ring, 0)))
        want = [comb(r + 1, i) for i in range(r + 2)]
        got = [F.rank for F in kz.terms]
        out.append(Check("koszul", f"O_P{r}", kz.certificate["exact"] and got == want, f"ranks {got}"))
    for it in C.sheaf_corpus(seed, rs=tuple(r for r in rs if r <= 2)):
        out.append(_guard("koszul", it.name, lambda it=it: (koszul_resolution(it.value).certificate["exact"], "")))
    for r in rs:
        for it in C.mr_triple_corpus(seed, r, n=4):
            out.append(_guard("koszul", f"P{r} triple {it.name}", lambda T=it.value: (koszul_resolution(T).certificate["exact"], "")))
    return out


# -- 6. triangularity -------------------------------------------------------------------


def base_triples(seed=0, n=10):
    import random

    rng = random.Random(seed)
    f = C.laurent_map()
    out = [C.base_triple(f, 1, [["t"]])]
    while len(out) < n:
        if rng.random() < 0.5:
            m = rng.choice([-2, -1, 2, 3])
            out.append(C.base_triple(f, 1, [[f"t^{m}" if m > 0 else f"T^{-m}"]]))
        else:
            out.append(C.base_triple(f, 2, C.unimodular_2x2(rng)))
    return out


def triangularity_suite(seed=0, n=10, rs=(1, 2)):
    out = []
    triples = base_triples(seed, n)
    for r in rs:
        for k, T in enumerate(triples):
            for j in range(r + 1):
                tri = triangularity(T, j, r)
                bad = [key for key, ok in tri.items() if not ok]
                out.append(Check("triangularity", f"P{r} triple {k} j={j}", not bad, f"failed {bad}" if bad else ""))
    return out, len(triples)


# -- 7. round trip ----------------------------------------------------------------------


def roundtrip_inputs(seed=0, rs=(1, 2)):
    items = []
    for r in rs:
        items.extend((f"P{r} {it.name}", it.value) for it in C.fvector_corpus(seed, r, n=6 if r == 1 else 4))
    f = C.laurent_map()
    for r in rs:
        ctx = ProjBundleMap(f, r)
        ring_A = PolyRing(f.source, r)
        for a, entry in ((1, "t"), (-1, "t"), (0, "T^2")):
            T = C.matrix_triple(C.line_bundle(ring_A, a), [[entry]], ctx)
            items.append((f"P{r} [(O({a}),{entry},O({a}))]", K0FormalClass.of(T)))
    return items


def roundtrip_suite(seed=0, rs=(1, 2)):
    out = []
    inputs = roundtrip_inputs(seed, rs)
    for name, inp in inputs:
        def run(inp=inp):
            rep = roundtrip_verify(inp)
            return rep.passed, f"{rep.checks} {rep.details.get('det_vector', '')}"

        out.append(_guard("roundtrip", name, run))
    f = C.laurent_map()
    for r in rs:
        zero = K0FormalClass.zero(f)
        v = [K0FormalClass.of(C.base_triple(f, 1, [["t"]]))] + [zero] * r
        want = ["t"] + ["1"] * r

        def basis(v=v, want=want):
            rep = roundtrip_verify(v)
            return rep.passed and rep.details["det_vector"] == want, f"det vector {rep.details['det_vector']}"

        out.append(_guard("roundtrip", f"P{r} e0 det vector", basis))
    return out, len(inputs) + len(rs)


# -- 8. invariants ----------------------------------------------------------------------


def invariant_suite(seed=0):
    out = []
    ring1 = C.field_ring(QQ, 1)
    for n in range(-3, 4):
        hv = hilbert_vector(Sheaf(C.line_bundle(ring1, n)))
        out.append(Check("invariants", f"hilbert O_P1({n})", hv == [n + 1, -n], str(hv)))
    hv = hilbert_vector(Sheaf(C.line_bundle(C.field_ring(QQ, 2), 1)))
    out.append(Check("invariants", "hilbert O_P2(1)", hv == [3, -3, 1], str(hv)))
    for k, inst in enumerate(C.relation_instances(seed, 20)):
        out.append(_guard("invariants", f"det relation {k} ({inst[0]})", lambda inst=inst: _det_relation(inst)))
    f = C.laurent_map()
    for r in (1, 2):
        ctx = ProjBundleMap(f, r)
        ring_A = PolyRing(f.source, r)
        for a, entry in ((-1, "1"), (-1, "t"), (-2, "t^2")):
            T = C.matrix_triple(C.line_bundle(ring_A, a), [[entry]], ctx)

            def reg(T=T):
                c = K0FormalClass.of(T)
                before = class_invariants(c)
                rg = regularize_class(c)
                after = class_invariants(rg.cls)
                return before == after and before["hilbert"] is not None and before["det"] is not None, f"{before} -> {after}"

            out.append(_guard("invariants", f"P{r} regularize (O({a}),{entry})", reg))
    return out


def _det_relation(inst):
    kind, T1, T2, T3 = inst
    if kind == "compose":
        lhs = eta_coerce(K0FormalClass.of(T1) + K0FormalClass.of(T2))
        rhs = eta_coerce(K0FormalClass.of(T3))
        return det_invariant(lhs) == det_invariant(rhs), f"{triple_det(T1)} + {triple_det(T2)} vs {triple_det(T3)}"
    # T1 -> T2 -> T3 with T2 block upper triangular
    n1, n3 = T1.left_presentation.rank, T3.left_presentation.rank
    ring = T1.left_presentation.ring
    one = ring.field.one()
    z = ring.zero_exp
    inc = GradedMap.from_columns(T1.left_presentation.generators, T2.left_presentation.generators, [{(j, z): one} for j in range(n1)])
    prj = GradedMap.from_columns(
        T2.left_presentation.generators, T3.left_presentation.generators,
        [{} for _ in range(n1)] + [{(j, z): one} for j in range(n3)],
    )
    m1 = make_morphism(T1, T2, inc, inc)
    m2 = make_morphism(T2, T3, prj, prj)
    ex = sequence_exact([T1, T2, T3], [m1, m2])
    lhs = det_invariant(eta_coerce(K0FormalClass.of(T2)))
    rhs = det_invariant(eta_coerce(K0FormalClass.of(T1) + K0FormalClass.of(T3)))
    return ex["exact"] and lhs == rhs, f"exact={ex['exact']} {lhs} vs {rhs}"


# -- report ------------------------------------------------------------------------------


def corpus_report(r: int, seed: int, max_twist: int | None = None) -> Report:
    """Run every suite that applies to P^r and fold the checks into a report."""
    report = Report()
    rs = (r,)
    suites = []
    if r <= 2:
        suites.append(("serre", lambda: serre_suite(rs)))
        suites.append(("regularity", lambda: regularity_suite(seed, rs)[0]))
        suites.append(("quillen", lambda: quillen_suite(seed, rs)))
    suites.append(("relative", lambda: relative_suite(seed, rs)[0]))
    suites.append(("koszul", lambda: koszul_suite(seed, rs)))
    suites.append(("triangularity", lambda: triangularity_suite(seed, rs=rs)[0]))
    suites.append(("roundtrip", lambda: roundtrip_suite(seed, rs)[0]))
    suites.append(("invariants", lambda: invariant_suite(seed)))
    for k, (name, fn) in enumerate(suites):
        t0 = time.perf_counter()
        try:
            checks = fn()
            failed = [c for c in checks if not c.ok]
            tr = TaskResult(k, name, "FAIL" if failed else "PASS")
            tr.result = {"checks": len(checks), "failed": [f"{c.name}: {c.detail}" for c in failed]}
        except Pbk0Error as e:
            tr = TaskResult(k, name, "ERROR", message=f"{type(e).__name__}: {e}")
        tr.seconds = time.perf_counter() - t0
        report.tasks.append(tr)
    return report
