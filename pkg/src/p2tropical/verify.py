"""The acceptance checks, runnable from the command line.

Each check returns a :class:`CheckResult` with status ``pass``, ``fail`` or
``deviation``.  A deviation is a criterion whose literal statement does not
hold for a documented reason; the check then asserts the documented
behaviour exactly, so any drift from it is still reported as ``fail``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import chambers as ch
from . import fano, markov, potential, scattering

PASS, FAIL, DEVIATION = "pass", "fail", "deviation"


@dataclass
class CheckResult:
    criterion: int
    name: str
    status: str
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = {PASS: "PASS", FAIL: "FAIL", DEVIATION: "DEVIATION"}[self.status]
        note = self.details.get("summary", "")
        return f"criterion {self.criterion} [{tag}] {self.name} ({self.seconds:.2f}s){': ' + note if note else ''}"

    def to_json(self):
        return {
            "criterion": self.criterion,
            "name": self.name,
            "status": self.status,
            "seconds": round(self.seconds, 3),
            "details": _jsonable(self.details),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return [x.numerator, x.denominator]
    return x


def _timed(fn):
    def run(*args, **kwargs):
        t = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t
        limit = res.details.get("time_limit")
        if limit is not None and res.seconds >= limit and res.status == PASS:
            res.status = FAIL
            res.details["summary"] = f"over the {limit}s budget"
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


TREE_DEPTH4 = {
    (1, 1, 1), (1, 1, 2), (1, 2, 5), (2, 5, 29), (1, 5, 13),
    (5, 29, 433), (2, 29, 169), (5, 13, 194), (1, 13, 34),
}


@_timed
def markov_tree() -> CheckResult:
    found = [t for t, _ in markov.enumerate_tree(4)]
    ok = set(found) == TREE_DEPTH4 and len(found) == 9 and all(markov.is_markov(*t) for t in found)
    return CheckResult(1, "Markov tree to depth 4", PASS if ok else FAIL,
                       details={"triples": [list(t) for t in found], "time_limit": 1.0,
                                "summary": f"{len(found)} triples"})


def _labeled_triangles(depth: int):
    """Chamber models of Region(P0, v3) to ``depth``: every labelled Markov triangle on the way."""
    return [fu.model for fu in ch.build_region(depth, ch.DEFAULT_V3)]


@_timed
def weights_bijection() -> CheckResult:
    bad = []
    triples = [t for t, _ in markov.enumerate_tree(6)]
    for t in triples:
        T = fano.triangle_from_triple(t)
        if tuple(sorted(T.weights())) != tuple(a * a for a in t):
            bad.append((list(t), "weights"))
        c = fano.singularity_content(T.polygon)
        if c.n != 3 or c.basket:
            bad.append((list(t), "content"))
    return CheckResult(2, "weights and singularity content for d <= 6", FAIL if bad else PASS,
                       details={"count": len(triples), "bad": bad, "time_limit": 10.0,
                                "summary": f"{len(triples)} triples (tree deduplicated; see notes on the stated 63)"})


@_timed
def edge_invariants() -> CheckResult:
    bad = []
    models = _labeled_triangles(6)
    for T in models:
        a = T.triple()
        for i in (1, 2, 3):
            w, r, ell = T.edge_data(i)
            if ell != a[i - 1] or r != a[i - 1]:
                bad.append((T.v, i))
        if fano.normal_form(T).s != 3 * a[2]:
            bad.append((T.v, "det"))
    return CheckResult(3, "edge lengths, local indices and det for depth <= 6", FAIL if bad else PASS,
                       details={"count": len(models), "bad": bad, "summary": f"{len(models)} labelled triangles"})


@_timed
def sublattice_factors() -> CheckResult:
    bad = []
    models = _labeled_triangles(4)
    for T in models:
        s = fano.normal_form(T).s
        F = fano.sublattice_mutation_factors(T)
        dirs = {tuple(abs(c) for c in F.f1), tuple(abs(c) for c in F.f2)}
        R1, R2 = F.R
        r1, r2 = F.r
        if dirs != {(s, 0), (0, s)} or Fraction(R1, r2) != s or Fraction(R2, r1) != s:
            bad.append(T.v)
    return CheckResult(4, "sublattice factors and R/r = s for depth <= 4", FAIL if bad else PASS,
                       details={"count": len(models), "bad": bad, "summary": f"{len(models)} labelled triangles"})


@_timed
def scattering_consistency() -> CheckResult:
    D = scattering.complete_to_order(scattering.initial_diagram(3), 6)
    consistent = scattering.is_consistent(D, 6)
    w11 = D.wall((1, 1))
    f2 = w11.function.degree_part(2) if w11 else {}
    coeff = f2.get((3, 3))
    norm = scattering.normalized_function(w11, 3).degree_part(2).get((3, 3)) if w11 else None
    order2 = [w.direction for w in D.walls if not w.line and scattering.ray_order(w) == 2]
    cmp4 = scattering.compare_with_recursion(scattering.complete_to_order(scattering.initial_diagram(3), 4))
    outside_ok = set(cmp4["outside"]) == {(1, 0), (0, 1), (3, 1), (1, 3)} and cmp4["match"]
    ok = consistent and order2 == [(1, 1)] and norm == 9 and coeff == 3 and outside_ok
    return CheckResult(5, "scattering D(3) to order 6", PASS if ok else FAIL, details={
        "consistent_mod_t7": consistent, "order2_rays": order2,
        "coefficient_primitive_normal": coeff, "coefficient_normalized": norm,
        "outside_cone_K4": cmp4["outside"], "time_limit": 60.0,
        "summary": f"order-2 ray (1,1), coefficient {norm} (f^s; {coeff} with Z^2-primitive normals)",
    })


@_timed
def chamber_geometry(depth: int = 5) -> CheckResult:
    bad_faces, bad_sandwich = [], []
    for r in range(3):
        cs = ch.build_region(depth, r)
        bad_faces += [(r, a, b) for a, b in ch.check_faces(cs)]
        bad_sandwich += [(r, fu.path) for fu in cs[1:] if not ch.sandwich(fu)["ok"]]
    T = ch.build_T(1)
    depth1 = [x for x in T.identification if len(x[1]) == 1]
    ident_ok = len(depth1) == 3 and all(x[3] for x in depth1) and T.count(1) == 4
    ok = not bad_faces and not bad_sandwich and ident_ok
    return CheckResult(6, f"chamber faces, sandwich and identification to depth {depth}", PASS if ok else FAIL,
                       details={"bad_faces": bad_faces, "bad_sandwich": bad_sandwich,
                                "identification": ident_ok, "time_limit": 30.0,
                                "summary": "6 depth-1 triangles identify to 3" if ident_ok else ""})


@_timed
def superpotentials(K: int = 6) -> CheckResult:
    root = ch.root_chamber()
    lines, W = potential.broken_lines(root, (Fraction(0), Fraction(0)), K)
    central_ok = len(lines) == 3 and W == potential.W0 and all(not l.bends for l in lines)
    mismatch, newton_bad, stab = [], [], {}
    for r in range(3):
        for fu in ch.build_region(2, r):
            c = tuple(sum(p[m] for p in fu.triangle) / 3 for m in (0, 1))
            Wt = potential.chamber_potential(fu)
            if not Wt.newton_polygon().same_as(fu.model.polygon):
                newton_bad.append((r, fu.path))
            _, Wb = potential.broken_lines(fu, c, K)
            order = potential.stabilization_order(fu)
            stab[(r, fu.path)] = order
            if Wb != Wt:
                _, Wb_full = potential.broken_lines(fu, c, int(order))
                mismatch.append({"region": r, "path": list(fu.path), "stabilization_order": order,
                                 "equal_at_stabilization": Wb_full == Wt})
    if not central_ok or newton_bad:
        status = FAIL
    elif not mismatch:
        status = PASS
    else:
        # documented: only the mixed depth-2 paths need order 8, and they agree there
        expected = {(r, p) for r in range(3) for p in ((1, 2), (2, 1))}
        got = {(m["region"], tuple(m["path"])) for m in mismatch}
        all_ok = all(m["equal_at_stabilization"] and m["stabilization_order"] == 8 for m in mismatch)
        status = DEVIATION if got == expected and all_ok else FAIL
    return CheckResult(7, f"broken lines vs transport for d <= 2 at K = {K}", status, details={
        "central_lines": len(lines), "newton_mismatch": newton_bad, "mismatch": mismatch,
        "summary": f"central W = {W.pretty()}; {len(mismatch)} of 21 chambers need K = 8"
                   if mismatch else f"central W = {W.pretty()}; all 21 chambers agree",
    })


@_timed
def periods(depth: int = 3, M: int = 9) -> CheckResult:
    bad = []
    expected = potential.quantum_period_P2(M)
    n = 0
    for r in range(3):
        for fu in ch.build_region(depth, r):
            n += 1
            if potential.period(potential.chamber_potential(fu), M) != expected:
                bad.append((r, fu.path))
    return CheckResult(8, f"periods of chamber potentials for d <= {depth}", FAIL if bad else PASS,
                       details={"chambers": n, "bad": bad, "expected": expected, "time_limit": 120.0,
                                "summary": f"{n} potentials, c3, c6, c9 = 6, 90, 1680"})


@_timed
def shrinking(count: int = 10, steps: int = 40) -> CheckResult:
    rows = []
    for region, x in ch.witness_points(count):
        w = ch.shrinking_witness(x, steps, region)
        literal = w.halving_holds(stable_only=False)
        stable = w.halving_holds(stable_only=True)
        rows.append({
            "region": region, "first_below": w.first_below(),
            "literal_failures": [i for i, ok in literal if not ok],
            "stable_failures": [i for i, ok in stable if not ok],
            "f_ratio_at_failures": [w.f[i + 1] / w.f[i] for i, ok in literal if not ok],
        })
    decay_ok = all(r["first_below"] is not None and r["first_below"] < steps for r in rows)
    stable_ok = all(not r["stable_failures"] for r in rows)
    literal_ok = all(not r["literal_failures"] for r in rows)
    if decay_ok and literal_ok:
        status = PASS
    elif decay_ok and stable_ok and all(set(r["literal_failures"]) <= {0} for r in rows):
        status = DEVIATION
    else:
        status = FAIL
    nlit = sum(bool(r["literal_failures"]) for r in rows)
    return CheckResult(9, "shrinking witness", status, details={
        "points": rows,
        "summary": f"decay below f(0)/1000 within {max(r['first_below'] or 0 for r in rows)} steps; "
                   f"halving fails at step 0 for {nlit} points, holds in the eventual regime",
    })


SUITES = {
    "markov": [markov_tree],
    "fano": [weights_bijection, edge_invariants, sublattice_factors],
    "scattering": [scattering_consistency],
    "chambers": [chamber_geometry, shrinking],
    "potential": [superpotentials, periods],
}
SUITES["all"] = [c for k in ("markov", "fano", "scattering", "chambers", "potential") for c in SUITES[k]]


def run_suite(name: str) -> list:
    results = [check() for check in SUITES[name]]
    return sorted(results, key=lambda r: r.criterion)
