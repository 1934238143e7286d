"""Command-line interface: ``p2tropical <subcommand> [flags]``.

Exit codes: 0 success, 1 a verification failed, 2 bad flags, 3 the output
could not be written.  Rationals in JSON are ``[numerator, denominator]``.
"""
from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import __version__
from . import chambers as ch
from . import fano, markov, potential, scattering, svg, verify

EXIT_VERIFY, EXIT_USAGE, EXIT_OUTPUT = 1, 2, 3


@dataclass
class RunManifest:
    command: str
    flags: dict
    version: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    created: str | None = None

    def to_json(self):
        d = asdict(self)
        if d["created"] is None:
            d.pop("created")
        return d


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _q(c):
    c = Fraction(c)
    return [c.numerator, c.denominator]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- argument types -----------------------------------------------------------------


def _triple(text: str):
    try:
        parts = [int(x) for x in text.replace(" ", "").split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b,c integers, got {text!r}")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("a triple needs three entries")
    try:
        return markov.MarkovTriple.of(*parts)
    except markov.NotMarkov as e:
        raise argparse.ArgumentTypeError(str(e))


def _bounded(lo: int, hi: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if not lo <= v <= hi:
            raise argparse.ArgumentTypeError(f"must lie in [{lo}, {hi}]")
        return v
    return parse


def _path(text: str):
    if not text:
        return ()
    try:
        out = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated path of 1s and 2s, got {text!r}")
    if any(i not in (1, 2) for i in out):
        raise argparse.ArgumentTypeError("path entries must be 1 or 2")
    return out


def _poly(text: str):
    try:
        return potential.LaurentPolynomial.from_json(json.loads(text))
    except (ValueError, TypeError) as e:
        raise argparse.ArgumentTypeError(f"bad polynomial JSON: {e}")


# -- commands -----------------------------------------------------------------------


def cmd_markov(a):
    nodes = list(markov.walk(a.depth))
    return {"depth": a.depth, "count": len(nodes), "nodes": [n.to_json() for n in nodes]}


def _edge_table(T):
    rows = []
    for i in (1, 2, 3):
        w, r, ell = T.edge_data(i)
        rows.append({"edge": i, "inner_normal": list(w), "local_index": r, "lattice_length": ell})
    return rows


def cmd_polygon(a):
    T = fano.triangle_from_triple(a.triple)
    nf = fano.normal_form(T)
    c = fano.singularity_content(T.polygon)
    out = T.to_json()
    out.update({
        "triple": list(a.triple),
        "labelled_triple": list(T.triple()),
        "edges": _edge_table(T),
        "singularity_content": {"n": c.n, "basket": [str(b) for b in c.basket], "text": str(c)},
        "normal_form": {"vertices": [list(p) for p in nf.vertices], "rho": [list(r) for r in nf.rho], "s": nf.s},
    })
    return out


def cmd_mutate(a):
    T = fano.triangle_from_triple(a.triple)
    fixed = a.fixed if a.fixed is not None else (3 - a.edge if a.edge in (1, 2) else 1)
    if fixed == a.edge:
        raise _Usage("the mutating and fixed edges must differ")
    M = fano.mutate(T, a.edge, fixed)
    return {
        "input": T.to_json(),
        "edge": a.edge, "fixed": fixed,
        "w": list(M.w), "u": list(M.u),
        "output": M.triangle.to_json(),
        "output_triple": sorted(M.triangle.triple()),
    }


def cmd_scatter(a):
    D = scattering.complete_to_order(scattering.initial_diagram(a.s), a.order)
    if a.format == "svg":
        return svg.scattering_svg(D, reproducible=a.reproducible)
    out = D.to_json()
    out["consistent"] = scattering.is_consistent(D, a.order)
    if a.s >= 3:
        cmp = scattering.compare_with_recursion(D)
        out["outside_cone"] = [list(d) for d in cmp["outside"]]
        out["recursion_match"] = cmp["match"]
    return out


def cmd_chambers(a):
    if a.format == "svg":
        cs = ch.build_region(a.depth, a.v3)
        rays = ch.structure_rays(a.depth, a.v3) if a.depth else []
        cones = ch.cones_and_W(min(a.depth, 2), a.v3) if a.cones else []
        return svg.chambers_svg(cs, rays, ch.singular_points(), cones, reproducible=a.reproducible)
    T = ch.build_T(a.depth)
    region = ch.build_region(a.depth, a.v3)
    return {
        "depth": a.depth,
        "v3": list(ch.P0_CYCLE[a.v3]),
        "count": T.count(),
        "complex": T.to_json(),
        "identification": [
            {"region": r, "path": list(p), "partner": list(q) if q is not None else None, "verified": ok}
            for r, p, q, ok in T.identification
        ],
        "region": [fu.to_json() for fu in region],
        "atlas": ch.build_atlas().to_json(),
    }


def _find_chamber(triple, v3, limit=8):
    for fu in ch.build_region(min(limit, markov.grade(triple)), v3):
        if fu.triple() == triple:
            return fu
    raise _Usage(f"no chamber with triple {tuple(triple)} within depth {limit}")


def cmd_potential(a):
    fu = _find_chamber(a.triple, a.v3)
    W = potential.chamber_potential(fu)
    M = a.order if a.order is not None else 9
    per = potential.period(W, M)
    return {
        "triple": list(a.triple),
        "path": list(fu.path),
        "v3": list(ch.P0_CYCLE[a.v3]),
        "walls": [{"w": list(w), "u": list(u)} for w, u, _, _ in potential.path_walls(fu)],
        "potential": W.to_json(),
        "pretty": W.pretty(),
        "newton_polygon": [list(p) for p in W.newton_polygon().vertices],
        "newton_equals_model": W.newton_polygon().same_as(fu.model.polygon),
        "binomial_edges": potential.edge_coefficients_binomial(W),
        "period": per,
        "mirror_dual": per == potential.quantum_period_P2(M),
    }


def cmd_period(a):
    M = a.order if a.order is not None else 9
    per = potential.period(a.poly, M)
    return {"order": M, "period": per, "mirror_dual": per == potential.quantum_period_P2(M)}


def cmd_broken_lines(a):
    K = a.order if a.order is not None else 6
    cs = ch.build_region(a.depth, a.v3)
    rows = []
    for fu in cs:
        p = tuple(sum(q[m] for q in fu.triangle) / 3 for m in (0, 1))
        lines, W = potential.broken_lines(fu, p, K)
        rows.append({
            "path": list(fu.path),
            "basepoint": [_q(c) for c in p],
            "lines": [l.to_json() for l in lines],
            "potential": W.to_json(),
            "equals_transport": W == potential.chamber_potential(fu),
            "stabilization_order": _q(potential.stabilization_order(fu)),
        })
    if a.svg or a.format == "svg":
        target = next((fu for fu in cs if fu.path == a.path), None)
        if target is None:
            raise _Usage(f"path {list(a.path)} is deeper than --depth")
        p = tuple(sum(q[m] for q in target.triangle) / 3 for m in (0, 1))
        lines, _ = potential.broken_lines(target, p, K)
        picture = svg.broken_lines_svg(target, cs, lines, p, reproducible=a.reproducible)
        if a.format == "svg":
            return picture
        _write(a.svg, picture)
        a._extra_outputs[a.svg] = _sha(picture.encode())
    return {"order": K, "depth": a.depth, "v3": list(ch.P0_CYCLE[a.v3]), "chambers": rows}


def cmd_verify(a):
    results = verify.run_suite(a.suite)
    for r in results:
        print(r.line(), file=sys.stderr)
    report = {"suite": a.suite, "results": [r.to_json() for r in results],
              "ok": all(r.status != verify.FAIL for r in results)}
    return report


# -- plumbing ---------------------------------------------------------------------


class _Usage(Exception):
    pass


class _Unwritable(Exception):
    pass


def _write(path, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise _Unwritable(f"cannot write {path}: {e}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "svg"), default="json")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--reproducible", action="store_true",
                        help="omit timestamps so equal flags give byte-identical files")
    common.add_argument("--v3", type=_bounded(0, 2), default=ch.DEFAULT_V3, metavar="INDEX",
                        help="index of v3 in (1,0),(0,1),(-1,-1); default 2, i.e. (-1,-1)")

    p = argparse.ArgumentParser(prog="p2tropical", description="Toric degenerations of P2 and their tropical superpotentials.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("markov", parents=[common], help="the Markov tree")
    s.add_argument("--depth", type=_bounded(0, 16), default=3)
    s.set_defaults(run=cmd_markov, svg_ok=False)

    s = sub.add_parser("polygon", parents=[common], help="the labelled triangle of a Markov triple")
    s.add_argument("--triple", type=_triple, required=True)
    s.set_defaults(run=cmd_polygon, svg_ok=False)

    s = sub.add_parser("mutate", parents=[common], help="mutate the triangle of a triple at one edge")
    s.add_argument("--triple", type=_triple, required=True)
    s.add_argument("--edge", type=_bounded(1, 3), default=1)
    s.add_argument("--fixed", type=_bounded(1, 3))
    s.set_defaults(run=cmd_mutate, svg_ok=False)

    s = sub.add_parser("scatter", parents=[common], help="complete D(s) to a given order")
    s.add_argument("--s", type=_bounded(1, 60), default=3)
    s.add_argument("--order", type=_bounded(1, 12), default=4)
    s.set_defaults(run=cmd_scatter, svg_ok=True)

    s = sub.add_parser("chambers", parents=[common], help="the chamber complex")
    s.add_argument("--depth", type=_bounded(0, 8), default=2)
    s.add_argument("--cones", action="store_true", help="shade the cones C_p in the SVG")
    s.set_defaults(run=cmd_chambers, svg_ok=True)

    s = sub.add_parser("potential", parents=[common], help="the superpotential of a chamber")
    s.add_argument("--triple", type=_triple, required=True)
    s.add_argument("--order", type=_bounded(0, 30), help="period length (default 9)")
    s.set_defaults(run=cmd_potential, svg_ok=False)

    s = sub.add_parser("period", parents=[common], help="constant terms of powers of a Laurent polynomial")
    s.add_argument("--poly", type=_poly, required=True, help='JSON list [[[a, b], c], ...]')
    s.add_argument("--order", type=_bounded(0, 30), help="largest power (default 9)")
    s.set_defaults(run=cmd_period, svg_ok=False)

    s = sub.add_parser("broken-lines", parents=[common], help="broken lines in the chambers of a region")
    s.add_argument("--depth", type=_bounded(0, 3), default=0)
    s.add_argument("--order", type=_bounded(0, 20), help="order K (default 6)")
    s.add_argument("--path", type=_path, default=(), help="chamber drawn in the SVG, e.g. 1,2")
    s.add_argument("--svg", metavar="PATH", help="also write a picture of the lines")
    s.set_defaults(run=cmd_broken_lines, svg_ok=True)

    s = sub.add_parser("verify", parents=[common], help="run acceptance checks")
    s.add_argument("--suite", choices=sorted(verify.SUITES), default="all")
    s.set_defaults(run=cmd_verify, svg_ok=False)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    if a.format == "svg" and not a.svg_ok:
        parser.error(f"{a.command} has no SVG output")
    a._extra_outputs = {}
    try:
        result = a.run(a)
    except _Usage as e:
        parser.error(str(e))
    except _Unwritable as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_OUTPUT
    text = result if isinstance(result, str) else _dump(result)
    flags = {k: _flag(v) for k, v in sorted(vars(a).items())
             if k not in ("run", "svg_ok", "_extra_outputs", "command")}
    try:
        if a.out:
            _write(a.out, text)
            manifest = RunManifest(
                command=a.command, flags=flags, version=__version__,
                # destinations are not inputs: equal hashes mean equal computations
                inputs={"flags": _sha(_dump({k: v for k, v in flags.items() if k not in ("out", "svg")}).encode())},
                outputs={a.out: _sha(text.encode()), **a._extra_outputs},
                created=None if a.reproducible else datetime.datetime.now(datetime.timezone.utc).isoformat(),
            )
            _write(a.out + ".manifest.json", _dump(manifest.to_json()))
        else:
            sys.stdout.write(text)
    except _Unwritable as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_OUTPUT
    if a.command == "verify" and not result["ok"]:
        return EXIT_VERIFY
    return 0


def _flag(v):
    if isinstance(v, potential.LaurentPolynomial):
        return v.to_json()
    if isinstance(v, tuple):
        return list(v)
    return v


if __name__ == "__main__":
    sys.exit(main())
