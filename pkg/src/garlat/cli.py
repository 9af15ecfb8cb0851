"""Command-line front end.

Every command writes one report (JSON by default) to ``--out`` or stdout.
Exit codes: 0 success, 2 bad configuration, 3 unparsable input, 4 size cap
exceeded, 5 a verification failed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .graph import BallGraph, CapExceeded, FiniteGraph, ParseError, label_str, parse_adjacency_text

EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_CAP, EXIT_FAIL = 0, 2, 3, 4, 5


class ConfigError(ValueError):
    """Bad command-line configuration."""


# ---------------------------------------------------------------------------
# instances


def _ints(parts, k, spec):
    try:
        vals = [int(x) for x in parts[1:]]
    except ValueError:
        raise ConfigError(f"bad instance {spec!r}") from None
    if len(vals) != k:
        raise ConfigError(f"instance {spec!r} needs {k} integer parameter(s)")
    return vals


def make_lattice(spec: str):
    """``free-abelian:n``, ``braid:n``, ``subspace:n:q``, ``building:n:q`` or a germ JSON path."""
    from .building import NormLattice
    from .garside import GarsideLattice, GermError, load_germ
    from .zaction import ZnLattice

    parts = spec.split(":")
    if parts[0] in ("free-abelian", "zn"):
        return ZnLattice(*_ints(parts, 1, spec))
    if parts[0] == "building":
        return NormLattice(*_ints(parts, 2, spec))
    try:
        return GarsideLattice(load_germ(spec))
    except FileNotFoundError:
        raise ConfigError(f"unknown instance {spec!r}") from None
    except GermError as exc:
        raise ConfigError(str(exc)) from None


FIXTURES = {
    "cycle": 1,
    "complete": 1,
    "complete-bipartite": 2,
    "hypercube": 1,
    "path": 1,
}


def make_graph(args) -> FiniteGraph:
    """Graph named by ``--file``, a fixture (``cycle:5``) or a lattice ball."""
    from . import wmcheck
    from .zaction import build_lattice_ball, build_quotient_ball

    if args.file:
        return parse_adjacency_text(_read(args.file))
    spec = args.instance
    if not spec:
        raise ConfigError("give --instance or --file")
    parts = spec.split(":")
    if parts[0] in FIXTURES:
        vals = _ints(parts, FIXTURES[parts[0]], spec)
        fn = {
            "cycle": wmcheck.cycle_graph,
            "complete": wmcheck.complete_graph,
            "complete-bipartite": wmcheck.complete_bipartite,
            "hypercube": wmcheck.hypercube,
            "path": wmcheck.path_graph,
        }[parts[0]]
        return fn(*vals)
    L = make_lattice(spec)
    if args.quotient:
        return build_quotient_ball(L, radius=args.radius, cap=args.caps)
    return build_lattice_ball(L, radius=args.radius, cap=args.caps)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def _germ(args):
    from .garside import Germ, GermError, load_germ

    if args.file:
        try:
            return Germ.from_json(_read(args.file))
        except (GermError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad germ file: {exc}") from None
    if not args.germ:
        raise ConfigError("give --germ or --file")
    try:
        return load_germ(args.germ)
    except FileNotFoundError:
        raise ConfigError(f"unknown germ {args.germ!r}") from None
    except GermError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands; each returns (report, ok, text)


def _graph_out(g: FiniteGraph, args, extra=None):
    if args.format == "dot":
        return None, True, g.to_dot()
    if args.format == "text":
        return None, True, g.to_adjacency_text()
    rep = {
        "vertices": len(g),
        "edges": sum(1 for _ in g.edges()),
        "adjacency": g.to_adjacency_text(),
    }
    if isinstance(g, BallGraph):
        interior = [i for i in range(len(g)) if g.depth[i] <= g.radius - 1]
        rep["radius"] = g.radius
        rep["interior_degrees"] = sorted({g.degree(i) for i in interior})
    rep.update(extra or {})
    return rep, True, None


def cmd_germ_check(args):
    from .garside import check_germ

    rep = check_germ(_germ(args))
    return rep.to_dict(), rep.ok, None


def _morphism(germ, word):
    from .garside import GermError, normal_form, parse_word

    try:
        P = parse_word(germ, word)
    except (GermError, KeyError) as exc:
        raise ConfigError(f"bad word {word!r}: {exc}") from None
    src = germ.source[P[0][0]] if P else germ.objects[0]
    return normal_form(germ, src, P)


def cmd_nf(args):
    from .garside import SCHEDULES, normal_form, parse_word

    germ = _germ(args)
    words = args.word or []
    if len(words) != 1:
        raise ConfigError("nf takes exactly one --word")
    f = _morphism(germ, words[0])
    rng = random.Random(args.seed)
    P = parse_word(germ, words[0])
    agree = all(normal_form(germ, f.source, P, schedule=s, rng=rng) == f for s in SCHEDULES)
    rep = f.to_dict() | {"text": str(f), "schedule_independent": agree}
    return rep, agree, None


def _pair(args):
    germ = _germ(args)
    words = args.word or []
    if len(words) != 2:
        raise ConfigError("give --word twice")
    return germ, _morphism(germ, words[0]), _morphism(germ, words[1])


def cmd_gcd(args):
    from .garside import left_gcd

    germ, f, g = _pair(args)
    h = left_gcd(germ, f, g)
    return h.to_dict() | {"text": str(h)}, True, None


def cmd_lcm(args):
    from .garside import left_lcm

    germ, f, g = _pair(args)
    h = left_lcm(germ, f, g)
    return h.to_dict() | {"text": str(h)}, True, None


def cmd_cayley_ball(args):
    from .garside import weak_cayley_ball

    return _graph_out(weak_cayley_ball(_germ(args), radius=args.radius, cap=args.caps), args)


def cmd_quotient_ball(args):
    from .garside import delta_quotient_ball
    from .zaction import build_quotient_ball

    if args.instance:
        g = build_quotient_ball(make_lattice(args.instance), radius=args.radius, cap=args.caps)
    else:
        g = delta_quotient_ball(_germ(args), radius=args.radius, cap=args.caps)
    return _graph_out(g, args)


def _wm_report(g: FiniteGraph, args):
    from .wmcheck import WMVerdict, check_strong_conditions, check_weak_modularity

    v = check_weak_modularity(g)
    if args.strong:
        extra = WMVerdict()
        centre = g.center if isinstance(g, BallGraph) else 0
        extra.outcomes = check_strong_conditions(g, centre, max_clique=args.max_clique)
        v.outcomes.extend(extra.outcomes)
        v.notes["strong_basepoint"] = label_str(g.labels[centre])
        v.notes["max_clique"] = args.max_clique
    if args.format == "text":
        return v.to_dict(), v.ok, v.table()
    return v.to_dict() | {"vertices": len(g)}, v.ok, None


def cmd_wm(args):
    return _wm_report(make_graph(args), args)


def cmd_order_check(args):
    from .order import GradedRelation, OrderError, check_weak_order, is_lattice

    try:
        r = GradedRelation.from_json(_read(args.file))
    except (OrderError, ValueError) as exc:
        raise ParseError(str(exc)) from None
    wo = check_weak_order(r)
    lat = is_lattice(r) if wo.is_poset else None
    rep = {
        "weak_order": wo.to_dict(),
        "lattice": None if lat is None else {
            "is_lattice": lat.is_lattice,
            "failing_pair": None if lat.failing_pair is None else [label_str(x) for x in lat.failing_pair],
            "missing": lat.missing,
        },
    }
    ok = wo.is_weak_order and (lat is None or lat.is_lattice)
    return rep, ok, None


def cmd_replay(args):
    from .wmcheck import replay

    try:
        report = json.loads(_read(args.report))
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad report: {exc}") from None
    g = make_graph(args)
    fails = [o for o in report.get("outcomes", []) if o.get("status") == "fail"]
    confirmed = []
    for o in fails:
        try:
            confirmed.append(bool(replay(o, g)))
        except (KeyError, IndexError):
            confirmed.append(False)
    rep = {"replayed": len(fails), "confirmed": sum(confirmed), "results": confirmed}
    return rep, all(confirmed), None


# -- dictionary ---------------------------------------------------------------


def _window(args):
    from .dictionary import lattice_window

    if not args.instance:
        raise ConfigError("give --instance")
    return lattice_window(make_lattice(args.instance), radius=args.radius, cap=args.caps)


def cmd_dict_to_flag(args):
    from .dictionary import check_flag, lattice_to_flag

    F = lattice_to_flag(_window(args))
    rep = check_flag(F)
    if args.format == "json":
        return json.loads(F.to_json()) | {"axioms": rep.to_dict()}, rep.ok, None
    return rep.to_dict(), rep.ok, F.to_json()


def cmd_dict_to_order(args):
    from .dictionary import DictionaryError, FlagComplex, check_flag, flag_to_weak_order

    F = FlagComplex.from_json(_read(args.file))
    try:
        res = flag_to_weak_order(F)
    except DictionaryError:
        return {"axioms": check_flag(F).to_dict()}, False, None
    gen = res.generated
    pairs = sorted(
        [label_str(a), label_str(b), ell] for (a, b), ell in gen.lengths.items() if a != b
    )
    return {"hypotheses": res.report, "generated": pairs}, True, None


def cmd_dict_roundtrip(args):
    from .dictionary import roundtrip

    rt = roundtrip(_window(args))
    return rt.to_dict(), rt.ok, None


def cmd_dict_typed_a2(args):
    from .building import building_ball, building_type
    from .dictionary import check_flag, coxeter_a2_ball, typed_a2_to_flag

    spec = args.instance or "coxeter"
    if spec == "coxeter":
        g, tau = coxeter_a2_ball(args.radius)
    elif spec.startswith("building:"):
        n, q = _ints(spec.split(":"), 2, spec)
        if n != 3:
            raise ConfigError("typed-a2 needs a building of rank 3")
        g = building_ball(3, q, args.radius, args.caps)
        tau = {lab: building_type(p) for lab, p in zip(g.labels, g.points)}
    else:
        raise ConfigError("typed-a2 takes --instance coxeter or building:3:q")
    Y = typed_a2_to_flag(g, tau, (-3, 5))
    rep = check_flag(Y)
    return rep.to_dict() | {"vertices": len(Y.vertices), "edges": len(Y.edges)}, rep.ok, None


# -- building -----------------------------------------------------------------


def cmd_building_ball(args):
    from .building import building_ball, building_quotient_ball

    b = building_ball(args.n, args.q, args.radius, args.caps)
    extra = {}
    if args.quotient:
        c = building_quotient_ball(args.n, args.q, args.radius, args.caps)
        same = set(b.labels) == set(c.labels) and {frozenset(e) for e in b.edges()} == {
            frozenset(e) for e in c.edges()
        }
        extra["matches_norm_lattice_quotient"] = same
    rep, ok, text = _graph_out(b, args, extra)
    return rep, ok and extra.get("matches_norm_lattice_quotient", True), text


def cmd_building_germ(args):
    from .building import subspace_germ
    from .garside import check_germ

    g = subspace_germ(args.n, args.q)
    rep = check_germ(g)
    return rep.to_dict() | {"simples": len(g.simples), "germ": json.loads(g.to_json())}, rep.ok, None


def cmd_building_wm(args):
    from .building import building_ball

    return _wm_report(building_ball(args.n, args.q, args.radius, args.caps), args)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", help="built-in instance, e.g. free-abelian:3, braid:3, building:3:2, cycle:5")
    common.add_argument("--germ", help="germ spec: braid:n, free-abelian:n, subspace:n:q or a JSON path")
    common.add_argument("--file", help="input file (graph text, germ JSON, poset JSON or flag JSON)")
    common.add_argument("--radius", type=int, default=2)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--caps", type=int, default=200_000, help="vertex cap for ball enumeration")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "dot", "text"), default="json")
    common.add_argument("--word", action="append", help="word in simples; repeat for binary commands")
    common.add_argument("--quotient", action="store_true", help="use the quotient graph by the Z-action")
    common.add_argument("--strong", action="store_true", help="also check the strengthened conditions")
    common.add_argument("--max-clique", type=int, default=6)
    common.add_argument("--report", help="report file to replay")
    common.add_argument("--n", type=int, default=3)
    common.add_argument("--q", type=int, default=2)

    p = argparse.ArgumentParser(prog="garlat", description="Garside structures and weakly modular graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, parent=sub, **kw):
        sp = parent.add_parser(name, parents=[common], **kw)
        sp.set_defaults(fn=fn)
        return sp

    germ = sub.add_parser("germ").add_subparsers(dest="sub", required=True)
    add("check", cmd_germ_check, germ)
    add("nf", cmd_nf)
    add("gcd", cmd_gcd)
    add("lcm", cmd_lcm)
    add("cayley-ball", cmd_cayley_ball)
    add("quotient-ball", cmd_quotient_ball)
    add("wm", cmd_wm)
    d = sub.add_parser("dict").add_subparsers(dest="sub", required=True)
    add("to-flag", cmd_dict_to_flag, d)
    add("to-order", cmd_dict_to_order, d)
    add("roundtrip", cmd_dict_roundtrip, d)
    add("typed-a2", cmd_dict_typed_a2, d)
    b = sub.add_parser("building").add_subparsers(dest="sub", required=True)
    add("ball", cmd_building_ball, b)
    add("germ", cmd_building_germ, b)
    add("wm", cmd_building_wm, b)
    o = sub.add_parser("order").add_subparsers(dest="sub", required=True)
    add("check", cmd_order_check, o)
    add("replay", cmd_replay)
    return p


def _emit(args, rep, text):
    if text is not None and (rep is None or args.format != "json"):
        out = text
    else:
        out = json.dumps(rep, indent=1, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def main(argv=None) -> int:
    from .dictionary import DictionaryError
    from .garside import GermError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep, ok, text = args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (DictionaryError, GermError) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(args, rep, text)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
