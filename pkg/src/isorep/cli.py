"""``isorep`` command line front end.

Exit codes: 0 success, 1 domain failure (invalid groupoid, GKM failure, no
lift, ...), 2 input or usage error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys

from .complex import ComplexError, CwComplex, validate_regular
from .groupoid import (
    EXAMPLES,
    CellularGroupoid,
    GroupoidError,
    build_example,
    edge_characters,
    is_zero_toric,
    validate_groupoid,
)
from .intlat import AbelianInvariants, invariant_factors
from .nonab import (
    CapExceeded,
    DoubleCosetInstance,
    FinGroup,
    GroupError,
    GroupHom,
    double_cosets,
    kappa_lift_rank1,
    weyl_canonical,
)
from .rep_ab import (
    FamilyError,
    GkmFailure,
    NotMomentPolytope,
    affine_report,
    bundle_group,
    euler_numbers,
    gkm_check,
    gkm_equations,
    rep_abelian,
)
from .torus import RankMismatch


class InputError(Exception):
    pass


class DomainFailure(Exception):
    def __init__(self, report: dict):
        super().__init__(report.get("error", "domain failure"))
        self.report = report


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_groupoid(path: str) -> CellularGroupoid:
    data = _read_json(path)
    try:
        return CellularGroupoid.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a groupoid file ({exc})") from exc


def _load_family(path: str) -> dict:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected an object mapping vertex ids to weight vectors")
    return {str(k): [int(x) for x in v] for k, v in data.items()}


def _parse_rows(text: str | None) -> list[list[int]]:
    if text is None or not text.strip():
        return []
    try:
        return [[int(x) for x in row.split(",")] for row in text.split(";") if row.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse integer rows from {text!r}") from exc


def _parse_h2(text: str) -> AbelianInvariants:
    m = re.fullmatch(r"\s*free=(\d+)\s*(?:,\s*torsion=([\d,\s]*))?\s*", text)
    if not m:
        raise InputError(f"bad --h2 value {text!r}; use free=r,torsion=d1,d2")
    torsion = [int(x) for x in (m.group(2) or "").split(",") if x.strip()]
    return AbelianInvariants(int(m.group(1)), invariant_factors(torsion))


# -- commands ------------------------------------------------------------------

def cmd_validate(args) -> dict:
    data = _read_json(args.input)
    if "complex" not in data:
        try:
            cx = CwComplex.from_json(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        bad = validate_regular(cx)
        report = {"kind": "complex", "valid": not bad,
                  "violations": [{"cell": v.cell, "reason": v.reason} for v in bad]}
    else:
        try:
            g = CellularGroupoid.from_json(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        bad = validate_groupoid(g)
        report = {"kind": "groupoid", "valid": not bad,
                  "violations": [v.to_json() for v in bad]}
        if not bad:
            chars = edge_characters(g)
            report["zero_toric"] = is_zero_toric(g)
            report["one_toric"] = chars is not None
            if chars is not None:
                report["edge_characters"] = {e: list(c) for e, c in chars.items()}
    if bad:
        raise DomainFailure(report)
    return report


def _valid(g: CellularGroupoid) -> CellularGroupoid:
    bad = validate_groupoid(g)
    if bad:
        raise DomainFailure({"error": "invalid groupoid", "violations": [v.to_json() for v in bad]})
    return g


def cmd_rep(args) -> dict:
    g = _valid(_load_groupoid(args.input))
    rep = rep_abelian(g, args.torus_rank, args.finite or [])
    out = rep.to_json()
    if args.torus_rank and edge_characters(g) is not None:
        out["gkm_forms"] = {e: [list(u) for u in forms] for e, forms in gkm_equations(g).items()}
    return out


def cmd_gkm_check(args) -> dict:
    g = _valid(_load_groupoid(args.groupoid))
    bad = gkm_check(g, _load_family(args.family))
    report = {"ok": not bad, "failing_edges": bad}
    if bad:
        raise DomainFailure(report)
    return report


def cmd_euler(args) -> dict:
    g = _valid(_load_groupoid(args.groupoid))
    try:
        ks = euler_numbers(g, _load_family(args.family))
    except GkmFailure as exc:
        raise DomainFailure({"error": str(exc), "failing_edges": exc.edges}) from exc
    return {"euler_numbers": ks,
            "orientation": "tail = smaller vertex id; chi has first nonzero entry positive"}


def cmd_bundle_group(args) -> dict:
    g = _valid(_load_groupoid(args.input))
    h2 = _parse_h2(args.h2) if args.h2 else None
    try:
        return bundle_group(g, h2).to_json()
    except ComplexError as exc:
        raise InputError(f"{exc} (pass --h2)") from exc


def cmd_affine(args) -> dict:
    g = _valid(_load_groupoid(args.groupoid))
    coords = _load_family(args.coords) if args.coords else None
    try:
        return affine_report(g, _load_family(args.family), coords).to_json()
    except GkmFailure as exc:
        raise DomainFailure({"error": str(exc), "failing_edges": exc.edges}) from exc
    except NotMomentPolytope as exc:
        raise DomainFailure({"error": str(exc)}) from exc


def cmd_kappa_lift(args) -> dict:
    g = _valid(_load_groupoid(args.groupoid))
    res = kappa_lift_rank1(g, _load_family(args.classes), fix_components=args.fix_components)
    out = res.to_json()
    if not res.found:
        out["report"] = f"no lift; {res.checked} assignments checked"
        raise DomainFailure(out)
    out["report"] = f"lift found after {res.checked} assignments"
    return out


def _load_instance(path: str) -> DoubleCosetInstance:
    data = _read_json(path)
    try:
        cx = CwComplex.from_json(data["complex"])

        def group(entry):
            if isinstance(entry, str) and entry in data.get("groups", {}):
                entry = data["groups"][entry]
            return FinGroup.from_json(entry)

        edge_groups = {str(e): group(s) for e, s in data["edge_groups"].items()}
        vertex_groups = {str(v): group(s) for v, s in data["vertex_groups"].items()}
        homs = {}
        for h in data.get("homs", []):
            v, e = str(h["vertex"]), str(h["edge"])
            S, T = vertex_groups[v], edge_groups[e]
            m = h.get("map", "images")
            if m == "identity":
                homs[(v, e)] = GroupHom(S, T, tuple(range(S.order)))
            elif m == "trivial":
                homs[(v, e)] = GroupHom.trivial(S, T)
            else:
                homs[(v, e)] = GroupHom(S, T, tuple(int(x) for x in h["images"]))
        return DoubleCosetInstance(cx, edge_groups, vertex_groups, homs)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad double-coset instance ({exc})") from exc


def cmd_cosets(args) -> dict:
    inst = _load_instance(args.input)
    res = double_cosets(inst)
    return {"count": res.count,
            "half_edges": [list(h) for h in inst.half_edges()],
            "representatives": [list(r) for r in res.representatives],
            "orbit_sizes": list(res.orbit_sizes),
            "size": res.size}


def cmd_canon(args) -> dict:
    out = weyl_canonical(args.series, args.vector)
    return {"series": args.series.upper(), "input": list(args.vector), "canonical": list(out),
            "convention": "sorted absolute values; series D negates the last entry when the "
                          "input has an odd number of negatives and no zero"}


def cmd_example(args) -> dict:
    params = {}
    if args.chars is not None:
        params["chars"] = _parse_rows(args.chars)
    if args.gamma0 is not None:
        params["gamma0"] = _parse_rows(args.gamma0)
    if args.chi is not None:
        rows = _parse_rows(args.chi)
        if len(rows) != 1:
            raise InputError("--chi takes a single character")
        params["chi"] = rows[0]
    if args.rank is not None:
        params["rank"] = args.rank
    for key in ("h0", "h1", "h01"):
        val = getattr(args, key)
        if val is not None:
            params[key] = _parse_rows(val)
    try:
        return build_example(args.name, params).to_json()
    except KeyError as exc:
        raise InputError(f"example {args.name!r} needs parameter {exc}") from exc


# -- rendering -------------------------------------------------------------------

def render_table(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        width = max((len(str(k)) for k in obj), default=0)
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in
                                                         (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.append(render_table(v, indent + 1))
            else:
                lines.append(f"{pad}{str(k).ljust(width)}  {_scalar(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}[{i}]")
                lines.append(render_table(v, indent + 1))
            else:
                lines.append(f"{pad}{_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return "\n".join(lines)


def _scalar(v) -> str:
    if isinstance(v, dict):
        return " ".join(f"{k}={_scalar(x)}" for k, x in v.items())
    if isinstance(v, list):
        return "(" + ", ".join(_scalar(x) for x in v) + ")"
    if v is None:
        return "-"
    return str(v).lower() if isinstance(v, bool) else str(v)


def _emit(obj, fmt: str, stream):
    if fmt == "table":
        stream.write(render_table(obj) + "\n")
    else:
        stream.write(json.dumps(obj, indent=2) + "\n")


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="isorep",
                                description="Classify split equivariant principal bundles "
                                            "from cellular isotropy data.")
    p.add_argument("--format", choices=("json", "table"), default="json")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a complex or groupoid file")
    s.add_argument("input")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("rep", help="classification group of representations")
    s.add_argument("input")
    s.add_argument("--torus-rank", type=int, default=1,
                   help="rank of the torus part of the structure group (default 1)")
    s.add_argument("--finite", type=int, nargs="*", metavar="Q",
                   help="orders of cyclic factors of the structure group")
    s.set_defaults(func=cmd_rep)

    s = sub.add_parser("gkm-check", help="test a weight family against the edge conditions")
    s.add_argument("groupoid")
    s.add_argument("family")
    s.set_defaults(func=cmd_gkm_check)

    s = sub.add_parser("euler", help="Euler numbers k_e of a weight family")
    s.add_argument("groupoid")
    s.add_argument("family")
    s.set_defaults(func=cmd_euler)

    s = sub.add_parser("bundle-group", help="representation group times H^2(A)")
    s.add_argument("input")
    s.add_argument("--h2", help='override H^2 of the base, e.g. "free=1,torsion=2"')
    s.set_defaults(func=cmd_bundle_group)

    s = sub.add_parser("affine", help="affine realisation report over a moment polytope")
    s.add_argument("groupoid")
    s.add_argument("family")
    s.add_argument("--coords", help="vertex coordinates (defaults to the groupoid file's)")
    s.set_defaults(func=cmd_affine)

    s = sub.add_parser("kappa-lift", help="search signs lifting rank-one classes")
    s.add_argument("groupoid")
    s.add_argument("classes")
    s.add_argument("--fix-components", action="store_true",
                   help="fix one sign per connected component")
    s.set_defaults(func=cmd_kappa_lift)

    s = sub.add_parser("cosets", help="double cosets over a graph of component groups")
    s.add_argument("input")
    s.set_defaults(func=cmd_cosets)

    s = sub.add_parser("canon", help="Weyl canonical form for SO(2k+1) (b) or SO(2k) (d)")
    s.add_argument("--series", required=True, type=str.lower, choices=("b", "d"))
    s.add_argument("vector", type=int, nargs="*")
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("example", help="emit one of the bundled example groupoids")
    s.add_argument("name", choices=EXAMPLES)
    s.add_argument("--chars", help='rows "a,b;c,d" (simplex_sphere, quotient)')
    s.add_argument("--gamma0", help="characters cutting out Γ₀ (quotient)")
    s.add_argument("--chi", help="character (cp1)")
    s.add_argument("--rank", type=int, help="torus rank (segment)")
    s.add_argument("--h0", help="characters of the group at vertex 0 (segment)")
    s.add_argument("--h1", help="characters of the group at vertex 1 (segment)")
    s.add_argument("--h01", help="characters of the edge group (segment)")
    s.set_defaults(func=cmd_example)
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except DomainFailure as exc:
        _emit(exc.report, args.format, stdout)
        return 1
    except (GroupoidError, GkmFailure, NotMomentPolytope) as exc:
        _emit({"error": str(exc)}, args.format, stdout)
        return 1
    except (InputError, FamilyError, RankMismatch, ComplexError, GroupError,
            CapExceeded) as exc:
        stderr.write(f"isorep: error: {exc}\n")
        return 2
    _emit(result, args.format, stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
