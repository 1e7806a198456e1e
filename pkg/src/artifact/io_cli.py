"""JSON and DOT serialization and the ``exnet`` command-line entry point.

Exit codes: 0 success or true, 1 checked-false, 2 input or parse error
(including inputs too large for an exhaustive oracle), 3 internal contract fault.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Iterable, Optional

from .calculi import LK, Derivation, check_derivation, lk_to_lkstar
from .correctness import (AnnotatedDerivation, NotSequentializable, SwitchingCapExceeded, ac_correct_bruteforce,
                          ac_correct_poly, check_annotated, sequentialize)
from .cut_elimination import eliminate_all
from .expansion_nets import (Cut, Disj, Expansion, NetIndex, One, Star, Tensor, TypedForest, TypedRoot, Wire,
                             children, extract_nnet, graph_of, node_at, node_path, validate_forest)
from .subnets import OracleRefused, contiguous_empire, kingdom
from .syntax import ParseError, parse_net, parse_sequent

FORMAT = "exnet/1"

OK, FALSE, INPUT_ERROR, FAULT = 0, 1, 2, 3


class InputError(ValueError):
    pass


# --- node ids in parse order ---------------------------------------------

def parse_order(f: TypedForest) -> list[int]:
    """Node ids in the order the parser allocates them for str(f)."""
    out: list[int] = []

    def term(n):
        if isinstance(n, Cut):
            term(n.left)
            out.append(n.nid)
            term(n.right)
            return
        out.append(n.nid)
        for c in children(n):
            term(c)

    for r in f.roots:
        term(TypedForest.root_node(r))
    return out


def _relabel(n, ids: dict[int, int]):
    if isinstance(n, Expansion):
        return Expansion(ids[n.nid], tuple(_relabel(c, ids) for c in n.summands))
    if isinstance(n, Tensor):
        return Tensor(ids[n.nid], _relabel(n.left, ids), _relabel(n.right, ids))
    if isinstance(n, Disj):
        return Disj(ids[n.nid], _relabel(n.left, ids), _relabel(n.right, ids))
    if isinstance(n, Cut):
        return Cut(ids[n.nid], _relabel(n.left, ids), _relabel(n.right, ids), n.left_type)
    if isinstance(n, Wire):
        return Wire(ids[n.nid], n.symbol, n.positive)
    if isinstance(n, Star):
        return Star(ids[n.nid])
    return One(ids[n.nid])


def net_with_ids(text: str, nids: Optional[list[int]] = None) -> TypedForest:
    f = parse_net(text)
    if nids is None:
        return f
    order = parse_order(f)
    if len(order) != len(nids):
        raise InputError("node id list does not match the net")
    ids = dict(zip(order, nids))
    roots = []
    for r in f.roots:
        if isinstance(r, Cut):
            roots.append(_relabel(r, ids))
        else:
            roots.append(TypedRoot(_relabel(r.term, ids), r.type))
    return TypedForest(tuple(roots))


# --- JSON ----------------------------------------------------------------

def derivation_to_json(d: Derivation) -> dict:
    ids = list(d.conclusion.ids)
    return {
        "rule": d.rule,
        "conclusion": str(d.conclusion),
        "ids": ids,
        "principal": [ids.index(p) for p in d.principal],
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def derivation_from_json(obj: dict) -> Derivation:
    try:
        concl = parse_sequent(obj["conclusion"], obj.get("ids"))
        ids = concl.ids
        principal = tuple(ids[k] for k in obj.get("principal", []))
        premises = tuple(derivation_from_json(p) for p in obj.get("premises", []))
        return Derivation(obj["rule"], concl, principal, premises)
    except (KeyError, IndexError, TypeError, ValueError) as e:
        if isinstance(e, ParseError):
            raise
        raise InputError(f"malformed derivation: {e!r}") from e


def annotated_to_json(d: AnnotatedDerivation) -> dict:
    nids = [TypedForest.root_node(r).nid for r in d.conclusion.roots]
    return {
        "rule": d.rule,
        "conclusion": str(d.conclusion),
        "nids": parse_order(d.conclusion),
        "principal": [nids.index(p) for p in d.principal],
        "premises": [annotated_to_json(p) for p in d.premises],
    }


def annotated_from_json(obj: dict) -> AnnotatedDerivation:
    try:
        f = net_with_ids(obj["conclusion"], obj.get("nids"))
        nids = [TypedForest.root_node(r).nid for r in f.roots]
        principal = tuple(nids[k] for k in obj.get("principal", []))
        premises = tuple(annotated_from_json(p) for p in obj.get("premises", []))
        return AnnotatedDerivation(obj["rule"], f, principal, premises)
    except (KeyError, IndexError, TypeError) as e:
        raise InputError(f"malformed derivation: {e!r}") from e


def dump(kind: str, body: dict) -> str:
    return json.dumps({"format": FORMAT, "kind": kind, **body}, indent=1)


def load(text: str, kind: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from e
    if not isinstance(obj, dict) or obj.get("format") != FORMAT:
        raise InputError(f"expected a JSON object with \"format\": \"{FORMAT}\"")
    if obj.get("kind", kind) != kind:
        raise InputError(f"expected kind {kind!r}, found {obj.get('kind')!r}")
    return obj


def path_text(path: Iterable[int]) -> str:
    return ".".join(map(str, path))


def parse_path(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(k) for k in text.split("."))
    except ValueError as e:
        raise InputError(f"bad node path {text!r}; expected e.g. 0.1.0") from e


# --- DOT -------------------------------------------------------------------

def export_dot(f: TypedForest, highlights: Iterable[int] = ()) -> str:
    """Forest edges solid (child to parent), wire edges dashed, root types as xlabels."""
    g = graph_of(f)
    hl = set(highlights)
    ix = NetIndex(f)
    root_type = {r.nid: str(r.type) for r in f.roots if isinstance(r, TypedRoot)}
    lines = ["digraph net {", "  rankdir=BT;", "  node [shape=plaintext];"]
    for v in g.vertices:
        label = "⋈" if isinstance(ix.node[v], Cut) else g.labels[v]
        attrs = [f'label="{_esc(label)}"']
        if v in root_type:
            attrs.append(f'xlabel="{_esc(root_type[v])}"')
        if v in hl:
            attrs.append('style=filled fillcolor="lightgrey" shape=box')
        lines.append(f"  n{v} [{' '.join(attrs)}];")
    for c, p in g.forest_edges:
        lines.append(f"  n{c} -> n{p};")
    for x, y in g.wire_edges:
        lines.append(f"  n{x} -> n{y} [style=dashed constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


# --- CLI -------------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(str(e)) from e


def _net(path: str) -> TypedForest:
    f = parse_net(_read(path))
    res = validate_forest(f)
    if not res:
        raise InputError(f"invalid net: {res.reason}")
    return f


def _node(f: TypedForest, text: str) -> int:
    path = parse_path(text)
    try:
        return node_at(f, path[0], *path[1:]).nid
    except IndexError as e:
        raise InputError(f"no node at {text}") from e


def cmd_parse(args, out) -> int:
    out.write(str(_net(args.input)) + "\n")
    return OK


def cmd_check(args, out) -> int:
    f = _net(args.input)
    res = ac_correct_poly(f)
    report = {"ac_correct": res.ok}
    if not res.ok:
        report["reason"] = res.reason
    code = OK if res.ok else FALSE
    if args.oracle:
        brute = ac_correct_bruteforce(f)
        report["oracle"] = brute.ok
        report["agree"] = brute.ok == res.ok
        if brute.cycle:
            report["cycle"] = [path_text(node_path(f, n)) for n in brute.cycle]
        if brute.ok != res.ok:
            code = FAULT
    out.write(json.dumps(report) + "\n")
    return code


def cmd_seq(args, out) -> int:
    f = _net(args.input)
    if not f.is_e_annotated():
        raise InputError("seq needs an e-annotated sequent (no cuts or witness roots)")
    try:
        d = sequentialize(f)
    except NotSequentializable as e:
        sys.stderr.write(f"not sequentializable: {e}\n")
        return FALSE
    out.write(dump("annotated", annotated_to_json(d)) + "\n")
    return OK


def cmd_deseq(args, out) -> int:
    d = annotated_from_json(load(_read(args.input), "annotated"))
    res = check_annotated(d)
    if not res:
        sys.stderr.write(f"derivation does not check at {path_text(res.path) or 'root'}: {res.reason}\n")
        return FALSE
    out.write(str(d.conclusion) + "\n")
    return OK


def cmd_translate(args, out) -> int:
    d = derivation_from_json(load(_read(args.input), "derivation"))
    res = check_derivation(d, LK)
    if not res:
        sys.stderr.write(f"not an LK derivation: {res.violation}\n")
        return FALSE
    tr = lk_to_lkstar(d)
    weak = [str(d.conclusion[i]) for i in d.conclusion.ids if i in tr.weak]
    body = {"strong": str(tr.gamma_s), "weak": weak, "derivation": derivation_to_json(tr.derivation)}
    out.write(dump("translation", body) + "\n")
    return OK


def cmd_cutelim(args, out) -> int:
    f = _net(args.input)
    if not ac_correct_poly(f):
        sys.stderr.write("input is not AC-correct\n")
        return FALSE
    res = eliminate_all(f, strategy=args.strategy)
    if args.trace:
        trace = []
        prev = f
        for s in res.steps:
            trace.append({"kind": s.kind, "target": path_text(node_path(prev, s.cut)), "net": str(s.forest)})
            prev = s.forest
        out.write(json.dumps(trace, indent=1) + "\n")
    else:
        out.write(str(res.forest) + "\n")
    return OK


def cmd_subnet(args, out) -> int:
    f = _net(args.input)
    x = _node(f, args.node)
    if isinstance(NetIndex(f).node[x], Star):
        raise InputError("a * node is never the root of a subnet")
    if not ac_correct_poly(f):
        sys.stderr.write("host is not AC-correct\n")
        return FALSE
    g = kingdom(x, f) if args.kind == "kingdom" else contiguous_empire(x, f)
    if args.dot:
        out.write(export_dot(f, g.nodes))
        return OK
    sub = g.as_forest(f)
    body = {"node": args.node, "kind": args.kind, "subnet": str(sub),
            "nodes": sorted(path_text(node_path(f, n)) for n in g.nodes)}
    out.write(json.dumps(body) + "\n")
    return OK


def cmd_render(args, out) -> int:
    f = _net(args.input)
    hl = [_node(f, p) for p in args.highlight]
    out.write(export_dot(f, hl))
    return OK


def cmd_nnet(args, out) -> int:
    f = _net(args.input)
    if f.cuts():
        raise InputError("N-nets need a cut-free net")
    links = sorted(extract_nnet(f).elements())
    body = [{"positive": [r, list(p)], "negative": [s, list(q)]} for (r, p), (s, q) in links]
    out.write(json.dumps(body) + "\n")
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exnet", description="Expansion nets for classical propositional logic.")
    sub = ap.add_subparsers(dest="verb", required=True)

    def verb(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("input", nargs="?", default="-", help="input file, or - for stdin")
        p.set_defaults(func=func)
        return p

    verb("parse", cmd_parse, "parse and validate a net, print it back")
    p = verb("check", cmd_check, "check AC-correctness")
    p.add_argument("--oracle", action="store_true", help="cross-check with the brute-force switching oracle")
    verb("seq", cmd_seq, "sequentialize a net into an annotated derivation (JSON)")
    verb("deseq", cmd_deseq, "check an annotated derivation (JSON) and print its net")
    verb("translate", cmd_translate, "translate an LK derivation (JSON) into LK*")
    p = verb("cutelim", cmd_cutelim, "eliminate all cuts")
    p.add_argument("--trace", action="store_true", help="print every reduction step as JSON")
    p.add_argument("--strategy", choices=["ce", "empire"], default="ce",
                   help="subnet deleted by weakening reductions")
    p = verb("subnet", cmd_subnet, "kingdom or contiguous empire of a node")
    p.add_argument("--node", required=True, help="node path: root index then child indices, e.g. 0.0.1")
    p.add_argument("--kind", choices=["kingdom", "ce"], default="kingdom")
    p.add_argument("--dot", action="store_true", help="print DOT with the subnet shaded")
    p = verb("render", cmd_render, "print the net as DOT")
    p.add_argument("--highlight", action="append", default=[], metavar="PATH", help="node path to shade")
    verb("nnet", cmd_nnet, "print the N-net of a cut-free net")
    return ap


def main(argv: Optional[list[str]] = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return INPUT_ERROR if e.code else OK
    try:
        return args.func(args, out)
    except (ParseError, InputError) as e:
        sys.stderr.write(f"error: {e}\n")
        return INPUT_ERROR
    except (SwitchingCapExceeded, OracleRefused) as e:
        sys.stderr.write(f"error: input too large for the exhaustive oracle: {e}\n")
        return INPUT_ERROR
    except Exception as e:     # contract faults and anything unexpected
        sys.stderr.write(f"internal fault: {type(e).__name__}: {e}\n")
        return FAULT


if __name__ == "__main__":
    sys.exit(main())
