"""Command-line front end.

Exit status: 0 for YES (or a valid witness), 1 for NO, 2 for errors.
"""
from __future__ import annotations

import argparse
import random
import sys

from .aeps import aeps_to_pda, normalize_distinct_pushes
from .aps import DEFAULT_STATE_BUDGET, build_aps
from .errors import PdsyncError
from .formats import format_aps, format_pda, format_problem, load_instance
from .generate import random_pda
from .oracle import Bounds, Yes
from .pda import complete, is_deterministic
from .pipeline import decide, oracle_decide
from .reductions import EDGES, VARIANTS, ProblemInstance, reduce
from .sparse import sparse_empty
from .witness import check_witness, deserialize_tree, serialize_tree, tree_to_dot

YES, NO, ERROR = 0, 1, 2


def _order(pda):
    return lambda states: pda.sorted_states(states)


def _emit_witness(args, pda, witness):
    if not args.witness:
        return
    text = tree_to_dot(witness, _order(pda)) if args.dot else serialize_tree(witness, _order(pda))
    with open(args.witness, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_decide(args):
    inst = load_instance(args.file).instance(args.variant)
    result = decide(inst, k=args.k, state_budget=args.state_budget, solver=args.solver)
    print(f"answer: {'YES' if result.answer else 'NO'}")
    print(f"variant: {inst.variant}")
    if result.target is not None:
        print(f"target: {result.target}")
    print(f"solver: {result.solver}")
    print("trace: " + (" -> ".join(result.trace) or "(none)"))
    if args.timing:
        print(f"time: {result.seconds:.3f}s")
    if result.answer:
        _emit_witness(args, inst.pda, result.witness)
    return YES if result.answer else NO


def cmd_reduce(args):
    inst = load_instance(args.file).instance(args.variant)
    red = reduce(inst, args.to)
    out = red.instance
    sys.stdout.write(format_pda(out.pda, out))
    lines = [f"# reduction: {red.tag}"]
    lines += [f"# {name}: {red.name_map[name]}" for name in sorted(red.name_map, key=str)]
    if args.name_map:
        with open(args.name_map, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        print("\n".join(lines))
    return YES


def cmd_aeps_to_pda(args):
    doc = load_instance(args.file)
    if doc.kind != "aeps":
        raise PdsyncError("aeps-to-pda expects an aeps document")
    aeps = normalize_distinct_pushes(doc.model)
    red = aeps_to_pda(aeps)
    inst = ProblemInstance(red.pda, "super", red.root.states, red.target, red.root.stack)
    sys.stdout.write(format_pda(red.pda, inst))
    return YES


def cmd_oracle(args):
    inst = load_instance(args.file).instance(args.variant)
    bounds = Bounds(args.stack_bound, args.depth_bound, args.node_budget)
    res, target = oracle_decide(inst, bounds)
    if isinstance(res, Yes):
        print("answer: YES")
        if target is not None:
            print(f"target: {target}")
        _emit_witness(args, inst.pda, res.witness)
        return YES
    print("answer: NO within bounds")
    return NO


def cmd_check_witness(args):
    inst = load_instance(args.file).instance(args.variant)
    with open(args.tree, encoding="utf-8") as fh:
        tree = deserialize_tree(fh.read())
    kind = inst.witness_kind(args.target)
    if getattr(kind, "target", "") is None:
        raise PdsyncError("this variant needs --target to check a witness")
    verdict = check_witness(complete(inst.pda), inst.root, kind, tree)
    if verdict:
        print("valid")
        return YES
    print(f"invalid at {list(verdict.path)}: {verdict.reason}")
    return NO


def cmd_info(args):
    doc = load_instance(args.file)
    if doc.kind != "pda":
        print(f"kind: {doc.kind}")
        return YES
    pda = doc.model
    print(f"states: {len(pda.states)}")
    print(f"inputs: {len(pda.inputs)}")
    print(f"stack letters: {len(pda.stack_syms)}")
    print(f"rules: {len(pda.rules)}")
    print(f"is-deterministic: {'true' if is_deterministic(complete(pda)) else 'false'}")
    if doc.problem is not None:
        print(format_problem(doc.instance()))
    return YES


def cmd_sparse(args):
    doc = load_instance(args.file)
    if doc.kind == "aps":
        aps = doc.model
    else:
        inst = doc.instance(args.variant or "special")
        if inst.variant not in ("special", "super"):
            raise PdsyncError("sparse on a PDA needs a super or special header")
        if inst.stack != (inst.pda.bottom,):
            raise PdsyncError("sparse on a PDA needs the bottom-only start stack")
        aps = build_aps(inst.pda, inst.initial, inst.target, state_budget=args.state_budget)
    if args.print_aps:
        sys.stdout.write(format_aps(aps))
    ok, run = sparse_empty(aps, args.k, state_budget=args.state_budget)
    print(f"answer: {'YES' if ok else 'NO'}")
    if ok:
        print(f"leaves: {run.leaf_count()}")
    return YES if ok else NO


def cmd_random(args):
    rng = random.Random(args.seed)
    pda = random_pda(rng, args.states, args.inputs, args.stack,
                     deterministic=not args.nondeterministic)
    inst = ProblemInstance(pda, "special", frozenset(pda.states), pda.states[0])
    sys.stdout.write(format_pda(pda, inst))
    return YES


def build_parser():
    p = argparse.ArgumentParser(prog="pdsync", description="Synchronisation of pushdown automata")
    sub = p.add_subparsers(dest="command", required=True)

    def instance_cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file")
        sp.add_argument("--variant", choices=VARIANTS, help="override the problem header")
        sp.set_defaults(fn=fn)
        return sp

    def witness_flags(sp):
        sp.add_argument("--witness", metavar="PATH", help="write the witness tree here")
        sp.add_argument("--dot", action="store_true", help="write the witness as Graphviz")

    sp = instance_cmd("decide", cmd_decide, "decide a synchronisation problem")
    witness_flags(sp)
    sp.add_argument("--k", type=int, help="leaf bound for sparse emptiness")
    sp.add_argument("--state-budget", type=int, default=DEFAULT_STATE_BUDGET)
    sp.add_argument("--solver", choices=("sparse", "saturation"))
    sp.add_argument("--timing", action="store_true", help="print wall-clock time")

    sp = sub.add_parser("reduce", help="apply one gadget reduction")
    sp.add_argument("file")
    sp.add_argument("--variant", "--from", dest="variant", choices=VARIANTS,
                    help="source variant (defaults to the problem header)")
    sp.add_argument("--to", required=True, choices=sorted({b for _, b in EDGES}))
    sp.add_argument("--name-map", metavar="PATH", help="write the name map here")
    sp.set_defaults(fn=cmd_reduce)

    sp = sub.add_parser("aeps-to-pda", help="reduce an AEPS to a super-sync instance")
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_aeps_to_pda)

    sp = instance_cmd("oracle", cmd_oracle, "bounded brute-force game search")
    witness_flags(sp)
    sp.add_argument("--stack-bound", type=int, default=8)
    sp.add_argument("--depth-bound", type=int, default=64)
    sp.add_argument("--node-budget", type=int, default=200_000)

    sp = instance_cmd("check-witness", cmd_check_witness, "validate a witness tree")
    sp.add_argument("tree")
    sp.add_argument("--target", help="synchronising state for ada/subset")

    instance_cmd("info", cmd_info, "summarise a document")

    sp = instance_cmd("sparse", cmd_sparse, "sparse emptiness with a leaf bound")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--state-budget", type=int, default=DEFAULT_STATE_BUDGET)
    sp.add_argument("--print-aps", action="store_true")

    sp = sub.add_parser("random", help="print a random special-sync instance")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--states", type=int, default=3)
    sp.add_argument("--inputs", type=int, default=2)
    sp.add_argument("--stack", type=int, default=2)
    sp.add_argument("--nondeterministic", action="store_true")
    sp.set_defaults(fn=cmd_random)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else YES
    try:
        return args.fn(args)
    except (PdsyncError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
