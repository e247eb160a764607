"""Brute-force deciders used to cross-check the real solvers at desk scale.

Everything here explores explicit configurations up to a stack bound.  A
negative answer is reported as NoWithinBounds, never as a proof of NO.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .aps import Aps, Nps, NpsRule, RunNode
from .errors import BudgetExceeded, ValidationError
from .pda import Pda, PseudoConfig, complete, succ
from .witness import Node, leaf_ok


@dataclass(frozen=True)
class Bounds:
    stack_bound: int = 8
    depth_bound: int = 64
    node_budget: int = 200_000

    def __post_init__(self):
        if min(self.stack_bound, self.depth_bound, self.node_budget) <= 0:
            raise ValidationError("bounds must be positive")


@dataclass(frozen=True)
class Yes:
    witness: object


@dataclass(frozen=True)
class NoWithinBounds:
    explored: int = 0

    def __bool__(self):
        return False


def bounded_game_solve(pda: Pda, root: PseudoConfig, kind, bounds: Bounds = Bounds()):
    """AND-OR search over pseudo-configurations.

    Explores every pseudo-configuration reachable from ``root`` with stack
    length within the bound, then computes the observer's attractor to the
    leaf condition.  Ranks give the depth of the shallowest strategy.
    """
    pda = complete(pda)
    pda.check_pseudo_config(root)
    moves = {}  # pc -> [(letter, successors)]
    order = [root]
    seen = {root: 0}
    queue = deque([root])
    while queue:
        pc = queue.popleft()
        if leaf_ok(pda, kind, pc):
            moves[pc] = []
            continue
        options = []
        for letter in pda.inputs:
            nxt = succ(pda, pc, letter)
            if any(len(c.stack) > bounds.stack_bound for c in nxt):
                continue
            options.append((letter, nxt))
            for c in nxt:
                if c not in seen:
                    seen[c] = len(order)
                    order.append(c)
                    queue.append(c)
                    if len(order) > bounds.node_budget:
                        raise BudgetExceeded(
                            f"game graph exceeded the node budget of {bounds.node_budget}"
                        )
        moves[pc] = options

    rank = {}
    choice = {}
    waiting = {}  # (pc, move index) -> successors not yet winning
    parents = {}
    frontier = deque()
    for pc in order:
        if leaf_ok(pda, kind, pc):
            rank[pc] = 0
            frontier.append(pc)
            continue
        for i, (_, nxt) in enumerate(moves[pc]):
            distinct = set(nxt)
            waiting[(pc, i)] = len(distinct)
            for c in distinct:
                parents.setdefault(c, []).append((pc, i))
    while frontier:
        c = frontier.popleft()
        for pc, i in parents.get(c, ()):
            if pc in rank:
                continue
            waiting[(pc, i)] -= 1
            if waiting[(pc, i)] == 0:
                rank[pc] = rank[c] + 1
                choice[pc] = i
                frontier.append(pc)

    if root not in rank or rank[root] > bounds.depth_bound:
        return NoWithinBounds(len(order))

    def build(pc):
        if rank[pc] == 0:
            return Node(pc)
        letter, nxt = moves[pc][choice[pc]]
        return Node(pc, letter, tuple(build(c) for c in nxt))

    return Yes(build(root))


def _enabled(aps, config):
    q, stack = config
    return aps.by_head.get((q, stack[0]), ())


def _children(rule, stack):
    rest = stack[1:]
    return [(dst, push + rest) for dst, push in rule.branches]


def _explore(aps, root, bounds, rule_filter=None):
    """Forward closure of configurations within the stack bound."""
    seen = {root: None}
    queue = deque([root])
    while queue:
        config = queue.popleft()
        for rule in _enabled(aps, config):
            if rule_filter and not rule_filter(rule):
                continue
            for child in _children(rule, config[1]):
                if len(child[1]) > bounds.stack_bound:
                    continue
                if child not in seen:
                    seen[child] = None
                    queue.append(child)
                    if len(seen) > bounds.node_budget:
                        raise BudgetExceeded(
                            f"configuration graph exceeded the node budget of {bounds.node_budget}"
                        )
    return list(seen)


def min_leaf_runs(aps: Aps, root, bounds: Bounds):
    """Fewest leaves of an accepting run from each explored configuration.

    Knuth's generalisation of Dijkstra to AND-OR graphs with additive costs;
    returns ``(cost, best_rule)`` dictionaries.
    """
    configs = _explore(aps, root, bounds)
    final = (aps.fin, (aps.bottom,))
    uses = {}  # config -> [(parent, rule, children)]
    apps = []
    for config in configs:
        for rule in _enabled(aps, config):
            kids = _children(rule, config[1])
            if any(len(s) > bounds.stack_bound for _, s in kids):
                continue
            app = [config, rule, kids, 0]
            apps.append(app)
            for kid in set(kids):
                uses.setdefault(kid, []).append(app)
    cost, best = {}, {}
    heap = []
    counter = 0
    if final in set(configs):
        heapq.heappush(heap, (1, counter, final, None))
    while heap:
        value, _, config, rule = heapq.heappop(heap)
        if config in cost:
            continue
        cost[config] = value
        best[config] = rule
        for app in uses.get(config, ()):
            parent, prule, kids, _ = app
            app[3] += 1
            if app[3] == len(set(kids)) and parent not in cost:
                counter += 1
                total = sum(cost[k] for k in kids)
                heapq.heappush(heap, (total, counter, parent, (prule, tuple(kids))))
    return cost, best


def bounded_aps_run_search(aps: Aps, max_leaves: Optional[int] = None, bounds: Bounds = Bounds(),
                           root=None):
    """Search for an accepting run with at most ``max_leaves`` leaves."""
    root = root or (aps.init, (aps.bottom,))
    cost, best = min_leaf_runs(aps, root, bounds)
    if root not in cost or (max_leaves is not None and cost[root] > max_leaves):
        return NoWithinBounds(len(cost))

    def build(config):
        step = best[config]
        if step is None:
            return RunNode(*config)
        rule, kids = step
        return RunNode(config[0], config[1], rule, tuple(build(k) for k in kids))

    return Yes(build(root))


def min_leaf_compressed_runs(aps: Aps, root, bounds: Bounds):
    """Fewest leaves of a compressed accepting run from each configuration.

    A compressed run alternates NPS-reachability segments with complex
    vertices (the final leaf or a multi-branch rule), so the value is a
    fixpoint over two mutually recursive tables.
    """
    configs = _explore(aps, root, bounds)
    within = set(configs)
    single = lambda r: len(r.branches) == 1  # noqa: E731
    reach = {}
    for config in configs:
        seen = {config: None}
        queue = deque([config])
        while queue:
            cur = queue.popleft()
            for rule in _enabled(aps, cur):
                if not single(rule):
                    continue
                (child,) = _children(rule, cur[1])
                if child in within and child not in seen:
                    seen[child] = None
                    queue.append(child)
        reach[config] = list(seen)
    inf = float("inf")
    final = (aps.fin, (aps.bottom,))
    cplx = {c: (1 if c == final else inf) for c in configs}
    tree = {}
    changed = True
    while changed:
        changed = False
        for c in configs:
            val = min(cplx[d] for d in reach[c])
            if val != tree.get(c):
                tree[c] = val
                changed = True
        for c in configs:
            for rule in _enabled(aps, c):
                if single(rule):
                    continue
                kids = _children(rule, c[1])
                if any(k not in within for k in kids):
                    continue
                val = sum(tree[k] for k in kids)
                if val < cplx[c]:
                    cplx[c] = val
                    changed = True
    return tree


def brute_prestar(nps: Nps, targets, bounds: Bounds):
    """Backward closure of ``targets`` through configurations within the bound."""
    by_dst = {}
    for rule in nps.rules:
        by_dst.setdefault(rule.dst, []).append(rule)
    result = {}
    queue = deque()
    for t in targets:
        t = (t[0], tuple(t[1]))
        if len(t[1]) <= bounds.stack_bound and t not in result:
            result[t] = None
            queue.append(t)
    while queue:
        q, word = queue.popleft()
        for rule in by_dst.get(q, ()):
            n = len(rule.push)
            if word[:n] != rule.push:
                continue
            pred = (rule.src, (rule.pop,) + word[n:])
            if len(pred[1]) > bounds.stack_bound or pred in result:
                continue
            result[pred] = None
            queue.append(pred)
            if len(result) > bounds.node_budget:
                raise BudgetExceeded("brute_prestar exceeded the node budget")
    return set(result)


def shape_configs(aps: Aps, tree, bounds: Bounds):
    """Configurations with a compressed accepting run shaped like ``tree``.

    Explicit-set version of the bottom-up labelling: leaves hold (fin, bottom),
    simple vertices close their child's set under single-branch predecessors,
    and complex vertices apply rules whose branch count matches the children.
    Only configurations within the stack bound are represented.
    """
    kind = tree[0]
    if kind == "leaf":
        return {(aps.fin, (aps.bottom,))}
    if kind == "simple":
        nps = Nps(aps.states, aps.stack_syms, aps.bottom, tuple(
            NpsRule(r.src, r.pop, r.branches[0][0], r.branches[0][1])
            for r in aps.rules if len(r.branches) == 1
        ))
        return brute_prestar(nps, shape_configs(aps, tree[1], bounds), bounds)
    kids = [shape_configs(aps, child, bounds) for child in tree[1]]
    out = set()
    for rule in aps.rules:
        if len(rule.branches) != len(kids):
            continue
        # candidate tails: suffixes of words in the first child's set
        dst, push = rule.branches[0]
        tails = {w[len(push):] for q, w in kids[0] if q == dst and w[:len(push)] == push}
        if rule.pop == aps.bottom:
            tails &= {()}
        for tail in tails:
            word = (rule.pop,) + tail
            if len(word) > bounds.stack_bound or (tail and tail[-1] != aps.bottom):
                continue
            if rule.pop != aps.bottom and not tail:
                continue
            if all((d, p + tail) in kid for (d, p), kid in zip(rule.branches, kids)):
                out.add((rule.src, word))
    return out


def nps_path(nps: Nps, start, targets, bounds: Bounds):
    """Shortest rule sequence from ``start`` into ``targets`` (BFS), or None."""
    targets = {(q, tuple(w)) for q, w in targets}
    by_head = {}
    for rule in nps.rules:
        by_head.setdefault((rule.src, rule.pop), []).append(rule)
    start = (start[0], tuple(start[1]))
    parent = {start: None}
    queue = deque([start])
    while queue:
        config = queue.popleft()
        if config in targets:
            path = []
            while parent[config] is not None:
                config, rule = parent[config]
                path.append(rule)
            return path[::-1]
        q, word = config
        for rule in by_head.get((q, word[0]), ()):
            nxt = (rule.dst, rule.push + word[1:])
            if len(nxt[1]) > bounds.stack_bound or nxt in parent:
                continue
            parent[nxt] = (config, rule)
            queue.append(nxt)
            if len(parent) > bounds.node_budget:
                raise BudgetExceeded("nps_path exceeded the node budget")
    return None


def oracle_decide_exists(pda: Pda, root: PseudoConfig, bounds: Bounds, super_=False):
    """Try every target state; return (state, witness) for the first success."""
    from .witness import Synchroniser, SuperSynchroniser

    for s in pda.states:
        kind = SuperSynchroniser(s) if super_ else Synchroniser(s)
        res = bounded_game_solve(pda, root, kind, bounds)
        if isinstance(res, Yes):
            return s, res.witness
    return None, None
