"""The expanded-network flow program and fast feasibility probes.

The core question answered here: can at least ``target`` units travel from
(sender, 0) to (receiver, M) in the layered expansion while every capacity
group (one physical link, one push-residue class) stays within its bandwidth?

Three engines cooperate, all certifying their answers with exact arithmetic:

* an augmenting-path pusher on the group-capacitated residual graph (fast
  "yes" answers with an exact witness flow),
* a float LP solve (scipy/HiGHS) whose dual, snapped to small rationals and
  re-verified exactly, certifies "no" answers,
* the exact rational simplex from `lp`, which is the reference semantics and
  the fallback whenever the quick engines cannot certify.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction

from .expander import ExpandedNetwork, LinkGroup, TRANSIT, link_groups
from .lp import (
    EQ,
    LE,
    OPTIMAL,
    TARGET_REACHED,
    LinearProgram,
    LpSolution,
    solve_lp_reaching,
)
from .maxflow import shortest_delay
from .model import Instance, Link, ModelError, Network


@dataclass
class FlowLp:
    """A built flow program plus the variable -> expanded-link map."""

    program: LinearProgram
    var_links: list[int]  # var j corresponds to exp.links[var_links[j]]
    exp: ExpandedNetwork
    bound: int
    source: int
    sink: int


def build_flow_lp(
    exp: ExpandedNetwork,
    groups: list[LinkGroup],
    inst: Instance,
    bound: int,
    restrict: set[int] | None = None,
) -> FlowLp:
    """Max-throughput program over layers 0..bound.

    One variable per expanded link whose layers fall inside the bound (and
    inside ``restrict`` when given); the objective is total outflow of the
    sender's layer-0 copy; sender outflow equals receiver layer-``bound``
    inflow; flow conserves everywhere else; each capacity group is limited by
    its link bandwidth.  Holding links are uncapacitated.
    """
    if bound > exp.horizon:
        raise ModelError("bound exceeds expansion horizon")
    if inst.sender not in exp.net.nodes or inst.receiver not in exp.net.nodes:
        raise ModelError("instance endpoints missing from expanded network")
    source = exp.node_id(inst.sender, 0)
    sink = exp.node_id(inst.receiver, bound)

    var_links: list[int] = []
    var_of: dict[int, int] = {}
    for idx, el in enumerate(exp.links):
        if exp.layer_of(el.head) > bound:
            continue
        if restrict is not None and idx not in restrict:
            continue
        var_of[idx] = len(var_links)
        var_links.append(idx)

    n = len(var_links)
    objective = [Fraction(0)] * n
    out_at: dict[int, list[int]] = defaultdict(list)
    in_at: dict[int, list[int]] = defaultdict(list)
    for j, idx in enumerate(var_links):
        el = exp.links[idx]
        out_at[el.tail].append(j)
        in_at[el.head].append(j)
    for j in out_at.get(source, []):
        objective[j] = Fraction(1)

    names = []
    for idx in var_links:
        el = exp.links[idx]
        if el.kind == TRANSIT:
            names.append(f"t_{el.link_id}_{el.push}")
        else:
            v, layer = exp.node_of(el.tail)
            names.append(f"h_{v}_{layer}")

    lp = LinearProgram(n_vars=n, objective=objective, names=names)

    balance = {j: Fraction(1) for j in out_at.get(source, [])}
    for j in in_at.get(sink, []):
        balance[j] = balance.get(j, Fraction(0)) - 1
    lp.add_row(balance, Fraction(0), EQ)

    touched = sorted(set(out_at) | set(in_at))
    for node in touched:
        if node == source or node == sink:
            continue
        coeffs: dict[int, Fraction] = {}
        for j in out_at.get(node, []):
            coeffs[j] = coeffs.get(j, Fraction(0)) + 1
        for j in in_at.get(node, []):
            coeffs[j] = coeffs.get(j, Fraction(0)) - 1
        if coeffs:
            lp.add_row(coeffs, Fraction(0), EQ)

    bandwidth = inst.network.link_index
    for group in groups:
        members = [var_of[m] for m in group.members if m in var_of]
        if not members:
            continue
        lp.add_row(
            {j: Fraction(1) for j in members},
            bandwidth[group.link_id].bandwidth,
            LE,
        )

    return FlowLp(
        program=lp,
        var_links=var_links,
        exp=exp,
        bound=bound,
        source=source,
        sink=sink,
    )


def extract_edge_flow(flow_lp: FlowLp, sol: LpSolution) -> dict[int, Fraction]:
    """Map a solved program back onto expanded links (nonzero flow only)."""
    return {
        flow_lp.var_links[j]: v
        for j, v in enumerate(sol.values)
        if v > 0
    }


def flow_value(exp: ExpandedNetwork, flow: dict[int, Fraction], source: int) -> Fraction:
    total = Fraction(0)
    for idx, v in flow.items():
        if exp.links[idx].tail == source:
            total += v
    return total


def useful_links(exp: ExpandedNetwork, inst: Instance, bound: int) -> set[int] | None:
    """Expanded links lying on some (sender,0) -> (receiver,bound) route.

    Dropping the rest never changes the program's feasible flows: links off
    every route carry zero in any conserving solution.  Returns None when the
    receiver copy is unreachable at this bound (program value is zero).
    """
    net = exp.net
    dist_s = shortest_delay(net, inst.sender)
    reversed_net = Network(
        nodes=net.nodes,
        links=tuple(
            Link(l.id, l.head, l.tail, l.delay, l.bandwidth) for l in net.links
        ),
    )
    dist_r = shortest_delay(reversed_net, inst.receiver)
    if dist_s.get(inst.receiver, bound + 1) > bound:
        return None
    keep: set[int] = set()
    for idx, el in enumerate(exp.links):
        tail_v, tail_layer = exp.node_of(el.tail)
        head_v, head_layer = exp.node_of(el.head)
        if head_layer > bound:
            continue
        ds = dist_s.get(tail_v)
        dr = dist_r.get(head_v)
        if ds is None or dr is None:
            continue
        if tail_layer >= ds and head_layer + dr <= bound:
            keep.add(idx)
    return keep


# ---------------------------------------------------------------------------
# engine 1: exact augmentation with shared group capacities


def group_augment(
    exp: ExpandedNetwork,
    inst: Instance,
    period: int,
    bound: int,
    target: Fraction,
    allowed: set[int],
) -> dict[int, Fraction] | None:
    """Push exactly ``target`` units with augmenting paths; None if stalled.

    Residual capacity of a transit copy is its whole group's remaining
    bandwidth, so a path using several copies of one group is throttled by
    the group's residual divided by the number of uses.  Shared capacities
    mean a stall does not prove infeasibility; callers must escalate.
    """
    source = exp.node_id(inst.sender, 0)
    sink = exp.node_id(inst.receiver, bound)
    bandwidth = inst.network.link_index

    out_adj: dict[int, list[int]] = defaultdict(list)
    in_adj: dict[int, list[int]] = defaultdict(list)
    group_of: dict[int, tuple[str, int]] = {}
    group_resid: dict[tuple[str, int], Fraction] = {}
    for idx in allowed:
        el = exp.links[idx]
        out_adj[el.tail].append(idx)
        in_adj[el.head].append(idx)
        if el.kind == TRANSIT:
            g = (el.link_id, el.push % period)
            group_of[idx] = g
            group_resid.setdefault(g, bandwidth[el.link_id].bandwidth)
    for adj in (out_adj, in_adj):
        for links in adj.values():
            links.sort()

    flow: dict[int, Fraction] = defaultdict(Fraction)
    value = Fraction(0)
    max_rounds = 3 * len(allowed) + 64
    for _ in range(max_rounds):
        if value >= target:
            return dict(flow)
        parent: dict[int, tuple[int, bool]] = {source: (-1, True)}
        queue = deque([source])
        while queue and sink not in parent:
            node = queue.popleft()
            for idx in out_adj.get(node, []):
                el = exp.links[idx]
                if el.head in parent:
                    continue
                g = group_of.get(idx)
                if g is None or group_resid[g] > 0:
                    parent[el.head] = (idx, True)
                    queue.append(el.head)
            for idx in in_adj.get(node, []):
                el = exp.links[idx]
                if el.tail in parent or flow[idx] <= 0:
                    continue
                parent[el.tail] = (idx, False)
                queue.append(el.tail)
        if sink not in parent:
            return None
        # trace the path; tally per-group net usage for the bottleneck
        arcs: list[tuple[int, bool]] = []
        node = sink
        while node != source:
            idx, forward = parent[node]
            arcs.append((idx, forward))
            el = exp.links[idx]
            node = el.tail if forward else el.head
        usage: dict[tuple[str, int], int] = defaultdict(int)
        bottleneck = target - value
        for idx, forward in arcs:
            if not forward:
                bottleneck = min(bottleneck, flow[idx])
            g = group_of.get(idx)
            if g is not None:
                usage[g] += 1 if forward else -1
        for g, uses in usage.items():
            if uses > 0:
                bottleneck = min(bottleneck, group_resid[g] / uses)
        if bottleneck <= 0:
            return None
        for idx, forward in arcs:
            g = group_of.get(idx)
            if forward:
                flow[idx] += bottleneck
                if g is not None:
                    group_resid[g] -= bottleneck
            else:
                flow[idx] -= bottleneck
                if g is not None:
                    group_resid[g] += bottleneck
        value += bottleneck
    return None


# ---------------------------------------------------------------------------
# engine 2: float solve with exact dual certification

_SNAP_DENOMINATORS = (1, 2, 4, 8, 24, 120, 5040, 1 << 20)


def _scipy_solve(flow_lp: FlowLp):
    try:
        import numpy as np
        from scipy.optimize import linprog
        from scipy.sparse import csr_matrix
    except ImportError:  # pragma: no cover - scipy is a declared dependency
        return None
    lp = flow_lp.program
    eq_rows = [(c, r) for c, r, s in lp.rows if s == EQ]
    le_rows = [(c, r) for c, r, s in lp.rows if s == LE]

    def sparse(rows):
        data, ri, ci = [], [], []
        for i, (coeffs, _) in enumerate(rows):
            for j, c in coeffs.items():
                ri.append(i)
                ci.append(j)
                data.append(float(c))
        return csr_matrix((data, (ri, ci)), shape=(len(rows), lp.n_vars))

    c = np.array([-float(v) for v in lp.objective])
    res = linprog(
        c,
        A_ub=sparse(le_rows) if le_rows else None,
        b_ub=np.array([float(r) for _, r in le_rows]) if le_rows else None,
        A_eq=sparse(eq_rows) if eq_rows else None,
        b_eq=np.array([float(r) for _, r in eq_rows]) if eq_rows else None,
        bounds=(0, None),
        method="highs",
    )
    if res.status != 0:
        return None
    return {
        "value": -res.fun,
        "eq_marginals": list(res.eqlin.marginals) if eq_rows else [],
        "le_marginals": list(res.ineqlin.marginals) if le_rows else [],
    }


def certify_value_below(flow_lp: FlowLp, target: Fraction, float_result) -> bool:
    """Try to prove optimum < target from snapped float duals, exactly.

    For max c.x with A_eq x = b_eq, A_ub x <= b_ub, x >= 0: any y (free),
    z >= 0 with A_eq'y + A_ub'z >= c bounds the optimum by y.b_eq + z.b_ub.
    """
    if float_result is None:
        return False
    lp = flow_lp.program
    eq_rows = [(c, r) for c, r, s in lp.rows if s == EQ]
    le_rows = [(c, r) for c, r, s in lp.rows if s == LE]

    for sign in (-1, 1):
        for denom in _SNAP_DENOMINATORS:
            try:
                y = [
                    Fraction(sign * m).limit_denominator(denom)
                    for m in float_result["eq_marginals"]
                ]
                z = [
                    max(
                        Fraction(0),
                        Fraction(sign * m).limit_denominator(denom),
                    )
                    for m in float_result["le_marginals"]
                ]
            except (ValueError, OverflowError):  # non-finite marginals
                return False
            if _dual_certifies(lp, eq_rows, le_rows, y, z, target):
                return True
    return False


def _dual_certifies(lp, eq_rows, le_rows, y, z, target) -> bool:
    lhs = [Fraction(0)] * lp.n_vars
    for (coeffs, _), yi in zip(eq_rows, y):
        if yi == 0:
            continue
        for j, c in coeffs.items():
            lhs[j] += yi * c
    for (coeffs, _), zk in zip(le_rows, z):
        if zk == 0:
            continue
        for j, c in coeffs.items():
            lhs[j] += zk * c

    # one repair round: lift group duals to cover their own columns
    bump: dict[int, Fraction] = {}
    for k, (coeffs, _) in enumerate(le_rows):
        worst = Fraction(0)
        for j, c in coeffs.items():
            if c > 0:
                gap = (lp.objective[j] - lhs[j]) / c
                if gap > worst:
                    worst = gap
        if worst > 0:
            bump[k] = worst
    if bump:
        z = list(z)
        for k, extra in bump.items():
            z[k] += extra
            for j, c in le_rows[k][0].items():
                lhs[j] += extra * c

    for j in range(lp.n_vars):
        if lhs[j] < lp.objective[j]:
            return False
    bound = sum((yi * r for (_, r), yi in zip(eq_rows, y)), Fraction(0))
    bound += sum((zk * r for (_, r), zk in zip(le_rows, z)), Fraction(0))
    return bound < target


# ---------------------------------------------------------------------------
# combined probe


@dataclass
class ProbeAnswer:
    feasible: bool
    flow: dict[int, Fraction] | None  # value-target witness when feasible
    engine: str


def probe_reaches(
    exp: ExpandedNetwork,
    inst: Instance,
    period: int,
    bound: int,
    target: Fraction,
) -> ProbeAnswer:
    """Exact answer to "does the flow program at this bound reach target?"."""
    allowed = useful_links(exp, inst, bound)
    if allowed is None:
        return ProbeAnswer(False, None, "unreachable")

    flow = group_augment(exp, inst, period, bound, target, allowed)
    if flow is not None:
        return ProbeAnswer(True, flow, "augment")

    groups = link_groups(exp, period)
    flow_lp = build_flow_lp(exp, groups, inst, bound, restrict=allowed)

    # a stalled pusher usually means the probe is infeasible; a float solve
    # plus an exactly verified dual certificate settles that without ever
    # paying for an exact optimality proof
    float_result = _scipy_solve(flow_lp)
    if (
        float_result is not None
        and float_result["value"] < float(target) - 1e-6
        and certify_value_below(flow_lp, target, float_result)
    ):
        return ProbeAnswer(False, None, "dual-certificate")

    sol = solve_lp_reaching(flow_lp.program, target)
    if sol.status == TARGET_REACHED or (
        sol.status == OPTIMAL and sol.objective_value >= target
    ):
        return ProbeAnswer(True, extract_edge_flow(flow_lp, sol), "simplex")
    if sol.status != OPTIMAL:  # zero flow is always feasible, caps are finite
        raise AssertionError(f"flow program reported {sol.status}")
    return ProbeAnswer(False, None, "simplex")
