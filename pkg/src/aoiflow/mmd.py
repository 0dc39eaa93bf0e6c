"""Minimum maximum delay at a fixed period.

`min_max_delay` follows the binary-search scheme: probe the midpoint bound M,
ask whether the expanded flow program can deliver the whole batch within M
layers, and halve the window accordingly (ceil midpoint, lower bound 0, upper
bound the safe horizon).  Probes are answered exactly but cheaply where an
already-verified witness or a static-rate argument settles them:

* a periodic schedule at period T induces a static flow of rate batch/T by
  averaging one period, so when the static max-flow rate is below batch/T no
  bound is feasible;
* conversely any static flow of that rate lifts to a schedule (spread each
  path's rate over the period's offsets), giving an initial feasible witness;
* the program value never decreases as the bound grows, so a witness schedule
  with delay <= M answers the probe at M.

Every remaining probe runs the exact engines in `flowlp`.  The companion
`min_max_delay_oracle` ignores all of that and scans M = 0, 1, 2, ... solving
each program with the reference simplex; tests hold the two to equal answers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .expander import ExpandedNetwork, build_expanded, horizon_upper_bound, link_groups
from .flowlp import (
    build_flow_lp,
    extract_edge_flow,
    probe_reaches,
)
from .lp import OPTIMAL, solve_lp
from .maxflow import decompose_paths, max_flow
from .model import (
    Instance,
    ModelError,
    Network,
    PeriodicSolution,
    ScheduleEntry,
    normalize_holding,
    validate_solution,
)


@dataclass(frozen=True)
class MmdResult:
    period: int
    max_delay: int
    solution: PeriodicSolution
    probes: tuple[tuple[int, bool], ...]

    @property
    def throughput(self) -> Fraction:
        return Fraction(self.solution.total_amount, self.period)


@lru_cache(maxsize=128)
def _expansion(net: Network, horizon: int) -> ExpandedNetwork:
    return build_expanded(net, horizon)


def lift_path_flow(
    net: Network,
    path_rates: list[tuple[tuple[str, ...], Fraction]],
    period: int,
) -> PeriodicSolution:
    """Turn per-slot path rates into a periodic schedule.

    Each path streams its rate once per offset 0..period-1 with zero holding
    past the sender, so a rate assignment summing to R becomes a schedule
    delivering R*period per period with delay (path delay + period - 1).
    """
    index = net.link_index
    entries = []
    for links, rate in path_rates:
        if rate <= 0:
            continue
        for start in range(period):
            offsets = [0]
            at = start
            for link_id in links:
                at += index[link_id].delay
                offsets.append(at)
            entries.append(ScheduleEntry(tuple(links), tuple(offsets), rate))
    return PeriodicSolution(period, tuple(entries))


def steady_rate_paths(
    net: Network, sender: str, receiver: str, rate: Fraction
) -> list[tuple[tuple[str, ...], Fraction]] | None:
    """A per-slot path flow of exactly ``rate``, favouring fast paths.

    Decomposes a static max-flow and keeps the lowest-delay paths first;
    None when the network cannot sustain the rate.
    """
    flow, value = max_flow(net, sender, receiver)
    if value < rate:
        return None
    paths = decompose_paths(net, flow, sender, receiver)
    index = net.link_index
    paths.sort(key=lambda pr: (sum(index[l].delay for l in pr[0]), pr[0]))
    chosen: list[tuple[tuple[str, ...], Fraction]] = []
    remaining = rate
    for links, amount in paths:
        if remaining <= 0:
            break
        take = min(amount, remaining)
        chosen.append((links, take))
        remaining -= take
    return chosen


def decompose(
    exp: ExpandedNetwork,
    edge_flow: dict[int, Fraction],
    inst: Instance,
    period: int,
    bound: int,
) -> PeriodicSolution:
    """Peel an expanded flow into schedule entries (min-flow link first).

    Every peeled expanded path collapses to a physical path with arrival
    offsets; holding runs become holding delay and trailing holds at the
    receiver vanish.  A collapsed path revisiting a node is rerouted through
    holding at that node (holding is uncapacitated), so entries are simple.
    Peeling stops once the batch is covered; entries then total exactly the
    batch.
    """
    source = exp.node_id(inst.sender, 0)
    sink = exp.node_id(inst.receiver, bound)
    work = {idx: v for idx, v in edge_flow.items() if v > 0}

    imbalance: dict[int, Fraction] = {}
    for idx, v in work.items():
        el = exp.links[idx]
        imbalance[el.tail] = imbalance.get(el.tail, Fraction(0)) + v
        imbalance[el.head] = imbalance.get(el.head, Fraction(0)) - v
    for node, delta in imbalance.items():
        if node not in (source, sink) and delta != 0:
            raise ModelError(f"flow does not conserve at expanded node {node}")

    out_sup: dict[int, list[int]] = {}
    in_sup: dict[int, list[int]] = {}
    for idx in work:
        el = exp.links[idx]
        out_sup.setdefault(el.tail, []).append(idx)
        in_sup.setdefault(el.head, []).append(idx)
    for adj in (out_sup, in_sup):
        for links in adj.values():
            links.sort()

    def first_positive(cands: list[int]) -> int | None:
        for idx in cands:
            if work.get(idx, Fraction(0)) > 0:
                return idx
        return None

    entries: list[ScheduleEntry] = []
    remaining = inst.batch
    while remaining > 0 and work:
        seed = min(work.items(), key=lambda kv: (kv[1], kv[0]))[0]
        path = [seed]
        node = exp.links[seed].tail
        while node != source:
            idx = first_positive(in_sup.get(node, []))
            if idx is None:
                raise ModelError("flow path cannot be traced back to the sender")
            path.insert(0, idx)
            node = exp.links[idx].tail
        node = exp.links[seed].head
        while node != sink:
            idx = first_positive(out_sup.get(node, []))
            if idx is None:
                raise ModelError("flow path cannot be traced to the receiver")
            path.append(idx)
            node = exp.links[idx].head
        amount = min(min(work[idx] for idx in path), remaining)
        for idx in path:
            work[idx] -= amount
            if work[idx] == 0:
                del work[idx]
        entries.append(_collapse(exp, path, amount))
        remaining -= amount

    return PeriodicSolution(period, tuple(entries))


def _collapse(exp: ExpandedNetwork, path: list[int], amount: Fraction) -> ScheduleEntry:
    hops: list[tuple[str, int]] = []  # (physical link id, arrival layer)
    for idx in path:
        el = exp.links[idx]
        if el.link_id is not None:
            hops.append((el.link_id, exp.layer_of(el.head)))
    start, _ = exp.node_of(exp.links[path[0]].tail)
    nodes = [start]
    for idx in path:
        el = exp.links[idx]
        if el.link_id is not None:
            nodes.append(exp.node_of(el.head)[0])

    # reroute revisits through holding: drop the detour between two visits
    changed = True
    while changed:
        changed = False
        seen: dict[str, int] = {}
        for pos, v in enumerate(nodes):
            if v in seen:
                i = seen[v]
                del hops[i:pos]
                del nodes[i + 1 : pos + 1]
                changed = True
                break
            seen[v] = pos

    offsets = (0,) + tuple(layer for _, layer in hops)
    return ScheduleEntry(tuple(h for h, _ in hops), offsets, amount)


class _PeriodSolver:
    """Probe state for one (instance, period) pair."""

    def __init__(self, inst: Instance, period: int, horizon: int):
        self.inst = inst
        self.period = period
        self.horizon = horizon
        self.exp = _expansion(inst.network, horizon)
        self.rate = Fraction(inst.batch, period)
        self.static_rate = max_flow(inst.network, inst.sender, inst.receiver)[1]
        self.witness_delay: int | None = None
        self._witness_schedule: PeriodicSolution | None = None
        self._witness_flow: tuple[dict[int, Fraction], int] | None = None
        if self.static_rate >= self.rate:
            paths = steady_rate_paths(
                inst.network, inst.sender, inst.receiver, self.rate
            )
            lifted = lift_path_flow(inst.network, paths, period)
            self._set_schedule_witness(lifted)

    def _set_schedule_witness(self, schedule: PeriodicSolution) -> None:
        schedule = normalize_holding(self.inst.network, schedule)
        ok, delay, violations = validate_solution(self.inst, schedule)
        if not ok:  # witnesses decide probes, so an invalid one is a bug
            raise AssertionError(f"witness schedule invalid: {violations}")
        if self.witness_delay is None or delay < self.witness_delay:
            self.witness_delay = delay
            self._witness_schedule = schedule
            self._witness_flow = None

    def _set_flow_witness(self, flow: dict[int, Fraction], bound: int) -> None:
        delay = 0
        receiver = self.inst.receiver
        for idx, v in flow.items():
            el = self.exp.links[idx]
            if v > 0 and el.link_id is not None:
                head, layer = self.exp.node_of(el.head)
                if head == receiver:
                    delay = max(delay, layer)
        if self.witness_delay is None or delay < self.witness_delay:
            self.witness_delay = delay
            self._witness_flow = (flow, bound)
            self._witness_schedule = None

    def probe(self, bound: int) -> bool:
        if self.static_rate < self.rate:
            return False
        if self.witness_delay is not None and self.witness_delay <= bound:
            return True
        answer = probe_reaches(
            self.exp, self.inst, self.period, bound, self.inst.batch
        )
        if answer.feasible:
            self._set_flow_witness(answer.flow, bound)
        return answer.feasible

    def materialize(self) -> PeriodicSolution:
        if self._witness_schedule is not None:
            return self._witness_schedule
        flow, bound = self._witness_flow
        raw = decompose(self.exp, flow, self.inst, self.period, bound)
        return normalize_holding(self.inst.network, raw)


def min_max_delay(
    inst: Instance, period: int, horizon: int | None = None
) -> MmdResult | None:
    """Smallest delay bound M admitting a full-batch schedule at this period.

    Returns the result with a decomposed, normalized schedule achieving M and
    the (bound, feasible) probe trail; None when the period's throughput is
    not supportable at all.
    """
    if period not in range(inst.min_period, inst.max_period + 1):
        raise ModelError(f"period {period} outside the instance window")
    mu = horizon_upper_bound(inst) if horizon is None else horizon
    return _min_max_delay_cached(inst, period, mu)


@lru_cache(maxsize=4096)
def _min_max_delay_cached(
    inst: Instance, period: int, horizon: int
) -> MmdResult | None:
    solver = _PeriodSolver(inst, period, horizon)
    low, high = 0, horizon
    best: int | None = None
    probes: list[tuple[int, bool]] = []
    while low <= high:
        mid = (low + high + 1) // 2
        feasible = solver.probe(mid)
        probes.append((mid, feasible))
        if feasible:
            best = mid
            high = mid - 1
        else:
            low = mid + 1
    if best is None:
        return None
    solution = solver.materialize()
    ok, max_delay, violations = validate_solution(inst, solution)
    if not ok:
        raise AssertionError(f"decomposed schedule invalid: {violations}")
    if max_delay != best:
        raise AssertionError(
            f"schedule delay {max_delay} disagrees with probed minimum {best}"
        )
    return MmdResult(period, best, solution, tuple(probes))


def min_max_delay_oracle(
    inst: Instance, period: int, horizon: int | None = None
) -> MmdResult | None:
    """Ascending scan M = 0, 1, 2, ... with plain reference LP solves.

    Slow but structurally independent of the binary search and its probe
    shortcuts; used for verification.
    """
    if period not in range(inst.min_period, inst.max_period + 1):
        raise ModelError(f"period {period} outside the instance window")
    mu = horizon_upper_bound(inst) if horizon is None else horizon
    rate = Fraction(inst.batch, period)
    if max_flow(inst.network, inst.sender, inst.receiver)[1] < rate:
        return None
    exp = _expansion(inst.network, mu)
    groups = link_groups(exp, period)
    probes: list[tuple[int, bool]] = []
    for bound in range(0, mu + 1):
        flow_lp = build_flow_lp(exp, groups, inst, bound)
        sol = solve_lp(flow_lp.program)
        feasible = sol.status == OPTIMAL and sol.objective_value >= inst.batch
        probes.append((bound, feasible))
        if feasible:
            flow = extract_edge_flow(flow_lp, sol)
            raw = decompose(exp, flow, inst, period, bound)
            solution = normalize_holding(inst.network, raw)
            ok, max_delay, violations = validate_solution(inst, solution)
            if not ok:
                raise AssertionError(f"oracle schedule invalid: {violations}")
            return MmdResult(period, bound, solution, tuple(probes))
    return None
