"""Topology generators and the sweep/batch measurement harness.

Generated graphs are undirected; every undirected edge becomes two directed
links operating independently, each drawing its own delay and bandwidth from
the configured choice sets.  All draws come from one seeded PRNG in a fixed
order (edges first, then attributes in sorted edge order), so a spec + seed
pins the network byte for byte.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from fractions import Fraction

from .maxflow import max_steady_rate
from .mmd import min_max_delay
from .model import Instance, ModelError, Network, Link, feasible_periods, report_for
from .solvers import mmd1_exact

DEFAULT_DELAYS = (1, 2, 3, 4, 5)
DEFAULT_BANDWIDTHS = (
    Fraction(10),
    Fraction(20),
    Fraction(30),
    Fraction(40),
    Fraction(50),
)


@dataclass(frozen=True)
class TopologySpec:
    kind: str  # complete | grid | erdos-renyi | watts-strogatz | copying
    params: tuple
    seed: int
    delay_choices: tuple[int, ...] = DEFAULT_DELAYS
    bandwidth_choices: tuple[Fraction, ...] = DEFAULT_BANDWIDTHS


def complete_graph(n: int, seed: int, **kw) -> TopologySpec:
    return TopologySpec("complete", (n,), seed, **kw)


def grid_graph(rows: int, cols: int, seed: int, **kw) -> TopologySpec:
    return TopologySpec("grid", (rows, cols), seed, **kw)


def erdos_renyi(n: int, m: int, seed: int, **kw) -> TopologySpec:
    return TopologySpec("erdos-renyi", (n, m), seed, **kw)


def watts_strogatz(n: int, k: int, p: float, seed: int, **kw) -> TopologySpec:
    return TopologySpec("watts-strogatz", (n, k, p), seed, **kw)


def copying_model(n: int, p: float, seed: int, **kw) -> TopologySpec:
    return TopologySpec("copying", (n, p), seed, **kw)


def _undirected_edges(spec: TopologySpec, rng: random.Random) -> tuple[list[str], list[tuple[str, str]]]:
    kind, params = spec.kind, spec.params
    if kind == "complete":
        (n,) = params
        if n < 2:
            raise ModelError("complete graph needs at least 2 nodes")
        nodes = [f"a{i}" for i in range(1, n + 1)]
        edges = [(nodes[i], nodes[j]) for i in range(n) for j in range(i + 1, n)]
        return nodes, edges
    if kind == "grid":
        rows, cols = params
        if rows < 2 or cols < 2:
            raise ModelError("grid needs at least 2x2")
        nodes = [f"a{r}_{c}" for r in range(1, rows + 1) for c in range(1, cols + 1)]
        edges = []
        for r in range(1, rows + 1):
            for c in range(1, cols + 1):
                if c < cols:
                    edges.append((f"a{r}_{c}", f"a{r}_{c + 1}"))
                if r < rows:
                    edges.append((f"a{r}_{c}", f"a{r + 1}_{c}"))
        return nodes, edges
    if kind == "erdos-renyi":
        n, m = params
        nodes = [f"a{i}" for i in range(1, n + 1)]
        pairs = [(nodes[i], nodes[j]) for i in range(n) for j in range(i + 1, n)]
        if m > len(pairs):
            raise ModelError("more edges requested than node pairs")
        return nodes, sorted(rng.sample(pairs, m))
    if kind == "watts-strogatz":
        n, k, p = params
        half = (k + 1) // 2  # odd ring degrees round up to the next even one
        if n < 2 * half + 1:
            raise ModelError("ring too small for the requested degree")
        nodes = [f"a{i}" for i in range(1, n + 1)]
        edges = set()
        ring = []
        for i in range(n):
            for j in range(1, half + 1):
                a, b = i, (i + j) % n
                ring.append((min(a, b), max(a, b)))
        for a, b in ring:
            pair = (a, b)
            if rng.random() < p:
                for _ in range(8):  # rewire, keeping the edge on failure
                    c = rng.randrange(n)
                    if c != a and (min(a, c), max(a, c)) not in edges:
                        pair = (min(a, c), max(a, c))
                        break
            if pair not in edges:
                edges.add(pair)
        return nodes, sorted((nodes[a], nodes[b]) for a, b in edges)
    if kind == "copying":
        n, p = params
        if n < 2:
            raise ModelError("copying model needs at least 2 nodes")
        nodes = [f"a{i}" for i in range(1, n + 1)]
        edges = {(0, 1)}
        neighbors = {0: {1}, 1: {0}}
        for v in range(2, n):
            proto = rng.randrange(v)
            attached = set()
            for w in sorted(neighbors[proto]):
                target = w
                if rng.random() < p:
                    target = rng.randrange(v)
                if target != v and target not in attached:
                    attached.add(target)
            if not attached:
                attached.add(proto)
            neighbors[v] = set()
            for w in attached:
                edges.add((min(v, w), max(v, w)))
                neighbors[v].add(w)
                neighbors[w].add(v)
        return nodes, sorted((nodes[a], nodes[b]) for a, b in edges)
    raise ModelError(f"unknown topology kind {spec.kind!r}")


def generate(spec: TopologySpec) -> Network:
    """Deterministic network for the spec (two directed links per edge)."""
    rng = random.Random(spec.seed)
    nodes, edges = _undirected_edges(spec, rng)
    links = []
    for u, v in sorted(edges):
        for tail, head in ((u, v), (v, u)):
            links.append(
                Link(
                    id=f"{tail}>{head}",
                    tail=tail,
                    head=head,
                    delay=rng.choice(spec.delay_choices),
                    bandwidth=Fraction(rng.choice(spec.bandwidth_choices)),
                )
            )
    return Network(nodes=tuple(nodes), links=tuple(links))


def undirected_edge_count(net: Network) -> int:
    return len(net.links) // 2


def batch_capacity(net: Network, sender: str, receiver: str) -> Fraction:
    """Largest amount streamable per slot from sender to receiver.

    This equals the static max-flow rate: a periodic schedule averages to a
    static flow of its throughput, and any static flow replayed every slot is
    a valid unit-period schedule.
    """
    if sender == receiver:
        raise ModelError("sender and receiver must differ")
    return max_steady_rate(net, sender, receiver)


def scaled_instance(
    net: Network, sender: str, receiver: str, scale: int, n_periods: int = 10
) -> Instance:
    """Batch = scale * capacity with n_periods candidate periods from scale up."""
    cap = batch_capacity(net, sender, receiver)
    if cap <= 0:
        raise ModelError("sender cannot reach receiver")
    batch = scale * cap
    return Instance(
        network=net,
        sender=sender,
        receiver=receiver,
        batch=batch,
        r_min=Fraction(batch, scale + n_periods - 1),
        r_max=Fraction(batch, scale),
    )


@dataclass(frozen=True)
class SweepRow:
    period: int
    throughput: Fraction
    status: str  # "ok" | "infeasible"
    delay_opt: int | None
    peak_opt: int | None
    avg_opt: Fraction | None
    peak_ap: int | None
    avg_ap: Fraction | None


def run_sweep(inst: Instance, horizon: int | None = None) -> list[SweepRow]:
    """Per-period optimal values next to the steady-rate replay's values."""
    rows = []
    for period in feasible_periods(inst):
        throughput = Fraction(inst.batch, period)
        opt = min_max_delay(inst, period, horizon)
        if opt is None:
            rows.append(
                SweepRow(period, throughput, "infeasible", None, None, None, None, None)
            )
            continue
        ap = mmd1_exact(inst.network, inst.sender, inst.receiver, throughput)
        if ap is None:
            raise AssertionError("steady-rate problem infeasible at a feasible period")
        opt_report = report_for(throughput, period, opt.max_delay)
        ap_report = report_for(throughput, period, ap.max_delay + period - 1)
        rows.append(
            SweepRow(
                period=period,
                throughput=throughput,
                status="ok",
                delay_opt=opt_report.max_delay,
                peak_opt=opt_report.peak_aoi,
                avg_opt=opt_report.avg_aoi,
                peak_ap=ap_report.peak_aoi,
                avg_ap=ap_report.avg_aoi,
            )
        )
    return rows


SWEEP_HEADER = [
    "instance_id",
    "T",
    "R",
    "M_opt",
    "peak_opt",
    "avg_opt",
    "peak_ap",
    "avg_ap",
    "status",
]


def format_rational(value: Fraction | int | None) -> str:
    if value is None:
        return ""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def write_sweep_csv(rows: list[SweepRow], instance_id: str, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow(
                [
                    instance_id,
                    row.period,
                    format_rational(row.throughput),
                    "" if row.delay_opt is None else row.delay_opt,
                    "" if row.peak_opt is None else row.peak_opt,
                    format_rational(row.avg_opt),
                    "" if row.peak_ap is None else row.peak_ap,
                    format_rational(row.avg_ap),
                    row.status,
                ]
            )


@dataclass(frozen=True)
class BatchSummary:
    instance_id: str
    periods: int
    peak_opt: int
    peak_ap: int
    peak_reduction: Fraction
    avg_opt: Fraction
    avg_ap: Fraction
    avg_reduction: Fraction


def summarize_sweep(instance_id: str, rows: list[SweepRow]) -> BatchSummary:
    """Optimal-vs-replay comparison for one instance.

    The replay framework commits to the lowest throughput (largest period),
    mirroring how it would be deployed; reductions are exact fractions,
    rounded only when written out.
    """
    ok = [r for r in rows if r.status == "ok"]
    if not ok:
        raise ModelError("instance infeasible at every period")
    peak_opt = min(r.peak_opt for r in ok)
    avg_opt = min(r.avg_opt for r in ok)
    last = ok[-1]  # largest feasible period = lowest throughput
    return BatchSummary(
        instance_id=instance_id,
        periods=len(rows),
        peak_opt=peak_opt,
        peak_ap=last.peak_ap,
        peak_reduction=Fraction(last.peak_ap - peak_opt, last.peak_ap),
        avg_opt=avg_opt,
        avg_ap=last.avg_ap,
        avg_reduction=(last.avg_ap - avg_opt) / last.avg_ap,
    )


BATCH_HEADER = [
    "instance_id",
    "periods",
    "peak_opt",
    "peak_ap",
    "peak_reduction",
    "avg_opt",
    "avg_ap",
    "avg_reduction",
]


def write_batch_csv(summaries: list[BatchSummary], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BATCH_HEADER)
        for s in summaries:
            writer.writerow(
                [
                    s.instance_id,
                    s.periods,
                    s.peak_opt,
                    s.peak_ap,
                    f"{float(s.peak_reduction):.4f}",
                    format_rational(s.avg_opt),
                    format_rational(s.avg_ap),
                    f"{float(s.avg_reduction):.4f}",
                ]
            )


def pick_endpoints(net: Network, seed: int) -> tuple[str, str]:
    """Uniform distinct sender/receiver pair, derived deterministically."""
    rng = random.Random(f"endpoints:{seed}")
    sender, receiver = rng.sample(list(net.nodes), 2)
    return sender, receiver
