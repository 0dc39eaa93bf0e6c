"""Domain model for periodic multi-path transmission schedules.

A network is a directed graph with integer link delays (slots) and exact
rational link bandwidths (data units per slot).  A sender emits a batch of
``D`` data units every ``T`` slots and the batch must reach the receiver over
one or more paths.  A schedule assigns amounts to (path, offset-vector) pairs
and is replayed every period; overlapping periods share link bandwidth, so
capacity is checked per offset residue class mod ``T``.

All amounts and bandwidths are `fractions.Fraction`; delays, offsets and
periods are plain ints.  Nothing in the solver path ever rounds.

Offset convention: an entry over hops ``e_1..e_H`` stores
``offsets = (u_0, u_1, ..., u_H)`` with ``u_0 = 0``, where ``u_i`` is the
arrival slot at the head of hop ``i`` relative to batch generation.  The push
slot onto hop ``i`` is ``u_i - delay_i``, the holding time spent at the tail
of hop ``i`` is ``u_i - delay_i - u_{i-1}``, and delivery happens at ``u_H``.
Data is never parked at the receiver: the last offset *is* the arrival.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable


class ModelError(ValueError):
    """Structurally invalid input (bad path, unknown link, bad instance)."""


@dataclass(frozen=True)
class Violation:
    """One broken invariant, naming the offending element."""

    code: str
    subject: str
    detail: str = ""

    def __str__(self) -> str:
        msg = f"{self.code}: {self.subject}"
        return f"{msg} ({self.detail})" if self.detail else msg


@dataclass(frozen=True)
class Link:
    id: str
    tail: str
    head: str
    delay: int
    bandwidth: Fraction

    def __post_init__(self):
        object.__setattr__(self, "bandwidth", Fraction(self.bandwidth))


@dataclass(frozen=True)
class Network:
    """Directed multigraph; parallel links are distinct by link id."""

    nodes: tuple[str, ...]
    links: tuple[Link, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "links", tuple(self.links))

    def link_by_id(self, link_id: str) -> Link:
        for link in self.links:
            if link.id == link_id:
                return link
        raise ModelError(f"unknown link id {link_id!r}")

    @property
    def link_index(self) -> dict[str, Link]:
        return {link.id: link for link in self.links}

    def out_links(self, node: str) -> list[Link]:
        return [link for link in self.links if link.tail == node]


def network(nodes: Iterable[str], links: Iterable[tuple]) -> Network:
    """Build a Network from (id, tail, head, delay, bandwidth) tuples."""
    return Network(
        nodes=tuple(nodes),
        links=tuple(Link(i, t, h, int(d), Fraction(b)) for i, t, h, d, b in links),
    )


@dataclass(frozen=True)
class Instance:
    """A solvable problem: network, endpoints, batch size, throughput window.

    ``r_min``/``r_max`` bound the throughput ``batch / period``; both
    ``batch / r_min`` and ``batch / r_max`` must be positive integers, so the
    candidate periods form the integer range [batch/r_max, batch/r_min].
    """

    network: Network
    sender: str
    receiver: str
    batch: Fraction
    r_min: Fraction
    r_max: Fraction

    def __post_init__(self):
        object.__setattr__(self, "batch", Fraction(self.batch))
        object.__setattr__(self, "r_min", Fraction(self.r_min))
        object.__setattr__(self, "r_max", Fraction(self.r_max))
        if self.batch <= 0:
            raise ModelError("batch must be positive")
        if self.sender == self.receiver:
            raise ModelError("sender and receiver must differ")
        if self.sender not in self.network.nodes:
            raise ModelError(f"sender {self.sender!r} not in network")
        if self.receiver not in self.network.nodes:
            raise ModelError(f"receiver {self.receiver!r} not in network")
        if self.r_min <= 0 or self.r_max <= 0:
            raise ModelError("throughput requirements must be positive")
        if self.r_min > self.r_max:
            raise ModelError("r_min exceeds r_max")
        for name, rate in (("r_min", self.r_min), ("r_max", self.r_max)):
            if (self.batch / rate).denominator != 1:
                raise ModelError(f"batch/{name} must be a positive integer")

    @property
    def max_period(self) -> int:
        return int(self.batch / self.r_min)

    @property
    def min_period(self) -> int:
        return int(self.batch / self.r_max)


@dataclass(frozen=True)
class ScheduleEntry:
    """One (path, offsets, amount) assignment.

    ``links`` are hop link ids in order; ``offsets`` follow the arrival
    convention described in the module docstring.
    """

    links: tuple[str, ...]
    offsets: tuple[int, ...]
    amount: Fraction

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "offsets", tuple(int(u) for u in self.offsets))
        object.__setattr__(self, "amount", Fraction(self.amount))
        if len(self.offsets) != len(self.links) + 1:
            raise ModelError("offsets must have one entry per hop plus the origin")
        if not self.links:
            raise ModelError("entry needs at least one hop")
        if self.offsets[0] != 0:
            raise ModelError("first offset must be 0")

    @property
    def delivery(self) -> int:
        return self.offsets[-1]

    def path_nodes(self, net: Network) -> tuple[str, ...]:
        index = net.link_index
        first = index.get(self.links[0])
        if first is None:
            raise ModelError(f"entry references unknown link {self.links[0]!r}")
        nodes = [first.tail]
        for link_id in self.links:
            link = index.get(link_id)
            if link is None:
                raise ModelError(f"entry references unknown link {link_id!r}")
            if link.tail != nodes[-1]:
                raise ModelError(f"hops are not contiguous at link {link_id!r}")
            nodes.append(link.head)
        return tuple(nodes)

    def push_offsets(self, net: Network) -> tuple[int, ...]:
        """Per-hop push slots (offset the data is put onto each link)."""
        index = net.link_index
        return tuple(
            self.offsets[i + 1] - index[link_id].delay
            for i, link_id in enumerate(self.links)
        )


@dataclass(frozen=True)
class PeriodicSolution:
    period: int
    entries: tuple[ScheduleEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.period < 1:
            raise ModelError("period must be a positive integer")

    @property
    def total_amount(self) -> Fraction:
        return sum((e.amount for e in self.entries), Fraction(0))

    @property
    def max_delay(self) -> int:
        return max((e.delivery for e in self.entries if e.amount > 0), default=0)


@dataclass(frozen=True)
class AoiReport:
    """Per-throughput optimum: delay plus the two closed-form age values."""

    throughput: Fraction
    period: int
    max_delay: int
    peak_aoi: int
    avg_aoi: Fraction


def report_for(throughput: Fraction, period: int, max_delay: int) -> AoiReport:
    peak, avg = aoi_from_max_delay(max_delay, period)
    return AoiReport(Fraction(throughput), period, max_delay, peak, avg)


# ---------------------------------------------------------------------------
# operations


def validate_network(net: Network) -> list[Violation]:
    """Return all structural violations; an empty list means the net is sane."""
    violations: list[Violation] = []
    declared = set(net.nodes)
    seen_ids: set[str] = set()
    if len(declared) != len(net.nodes):
        violations.append(Violation("duplicate-node", "nodes", "repeated node id"))
    for link in net.links:
        if link.id in seen_ids:
            violations.append(Violation("duplicate-link-id", link.id))
        seen_ids.add(link.id)
        if link.delay < 1:
            violations.append(
                Violation("nonpositive-delay", link.id, f"delay={link.delay}")
            )
        if link.bandwidth < 0:
            violations.append(
                Violation("negative-bandwidth", link.id, f"bandwidth={link.bandwidth}")
            )
        if link.tail == link.head:
            violations.append(Violation("self-loop", link.id))
        for endpoint in (link.tail, link.head):
            if endpoint not in declared:
                violations.append(
                    Violation("unknown-endpoint", link.id, f"node={endpoint}")
                )
    return violations


def feasible_periods(inst: Instance) -> list[int]:
    """Candidate periods, ascending; each period T supports throughput D/T."""
    return list(range(inst.min_period, inst.max_period + 1))


def aoi_from_max_delay(max_delay: int, period: int) -> tuple[int, Fraction]:
    """Closed-form peak and average age for a schedule with the given delay.

    The age trajectory of a periodic schedule rises linearly from the maximum
    delay up to max_delay + period - 1 and repeats, so the peak is the top of
    that ramp and the average is its midpoint.
    """
    if max_delay < 1 or period < 1:
        raise ModelError("max_delay and period must be positive")
    peak = max_delay + period - 1
    avg = Fraction(max_delay) + Fraction(period - 1, 2)
    return peak, avg


def normalize_holding(net: Network, sol: PeriodicSolution) -> PeriodicSolution:
    """Shift offsets down by whole periods wherever a hop holds >= T slots.

    Shifting a suffix of the offset vector by a multiple of the period leaves
    every push-residue class unchanged, so feasibility and amounts are
    preserved while the delivery offset can only move earlier.
    """
    period = sol.period
    index = net.link_index
    out_entries = []
    for entry in sol.entries:
        offsets = list(entry.offsets)
        for i, link_id in enumerate(entry.links, start=1):
            delay = index[link_id].delay
            holding = offsets[i] - delay - offsets[i - 1]
            if holding >= period:
                shift = (holding // period) * period
                for j in range(i, len(offsets)):
                    offsets[j] -= shift
        out_entries.append(
            ScheduleEntry(entry.links, tuple(offsets), entry.amount)
        )
    return PeriodicSolution(period, tuple(out_entries))


def residue_loads(
    net: Network, sol: PeriodicSolution
) -> dict[tuple[str, int], Fraction]:
    """Aggregate amount pushed onto each link per offset residue class."""
    loads: dict[tuple[str, int], Fraction] = {}
    index = net.link_index
    for entry in sol.entries:
        for i, link_id in enumerate(entry.links):
            push = entry.offsets[i + 1] - index[link_id].delay
            key = (link_id, push % sol.period)
            loads[key] = loads.get(key, Fraction(0)) + entry.amount
    return loads


def validate_solution(
    inst: Instance, sol: PeriodicSolution
) -> tuple[bool, int, list[Violation]]:
    """Check a schedule against an instance.

    Verifies the batch total, the period window, per-hop offset monotonicity,
    path shape (sender-to-receiver, simple), and the residue-class bandwidth
    constraints.  Returns (ok, max_delay, violations); max_delay is the
    largest delivery offset among positive entries.

    Raises ModelError for structurally malformed entries (unknown links,
    non-contiguous hops).
    """
    violations: list[Violation] = []
    net = inst.network
    index = net.link_index

    for pos, entry in enumerate(sol.entries):
        label = f"entry[{pos}]"
        nodes = entry.path_nodes(net)  # raises ModelError on bad structure
        if nodes[0] != inst.sender:
            violations.append(Violation("path-start", label, f"starts at {nodes[0]}"))
        if nodes[-1] != inst.receiver:
            violations.append(Violation("path-end", label, f"ends at {nodes[-1]}"))
        if len(set(nodes)) != len(nodes):
            violations.append(Violation("path-not-simple", label))
        if entry.amount <= 0:
            violations.append(Violation("nonpositive-amount", label))
        for i, link_id in enumerate(entry.links, start=1):
            delay = index[link_id].delay
            if entry.offsets[i] < entry.offsets[i - 1] + delay:
                violations.append(
                    Violation(
                        "offset-order",
                        label,
                        f"hop {i} arrives before it can be pushed",
                    )
                )

    total = sol.total_amount
    if total != inst.batch:
        violations.append(
            Violation("throughput", "solution", f"total {total} != batch {inst.batch}")
        )
    if sol.period not in feasible_periods(inst):
        violations.append(
            Violation("period-window", "solution", f"T={sol.period} outside window")
        )

    for (link_id, residue), load in sorted(residue_loads(net, sol).items()):
        cap = index[link_id].bandwidth
        if load > cap:
            violations.append(
                Violation(
                    "bandwidth",
                    link_id,
                    f"residue {residue} carries {load} > {cap}",
                )
            )

    return (not violations, sol.max_delay, violations)


def simulate_aoi(sol: PeriodicSolution, max_delay: int) -> tuple[int, Fraction]:
    """Slot-level age trace over one steady-state window.

    Replays the schedule's deliveries: a generation made at k*T is complete
    once the last positive entry has arrived, i.e. at k*T + C with C taken
    from the entries themselves.  The age at slot t is t minus the newest
    complete generation.  Scanning t over [max_delay, max_delay + T) covers
    one full period of the (periodic) trajectory exactly.
    """
    period = sol.period
    completion = sol.max_delay
    if completion <= 0:
        raise ModelError("solution delivers nothing")
    ages = []
    for t in range(max_delay, max_delay + period):
        # newest generation k*T whose batch fully arrived by t
        k = (t - completion) // period
        ages.append(t - k * period)
    return max(ages), Fraction(sum(ages), period)
