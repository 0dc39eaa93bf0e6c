"""Exact static flow utilities on the physical network.

Used for per-slot sustainable-rate computations (the steady-rate capacity of
a sender/receiver pair), feasibility screening, and decomposing conserving
flows into simple paths.  Everything is Fraction-exact.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
import heapq

from .model import Link, Network


def max_steady_rate(net: Network, source: str, sink: str) -> Fraction:
    """Maximum per-slot rate routable from source to sink (exact max-flow)."""
    flow, value = max_flow(net, source, sink)
    return value


def max_flow(
    net: Network, source: str, sink: str
) -> tuple[dict[str, Fraction], Fraction]:
    """Edmonds-Karp with exact capacities; returns per-link flow and value."""
    if source == sink:
        return {}, Fraction(0)
    flow: dict[str, Fraction] = {link.id: Fraction(0) for link in net.links}
    out_links: dict[str, list[Link]] = {v: [] for v in net.nodes}
    in_links: dict[str, list[Link]] = {v: [] for v in net.nodes}
    for link in net.links:
        out_links[link.tail].append(link)
        in_links[link.head].append(link)

    value = Fraction(0)
    while True:
        # BFS in the residual graph
        parent: dict[str, tuple[Link, bool]] = {}
        seen = {source}
        queue = deque([source])
        while queue and sink not in seen:
            v = queue.popleft()
            for link in out_links[v]:
                if link.head not in seen and flow[link.id] < link.bandwidth:
                    seen.add(link.head)
                    parent[link.head] = (link, True)
                    queue.append(link.head)
            for link in in_links[v]:
                if link.tail not in seen and flow[link.id] > 0:
                    seen.add(link.tail)
                    parent[link.tail] = (link, False)
                    queue.append(link.tail)
        if sink not in seen:
            return flow, value
        # trace back and augment
        bottleneck = None
        v = sink
        while v != source:
            link, forward = parent[v]
            room = link.bandwidth - flow[link.id] if forward else flow[link.id]
            bottleneck = room if bottleneck is None else min(bottleneck, room)
            v = link.tail if forward else link.head
        v = sink
        while v != source:
            link, forward = parent[v]
            if forward:
                flow[link.id] += bottleneck
                v = link.tail
            else:
                flow[link.id] -= bottleneck
                v = link.head
        value += bottleneck


def decompose_paths(
    net: Network, flow: dict[str, Fraction], source: str, sink: str
) -> list[tuple[tuple[str, ...], Fraction]]:
    """Split a conserving source->sink flow into simple paths with rates.

    Walks forward along positive links; any cycle met along the way is
    cancelled in place, so the returned paths are all simple and their rates
    sum to the flow value.
    """
    residual = {k: v for k, v in flow.items() if v > 0}
    out_links: dict[str, list[Link]] = {v: [] for v in net.nodes}
    for link in net.links:
        out_links[link.tail].append(link)
    paths: list[tuple[tuple[str, ...], Fraction]] = []

    def next_link(v: str) -> Link | None:
        for link in out_links[v]:
            if residual.get(link.id, Fraction(0)) > 0:
                return link
        return None

    while True:
        walk: list[Link] = []
        at = {source: 0}
        v = source
        while v != sink:
            link = next_link(v)
            if link is None:
                break
            walk.append(link)
            v = link.head
            if v in at:
                # cancel the cycle just closed
                cycle = walk[at[v] :]
                amount = min(residual[l.id] for l in cycle)
                for l in cycle:
                    residual[l.id] -= amount
                    if residual[l.id] == 0:
                        del residual[l.id]
                walk = walk[: at[v]]
                at = {source: 0}
                for i, l in enumerate(walk, start=1):
                    at[l.head] = i
                v = walk[-1].head if walk else source
                continue
            at[v] = len(walk)
        if v != sink:
            break
        amount = min(residual[l.id] for l in walk)
        for l in walk:
            residual[l.id] -= amount
            if residual[l.id] == 0:
                del residual[l.id]
        paths.append((tuple(l.id for l in walk), amount))
    return paths


def shortest_delay(net: Network, source: str) -> dict[str, int]:
    """Dijkstra over link delays; unreachable nodes are absent."""
    dist = {source: 0}
    heap = [(0, source)]
    out_links: dict[str, list[Link]] = {v: [] for v in net.nodes}
    for link in net.links:
        out_links[link.tail].append(link)
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist.get(v, d):
            continue
        for link in out_links[v]:
            nd = d + link.delay
            if nd < dist.get(link.head, nd + 1):
                dist[link.head] = nd
                heapq.heappush(heap, (nd, link.head))
    return dist
