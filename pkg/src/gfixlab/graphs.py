"""Graph structures on the space: edge predicates over vector pairs.

Three families are supported, all symmetric and all containing the diagonal
{(y, y)}: the full graph, the proximity graph (edges are pairs strictly closer
than eps), and the componentwise-order graph (edges are comparable pairs).
Paths inside a convex feasible set are built by equal subdivision of the
segment, which also decides L-step reachability for proximity graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfDomainError, UnsupportedSetError
from .vecspace import L2, ConvexSet, NormTag, check_same_dim, distance, vector

ORDER_SLACK = 1e-12


def componentwise_leq(a, b, slack: float = ORDER_SLACK) -> bool:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    check_same_dim(a, b)
    return bool(np.all(a <= b + slack))


def comparable(a, b, slack: float = ORDER_SLACK) -> bool:
    return componentwise_leq(a, b, slack) or componentwise_leq(b, a, slack)


@dataclass(frozen=True)
class GraphSpec:
    """Edge predicate over the whole space; vertex set is implicit."""

    kind: str  # "full" | "proximity" | "order"
    eps: float | None = None
    tag: NormTag = L2

    def __post_init__(self):
        if self.kind not in ("full", "proximity", "order"):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.kind == "proximity":
            if self.eps is None or self.eps <= 0:
                raise ValueError("proximity graph needs eps > 0")
        elif self.eps is not None:
            raise ValueError(f"{self.kind} graph takes no eps")

    @staticmethod
    def full() -> "GraphSpec":
        return GraphSpec("full")

    @staticmethod
    def proximity(eps: float, tag: NormTag = L2) -> "GraphSpec":
        return GraphSpec("proximity", eps=float(eps), tag=tag)

    @staticmethod
    def order() -> "GraphSpec":
        return GraphSpec("order")

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "proximity":
            d["eps"] = self.eps
        return d


def has_edge(G: GraphSpec, x, y, order_cmp=None) -> bool:
    """Edge test. Proximity edges use the strict inequality ||x-y|| < eps;
    order edges use the comparator in either direction (default componentwise <=)."""
    x, y = vector(x), vector(y)
    check_same_dim(x, y)
    if G.kind == "full":
        return True
    if G.kind == "proximity":
        return distance(x, y, G.tag) < G.eps
    cmp = order_cmp if order_cmp is not None else componentwise_leq
    return bool(cmp(x, y) or cmp(y, x))


@dataclass
class PathInK:
    """A path y_0, ..., y_L inside K whose consecutive pairs are edges."""

    nodes: np.ndarray  # (L+1, d)
    L: int = field(init=False)

    def __post_init__(self):
        self.nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        self.L = self.nodes.shape[0] - 1
        if self.L < 1:
            raise ValueError("a path needs at least two nodes")

    def segment_lengths(self, tag: NormTag = L2) -> np.ndarray:
        diffs = self.nodes[1:] - self.nodes[:-1]
        if tag.p == 2.0:
            return np.sqrt(np.einsum("ij,ij->i", diffs, diffs))
        return (np.abs(diffs) ** tag.p).sum(axis=1) ** (1.0 / tag.p)

    def validate(self, K: ConvexSet, G: GraphSpec) -> None:
        for node in self.nodes:
            if not K.contains(node, tol=1e-9):
                raise OutOfDomainError("path node left the feasible set",
                                       distance=K.distance_to(node))
        for a, b in zip(self.nodes[:-1], self.nodes[1:]):
            if not has_edge(G, a, b):
                raise ValueError("consecutive path nodes are not an edge")


def chain_path(x, y, K: ConvexSet, G: GraphSpec) -> PathInK:
    """Equal-subdivision path from x to y with L = floor(||x-y||/eps) + 1 legs,
    each strictly shorter than eps. Needs a convex K and a proximity graph."""
    if G.kind != "proximity":
        raise UnsupportedSetError("chain paths are defined for proximity graphs only")
    if not K.is_convex:
        raise UnsupportedSetError("chain paths need a convex feasible set")
    x, y = vector(x), vector(y)
    check_same_dim(x, y)
    for name, pt in (("x", x), ("y", y)):
        if not K.contains(pt):
            raise OutOfDomainError(f"{name} lies outside K", distance=K.distance_to(pt))
    gap = distance(x, y, G.tag)
    L = int(math.floor(gap / G.eps)) + 1
    # guard the float tie ||x-y||/L == eps
    while gap / L >= G.eps:
        L += 1
    ts = np.arange(L + 1, dtype=float)[:, None] / L
    nodes = x[None, :] * (1.0 - ts) + y[None, :] * ts
    return PathInK(nodes)


def in_reachability_class(x0, y, G: GraphSpec, K: ConvexSet, L: int) -> bool:
    """True when y is joined to x0 by a path of length <= L in K.

    Full graphs: always (L >= 1). Proximity graphs: decided constructively via
    the equal subdivision. Order graphs: direct-edge test only.
    """
    if L < 1:
        raise ValueError(f"L must be a positive integer, got {L}")
    x0, y = vector(x0), vector(y)
    for name, pt in (("x0", x0), ("y", y)):
        if not K.contains(pt):
            raise OutOfDomainError(f"{name} lies outside K", distance=K.distance_to(pt))
    if G.kind == "full":
        return True
    if G.kind == "order":
        return has_edge(G, x0, y)
    return chain_path(x0, y, K, G).L <= L
