"""
Union-find set graph (USG).

Inserted vertices are grouped into sets of mutually reachable vertices;
a directed graph over the group roots records reachability between
groups. After every insertion the group graph is acyclic: any cycle it
would contain passes through the new vertex's group and is contracted
immediately.
"""
from collections import deque
from collections.abc import Iterable

import networkx as nx


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self):
        self.parent: dict[int, int] = {}
        self.size: dict[int, int] = {}

    def __contains__(self, x: int) -> bool:
        return x in self.parent

    def add(self, x: int) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size.pop(rb)
        return ra


class UnionFindSetGraph:
    """
    Incremental reachability over inserted vertices.

    Attributes:
        uf: Union-find over inserted vertex ids
        succ / pred: Group-level edges keyed by root
        members: Inserted vertices of each group
    """

    def __init__(self):
        self.uf = UnionFind()
        self.succ: dict[int, set[int]] = {}
        self.pred: dict[int, set[int]] = {}
        self.members: dict[int, list[int]] = {}
        self.merges = 0

    def __contains__(self, v: int) -> bool:
        return v in self.uf

    def __len__(self) -> int:
        """Number of groups (USG vertices)."""
        return len(self.succ)

    @property
    def inserted_count(self) -> int:
        return len(self.uf.parent)

    def root(self, v: int) -> int:
        return self.uf.find(v)

    def roots(self) -> set[int]:
        return set(self.succ)

    def _link(self, a: int, b: int) -> None:
        if a != b:
            self.succ[a].add(b)
            self.pred[b].add(a)

    def insert(self, v: int, out_neighbors: Iterable[int], in_neighbors: Iterable[int]) -> int:
        """
        Insert v with its edges to already-inserted vertices.

        Args:
            v: New vertex
            out_neighbors: Targets of v's out-edges (non-inserted ones ignored)
            in_neighbors: Sources of v's in-edges (non-inserted ones ignored)

        Returns:
            Root of v's group after cycle contraction
        """
        if v in self.uf:
            return self.root(v)
        self.uf.add(v)
        self.succ[v] = set()
        self.pred[v] = set()
        self.members[v] = [v]

        has_out = has_in = False
        for u in out_neighbors:
            if u in self.uf and u != v:
                self._link(v, self.root(u))
                has_out = True
        for w in in_neighbors:
            if w in self.uf and w != v:
                self._link(self.root(w), v)
                has_in = True

        root = v
        # A new cycle needs both an out-edge and an in-edge at v
        if has_out and has_in:
            root = self._contract_cycles(v)
        return root

    def _walk(self, start: int, edges: dict[int, set[int]]) -> set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in edges[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def _contract_cycles(self, r: int) -> int:
        """Merge every group on a cycle through r; repeat until none is left."""
        while True:
            scc = self._walk(r, self.succ) & self._walk(r, self.pred)
            if len(scc) == 1:
                return r
            r = self._merge(scc)

    def _merge(self, groups: set[int]) -> int:
        out_edges: set[int] = set()
        in_edges: set[int] = set()
        merged_members: list[int] = []
        for g in sorted(groups):
            out_edges |= self.succ.pop(g)
            in_edges |= self.pred.pop(g)
            merged_members.extend(self.members.pop(g))

        root = None
        for g in sorted(groups):
            root = self.uf.union(root if root is not None else g, g)
        out_edges -= groups
        in_edges -= groups

        for x in out_edges:
            self.pred[x] -= groups
            self.pred[x].add(root)
        for x in in_edges:
            self.succ[x] -= groups
            self.succ[x].add(root)
        self.succ[root] = out_edges
        self.pred[root] = in_edges
        self.members[root] = merged_members
        self.merges += len(groups) - 1
        return root

    def reachable_roots(self, root: int) -> set[int]:
        """Groups reachable from root (root included)."""
        return self._walk(root, self.succ)

    def reaches(self, a: int, b: int) -> bool:
        return self.root(b) in self.reachable_roots(self.root(a))

    def to_networkx(self) -> nx.DiGraph:
        dag = nx.DiGraph()
        dag.add_nodes_from(self.succ)
        dag.add_edges_from((a, b) for a, bs in self.succ.items() for b in bs)
        return dag

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.to_networkx())
