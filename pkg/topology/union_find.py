"""Disjoint-set forest over hashable keys."""

from typing import Dict, Hashable, Iterable, List


class UnionFind:
    """Union by rank with path compression; keys are created on first use."""

    def __init__(self, keys: Iterable[Hashable] = ()):
        self.parent: Dict[Hashable, Hashable] = {}
        self.rank: Dict[Hashable, int] = {}
        for key in keys:
            self.add(key)

    def add(self, key: Hashable) -> None:
        if key not in self.parent:
            self.parent[key] = key
            self.rank[key] = 0

    def find(self, key: Hashable) -> Hashable:
        self.add(key)
        root = key
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[key] != root:
            self.parent[key], key = root, self.parent[key]
        return root

    def union(self, a: Hashable, b: Hashable) -> bool:
        root_a = self.find(a)
        root_b = self.find(b)
        if root_a == root_b:
            return False
        if self.rank[root_a] < self.rank[root_b]:
            root_a, root_b = root_b, root_a
        self.parent[root_b] = root_a
        if self.rank[root_a] == self.rank[root_b]:
            self.rank[root_a] += 1
        return True

    def classes(self) -> List[List[Hashable]]:
        """Return the classes in order of first insertion, members in insertion order."""
        groups: Dict[Hashable, List[Hashable]] = {}
        for key in self.parent:
            groups.setdefault(self.find(key), []).append(key)
        return list(groups.values())
