"""Brute-force reference implementations used as test oracles."""
from collections import deque

import numpy as np


def queue_bfs(n, pairs, source):
    adj = [[] for _ in range(n)]
    for s, d in pairs:
        adj[s].append(d)
    depth = [255] * n
    depth[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if depth[v] == 255:
                depth[v] = depth[u] + 1
                q.append(v)
    return np.array(depth, dtype=np.uint8)


def union_find_labels(n, pairs):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s, d in pairs:
        a, b = find(s), find(d)
        if a != b:
            # keep the smaller id as root so the root is the component minimum
            parent[max(a, b)] = min(a, b)
    return np.array([find(v) for v in range(n)], dtype=np.int32)


def dense_pagerank(n, pairs, d=0.85, tol=1e-14, max_iter=10_000):
    """Power iteration on the dense Google matrix with uniform dangling redistribution."""
    if n == 0:
        return np.zeros(0)
    A = np.zeros((n, n))
    for s, t in pairs:
        A[t, s] += 1.0
    out = A.sum(axis=0)
    M = np.where(out > 0, A / np.where(out > 0, out, 1.0), 1.0 / n)
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = (1 - d) / n + d * (M @ x)
        if np.abs(nxt - x).max() < tol:
            return nxt
        x = nxt
    return x


def naive_pull_level(n, pairs, depth, frontier):
    """One level-synchronous pull step computed edge by edge."""
    new = depth.copy()
    level = int(depth[frontier].max()) + 1 if frontier.any() else 0
    for s, t in pairs:
        if frontier[s] and depth[t] == 255:
            new[t] = level
    return new
