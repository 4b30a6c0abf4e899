"""Brute-force reference implementations used by the tests."""

import itertools
import math


def floyd_warshall(adjacency) -> list[list[float]]:
    n = len(adjacency)
    d = [[0.0 if i == j else (1.0 if adjacency[i][j] else math.inf) for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def mean_path_length(adjacency):
    """Mean finite distance over unordered pairs, or None if no pair is connected."""
    d = floyd_warshall(adjacency)
    finite = [d[i][j] for i, j in itertools.combinations(range(len(d)), 2) if d[i][j] < math.inf]
    return sum(finite) / len(finite) if finite else None


def edge_density(adjacency):
    n = len(adjacency)
    pairs = sum(1 for i, j in itertools.combinations(range(n), 2) if adjacency[i][j])
    return 2 * pairs / (n * (n - 1))
