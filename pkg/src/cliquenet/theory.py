"""Closed-form expectations for uniformly filled clique networks.

All functions are pure; large exponents are evaluated through
``log1p``/``expm1`` so they stay accurate far beyond the range where
naive powering degrades.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TheoryPoint:
    """Expected density and single-round error probability at one load."""

    n_messages: int
    density: float
    error_probability: float


def expected_density(n_messages: int, size_a: int, size_b: int) -> float:
    """Expected connection density between two clusters after storing
    ``n_messages`` uniform i.i.d. messages.

    Computed as ``1 - (1 - 1/(size_a*size_b))**n_messages`` in stable form.
    """
    if n_messages < 0:
        raise ValueError("n_messages must be >= 0")
    if size_a < 1 or size_b < 1:
        raise ValueError("cluster sizes must be >= 1")
    cells = size_a * size_b
    if cells == 1:
        return 0.0 if n_messages == 0 else 1.0
    return -math.expm1(n_messages * math.log1p(-1.0 / cells))


def single_iteration_error(density: float, n_clusters: int, n_erased: int,
                           cluster_size: int) -> float:
    """Probability that one Winner-Takes-All round fails to recover a
    message with ``n_erased`` of ``n_clusters`` positions erased.

    Evaluates ``1 - (1 - density**(n_clusters - n_erased))**((cluster_size - 1) * n_erased)``.
    Assumes independently placed spurious connections, so it is an
    approximation of the simulated single-round rate.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    if not 1 <= n_erased < n_clusters:
        raise ValueError("need 1 <= n_erased < n_clusters")
    if cluster_size < 1:
        raise ValueError("cluster_size must be >= 1")
    exponent = (cluster_size - 1) * n_erased
    if exponent == 0:
        return 0.0
    signal = density ** (n_clusters - n_erased)
    if signal >= 1.0:
        return 1.0
    return -math.expm1(exponent * math.log1p(-signal))


def material(cluster_sizes) -> int:
    """Total number of potential connections of a cluster layout.

    This is the resource budget used to compare storage strategies on an
    equal footing: the sum of ``l_i * l_j`` over unordered cluster pairs.
    """
    sizes = [int(s) for s in np.asarray(cluster_sizes).ravel()]
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ValueError("need at least 2 clusters of positive size")
    total = sum(sizes)
    squares = sum(s * s for s in sizes)
    return (total * total - squares) // 2


def theory_curve(n_messages_list, n_clusters: int, cluster_size: int,
                 n_erased: int) -> list[TheoryPoint]:
    """Expected density / error pairs for a sweep over message counts."""
    points = []
    for m in n_messages_list:
        d = expected_density(m, cluster_size, cluster_size)
        pe = single_iteration_error(d, n_clusters, n_erased, cluster_size)
        points.append(TheoryPoint(int(m), d, pe))
    return points
