"""Input validation helpers shared by the network, codecs and harness."""

import numpy as np

ERASED = -1


def check_cluster_sizes(cluster_sizes) -> np.ndarray:
    """Validate a cluster-size layout and return it as an int64 array.

    A valid layout has at least two clusters and every cluster holds at
    least one fanal.
    """
    sizes = np.asarray(cluster_sizes, dtype=np.int64)
    if sizes.ndim != 1:
        raise ValueError("cluster_sizes must be a 1-d sequence of ints")
    if sizes.shape[0] < 2:
        raise ValueError(f"need at least 2 clusters, got {sizes.shape[0]}")
    if (sizes < 1).any():
        raise ValueError("every cluster must hold at least one fanal")
    return sizes


def check_messages(X, cluster_sizes) -> np.ndarray:
    """Validate a batch of messages against a cluster layout.

    Returns a (n_messages, n_clusters) int64 array; every symbol must lie
    in [0, l_i) for its cluster.
    """
    sizes = np.asarray(cluster_sizes, dtype=np.int64)
    if X is None:
        return np.zeros((0, sizes.shape[0]), dtype=np.int64)
    X = np.asarray(X, dtype=np.int64)
    if X.size == 0:
        return np.zeros((0, sizes.shape[0]), dtype=np.int64)
    X = np.atleast_2d(X)
    if X.ndim != 2 or X.shape[1] != sizes.shape[0]:
        raise ValueError(
            f"messages must have {sizes.shape[0]} positions, got shape {X.shape}"
        )
    if ((X < 0) | (X >= sizes)).any():
        raise ValueError("message symbol out of range for its cluster")
    return X


def check_probes(X, cluster_sizes) -> np.ndarray:
    """Validate a batch of probes (messages with ERASED = -1 entries).

    Every probe must keep at least one known position.
    """
    sizes = np.asarray(cluster_sizes, dtype=np.int64)
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    if X.ndim != 2 or X.shape[1] != sizes.shape[0]:
        raise ValueError(
            f"probes must have {sizes.shape[0]} positions, got shape {X.shape}"
        )
    known = X != ERASED
    if X.shape[0]:
        if ((X < ERASED) | (X >= sizes)).any():
            raise ValueError("probe symbol out of range for its cluster")
        if not known.any(axis=1).all():
            raise ValueError("every probe needs at least one known position")
    return X
