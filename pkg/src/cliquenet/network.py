"""Clustered binary associative memory with Winner-Takes-All retrieval.

Messages are stored as cliques over a multipartite graph: one cluster per
message position, one fanal per symbol value, and a binary connection for
every symbol pair of a stored message. Retrieval stimulates the fanals of
the known positions and runs iterative message passing with a per-cluster
Winner-Takes-All rule until the activation pattern is stable.

The network is a single-writer structure: store into it first, then it is
immutable and safe for any number of concurrent retrievals.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .theory import material
from .validation import ERASED, check_cluster_sizes, check_messages, check_probes

_MAGIC = "GBNET1"

# cluster pairs up to this many cells use a dense matmul for ambiguous
# activation blocks; exact because counts stay far below float32 precision
_DENSE_PAIR_CELLS = 1 << 22


@dataclass
class RetrievalResult:
    """Outcome of one probe retrieval.

    Attributes
    ----------
    symbols : (n_clusters,) int array, recovered symbol per position or
        ``ERASED`` where the cluster did not settle on a single fanal.
    counts : (n_clusters,) int array, number of active fanals per cluster.
    candidates : list of int arrays, active fanal indices per cluster.
    iterations : number of propagation rounds actually run.
    """

    symbols: np.ndarray
    counts: np.ndarray
    candidates: list
    iterations: int

    def status(self, position: int) -> str:
        """'unique', 'ambiguous' or 'empty' for one position."""
        n = int(self.counts[position])
        if n == 0:
            return "empty"
        return "unique" if n == 1 else "ambiguous"

    @property
    def is_unique(self) -> bool:
        """True when every position settled on exactly one fanal."""
        return bool((self.counts == 1).all())


class CliqueNetwork(BaseEstimator):
    """Sparse associative memory over clustered binary fanals.

    Parameters
    ----------
    cluster_sizes : sequence of int
        Number of fanals per cluster (one cluster per message position).
        At least two clusters, each of size >= 1.
    max_iterations : int, default=4
        Upper bound on propagation rounds during retrieval; retrieval also
        stops as soon as the activation state reaches a fixed point.
    memory_weight : int, default=0
        Self-excitation bonus added to the score of a fanal that was
        already active in the previous round.
    clamp_known : bool, default=True
        Keep the clusters of known probe positions pinned to the probe's
        symbols across every round.

    Notes
    -----
    ``fit(X)`` resets the network and stores the rows of ``X``;
    ``partial_fit(X)`` / ``store(message)`` add messages to the existing
    connections. Connections are binary and only ever switch on, so
    storing is idempotent and order-independent.
    """

    def __init__(self, cluster_sizes, max_iterations=4, memory_weight=0,
                 clamp_known=True):
        self.cluster_sizes = cluster_sizes
        self.max_iterations = max_iterations
        self.memory_weight = memory_weight
        self.clamp_known = clamp_known

    # -- construction / storage -------------------------------------------

    def _check_init(self):
        if not hasattr(self, "sizes_"):
            self.sizes_ = check_cluster_sizes(self.cluster_sizes)
            c = len(self.sizes_)
            # one bit-packed matrix per ordered cluster pair; row s-fanal,
            # packed little-endian over target-fanal columns
            self._packed = {
                (s, t): np.zeros(
                    (self.sizes_[s], (self.sizes_[t] + 7) // 8), dtype=np.uint8
                )
                for s in range(c)
                for t in range(c)
                if s != t
            }
            self.n_messages_ = 0

    @property
    def n_clusters(self) -> int:
        self._check_init()
        return len(self.sizes_)

    @property
    def n_fanals(self) -> int:
        self._check_init()
        return int(self.sizes_.sum())

    @property
    def n_potential_connections(self) -> int:
        self._check_init()
        return material(self.sizes_)

    def fit(self, X=None, y=None):
        """Reset the network and store every row of ``X`` as a clique.

        ``fit()`` with no data yields an empty network (all bits 0).
        """
        if hasattr(self, "sizes_"):
            del self.sizes_
        self._check_init()
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        """Store every row of ``X`` without resetting existing connections."""
        self._check_init()
        X = check_messages(X, self.sizes_)
        if X.shape[0] == 0:
            return self
        c = len(self.sizes_)
        for s in range(c):
            for t in range(s + 1, c):
                dense = np.zeros((self.sizes_[s], self.sizes_[t]), dtype=np.uint8)
                dense[X[:, s], X[:, t]] = 1
                self._packed[(s, t)] |= np.packbits(dense, axis=1, bitorder="little")
                self._packed[(t, s)] |= np.packbits(dense.T, axis=1, bitorder="little")
        self.n_messages_ += X.shape[0]
        return self

    def store(self, message):
        """Store a single message as a clique; rejects out-of-range symbols
        without touching the network."""
        self._check_init()
        m = check_messages([message], self.sizes_)[0]
        c = len(self.sizes_)
        for s in range(c):
            for t in range(c):
                if s != t:
                    self._packed[(s, t)][m[s], m[t] >> 3] |= np.uint8(1 << (m[t] & 7))
        self.n_messages_ += 1
        return self

    # -- densities ---------------------------------------------------------

    def _pair_dense(self, s: int, t: int) -> np.ndarray:
        """Unpacked 0/1 matrix of connections from cluster s to cluster t."""
        return np.unpackbits(
            self._packed[(s, t)], axis=1, count=int(self.sizes_[t]),
            bitorder="little",
        )

    def connection_count(self, i: int, j: int) -> int:
        """Number of established connections between clusters i and j."""
        self._check_init()
        c = len(self.sizes_)
        if not (0 <= i < c and 0 <= j < c):
            raise ValueError(f"cluster index out of range for {c} clusters")
        if i == j:
            raise ValueError("clusters have no internal connections")
        return int(self._pair_dense(i, j).sum())

    def empirical_density(self, i: int, j: int) -> float:
        """Established / potential connections for one cluster pair."""
        self._check_init()
        return self.connection_count(i, j) / float(self.sizes_[i] * self.sizes_[j])

    def global_density(self) -> float:
        """Established / potential connections over the whole network."""
        self._check_init()
        c = len(self.sizes_)
        total = sum(
            self.connection_count(s, t) for s in range(c) for t in range(s + 1, c)
        )
        return total / float(self.n_potential_connections)

    def out_degrees(self) -> np.ndarray:
        """Number of connections leaving each fanal, cluster-major order."""
        self._check_init()
        c = len(self.sizes_)
        parts = []
        for s in range(c):
            deg = np.zeros(int(self.sizes_[s]), dtype=np.int64)
            for t in range(c):
                if s != t:
                    deg += self._pair_dense(s, t).sum(axis=1, dtype=np.int64)
            parts.append(deg)
        return np.concatenate(parts)

    # -- propagation -------------------------------------------------------

    def _gather_rows(self, s: int, t: int, rows: np.ndarray) -> np.ndarray:
        """Connection rows from fanals ``rows`` of cluster s into cluster t."""
        return np.unpackbits(
            self._packed[(s, t)][rows], axis=1, count=int(self.sizes_[t]),
            bitorder="little",
        )

    def _propagate_batch(self, active, clamp, gamma):
        """One message-passing + WTA round over a batch of activation states.

        ``active`` is a list of (B, l_i) bool arrays, ``clamp`` a (B, c)
        bool mask of rows whose cluster keeps its activation unchanged.
        """
        c = len(self.sizes_)
        n_rows = active[0].shape[0]
        # per-source summaries, reused for every target cluster
        counts = [a.sum(axis=1) for a in active]
        argmax = [a.argmax(axis=1) for a in active]
        new_active = []
        for t in range(c):
            scores = np.zeros((n_rows, int(self.sizes_[t])), dtype=np.int32)
            if gamma:
                scores += gamma * active[t]
            for s in range(c):
                if s == t:
                    continue
                single = counts[s] == 1
                if single.any():
                    contrib = self._gather_rows(s, t, argmax[s][single])
                    scores[single] += contrib
                multi = counts[s] > 1
                if multi.any():
                    rows = np.nonzero(multi)[0]
                    cells = int(self.sizes_[s]) * int(self.sizes_[t])
                    if cells <= _DENSE_PAIR_CELLS:
                        # small pair: one matmul beats per-fanal gathering
                        # when ambiguous clusters hold many active fanals
                        dense = self._pair_dense(s, t).astype(np.float32)
                        prod = active[s][multi].astype(np.float32) @ dense
                        scores[rows] += prod.astype(np.int32)
                    else:
                        local, fanal = np.nonzero(active[s][multi])
                        contrib = self._gather_rows(s, t, fanal)
                        np.add.at(scores, rows[local], contrib)
            peak = scores.max(axis=1)
            act = scores == peak[:, None]
            act[peak == 0] = False
            pinned = clamp[:, t]
            if pinned.any():
                act[pinned] = active[t][pinned]
            new_active.append(act)
        return new_active

    def propagate(self, active, clamped=()):
        """Run one scoring + Winner-Takes-All round on a single state.

        ``active`` is a list of per-cluster boolean activity vectors and
        ``clamped`` the positions whose clusters must stay unchanged. Each
        fanal scores the number of active fanals it is connected to, plus
        ``memory_weight`` if it was active itself; in every non-clamped
        cluster the fanals at the cluster maximum become active when that
        maximum is positive, and nothing is active otherwise.
        """
        self._check_init()
        if int(self.memory_weight) < 0:
            raise ValueError("memory_weight must be >= 0")
        c = len(self.sizes_)
        if len(active) != c:
            raise ValueError("activation state does not match the cluster layout")
        batch = [
            np.asarray(a, dtype=bool).reshape(1, int(self.sizes_[i]))
            for i, a in enumerate(active)
        ]
        clamp = np.zeros((1, c), dtype=bool)
        clamp[0, list(clamped)] = True
        out = self._propagate_batch(batch, clamp, int(self.memory_weight))
        return [a[0] for a in out]

    def _check_retrieval_params(self):
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        if int(self.memory_weight) < 0:
            raise ValueError("memory_weight must be >= 0")

    def _run_batch(self, probes: np.ndarray):
        """Iterate propagation for a batch of probes until stable.

        Returns the final per-cluster activation arrays and the number of
        rounds executed.
        """
        self._check_retrieval_params()
        c = len(self.sizes_)
        n_rows = probes.shape[0]
        active = []
        for i in range(c):
            a = np.zeros((n_rows, int(self.sizes_[i])), dtype=bool)
            known = probes[:, i] != ERASED
            a[known, probes[known, i]] = True
            active.append(a)
        clamp = (
            probes != ERASED
            if self.clamp_known
            else np.zeros((n_rows, c), dtype=bool)
        )
        gamma = int(self.memory_weight)
        iterations = 0
        for _ in range(int(self.max_iterations)):
            nxt = self._propagate_batch(active, clamp, gamma)
            iterations += 1
            if all(np.array_equal(a, b) for a, b in zip(active, nxt)):
                active = nxt
                break
            active = nxt
        return active, iterations

    # -- retrieval ---------------------------------------------------------

    def retrieve_batch(self, X):
        """Complete a batch of probes (``ERASED`` marks unknown positions).

        Returns ``(symbols, counts)``: per probe and position, the active
        fanal count and the recovered symbol when that count is exactly 1
        (``ERASED`` otherwise).
        """
        self._check_init()
        X = check_probes(X, self.sizes_)
        active, _ = self._run_batch(X)
        c = len(self.sizes_)
        n_rows = X.shape[0]
        counts = np.zeros((n_rows, c), dtype=np.int64)
        symbols = np.full((n_rows, c), ERASED, dtype=np.int64)
        for i in range(c):
            counts[:, i] = active[i].sum(axis=1)
            unique = counts[:, i] == 1
            symbols[unique, i] = active[i][unique].argmax(axis=1)
        return symbols, counts

    def predict(self, X):
        """Complete probes; unresolved positions come back as ``ERASED``."""
        symbols, _ = self.retrieve_batch(X)
        return symbols

    def retrieve(self, probe) -> RetrievalResult:
        """Retrieve one probe and report the per-position outcome."""
        self._check_init()
        X = check_probes([probe], self.sizes_)
        active, iterations = self._run_batch(X)
        counts = np.array([int(a[0].sum()) for a in active], dtype=np.int64)
        candidates = [np.nonzero(a[0])[0] for a in active]
        symbols = np.array(
            [int(cand[0]) if len(cand) == 1 else ERASED for cand in candidates],
            dtype=np.int64,
        )
        return RetrievalResult(symbols, counts, candidates, iterations)

    # -- serialization -----------------------------------------------------

    def save(self, path):
        """Write the network in the GBNET1 binary format."""
        self._check_init()
        c = len(self.sizes_)
        with open(path, "wb") as fh:
            header = " ".join([_MAGIC, str(c)] + [str(int(s)) for s in self.sizes_])
            fh.write((header + "\n").encode("ascii"))
            for s in range(c):
                for t in range(s + 1, c):
                    bits = self._pair_dense(s, t).reshape(-1)
                    fh.write(np.packbits(bits, bitorder="little").tobytes())
        return self

    @classmethod
    def load(cls, path, **params) -> "CliqueNetwork":
        """Read a network written by :meth:`save`."""
        with open(path, "rb") as fh:
            header = fh.readline().decode("ascii").split()
            if not header or header[0] != _MAGIC:
                raise ValueError(f"not a {_MAGIC} file: {path}")
            c = int(header[1])
            sizes = [int(x) for x in header[2:]]
            if len(sizes) != c:
                raise ValueError("corrupt header: cluster count mismatch")
            net = cls(sizes, **params)
            net._check_init()
            for s in range(c):
                for t in range(s + 1, c):
                    n_bits = sizes[s] * sizes[t]
                    raw = fh.read((n_bits + 7) // 8)
                    if len(raw) != (n_bits + 7) // 8:
                        raise ValueError("truncated connection matrix")
                    dense = np.unpackbits(
                        np.frombuffer(raw, dtype=np.uint8),
                        count=n_bits, bitorder="little",
                    ).reshape(sizes[s], sizes[t])
                    net._packed[(s, t)] = np.packbits(
                        dense, axis=1, bitorder="little"
                    )
                    net._packed[(t, s)] = np.packbits(
                        dense.T, axis=1, bitorder="little"
                    )
        return net
