"""Seeded message generators: uniform, Gaussian and parity-correlated.

Every generator is deterministic under a fixed seed and returns an
(n_messages, n_positions) int64 array of symbols in [0, base).
"""

import numpy as np

_MAGIC = "#GBMSG1"


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def gen_uniform(n_messages: int, n_positions: int, base: int = 256,
                seed=None) -> np.ndarray:
    """Messages with i.i.d. symbols uniform on [0, base)."""
    if n_messages < 1 or n_positions < 1 or base < 1:
        raise ValueError("n_messages, n_positions and base must be positive")
    return _rng(seed).integers(0, base, size=(n_messages, n_positions),
                               dtype=np.int64)


def gen_gaussian(n_messages: int, n_positions: int, base: int = 256,
                 sigma: float = 16.0, seed=None) -> np.ndarray:
    """Messages with symbols rounded from a normal centred on the symbol
    range and clamped to [0, base - 1].

    The concentration around the centre makes the stored connection mass
    pile onto a small group of fanals, which is the non-uniform workload
    the codec strategies exist for.
    """
    if n_messages < 1 or n_positions < 1 or base < 1:
        raise ValueError("n_messages, n_positions and base must be positive")
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    mean = (base - 1) / 2.0
    raw = _rng(seed).normal(mean, sigma, size=(n_messages, n_positions))
    return np.clip(np.rint(raw), 0, base - 1).astype(np.int64)


def gen_parity(n_messages: int, n_positions: int, base: int = 256,
               seed=None) -> np.ndarray:
    """Messages whose symbols all share one parity, drawn fresh per message.

    Marginals stay uniform over [0, base), but within a message every
    value is odd or every value is even.
    """
    if n_messages < 1 or n_positions < 1 or base < 1:
        raise ValueError("n_messages, n_positions and base must be positive")
    if base % 2 != 0:
        raise ValueError("parity messages need an even symbol base")
    rng = _rng(seed)
    parity = rng.integers(0, 2, size=(n_messages, 1), dtype=np.int64)
    halves = rng.integers(0, base // 2, size=(n_messages, n_positions),
                          dtype=np.int64)
    return 2 * halves + parity


GENERATORS = {
    "uniform": gen_uniform,
    "gaussian": gen_gaussian,
    "parity": gen_parity,
}


def generate(family: str, n_messages: int, n_positions: int, base: int = 256,
             sigma: float = 16.0, seed=None) -> np.ndarray:
    """Dispatch to one of the generator families by name."""
    if family not in GENERATORS:
        raise ValueError(f"unknown family {family!r}, pick from {sorted(GENERATORS)}")
    if family == "gaussian":
        return gen_gaussian(n_messages, n_positions, base, sigma, seed)
    return GENERATORS[family](n_messages, n_positions, base, seed=seed)


def save_messages(X, base: int, path) -> None:
    """Write messages as a GBMSG1 text file (one message per line)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{_MAGIC} c={X.shape[1]} base={base}\n")
        for row in X:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def load_messages(path) -> tuple[np.ndarray, int]:
    """Read a GBMSG1 file; returns (messages, base)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if not header or header[0] != _MAGIC:
            raise ValueError(f"not a {_MAGIC} file: {path}")
        fields = dict(part.split("=", 1) for part in header[1:])
        c = int(fields["c"])
        base = int(fields["base"])
        rows = [
            [int(v) for v in line.split()]
            for line in fh
            if line.strip()
        ]
    X = np.array(rows, dtype=np.int64).reshape(-1, c) if rows else \
        np.zeros((0, c), dtype=np.int64)
    if X.shape[0] and X.shape[1] != c:
        raise ValueError("message width does not match header")
    return X, base
