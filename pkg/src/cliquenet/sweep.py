"""Monte Carlo experiment driver: erasure-retrieval error-rate sweeps.

A sweep point generates a dataset prefix, encodes it with the configured
strategy, stores the augmented messages into a fresh network, probes a
sample of them with random erasures and reports the observed message
error rate next to the closed-form density / single-round error columns.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .codecs import (DecodeError, EncodeOverflowError, HuffmanCodec,
                     IdentityCodec, LeastUsedBitsCodec, RandomBitsCodec,
                     RandomClustersCodec)
from .datasets import generate
from .network import CliqueNetwork
from .theory import expected_density, single_iteration_error
from .validation import ERASED

CSV_HEADER = "strategy,M,trials,error_rate,stderr,density_emp,density_eq1,pe_eq2,seed"

STRATEGIES = ("identity", "random-clusters", "random-bits", "least-used", "huffman")

# which positions may be erased in a probe, per strategy: stamp clusters
# stay known (a querier cannot know a per-message random stamp), widened
# clusters are erased as whole augmented symbols
_DEFAULT_SCOPE = {
    "identity": "original",
    "random-clusters": "original",
    "random-bits": "all",
    "least-used": "all",
    "huffman": "all",
}


@dataclass
class ExperimentConfig:
    """Everything one sweep needs; every field has a CLI flag."""

    family: str = "uniform"
    strategy: str = "identity"
    sweep: tuple = (1000, 2000, 5000, 10000, 15000)
    n_positions: int = 8
    base: int = 256
    sigma: float = 16.0
    bits: int = 2
    random_clusters: tuple = (7, 5000)
    n_erased: int = 4
    erase_scope: str = "auto"
    probes: int = 2000
    max_iterations: int = 4
    memory_weight: int = 0
    seed: int = 0


@dataclass
class SweepResult:
    """One experiment row; ``flagged`` marks points the codec could not encode."""

    strategy: str
    n_messages: int
    trials: int
    error_rate: float
    stderr: float
    density_emp: float
    density_eq1: float
    pe_eq2: float
    seed: int
    flagged: bool = field(default=False)

    def csv_row(self) -> str:
        return ",".join([
            self.strategy,
            str(self.n_messages),
            str(self.trials),
            str(float(self.error_rate)),
            str(float(self.stderr)),
            str(float(self.density_emp)),
            str(float(self.density_eq1)),
            str(float(self.pe_eq2)),
            str(self.seed),
        ])


def _base_bits(base: int) -> int:
    bits = int(base).bit_length() - 1
    if base < 2 or (1 << bits) != base:
        raise ValueError("bit-extension strategies need a power-of-two base")
    return bits


def make_codec(config: ExperimentConfig, seed):
    """Build the (unfitted) codec for a config; ``seed`` feeds its RNG."""
    strategy = config.strategy
    if strategy == "identity":
        return IdentityCodec(base=config.base)
    if strategy == "random-clusters":
        r, size = config.random_clusters
        return RandomClustersCodec(n_extra=int(r), extra_size=int(size),
                                   base=config.base, seed=seed)
    if strategy == "random-bits":
        return RandomBitsCodec(bits=config.bits, base_bits=_base_bits(config.base),
                               seed=seed)
    if strategy == "least-used":
        return LeastUsedBitsCodec(bits=config.bits,
                                  base_bits=_base_bits(config.base))
    if strategy == "huffman":
        return HuffmanCodec(bits=config.bits, base_bits=_base_bits(config.base),
                            seed=seed)
    raise ValueError(f"unknown strategy {strategy!r}, pick from {STRATEGIES}")


def _scope_columns(config: ExperimentConfig, n_augmented: int) -> np.ndarray:
    scope = config.erase_scope
    if scope == "auto":
        scope = _DEFAULT_SCOPE.get(config.strategy, "original")
    if scope == "original":
        return np.arange(config.n_positions)
    if scope == "all":
        return np.arange(n_augmented)
    raise ValueError("erase_scope must be 'auto', 'original' or 'all'")


def erasure_patterns(rng, trials: int, columns, n_erased: int) -> np.ndarray:
    """Choose ``n_erased`` distinct columns per trial, uniformly."""
    columns = np.asarray(columns)
    if not 1 <= n_erased < columns.size:
        raise ValueError("need 1 <= n_erased < number of erasable positions")
    order = np.argsort(rng.random((trials, columns.size)), axis=1)
    return columns[order[:, :n_erased]]


def evaluate_error_rate(network, codec, originals, augmented, *,
                        n_erased: int, columns, trials: int, rng) -> float:
    """Fraction of probed stored messages that fail to come back exactly.

    A trial erases ``n_erased`` positions of one stored augmented message,
    retrieves, decodes the completed message and compares every original
    position. Any non-unique cluster, decode failure or symbol mismatch
    counts as an error.
    """
    originals = np.asarray(originals)
    augmented = np.asarray(augmented)
    if augmented.shape[1] != network.n_clusters:
        raise ValueError("augmented messages do not match the network layout")
    if augmented.shape[0] != originals.shape[0]:
        raise ValueError("originals and augmented must pair up row by row")
    n_msgs = augmented.shape[0]
    trials = min(int(trials), n_msgs)
    if trials < 1:
        raise ValueError("need at least one trial")

    pick = (np.arange(n_msgs) if trials == n_msgs
            else rng.choice(n_msgs, size=trials, replace=False))
    probes = augmented[pick].copy()
    erase = erasure_patterns(rng, trials, columns, n_erased)
    probes[np.repeat(np.arange(trials), n_erased), erase.ravel()] = ERASED

    symbols, counts = network.retrieve_batch(probes)
    resolved = (counts == 1).all(axis=1)
    correct = np.zeros(trials, dtype=bool)
    idx = np.nonzero(resolved)[0]
    if idx.size:
        truth = originals[pick[idx]]
        try:
            decoded = codec.inverse_transform(symbols[idx])
            correct[idx] = (decoded == truth).all(axis=1)
        except DecodeError:
            # at least one completed row does not parse; fall back row by row
            for k, row in enumerate(idx):
                try:
                    dec = codec.inverse_transform(symbols[row][None, :])[0]
                    correct[row] = bool((dec == truth[k]).all())
                except DecodeError:
                    pass
    return float(1.0 - correct.mean())


def _expected_global_density(n_messages: int, sizes) -> float:
    sizes = [int(s) for s in sizes]
    if len(set(sizes)) == 1:
        return expected_density(n_messages, sizes[0], sizes[0])
    weighted = 0.0
    mat = 0
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            cells = sizes[i] * sizes[j]
            weighted += cells * expected_density(n_messages, sizes[i], sizes[j])
            mat += cells
    return weighted / mat


def run_sweep(config: ExperimentConfig) -> list[SweepResult]:
    """Run every sweep point of a config; rows come back in M order."""
    points = sorted(int(m) for m in config.sweep)
    if not points or points[0] < 1:
        raise ValueError("sweep needs positive message counts")
    if config.probes < 1:
        raise ValueError("probes must be >= 1")

    data_rng = np.random.default_rng(
        np.random.SeedSequence(config.seed, spawn_key=(0,))
    )
    full = generate(config.family, points[-1], config.n_positions,
                    config.base, config.sigma, seed=data_rng)

    results = []
    for k, n_messages in enumerate(points):
        point_rng = np.random.default_rng(
            np.random.SeedSequence(config.seed, spawn_key=(1, k))
        )
        codec_seed = int(point_rng.integers(0, 2 ** 31))
        originals = full[:n_messages]
        codec = make_codec(config, codec_seed).fit(originals)
        sizes = codec.output_sizes_
        density_eq1 = _expected_global_density(n_messages, sizes)
        scope_size = int(sizes[0])  # erasable clusters share one size
        pe_eq2 = single_iteration_error(
            density_eq1, len(sizes), config.n_erased, scope_size
        )
        try:
            augmented = codec.transform(originals)
        except EncodeOverflowError:
            results.append(SweepResult(
                config.strategy, n_messages, 0, math.nan, math.nan,
                math.nan, density_eq1, pe_eq2, config.seed, flagged=True,
            ))
            continue
        network = CliqueNetwork(
            sizes,
            max_iterations=config.max_iterations,
            memory_weight=config.memory_weight,
        ).fit(augmented)
        trials = min(config.probes, n_messages)
        error_rate = evaluate_error_rate(
            network, codec, originals, augmented,
            n_erased=config.n_erased,
            columns=_scope_columns(config, augmented.shape[1]),
            trials=trials, rng=point_rng,
        )
        stderr = math.sqrt(error_rate * (1.0 - error_rate) / trials)
        results.append(SweepResult(
            config.strategy, n_messages, trials, error_rate, stderr,
            network.global_density(), density_eq1, pe_eq2, config.seed,
        ))
    return results


def results_to_csv(results) -> str:
    """Render sweep rows as the canonical CSV (header included)."""
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in results]) + "\n"


def write_csv(results, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(results_to_csv(results))
