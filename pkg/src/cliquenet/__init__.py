"""Sparse associative memory from clustered neural cliques.

Store fixed-length symbol messages as cliques over a clustered binary
graph, retrieve them from partial probes with iterative Winner-Takes-All
decoding, and keep non-uniform datasets storable through reversible
message codecs.
"""

from .codecs import (CodecError, DecodeError, EncodeOverflowError,
                     HuffmanCodec, IdentityCodec, LeastUsedBitsCodec,
                     RandomBitsCodec, RandomClustersCodec, load_codec,
                     save_codec)
from .datasets import (gen_gaussian, gen_parity, gen_uniform, generate,
                       load_messages, save_messages)
from .network import CliqueNetwork, RetrievalResult
from .sweep import (ExperimentConfig, SweepResult, evaluate_error_rate,
                    run_sweep, results_to_csv, write_csv)
from .theory import (TheoryPoint, expected_density, material,
                     single_iteration_error, theory_curve)
from .validation import ERASED

__version__ = "0.1.0"

__all__ = [
    "CliqueNetwork",
    "RetrievalResult",
    "ERASED",
    "CodecError",
    "DecodeError",
    "EncodeOverflowError",
    "IdentityCodec",
    "RandomClustersCodec",
    "RandomBitsCodec",
    "LeastUsedBitsCodec",
    "HuffmanCodec",
    "save_codec",
    "load_codec",
    "gen_uniform",
    "gen_gaussian",
    "gen_parity",
    "generate",
    "save_messages",
    "load_messages",
    "expected_density",
    "single_iteration_error",
    "material",
    "theory_curve",
    "TheoryPoint",
    "ExperimentConfig",
    "SweepResult",
    "evaluate_error_rate",
    "run_sweep",
    "results_to_csv",
    "write_csv",
    "__version__",
]
