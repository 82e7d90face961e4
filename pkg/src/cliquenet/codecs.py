"""Reversible message codecs that flatten non-uniform symbol distributions.

Each codec is a transformer: ``fit`` learns whatever state the strategy
needs from the dataset about to be stored, ``transform`` produces the
augmented messages that actually enter the network, and
``inverse_transform`` recovers the original messages from completed
retrievals. ``output_sizes_`` after fitting gives the cluster layout the
augmented messages require.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .huffman import build_codebook
from .validation import check_messages

_MAGIC = "GBCODEC1"


class CodecError(ValueError):
    """Base class for codec encode/decode failures."""


class EncodeOverflowError(CodecError):
    """Raised when a coded message does not fit the augmented symbol space.

    Signals that the number of extra bits is too small for this dataset.
    """


class DecodeError(CodecError):
    """Raised when an augmented message does not parse back to an original."""


def _as_seed(seed) -> int:
    if seed is None:
        return int(np.random.SeedSequence().generate_state(1)[0])
    return int(seed)


class _Codec(BaseEstimator, TransformerMixin):
    """Shared plumbing: fitted-state checks and message validation."""

    kind = None

    def _check_fitted(self):
        if not hasattr(self, "n_positions_"):
            raise NotFittedError(
                f"{type(self).__name__} must be fitted before use"
            )

    def _check_input(self, X, per_position_size):
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        return check_messages(X, [per_position_size] * X.shape[1])


class IdentityCodec(_Codec):
    """Pass-through codec: store the messages exactly as generated."""

    kind = "IDENTITY"

    def __init__(self, base=256):
        self.base = base

    def fit(self, X, y=None):
        X = self._check_input(X, self.base)
        if X.shape[0] == 0:
            raise ValueError("cannot fit a codec on an empty dataset")
        self.n_positions_ = X.shape[1]
        self.output_sizes_ = [int(self.base)] * X.shape[1]
        return self

    def transform(self, X):
        self._check_fitted()
        return self._check_input(X, self.base).copy()

    def inverse_transform(self, X):
        return np.atleast_2d(np.asarray(X, dtype=np.int64)).copy()


class RandomClustersCodec(_Codec):
    """Append clusters holding uniform random stamp values.

    Each encoded message gains ``n_extra`` fresh stamps in [0, extra_size);
    the stamps are stored only inside the network and decoding simply
    drops the stamp positions.
    """

    kind = "RANDOM_CLUSTERS"

    def __init__(self, n_extra=1, extra_size=4, base=256, seed=None):
        self.n_extra = n_extra
        self.extra_size = extra_size
        self.base = base
        self.seed = seed

    def fit(self, X, y=None):
        if self.n_extra < 0:
            raise ValueError("n_extra must be >= 0")
        if self.n_extra > 0 and self.extra_size < 2:
            raise ValueError("stamp clusters need at least 2 fanals")
        X = self._check_input(X, self.base)
        if X.shape[0] == 0:
            raise ValueError("cannot fit a codec on an empty dataset")
        self.n_positions_ = X.shape[1]
        self.output_sizes_ = [int(self.base)] * X.shape[1] + \
            [int(self.extra_size)] * int(self.n_extra)
        self.seed_ = _as_seed(self.seed)
        self._rng = np.random.default_rng(self.seed_)
        return self

    def transform(self, X):
        self._check_fitted()
        X = self._check_input(X, self.base)
        if self.n_extra == 0:
            return X.copy()
        stamps = self._rng.integers(
            0, self.extra_size, size=(X.shape[0], int(self.n_extra)),
            dtype=np.int64,
        )
        return np.hstack([X, stamps])

    def inverse_transform(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        if self.n_extra == 0:
            return X.copy()
        if X.shape[1] <= self.n_extra:
            raise ValueError("augmented messages are narrower than the stamp block")
        return X[:, : X.shape[1] - int(self.n_extra)].copy()


class _BitExtensionCodec(_Codec):
    """Common frame for codecs that widen each symbol by ``bits`` low bits."""

    def __init__(self, bits=2, base_bits=8):
        self.bits = bits
        self.base_bits = base_bits

    def _setup(self, X):
        if self.bits < 0 or self.base_bits < 1:
            raise ValueError("bits must be >= 0 and base_bits >= 1")
        X = self._check_input(X, 1 << int(self.base_bits))
        if X.shape[0] == 0:
            raise ValueError("cannot fit a codec on an empty dataset")
        self.n_positions_ = X.shape[1]
        self.output_sizes_ = [1 << (int(self.base_bits) + int(self.bits))] * X.shape[1]
        return X

    def inverse_transform(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        return X >> int(self.bits)


class RandomBitsCodec(_BitExtensionCodec):
    """Widen every symbol with uniformly random low-order bits.

    The original value keeps the high-order bits, so decoding is a plain
    right shift.
    """

    kind = "RANDOM_BITS"

    def __init__(self, bits=2, base_bits=8, seed=None):
        super().__init__(bits=bits, base_bits=base_bits)
        self.seed = seed

    def fit(self, X, y=None):
        self._setup(X)
        self.seed_ = _as_seed(self.seed)
        self._rng = np.random.default_rng(self.seed_)
        return self

    def transform(self, X):
        self._check_fitted()
        X = self._check_input(X, 1 << int(self.base_bits))
        b = int(self.bits)
        if b == 0:
            return X.copy()
        ext = self._rng.integers(0, 1 << b, size=X.shape, dtype=np.int64)
        return (X << b) | ext


class LeastUsedBitsCodec(_BitExtensionCodec):
    """Widen every symbol with its least used extension bit combination.

    A counter table per (position, base value) tracks how often each of
    the ``2**bits`` extensions has been used; encoding always picks the
    lowest-index extension among those with the minimum count and then
    increments it, so the counters never drift more than 1 apart.
    Encoding is order-dependent and must see the dataset as one
    sequential pass.
    """

    kind = "LEAST_USED_BITS"

    def fit(self, X, y=None):
        X = self._setup(X)
        self.tables_ = np.zeros(
            (X.shape[1], 1 << int(self.base_bits), 1 << int(self.bits)),
            dtype=np.int64,
        )
        return self

    def transform(self, X):
        self._check_fitted()
        X = self._check_input(X, 1 << int(self.base_bits))
        b = int(self.bits)
        if b == 0:
            return X.copy()
        out = np.empty_like(X)
        width = 1 << b
        for pos in range(X.shape[1]):
            counters = self.tables_[pos].tolist()
            column = X[:, pos].tolist()
            encoded = []
            for value in column:
                row = counters[value]
                ext = min(range(width), key=row.__getitem__)
                row[ext] += 1
                encoded.append((value << b) | ext)
            out[:, pos] = encoded
            self.tables_[pos] = counters
        return out


class HuffmanCodec(_Codec):
    """Per-position Huffman coding with random padding bits.

    ``fit`` counts symbol frequencies per position and builds one
    prefix-free codebook each. ``transform`` concatenates the codewords
    of a message, fails with :class:`EncodeOverflowError` when the coded
    length exceeds ``n_positions * chunk_bits``, pads the remainder with
    uniform random bits and splits the stream into ``n_positions`` chunks
    of ``chunk_bits`` bits (most significant bit first).
    """

    kind = "HUFFMAN"

    def __init__(self, bits=2, base_bits=8, seed=None):
        self.bits = bits
        self.base_bits = base_bits
        self.seed = seed

    @property
    def chunk_bits_(self) -> int:
        self._check_fitted()
        return int(self.base_bits) + int(self.bits)

    def fit(self, X, y=None):
        if self.bits < 0 or self.base_bits < 1:
            raise ValueError("bits must be >= 0 and base_bits >= 1")
        X = self._check_input(X, 1 << int(self.base_bits))
        if X.shape[0] == 0:
            raise ValueError("cannot fit a codec on an empty dataset")
        self.n_positions_ = X.shape[1]
        self.output_sizes_ = [1 << (int(self.base_bits) + int(self.bits))] * X.shape[1]
        self.codebooks_ = []
        for pos in range(X.shape[1]):
            values, freqs = np.unique(X[:, pos], return_counts=True)
            self.codebooks_.append(
                build_codebook(dict(zip(values.tolist(), freqs.tolist())))
            )
        self._inverse_books_cache = None
        self.seed_ = _as_seed(self.seed)
        self._rng = np.random.default_rng(self.seed_)
        return self

    def _encode_row(self, row) -> np.ndarray:
        chunk = self.chunk_bits_
        capacity = self.n_positions_ * chunk
        try:
            bits = "".join(self.codebooks_[i][int(v)] for i, v in enumerate(row))
        except KeyError as err:
            raise CodecError(f"symbol {err} has no codeword") from None
        if len(bits) > capacity:
            raise EncodeOverflowError(
                f"coded message needs {len(bits)} bits but only {capacity} fit; "
                "increase the extra bits"
            )
        pad = self._rng.integers(0, 2, size=capacity - len(bits))
        bits += "".join("1" if b else "0" for b in pad)
        return np.array(
            [int(bits[k * chunk:(k + 1) * chunk], 2) for k in range(self.n_positions_)],
            dtype=np.int64,
        )

    def transform(self, X):
        self._check_fitted()
        X = self._check_input(X, 1 << int(self.base_bits))
        if X.shape[1] != self.n_positions_:
            raise ValueError("message width changed since fit")
        return np.stack([self._encode_row(row) for row in X])

    def _decode_row(self, row) -> np.ndarray:
        chunk = self.chunk_bits_
        top = 1 << chunk
        for v in row:
            if not 0 <= int(v) < top:
                raise DecodeError(f"chunk value {int(v)} outside {chunk}-bit range")
        bits = "".join(format(int(v), f"0{chunk}b") for v in row)
        decoded = []
        cursor = 0
        for pos, (inverse, limit) in enumerate(self._inverse_books()):
            prefix = ""
            symbol = None
            while cursor < len(bits) and len(prefix) < limit:
                prefix += bits[cursor]
                cursor += 1
                if prefix in inverse:
                    symbol = inverse[prefix]
                    break
            if symbol is None:
                raise DecodeError(
                    f"bit stream does not parse at position {pos}"
                )
            decoded.append(symbol)
        return np.array(decoded, dtype=np.int64)

    def _inverse_books(self):
        if getattr(self, "_inverse_books_cache", None) is None:
            self._inverse_books_cache = [
                ({word: symbol for symbol, word in book.items()},
                 max(len(word) for word in book.values()))
                for book in self.codebooks_
            ]
        return self._inverse_books_cache

    def inverse_transform(self, X):
        self._check_fitted()
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        if X.shape[1] != self.n_positions_:
            raise ValueError("augmented width does not match the codec")
        return np.stack([self._decode_row(row) for row in X])


CODEC_KINDS = {
    cls.kind: cls
    for cls in (IdentityCodec, RandomClustersCodec, RandomBitsCodec,
                LeastUsedBitsCodec, HuffmanCodec)
}


def save_codec(codec, path) -> None:
    """Write a fitted codec in the GBCODEC1 text format."""
    codec._check_fitted()
    lines = [f"{_MAGIC} {codec.kind}"]
    if codec.kind == "RANDOM_CLUSTERS":
        lines.append(f"{int(codec.n_extra)} {int(codec.extra_size)} {codec.seed_}")
    elif codec.kind in ("RANDOM_BITS", "LEAST_USED_BITS"):
        lines.append(f"{int(codec.bits)} {int(codec.base_bits)}")
        if codec.kind == "LEAST_USED_BITS":
            tables = codec.tables_
            lines.append(
                f"tables {tables.shape[0]} {tables.shape[1]} {tables.shape[2]}"
            )
            for pos, value in zip(*np.nonzero(tables.any(axis=2))):
                row = " ".join(str(int(v)) for v in tables[pos, value])
                lines.append(f"{pos} {value} {row}")
    elif codec.kind == "HUFFMAN":
        lines.append(f"{int(codec.bits)} {int(codec.base_bits)} {codec.seed_}")
        for pos, book in enumerate(codec.codebooks_):
            lines.append(f"position {pos}")
            for symbol in sorted(book):
                lines.append(f"{symbol} {book[symbol]}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_codec(path):
    """Read a codec written by :func:`save_codec`.

    The returned codec can always decode; encoding is also possible for
    every kind except IDENTITY/RANDOM_* loaded without their dataset
    shape, where only the inverse direction is meaningful.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.rstrip("\n") for line in fh]
    header = lines[0].split()
    if len(header) != 2 or header[0] != _MAGIC:
        raise ValueError(f"not a {_MAGIC} file: {path}")
    kind = header[1]
    if kind not in CODEC_KINDS:
        raise ValueError(f"unknown codec kind {kind!r}")
    body = [line for line in lines[1:] if line.strip()]

    if kind == "IDENTITY":
        codec = IdentityCodec()
        codec.n_positions_ = 0
        codec.output_sizes_ = []
        return codec

    if kind == "RANDOM_CLUSTERS":
        r, size, seed = (int(v) for v in body[0].split())
        codec = RandomClustersCodec(n_extra=r, extra_size=size, seed=seed)
        codec.n_positions_ = 0
        codec.output_sizes_ = []
        codec.seed_ = seed
        codec._rng = np.random.default_rng(seed)
        return codec

    if kind in ("RANDOM_BITS", "LEAST_USED_BITS"):
        b, base_bits = (int(v) for v in body[0].split())
        if kind == "RANDOM_BITS":
            codec = RandomBitsCodec(bits=b, base_bits=base_bits)
            codec.n_positions_ = 0
            codec.output_sizes_ = []
            codec.seed_ = None
            return codec
        shape = body[1].split()
        if shape[0] != "tables":
            raise ValueError("missing occurrence table header")
        c, n_values, n_ext = (int(v) for v in shape[1:])
        codec = LeastUsedBitsCodec(bits=b, base_bits=base_bits)
        codec.n_positions_ = c
        codec.output_sizes_ = [1 << (base_bits + b)] * c
        codec.tables_ = np.zeros((c, n_values, n_ext), dtype=np.int64)
        for line in body[2:]:
            parts = line.split()
            pos, value = int(parts[0]), int(parts[1])
            codec.tables_[pos, value] = [int(v) for v in parts[2:]]
        return codec

    # HUFFMAN
    b, base_bits, seed = (int(v) for v in body[0].split())
    codec = HuffmanCodec(bits=b, base_bits=base_bits, seed=seed)
    books = []
    for line in body[1:]:
        parts = line.split()
        if parts[0] == "position":
            books.append({})
        else:
            books[-1][int(parts[0])] = parts[1]
    codec.codebooks_ = books
    codec.n_positions_ = len(books)
    codec.output_sizes_ = [1 << (base_bits + b)] * len(books)
    codec.seed_ = seed
    codec._rng = np.random.default_rng(seed)
    return codec
