import numpy as np
import pytest
from sklearn.exceptions import NotFittedError

from cliquenet.codecs import (CodecError, DecodeError, EncodeOverflowError,
                              HuffmanCodec, IdentityCodec, LeastUsedBitsCodec,
                              RandomBitsCodec, RandomClustersCodec,
                              load_codec, save_codec)
from cliquenet.datasets import gen_gaussian, gen_parity, gen_uniform
from cliquenet.network import CliqueNetwork


def all_codecs(base=256, bits=3, n_extra=2, extra_size=50, seed=42):
    return [
        IdentityCodec(base=base),
        RandomClustersCodec(n_extra=n_extra, extra_size=extra_size,
                            base=base, seed=seed),
        RandomBitsCodec(bits=bits, base_bits=base.bit_length() - 1, seed=seed),
        LeastUsedBitsCodec(bits=bits, base_bits=base.bit_length() - 1),
        HuffmanCodec(bits=bits, base_bits=base.bit_length() - 1, seed=seed),
    ]


DATASETS = {
    "uniform": gen_uniform(1000, 8, 256, seed=1),
    "gaussian": gen_gaussian(1000, 8, 256, sigma=16.0, seed=2),
    "parity": gen_parity(1000, 8, 256, seed=3),
}


class TestLossless:
    @pytest.mark.parametrize("family", sorted(DATASETS))
    def test_every_codec_round_trips_every_family(self, family):
        X = DATASETS[family]
        for codec in all_codecs():
            out = codec.fit(X).transform(X)
            back = codec.inverse_transform(out)
            assert np.array_equal(back, X), type(codec).__name__

    def test_transform_before_fit_is_rejected(self):
        for codec in all_codecs():
            with pytest.raises(NotFittedError):
                codec.transform(DATASETS["uniform"])


class TestRandomClusters:
    def test_appends_stamps_in_range(self):
        X = DATASETS["uniform"]
        codec = RandomClustersCodec(n_extra=3, extra_size=7, seed=0).fit(X)
        out = codec.transform(X)
        assert out.shape == (1000, 11)
        assert np.array_equal(out[:, :8], X)
        assert out[:, 8:].min() >= 0 and out[:, 8:].max() < 7
        assert codec.output_sizes_ == [256] * 8 + [7] * 3

    def test_zero_extra_clusters_is_identity(self):
        X = DATASETS["uniform"]
        codec = RandomClustersCodec(n_extra=0, seed=0).fit(X)
        assert np.array_equal(codec.transform(X), X)
        assert np.array_equal(codec.inverse_transform(X), X)

    def test_decode_truncates_stamps(self):
        X = DATASETS["uniform"][:5]
        codec = RandomClustersCodec(n_extra=2, extra_size=9, seed=1).fit(X)
        assert np.array_equal(codec.inverse_transform(codec.transform(X)), X)

    def test_tiny_stamp_clusters_rejected(self):
        with pytest.raises(ValueError):
            RandomClustersCodec(n_extra=1, extra_size=1).fit(DATASETS["uniform"])


class TestRandomBits:
    def test_zero_bits_is_identity(self):
        X = DATASETS["uniform"]
        codec = RandomBitsCodec(bits=0, seed=0).fit(X)
        assert np.array_equal(codec.transform(X), X)

    def test_original_value_keeps_high_bits(self):
        X = np.full((200, 4), 1, dtype=np.int64)
        codec = RandomBitsCodec(bits=3, base_bits=8, seed=5).fit(X)
        out = codec.transform(X)
        assert (out >> 3 == 1).all()
        assert (out >= 8).all() and (out < 16).all()
        # extension bits actually vary
        assert len(np.unique(out & 7)) > 1

    def test_decode_is_right_shift(self):
        codec = RandomBitsCodec(bits=3, base_bits=8, seed=0).fit(
            np.zeros((1, 1), dtype=np.int64))
        assert codec.inverse_transform([[9]])[0, 0] == 1

    def test_rejects_overwide_symbols(self):
        codec = RandomBitsCodec(bits=2, base_bits=4, seed=0).fit(
            np.zeros((1, 2), dtype=np.int64))
        with pytest.raises(ValueError):
            codec.transform([[16, 0]])


class TestLeastUsedBits:
    def test_fresh_table_starts_at_extension_zero(self):
        codec = LeastUsedBitsCodec(bits=3).fit(np.zeros((1, 1), dtype=np.int64))
        out = codec.transform([[7]])
        assert out[0, 0] == 7 << 3

    def test_repeat_occurrences_walk_the_extensions(self):
        codec = LeastUsedBitsCodec(bits=3).fit(np.zeros((1, 1), dtype=np.int64))
        column = np.full((10, 1), 7, dtype=np.int64)
        out = codec.transform(column)[:, 0]
        # 8 extensions cycle in index order, then wrap around
        assert (out & 7).tolist() == [0, 1, 2, 3, 4, 5, 6, 7, 0, 1]

    def test_tables_balance_within_one(self):
        X = DATASETS["gaussian"]
        codec = LeastUsedBitsCodec(bits=2).fit(X)
        codec.transform(X)
        used = codec.tables_[codec.tables_.sum(axis=2) > 0]
        assert (used.max(axis=1) - used.min(axis=1) <= 1).all()

    def test_encoding_is_deterministic(self):
        X = DATASETS["gaussian"]
        a = LeastUsedBitsCodec(bits=2).fit(X).transform(X)
        b = LeastUsedBitsCodec(bits=2).fit(X).transform(X)
        assert np.array_equal(a, b)

    def test_counts_separate_per_position_and_value(self):
        codec = LeastUsedBitsCodec(bits=2).fit(np.zeros((1, 2), dtype=np.int64))
        out = codec.transform([[3, 3], [3, 5]])
        # column 0 saw value 3 twice, column 1 saw 3 and 5 once each
        assert (out[:, 0] & 3).tolist() == [0, 1]
        assert (out[:, 1] & 3).tolist() == [0, 0]


class TestHuffmanCodec:
    def test_fixed_length_books_pad_into_chunks(self):
        # every symbol once per position: all codewords are exactly 8 bits,
        # so 64 coded bits + 16 pad bits fill 8 chunks of 10
        X = np.tile(np.arange(256, dtype=np.int64)[:, None], (1, 8))
        codec = HuffmanCodec(bits=2, seed=9).fit(X)
        assert all(
            all(len(w) == 8 for w in book.values()) for book in codec.codebooks_)
        out = codec.transform(X)
        assert out.shape == (256, 8)
        assert (out < 1 << 10).all()
        assert np.array_equal(codec.inverse_transform(out), X)

    def test_round_trip_on_gaussian_dataset(self):
        X = DATASETS["gaussian"]
        codec = HuffmanCodec(bits=2, seed=4).fit(X)
        out = codec.transform(X)
        assert np.array_equal(codec.inverse_transform(out), X)

    def test_overflow_when_extra_bits_too_small(self):
        # skewed alphabet: value 0 dominates and gets a 1-bit codeword,
        # symbols 1 and 2 end up on 3 bits; a [1, 1] message needs 6 bits
        # but c*chunk_bits is only 4
        X = np.array([[0, 0]] * 8 + [[1, 1], [2, 2], [3, 3]], dtype=np.int64)
        codec = HuffmanCodec(bits=0, base_bits=2, seed=0).fit(X)
        lengths = {s: len(w) for s, w in codec.codebooks_[0].items()}
        assert lengths == {0: 1, 3: 2, 1: 3, 2: 3}
        with pytest.raises(EncodeOverflowError):
            codec.transform(np.array([[1, 1]], dtype=np.int64))
        # the dominant message still fits
        assert codec.transform(np.array([[0, 0]], dtype=np.int64)).shape == (1, 2)

    def test_unknown_symbol_is_rejected(self):
        X = np.zeros((4, 2), dtype=np.int64)
        codec = HuffmanCodec(bits=2, base_bits=4, seed=0).fit(X)
        with pytest.raises(CodecError):
            codec.transform(np.array([[1, 0]], dtype=np.int64))

    def test_corrupt_chunk_fails_to_decode(self):
        X = np.zeros((4, 2), dtype=np.int64)
        codec = HuffmanCodec(bits=0, base_bits=1, seed=0).fit(X)
        # only codeword is '0'; a leading 1 bit cannot parse
        with pytest.raises(DecodeError):
            codec.inverse_transform(np.array([[1, 0]], dtype=np.int64))

    def test_padding_is_reproducible_per_seed(self):
        X = DATASETS["gaussian"][:50]
        a = HuffmanCodec(bits=2, seed=7).fit(X).transform(X)
        b = HuffmanCodec(bits=2, seed=7).fit(X).transform(X)
        assert np.array_equal(a, b)


def max_local_density(net):
    """Hottest fanal's established connections as a fraction of the
    connections it could have; scale-free across topology sizes."""
    deg = net.out_degrees()
    sizes = net.sizes_
    total = sizes.sum()
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    return max(
        deg[offsets[i]:offsets[i + 1]].max() / float(total - sizes[i])
        for i in range(len(sizes))
    )


class TestDensityFlattening:
    def test_every_strategy_defuses_the_hot_spot(self):
        X = gen_gaussian(2000, 8, 256, sigma=16.0, seed=6)
        raw = CliqueNetwork([256] * 8).fit(X)
        deg = raw.out_degrees()
        assert deg.max() / deg.mean() > 3  # the baseline is genuinely skewed
        raw_peak = max_local_density(raw)
        strategies = [
            RandomClustersCodec(n_extra=7, extra_size=5000, seed=1),
            RandomBitsCodec(bits=4, seed=2),
            LeastUsedBitsCodec(bits=4),
            HuffmanCodec(bits=4, seed=3),
        ]
        for codec in strategies:
            out = codec.fit(X).transform(X)
            net = CliqueNetwork(codec.output_sizes_).fit(out)
            assert max_local_density(net) < raw_peak, type(codec).__name__


class TestSerialization:
    def test_identity_round_trip(self, tmp_path):
        X = DATASETS["uniform"][:20]
        codec = IdentityCodec().fit(X)
        save_codec(codec, tmp_path / "c.gbc")
        loaded = load_codec(tmp_path / "c.gbc")
        assert np.array_equal(loaded.inverse_transform(X), X)

    def test_random_clusters_round_trip(self, tmp_path):
        X = DATASETS["uniform"][:20]
        codec = RandomClustersCodec(n_extra=2, extra_size=11, seed=77).fit(X)
        out = codec.transform(X)
        save_codec(codec, tmp_path / "c.gbc")
        loaded = load_codec(tmp_path / "c.gbc")
        assert loaded.n_extra == 2 and loaded.extra_size == 11
        assert loaded.seed_ == codec.seed_
        assert np.array_equal(loaded.inverse_transform(out), X)

    def test_random_bits_round_trip(self, tmp_path):
        X = DATASETS["uniform"][:20]
        codec = RandomBitsCodec(bits=3, seed=5).fit(X)
        out = codec.transform(X)
        save_codec(codec, tmp_path / "c.gbc")
        loaded = load_codec(tmp_path / "c.gbc")
        assert np.array_equal(loaded.inverse_transform(out), X)

    def test_least_used_round_trip_restores_tables(self, tmp_path):
        X = DATASETS["gaussian"][:200]
        codec = LeastUsedBitsCodec(bits=2).fit(X)
        out = codec.transform(X)
        save_codec(codec, tmp_path / "c.gbc")
        loaded = load_codec(tmp_path / "c.gbc")
        assert np.array_equal(loaded.tables_, codec.tables_)
        assert np.array_equal(loaded.inverse_transform(out), X)
        # encoding continues from the serialized counts
        nxt = np.array([[int(X[0, 0])] + [0] * 7], dtype=np.int64)
        assert np.array_equal(loaded.transform(nxt), codec.transform(nxt))

    def test_huffman_round_trip_restores_codebooks(self, tmp_path):
        X = DATASETS["gaussian"][:300]
        codec = HuffmanCodec(bits=2, seed=13).fit(X)
        out = codec.transform(X)
        save_codec(codec, tmp_path / "c.gbc")
        loaded = load_codec(tmp_path / "c.gbc")
        assert loaded.codebooks_ == codec.codebooks_
        assert np.array_equal(loaded.inverse_transform(out), X)

    def test_rejects_foreign_files(self, tmp_path):
        path = tmp_path / "bad.gbc"
        path.write_text("SOMETHING ELSE\n")
        with pytest.raises(ValueError):
            load_codec(path)
