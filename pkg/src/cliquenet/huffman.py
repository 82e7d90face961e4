"""Deterministic Huffman codebook construction.

Ties are broken by (lower weight, then leaves by symbol value, then
internal nodes by creation order), so the same frequency table always
yields the same prefix-free codebook.
"""

import heapq

_LEAF, _INTERNAL = 0, 1


def build_codebook(frequencies: dict) -> dict:
    """Map each symbol to its codeword bit string ('0'/'1' characters).

    A single-symbol alphabet gets the one-bit codeword '0' so that
    sequential decoding still consumes bits.
    """
    if not frequencies:
        raise ValueError("cannot build a codebook from an empty alphabet")
    if any(f <= 0 for f in frequencies.values()):
        raise ValueError("symbol frequencies must be positive")
    if len(frequencies) == 1:
        (symbol,) = frequencies
        return {symbol: "0"}

    # heap entries: (weight, kind, tiebreak, node); leaves sort before
    # internal nodes of equal weight, leaves by symbol, internals by age
    heap = [
        (int(freq), _LEAF, int(symbol), symbol)
        for symbol, freq in frequencies.items()
    ]
    heapq.heapify(heap)
    births = 0
    while len(heap) > 1:
        w1, _, _, left = heapq.heappop(heap)
        w2, _, _, right = heapq.heappop(heap)
        heapq.heappush(heap, (w1 + w2, _INTERNAL, births, (left, right)))
        births += 1

    codebook = {}
    stack = [(heap[0][3], "")]
    while stack:
        node, prefix = stack.pop()
        if isinstance(node, tuple):
            left, right = node
            stack.append((left, prefix + "0"))
            stack.append((right, prefix + "1"))
        else:
            codebook[node] = prefix
    return codebook


def is_prefix_free(codebook: dict) -> bool:
    """True when no codeword is a prefix of another codeword."""
    words = sorted(codebook.values())
    return all(
        not words[k + 1].startswith(words[k]) for k in range(len(words) - 1)
    )


def kraft_sum(codebook: dict) -> float:
    """Kraft inequality sum of the codebook (<= 1 for prefix-free codes)."""
    return sum(2.0 ** -len(word) for word in codebook.values())
