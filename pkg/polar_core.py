"""
Polar transform primitives: index arithmetic, bit reversal and x = u·G_N.

Public indices are 1-based (channel i = 1..N) to line up with the usual
tables; arrays are 0-based internally.

Layout: G_N = B_N F_2^{⊗n}. Since B_N commutes with F_2^{⊗n}, encoding
computes v = u·F_2^{⊗n} in place and then applies the bit reversal as a
post-permutation, x = B_N(v).
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import numpy.typing as npt

from errors import RangeError, ShapeError

logger = logging.getLogger("rcpp-toolkit")

BitVector = npt.NDArray[np.uint8]
Combine = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class PathLabel:
    """Root-to-leaf label (b_1, ..., b_n) of a channel on the code tree."""

    bits: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        """Channel index i = 1 + Σ b_l·2^(n−l)."""
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value + 1

    @property
    def weight(self) -> int:
        """Path weight d_H (number of ones)."""
        return sum(self.bits)

    @property
    def complemental_weight(self) -> int:
        """Complemental path weight f_H (number of zeros)."""
        return self.n - self.weight


def level_count(length: int) -> int:
    """Return n for length = 2^n, raising ShapeError otherwise."""
    if length < 1 or length & (length - 1):
        raise ShapeError(f"length must be a power of two, got {length}")
    return length.bit_length() - 1


def binary_expansion(i: int, n: int) -> PathLabel:
    """
    Expand channel index i into its path label.

    Args:
        i: 1-based channel index, 1 ≤ i ≤ 2^n
        n: number of polarization levels

    Returns:
        PathLabel (b_1, ..., b_n), most significant bit first
    """
    if n < 0 or not 1 <= i <= (1 << n):
        raise RangeError(f"channel index {i} outside 1..{1 << max(n, 0)}")
    value = i - 1
    return PathLabel(tuple((value >> (n - l)) & 1 for l in range(1, n + 1)))


@lru_cache(maxsize=None)
def _reversal(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    rev = np.zeros_like(idx)
    for bit in range(n):
        rev |= ((idx >> bit) & 1) << (n - 1 - bit)
    rev.setflags(write=False)
    return rev


def bit_reverse_permute(v: Sequence | np.ndarray) -> np.ndarray:
    """Return w with w[j] = v[rev(j)]; an involution."""
    arr = np.asarray(v)
    n = level_count(arr.shape[-1])
    return arr[..., _reversal(n)]


def as_bits(u: Sequence[int] | np.ndarray) -> BitVector:
    """Validate a 0/1 vector (or stack of vectors) and return it as uint8."""
    arr = np.asarray(u)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise RangeError("bit vectors may only hold 0 and 1")
    return arr.astype(np.uint8)


def kronecker_transform(v: np.ndarray) -> np.ndarray:
    """In-place-style butterfly evaluation of v·F_2^{⊗n} over the last axis."""
    out = np.array(v, dtype=np.uint8, copy=True)
    length = out.shape[-1]
    level_count(length)
    lead = out.shape[:-1]
    h = 1
    while h < length:
        view = out.reshape(*lead, length // (2 * h), 2, h)
        view[..., 0, :] ^= view[..., 1, :]
        h *= 2
    return out


def polar_encode(u: Sequence[int] | np.ndarray) -> BitVector:
    """
    Encode x = u·G_N over GF(2) in O(N log N).

    Accepts a single vector or a 2-D stack of row vectors. G_N is its own
    inverse, so polar_encode(polar_encode(u)) == u.
    """
    bits = as_bits(u)
    if bits.ndim == 0:
        raise ShapeError("polar_encode expects a vector")
    return bit_reverse_permute(kronecker_transform(bits))


@lru_cache(maxsize=16)
def _generator(n: int) -> np.ndarray:
    g = polar_encode(np.eye(1 << n, dtype=np.uint8))
    g.setflags(write=False)
    return g


def generator_matrix(N: int) -> np.ndarray:
    """G_N = B_N F_2^{⊗n}; row i is the codeword of the i-th unit vector."""
    return _generator(level_count(N))


def column_weights(N: int) -> np.ndarray:
    """Hamming weight of every column of G_N (natural code-bit order)."""
    return generator_matrix(N).sum(axis=0).astype(int)


def polarize(channel_values: np.ndarray, combine: Combine) -> np.ndarray:
    """
    Walk the polarization trellis from code-bit channels to source channels.

    The channel vector is bit-reversed, then stages with span N/2, N/4, ..., 1
    replace each pair (a, b) by combine(a, b) = (minus, plus). The first stage
    applied builds b_1 of every path label, so after the last stage entry i−1
    belongs to source channel i.
    """
    z = bit_reverse_permute(channel_values).copy()
    length = z.shape[-1]
    h = length // 2
    while h >= 1:
        view = z.reshape(length // (2 * h), 2, h)
        minus, plus = combine(view[:, 0, :].copy(), view[:, 1, :].copy())
        view[:, 0, :] = minus
        view[:, 1, :] = plus
        h //= 2
    return z
