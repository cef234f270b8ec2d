"""
CRC helpers for CRC-aided list decoding.

Polynomials are given without their leading x^degree term, so 0x1021 with
degree 16 is x^16 + x^12 + x^5 + 1. Bits are MSB-first.
"""
from dataclasses import dataclass

import numpy as np

import config
from errors import RangeError, ShapeError
from polar_core import as_bits


def _generator_bits(poly: int, degree: int) -> np.ndarray:
    if degree < 1:
        raise RangeError(f"CRC degree must be at least 1, got {degree}")
    if not 0 <= poly < (1 << degree):
        raise RangeError(f"CRC polynomial 0x{poly:x} does not fit degree {degree}")
    full = (1 << degree) | poly
    return np.array([(full >> i) & 1 for i in range(degree, -1, -1)], dtype=np.uint8)


def _remainder(bits: np.ndarray, generator: np.ndarray) -> np.ndarray:
    degree = generator.size - 1
    buffer = bits.copy()
    for i in range(bits.size - degree):
        if buffer[i]:
            buffer[i : i + degree + 1] ^= generator
    return buffer[-degree:]


def crc_attach(message, poly: int = config.CRC_POLY, degree: int = config.CRC_DEGREE) -> np.ndarray:
    """Append the degree-bit remainder of message·x^degree."""
    bits = as_bits(message)
    if bits.ndim != 1:
        raise ShapeError("crc_attach expects a 1-D bit vector")
    generator = _generator_bits(poly, degree)
    padded = np.concatenate([bits, np.zeros(degree, dtype=np.uint8)])
    return np.concatenate([bits, _remainder(padded, generator)])


def crc_check(codeword, poly: int = config.CRC_POLY, degree: int = config.CRC_DEGREE) -> bool:
    """True when the trailing degree bits are the CRC of the leading ones."""
    bits = as_bits(codeword)
    if bits.ndim != 1:
        raise ShapeError("crc_check expects a 1-D bit vector")
    if bits.size < degree:
        raise ShapeError(f"need at least {degree} bits, got {bits.size}")
    generator = _generator_bits(poly, degree)
    return not _remainder(bits, generator).any()


@dataclass(frozen=True)
class CrcCode:
    poly: int = config.CRC_POLY
    degree: int = config.CRC_DEGREE

    def __post_init__(self) -> None:
        _generator_bits(self.poly, self.degree)

    def payload_length(self, K: int) -> int:
        """Message bits that fit in K information positions."""
        if K <= self.degree:
            raise RangeError(f"K={K} leaves no room for a {self.degree}-bit CRC")
        return K - self.degree

    def attach(self, message) -> np.ndarray:
        return crc_attach(message, self.poly, self.degree)

    def check(self, codeword) -> bool:
        return crc_check(codeword, self.poly, self.degree)
