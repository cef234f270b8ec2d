"""
Successive cancellation decoders: SC, SCL and CRC-aided SCL.

LLRs are positive-favors-0 and indexed by code bit in natural order. Since
x = B_N(u·F^{⊗n}), the decoders bit-reverse the channel LLRs once and then
run the usual recursion on v = u·F^{⊗n} with v = (a ⊕ b, b).
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

import config
from crc import CrcCode
from errors import RangeError, ShapeError
from polar_core import bit_reverse_permute, kronecker_transform, level_count

logger = logging.getLogger("rcpp-toolkit")

DECODERS = ("sc", "scl", "ca-scl")


@dataclass(frozen=True)
class FrozenSpec:
    """Information set (1-based) and the values of the frozen positions."""

    N: int
    info: tuple[int, ...]
    values: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        level_count(self.N)
        if any(not 1 <= i <= self.N for i in self.info) or len(set(self.info)) != len(self.info):
            raise RangeError("information indices must be distinct and lie in 1..N")
        if self.values and len(self.values) != self.N:
            raise ShapeError(f"frozen values must have length {self.N}")

    @property
    def K(self) -> int:
        return len(self.info)

    def frozen_mask(self) -> np.ndarray:
        mask = np.ones(self.N, dtype=bool)
        mask[np.asarray(self.info, dtype=int) - 1] = False
        return mask

    def frozen_values(self) -> np.ndarray:
        """Length-N vector of frozen values; info positions hold 0."""
        if not self.values:
            return np.zeros(self.N, dtype=np.uint8)
        out = np.asarray(self.values, dtype=np.uint8).copy()
        out[~self.frozen_mask()] = 0
        return out

    def place(self, info_bits) -> np.ndarray:
        """Source word u with info_bits on the information set."""
        u = self.frozen_values()
        bits = np.asarray(info_bits, dtype=np.uint8)
        if bits.shape[-1] != self.K:
            raise ShapeError(f"expected {self.K} information bits, got {bits.shape[-1]}")
        u[np.asarray(self.info, dtype=int) - 1] = bits
        return u


@dataclass
class DecodeResult:
    u: np.ndarray
    info_bits: np.ndarray
    metric: Optional[float] = None
    crc_ok: Optional[bool] = None


@dataclass(frozen=True)
class DecoderSpec:
    """Decoder choice as used by the simulator and the CLI."""

    kind: str = "sc"
    list_size: int = 1
    crc: Optional[CrcCode] = None
    check_node: str = field(default_factory=lambda: config.CHECK_NODE)

    def __post_init__(self) -> None:
        if self.kind not in DECODERS:
            raise RangeError(f"unknown decoder {self.kind!r} (expected one of {', '.join(DECODERS)})")
        if self.list_size < 1:
            raise RangeError(f"list size must be at least 1, got {self.list_size}")
        if self.kind == "ca-scl" and self.crc is None:
            raise RangeError("ca-scl needs a CRC")
        if self.check_node not in ("exact", "minsum"):
            raise RangeError(f"unknown check-node rule {self.check_node!r}")

    @property
    def label(self) -> str:
        return self.kind if self.kind == "sc" else f"{self.kind}{self.list_size}"


def boxplus_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """2·atanh(tanh(a/2)·tanh(b/2)) in a form that stays finite for large inputs."""
    core = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    return core + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))


def boxplus_minsum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def check_node_rule(name: str):
    return boxplus_minsum if name == "minsum" else boxplus_exact


def g_update(a: np.ndarray, b: np.ndarray, partial: np.ndarray) -> np.ndarray:
    """Variable-node update given the left partial codeword."""
    return b + (1.0 - 2.0 * partial) * a


def _prepare(llr: Sequence[float], frozen: FrozenSpec) -> np.ndarray:
    arr = np.asarray(llr, dtype=np.float64)
    if arr.ndim != 1 or arr.size != frozen.N:
        raise ShapeError(f"expected {frozen.N} channel LLRs, got shape {arr.shape}")
    return bit_reverse_permute(arr)


def _info_bits(u: np.ndarray, frozen: FrozenSpec) -> np.ndarray:
    return u[..., np.asarray(frozen.info, dtype=int) - 1]


def sc_decode(llr: Sequence[float], frozen: FrozenSpec, check_node: Optional[str] = None) -> DecodeResult:
    """
    Successive cancellation decoding.

    Args:
        llr: N channel LLRs, natural code-bit order
        frozen: information set and frozen values
        check_node: "exact" or "minsum"; defaults to RCPP_CHECK_NODE

    Returns:
        DecodeResult with u and the information bits
    """
    f = check_node_rule(check_node or config.CHECK_NODE)
    is_frozen = frozen.frozen_mask()
    values = frozen.frozen_values()

    def node(alpha: np.ndarray, offset: int) -> np.ndarray:
        size = alpha.size
        if is_frozen[offset : offset + size].all():
            return kronecker_transform(values[offset : offset + size])
        if size == 1:
            return np.array([1 if alpha[0] < 0 else 0], dtype=np.uint8)
        h = size // 2
        left = node(f(alpha[:h], alpha[h:]), offset)
        right = node(g_update(alpha[:h], alpha[h:], left), offset + h)
        return np.concatenate([left ^ right, right])

    v = node(_prepare(llr, frozen), 0)
    u = kronecker_transform(v)
    return DecodeResult(u=u, info_bits=_info_bits(u, frozen))


def _penalty(bit: np.ndarray | int, llr: np.ndarray) -> np.ndarray:
    """−log P(bit | llr), exact."""
    return np.logaddexp(0.0, -(1.0 - 2.0 * np.asarray(bit, dtype=np.float64)) * llr)


def scl_decode(
    llr: Sequence[float],
    frozen: FrozenSpec,
    L: int,
    check_node: Optional[str] = None,
    on_leaf: Optional[Callable[[int, np.ndarray, np.ndarray], None]] = None,
) -> list[DecodeResult]:
    """
    Successive cancellation list decoding.

    At every information leaf each path splits into its hard decision and the
    flipped bit; the L candidates with the smallest accumulated penalty
    survive (ties keep the earlier candidate, so L=1 reproduces SC).

    on_leaf, when given, is called after every leaf with the leaf position
    in decoding order, the surviving path metrics and the parent path of each survivor.

    Returns:
        Candidates sorted by path metric, best first
    """
    if L < 1:
        raise RangeError(f"list size must be at least 1, got {L}")
    f = check_node_rule(check_node or config.CHECK_NODE)
    is_frozen = frozen.frozen_mask()
    values = frozen.frozen_values()
    metrics = np.zeros(1)

    def node(alpha: np.ndarray, offset: int) -> tuple[np.ndarray, np.ndarray]:
        nonlocal metrics
        paths, size = alpha.shape
        if size == 1:
            leaf = alpha[:, 0]
            if is_frozen[offset]:
                bit = int(values[offset])
                metrics = metrics + _penalty(bit, leaf)
                if on_leaf is not None:
                    on_leaf(offset, metrics.copy(), np.arange(paths))
                return np.full((paths, 1), bit, dtype=np.uint8), np.arange(paths)
            hard = (leaf < 0).astype(np.uint8)
            # candidate 2p + k: path p with its hard decision flipped k times
            candidates = np.empty(2 * paths)
            candidates[0::2] = metrics + _penalty(hard, leaf)
            candidates[1::2] = metrics + _penalty(hard ^ 1, leaf)
            keep = np.argsort(candidates, kind="stable")[: min(L, 2 * paths)]
            origin = keep // 2
            bits = hard[origin] ^ (keep % 2).astype(np.uint8)
            metrics = candidates[keep]
            if on_leaf is not None:
                on_leaf(offset, metrics.copy(), origin.copy())
            return bits[:, None], origin
        h = size // 2
        left, first = node(f(alpha[:, :h], alpha[:, h:]), offset)
        a, b = alpha[first, :h], alpha[first, h:]
        right, second = node(g_update(a, b, left), offset + h)
        left = left[second]
        return np.concatenate([left ^ right, right], axis=1), first[second]

    v, _ = node(_prepare(llr, frozen)[None, :], 0)
    u = kronecker_transform(v)
    order = np.argsort(metrics, kind="stable")
    return [
        DecodeResult(u=u[p], info_bits=_info_bits(u[p], frozen), metric=float(metrics[p]))
        for p in order
    ]


def ca_scl_decode(
    llr: Sequence[float],
    frozen: FrozenSpec,
    L: int,
    crc: Optional[CrcCode] = None,
    check_node: Optional[str] = None,
) -> DecodeResult:
    """Best-metric SCL candidate whose information bits pass the CRC; otherwise the best one, flagged."""
    crc = crc or CrcCode()
    candidates = scl_decode(llr, frozen, L, check_node)
    for candidate in candidates:
        if crc.check(candidate.info_bits):
            candidate.crc_ok = True
            return candidate
    best = candidates[0]
    best.crc_ok = False
    return best


def decode(spec: DecoderSpec, llr: Sequence[float], frozen: FrozenSpec) -> DecodeResult:
    """Run the decoder described by spec and return its single decision."""
    if spec.kind == "sc":
        return sc_decode(llr, frozen, spec.check_node)
    if spec.kind == "scl":
        return scl_decode(llr, frozen, spec.list_size, spec.check_node)[0]
    return ca_scl_decode(llr, frozen, spec.list_size, spec.crc, spec.check_node)
