"""
Polar spectra PS1 / PS0, PWEF coefficients and spectrum distances.

Two ways of weighing a surviving path are supported:
- direct (mode=None): the full path label is counted, so d_H + f_H = n.
- code-tree (mode=C0 / C1): surviving leaves are grouped into maximal complete
  subtrees whose root inherits the reliability of its predecessor. Under C0 only
  the ones inside the subtree count toward the path weight, while every zero on
  the path counts toward the complemental weight. C1 is the mirror image.
QUP / RQUP analysis uses the code-tree view with C0 / C1 respectively.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Iterable, Optional

import numpy as np

from errors import ConsistencyError, RangeError, UndefinedDistanceError
from polar_core import level_count
from puncturing import Mode, realizable_source_sets

logger = logging.getLogger("rcpp-toolkit")

CLOSED_FORM_TOLERANCE = 1e-12


class SpectrumKind(str, Enum):
    PS1 = "PS1"
    PS0 = "PS0"


@dataclass(frozen=True)
class PolarSpectrum:
    """counts[w] = number of surviving paths with (complemental) weight w."""

    kind: SpectrumKind
    n: int
    counts: tuple[int, ...]

    @property
    def M(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class SpectrumDistances:
    sd1: float
    sd0: float
    jsd: float


@dataclass(frozen=True)
class SubtreeRoot:
    """Maximal complete subtree: `depth` levels below a root reached by `prefix`."""

    depth: int
    prefix: tuple[int, ...]


@dataclass(frozen=True)
class SubtreeDecomposition:
    n: int
    roots: tuple[SubtreeRoot, ...]

    @property
    def M(self) -> int:
        return sum(1 << r.depth for r in self.roots)

    @property
    def terms(self) -> dict[int, int]:
        """Depth l_j -> multiplicity α_{l_j}."""
        return dict(Counter(r.depth for r in self.roots))

    @property
    def depths(self) -> tuple[int, ...]:
        """Depths in descending order, repeated by multiplicity."""
        return tuple(sorted((r.depth for r in self.roots), reverse=True))


@dataclass(frozen=True)
class SpectrumReport:
    ps1: PolarSpectrum
    ps0: PolarSpectrum
    distances: SpectrumDistances
    mode: Optional[Mode] = None
    decomposition: Optional[SubtreeDecomposition] = field(default=None, compare=False)


def _surviving_mask(surviving: Iterable[int], n: int) -> np.ndarray:
    N = 1 << n
    mask = np.zeros(N, dtype=bool)
    idx = np.fromiter((int(i) for i in surviving), dtype=np.int64)
    if idx.size and (idx.min() < 1 or idx.max() > N):
        raise RangeError(f"surviving indices must lie in 1..{N}")
    mask[idx - 1] = True
    return mask


def decompose_surviving(surviving: Iterable[int], n: int) -> SubtreeDecomposition:
    """
    Split a surviving source set into maximal complete subtrees.

    Roots are returned in ascending index order.
    """
    mask = _surviving_mask(surviving, n)
    filled = np.concatenate(([0], np.cumsum(mask)))
    roots: list[SubtreeRoot] = []
    # (start, size, prefix) in depth-first order, lower half first
    stack = [(0, 1 << n, ())]
    while stack:
        start, size, prefix = stack.pop()
        present = filled[start + size] - filled[start]
        if present == 0:
            continue
        if present == size:
            roots.append(SubtreeRoot(size.bit_length() - 1, prefix))
            continue
        half = size // 2
        stack.append((start + half, half, prefix + (1,)))
        stack.append((start, half, prefix + (0,)))
    return SubtreeDecomposition(n, tuple(roots))


def _direct_counts(mask: np.ndarray, n: int) -> np.ndarray:
    idx = np.flatnonzero(mask)
    weights = np.zeros(idx.shape, dtype=np.int64)
    for bit in range(n):
        weights += (idx >> bit) & 1
    return np.bincount(weights, minlength=n + 1)


def _tree_counts(decomp: SubtreeDecomposition, kind: SpectrumKind, mode: Mode) -> np.ndarray:
    n = decomp.n
    counts = np.zeros(n + 1, dtype=np.int64)
    # the weight counted inside the subtree matches the mode, the other one runs along the path
    inner = SpectrumKind.PS1 if mode is Mode.C0 else SpectrumKind.PS0
    for root in decomp.roots:
        l = root.depth
        zeros = root.prefix.count(0)
        ones = len(root.prefix) - zeros
        for j in range(l + 1):
            # j = weight inside the subtree of the kind the mode keeps local
            if kind is inner:
                counts[j] += comb(l, j)
            else:
                outside = zeros if mode is Mode.C0 else ones
                counts[outside + l - j] += comb(l, j)
    return counts


def compute_spectrum(
    surviving: Iterable[int], n: int, kind: "SpectrumKind | str", mode: "Mode | str | None" = None
) -> PolarSpectrum:
    """
    Polar spectrum of a surviving source set.

    Args:
        surviving: 𝒟^c as 1-based source indices
        n: number of levels
        kind: PS1 (bins by path weight) or PS0 (bins by complemental weight)
        mode: None for direct label counting, C0/C1 for code-tree counting

    Returns:
        PolarSpectrum with Σ counts = M; an empty set gives the all-zero spectrum
    """
    kind = SpectrumKind(kind)
    if mode is None:
        counts = _direct_counts(_surviving_mask(surviving, n), n)
        if kind is SpectrumKind.PS0:
            counts = counts[::-1]
    else:
        counts = _tree_counts(decompose_surviving(surviving, n), kind, Mode.parse(mode))
    return PolarSpectrum(kind, n, tuple(int(c) for c in counts))


def pwef_coefficients(s: PolarSpectrum) -> tuple[int, ...]:
    """Coefficients of Σ_w counts[w]·X^w, trailing zeros dropped (M=0 gives ())."""
    coeffs = list(s.counts)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def spectrum_distance(s: PolarSpectrum) -> float:
    """Average weight (1/M)·Σ_w w·counts[w]."""
    if s.M == 0:
        raise UndefinedDistanceError(f"{s.kind.value} spectrum is empty")
    return sum(w * c for w, c in enumerate(s.counts)) / s.M


def joint_spectrum_distance(ps1: PolarSpectrum, ps0: PolarSpectrum) -> float:
    if ps1.kind is not SpectrumKind.PS1 or ps0.kind is not SpectrumKind.PS0:
        raise ConsistencyError("expected a PS1 spectrum and a PS0 spectrum")
    if ps1.M != ps0.M or ps1.n != ps0.n:
        raise ConsistencyError(f"spectra describe different sets (M={ps1.M} vs M={ps0.M})")
    return spectrum_distance(ps1) + spectrum_distance(ps0)


def subtree_decomposition(M: int, n: int, mode: "Mode | str" = Mode.C0) -> SubtreeDecomposition:
    """
    Decomposition of the QUP (C0) or RQUP (C1) surviving set of size M.

    QUP keeps the last M source indices and RQUP the first M; either way the
    depths are the set bits of M.
    """
    N = 1 << n
    if not N // 2 < M <= N:
        raise RangeError(f"M={M} outside ({N // 2}, {N}]")
    if Mode.parse(mode) is Mode.C0:
        surviving = range(N - M + 1, N + 1)
    else:
        surviving = range(1, M + 1)
    return decompose_surviving(surviving, n)


def closed_form_sd(decomp: SubtreeDecomposition, M: int) -> float:
    """
    Σ_j 2^(l_j−1)·l_j / M.

    This is SD1 of a QUP code and, by symmetry, SD0 of an RQUP code.
    """
    if decomp.M != M:
        raise ConsistencyError(f"decomposition covers {decomp.M} leaves, expected {M}")
    return sum((1 << l) * l / 2 for l in decomp.depths) / M


def decomposition_jsd(decomp: SubtreeDecomposition, mode: "Mode | str") -> float:
    """
    Per-subtree digit form of the JSD.

    Every leaf under root j carries the digit l_j plus the zeros (C0) or ones
    (C1) on the path to that root. Equals the code-tree JSD of the set, and
    n when nothing is pruned.
    """
    mode = Mode.parse(mode)
    if decomp.M == 0:
        raise UndefinedDistanceError("empty decomposition")
    digit_bit = 0 if mode is Mode.C0 else 1
    total = sum((1 << r.depth) * (r.depth + r.prefix.count(digit_bit)) for r in decomp.roots)
    return total / decomp.M


def spectrum_report(
    surviving: Iterable[int], n: int, mode: "Mode | str | None" = None
) -> SpectrumReport:
    """Both spectra and the three distances for one surviving set."""
    surviving = list(surviving)
    ps1 = compute_spectrum(surviving, n, SpectrumKind.PS1, mode)
    ps0 = compute_spectrum(surviving, n, SpectrumKind.PS0, mode)
    sd1, sd0 = spectrum_distance(ps1), spectrum_distance(ps0)
    return SpectrumReport(
        ps1=ps1,
        ps0=ps0,
        distances=SpectrumDistances(sd1, sd0, sd1 + sd0),
        mode=Mode.parse(mode) if mode is not None else None,
        decomposition=decompose_surviving(surviving, n),
    )


def maximal_sd_search(N: int, Q: int, mode: "Mode | str") -> tuple[float, tuple[int, ...]]:
    """
    Largest code-tree distance over every realizable source puncture set.

    C0 maximizes SD1 and C1 maximizes SD0.

    Returns:
        (best distance, the 𝒟 achieving it; the smallest such 𝒟 on ties)
    """
    n = level_count(N)
    mode = Mode.parse(mode)
    kind = SpectrumKind.PS1 if mode is Mode.C0 else SpectrumKind.PS0
    best: Optional[tuple[float, tuple[int, ...]]] = None
    candidates = realizable_source_sets(N, Q, mode)
    for removed in candidates:
        gone = set(removed)
        surviving = [i for i in range(1, N + 1) if i not in gone]
        value = spectrum_distance(compute_spectrum(surviving, n, kind, mode))
        if best is None or value > best[0] + CLOSED_FORM_TOLERANCE:
            best = (value, removed)
    if best is None:
        raise RangeError(f"no realizable source set for N={N} Q={Q}")
    logger.info("Maximal %s search: N=%s Q=%s candidates=%s best=%.6f", kind.value, N, Q, len(candidates), best[0])
    return best
