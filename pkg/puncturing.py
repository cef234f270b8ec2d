"""
Puncturing tables: QUP / RQUP / reference generation, source puncture sets
and equivalent-table counting.

A table t_1..t_N marks transmitted code bits with 1 and punctured ones with 0.
Punctured positions degrade (C0: capacity zero, Z = 1) or fix (C1: capacity
one, Z = 0) their channels; propagating that flag through the trellis gives the
source positions 𝒟 that are lost (C0) or forced (C1).
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from errors import CapacityError, InvalidShorteningError, RangeError, ShapeError
from polar_core import bit_reverse_permute, generator_matrix, level_count, polarize

logger = logging.getLogger("rcpp-toolkit")

# enumerate_equivalent_tables walks every Q-subset, keep it small
MAX_ENUMERATION_LENGTH = 32
# count is only materialized as an int while it fits a signed 64-bit word
MAX_EXACT_EXPONENT = 63


class Mode(str, Enum):
    """Puncturing mode: C0 = bits unknown at the decoder, C1 = bits known (zero)."""

    C0 = "C0"
    C1 = "C1"

    @classmethod
    def parse(cls, value: "str | Mode") -> "Mode":
        try:
            return cls(str(value.value if isinstance(value, Mode) else value).upper())
        except ValueError:
            raise RangeError(f"unknown puncturing mode {value!r} (expected C0 or C1)") from None


@dataclass(frozen=True)
class PuncturingTable:
    """Length-N puncturing table 𝒯_N together with its mode."""

    table: tuple[int, ...]
    mode: Mode

    def __post_init__(self) -> None:
        level_count(len(self.table))
        if any(t not in (0, 1) for t in self.table):
            raise RangeError("puncturing table entries must be 0 or 1")

    @property
    def N(self) -> int:
        return len(self.table)

    @property
    def n(self) -> int:
        return level_count(self.N)

    @property
    def M(self) -> int:
        return sum(self.table)

    @property
    def Q(self) -> int:
        return self.N - self.M

    @property
    def punctured(self) -> tuple[int, ...]:
        """The set ℬ as sorted 1-based code-bit positions."""
        return tuple(i + 1 for i, t in enumerate(self.table) if t == 0)

    @property
    def transmitted(self) -> tuple[int, ...]:
        """The set ℬ^c as sorted 1-based code-bit positions."""
        return tuple(i + 1 for i, t in enumerate(self.table) if t == 1)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.uint8)

    def with_mode(self, mode: Mode) -> "PuncturingTable":
        return PuncturingTable(self.table, Mode.parse(mode))


@dataclass(frozen=True)
class SourcePunctureSet:
    """Source positions 𝒟 (1-based, sorted) removed or forced by a table."""

    indices: tuple[int, ...]
    mode: Mode

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i: object) -> bool:
        return i in self.indices


@dataclass(frozen=True)
class EquivalentCount:
    """Size 2^exponent of an equivalence class; count is None when it overflows."""

    exponent: int
    count: Optional[int]


def make_table(
    bits: Sequence[int], mode: "Mode | str", *, allow_low_rate: bool = False
) -> PuncturingTable:
    """
    Build a validated table from explicit bits.

    Args:
        bits: t_1..t_N
        mode: C0 or C1
        allow_low_rate: accept M ≤ N/2 (only needed for two-channel examples)

    Returns:
        PuncturingTable
    """
    table = PuncturingTable(tuple(int(b) for b in bits), Mode.parse(mode))
    if not allow_low_rate and not table.N // 2 < table.M <= table.N:
        raise RangeError(f"M={table.M} outside ({table.N // 2}, {table.N}]")
    return table


def _check_puncture_count(N: int, Q: int) -> int:
    n = level_count(N)
    if not 0 <= Q < max(N // 2, 1):
        raise RangeError(f"Q={Q} must satisfy 0 ≤ Q < N/2 for N={N}")
    return n


def qup_table(N: int, Q: int) -> PuncturingTable:
    """Quasi-uniform puncturing: bit-reverse (0^Q, 1^(N−Q)); mode C0."""
    _check_puncture_count(N, Q)
    initial = np.ones(N, dtype=np.uint8)
    initial[:Q] = 0
    return PuncturingTable(tuple(int(b) for b in bit_reverse_permute(initial)), Mode.C0)


def rqup_table(N: int, Q: int) -> PuncturingTable:
    """Reversal quasi-uniform puncturing: bit-reverse (1^(N−Q), 0^Q); mode C1."""
    _check_puncture_count(N, Q)
    initial = np.ones(N, dtype=np.uint8)
    initial[N - Q:] = 0
    return PuncturingTable(tuple(int(b) for b in bit_reverse_permute(initial)), Mode.C1)


def wang_reference_table(N: int, Q: int) -> PuncturingTable:
    """
    Puncture the last Q code bits in natural order; mode C1.

    This is the simplified stand-in used for comparisons, not the column-weight
    search it is named after.
    """
    _check_puncture_count(N, Q)
    return PuncturingTable(tuple([1] * (N - Q) + [0] * Q), Mode.C1)


SCHEMES = {
    "qup": qup_table,
    "rqup": rqup_table,
    "wang": wang_reference_table,
}


def scheme_table(scheme: str, N: int, Q: int, mode: "Mode | str | None" = None) -> PuncturingTable:
    """Look up a scheme by name; mode overrides the scheme's preset."""
    try:
        builder = SCHEMES[scheme.lower()]
    except KeyError:
        raise RangeError(f"unknown puncturing scheme {scheme!r}") from None
    table = builder(N, Q)
    return table.with_mode(mode) if mode is not None else table


def _flag_combine(mode: Mode):
    if mode is Mode.C0:
        # flag = incapable: the minus channel dies if either input died
        return lambda a, b: (a | b, a & b)
    # flag = perfect: the plus channel is perfect if either input is
    return lambda a, b: (a & b, a | b)


def propagate_flags(t: PuncturingTable, mode: "Mode | str | None" = None) -> np.ndarray:
    """Boolean per-source degeneracy flags (0-based) for table t."""
    mode = Mode.parse(mode or t.mode)
    punctured = t.as_array() == 0
    return polarize(punctured, _flag_combine(mode))


def is_valid_shortening(t: PuncturingTable, source_set: Optional[Iterable[int]] = None) -> bool:
    """
    True when freezing u_𝒟 = 0 forces x_i = 0 on every punctured position.

    By linearity it suffices that no unit vector outside 𝒟 reaches ℬ, which is
    checked on the rows of G_N.
    """
    if t.Q == 0:
        return True
    if source_set is None:
        source_set = np.flatnonzero(propagate_flags(t, Mode.C1)) + 1
    forced = np.zeros(t.N, dtype=bool)
    forced[np.asarray(list(source_set), dtype=int) - 1] = True
    g = generator_matrix(t.N)
    punctured = t.as_array() == 0
    return not g[np.ix_(~forced, punctured)].any()


def derive_source_puncture_set(
    t: PuncturingTable, mode: "Mode | str | None" = None
) -> SourcePunctureSet:
    """
    Derive the source puncture set 𝒟 induced by a table.

    Args:
        t: puncturing table
        mode: overrides t.mode when given

    Returns:
        SourcePunctureSet with |𝒟| = Q

    Raises:
        InvalidShorteningError: C1 table whose punctured bits are not fixed by 𝒟
    """
    mode = Mode.parse(mode or t.mode)
    flags = propagate_flags(t, mode)
    indices = tuple(int(i) + 1 for i in np.flatnonzero(flags))
    if mode is Mode.C1 and not is_valid_shortening(t, indices):
        raise InvalidShorteningError(
            f"punctured bits {t.punctured} cannot be fixed by freezing source bits {indices}"
        )
    logger.debug("Derived source puncture set: N=%s Q=%s mode=%s D=%s", t.N, t.Q, mode.value, indices)
    return SourcePunctureSet(indices, mode)


def neighbor_distance_bounds_check(t: PuncturingTable) -> bool:
    """
    Check 2^(n−L−1) ≤ D ≤ 2^(n−L), L = ⌊log2 Q⌋, for consecutive punctured positions.

    Tables with fewer than two punctured bits pass vacuously.
    """
    positions = t.punctured
    if len(positions) < 2:
        return True
    L = t.Q.bit_length() - 1
    low, high = 2 ** (t.n - L - 1), 2 ** (t.n - L)
    return all(low <= b - a <= high for a, b in zip(positions, positions[1:]))


def count_equivalent_tables(N: int, Q: int) -> EquivalentCount:
    """
    Number of C0 tables equivalent to the QUP table of (N, Q).

    With Q = Σ_z 2^(m_z), m_1 < ... < m_|U|, the class has
    2^E members, E = Σ_z (n − 2|U| + 2z − m_z)·2^(m_z).
    """
    n = level_count(N)
    if not 1 <= Q < N // 2:
        raise RangeError(f"Q={Q} must satisfy 1 ≤ Q < N/2 for N={N}")
    powers = [m for m in range(Q.bit_length()) if (Q >> m) & 1]
    size = len(powers)
    exponent = sum((n - 2 * size + 2 * z - m) * (1 << m) for z, m in enumerate(powers, start=1))
    count = 1 << exponent if exponent <= MAX_EXACT_EXPONENT else None
    return EquivalentCount(exponent, count)


@lru_cache(maxsize=None)
def _spread(mask: int, width: int) -> int:
    """Move bit i of mask to bit 2i."""
    out = 0
    for i in range(width):
        if (mask >> i) & 1:
            out |= 1 << (2 * i)
    return out


def _interleave(minus: int, plus: int, width: int) -> int:
    return _spread(minus, width) | (_spread(plus, width) << 1)


@lru_cache(maxsize=1 << 18)
def _flags_from_mask(mask: int, n: int, mode: Mode) -> int:
    """Integer-mask form of propagate_flags (bit i-1 ↔ position i)."""
    if n == 0:
        return mask
    half = 1 << (n - 1)
    low = (1 << half) - 1
    a = _flags_from_mask(mask & low, n - 1, mode)
    b = _flags_from_mask(mask >> half, n - 1, mode)
    if mode is Mode.C0:
        return _interleave(a | b, a & b, half)
    return _interleave(a & b, a | b, half)


def _to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << (i - 1)
    return mask


def _from_mask(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if (mask >> i) & 1)


def enumerate_equivalent_tables(
    N: int, Q: int, reference: "SourcePunctureSet | Iterable[int]"
) -> list[tuple[int, ...]]:
    """
    Brute-force all Q-subsets ℬ whose C0 propagation yields the reference 𝒟.

    Returns:
        Sorted list of 1-based code-bit puncture sets
    """
    n = level_count(N)
    if N > MAX_ENUMERATION_LENGTH:
        raise CapacityError(f"enumeration limited to N ≤ {MAX_ENUMERATION_LENGTH}, got {N}")
    if not 0 <= Q <= N:
        raise RangeError(f"Q={Q} outside 0..{N}")
    ref_indices = reference.indices if isinstance(reference, SourcePunctureSet) else tuple(reference)
    target = _to_mask(ref_indices)
    found = [
        tuple(p + 1 for p in subset)
        for subset in combinations(range(N), Q)
        if _flags_from_mask(_to_mask(p + 1 for p in subset), n, Mode.C0) == target
    ]
    logger.info("Enumerated equivalent tables: N=%s Q=%s D=%s -> %s", N, Q, ref_indices, len(found))
    return found


@lru_cache(maxsize=None)
def _images(n: int, q: int, mode: Mode) -> frozenset[int]:
    if n == 0:
        return frozenset({q}) if q in (0, 1) else frozenset()
    half = 1 << (n - 1)
    out: set[int] = set()
    for q1 in range(max(0, q - half), min(q, half) + 1):
        left, right = _images(n - 1, q1, mode), _images(n - 1, q - q1, mode)
        for a in left:
            for b in right:
                if mode is Mode.C0:
                    out.add(_interleave(a | b, a & b, half))
                else:
                    out.add(_interleave(a & b, a | b, half))
    return frozenset(out)


def realizable_source_sets(N: int, Q: int, mode: "Mode | str") -> list[tuple[int, ...]]:
    """
    Every distinct 𝒟 produced by some Q-subset of code bits, without visiting
    the subsets: images of the two half-length trellises are composed recursively.
    """
    n = level_count(N)
    if not 0 <= Q <= N:
        raise RangeError(f"Q={Q} outside 0..{N}")
    return sorted(_from_mask(m) for m in _images(n, Q, Mode.parse(mode)))


def table_to_text(t: PuncturingTable) -> str:
    """Canonical text form: `N Q mode` header, then the 0/1 string."""
    return f"{t.N} {t.Q} {t.mode.value}\n{''.join(str(b) for b in t.table)}\n"


def table_from_text(text: str) -> PuncturingTable:
    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if len(lines) != 2:
        raise ShapeError("puncturing table text must have a header and a table line")
    try:
        N_str, Q_str, mode = lines[0].split()
        N, Q = int(N_str), int(Q_str)
    except ValueError:
        raise ShapeError(f"malformed puncturing table header {lines[0]!r}") from None
    table = PuncturingTable(tuple(int(c) for c in lines[1]), Mode.parse(mode))
    if table.N != N or table.Q != Q:
        raise ShapeError(f"header says N={N} Q={Q}, table has N={table.N} Q={table.Q}")
    return table
