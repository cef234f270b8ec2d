"""
Channel reliability under puncturing and information-set construction.

Three metrics share the same trellis walk (polar_core.polarize):
- bound: log2 Bhattacharyya upper bounds with the degenerate-input rules and the
  max (C0) / min (C1) merge before the plain log-domain recursion.
- bec: exact erasure probabilities, used as an oracle.
- ga: Gaussian-approximation mean LLRs (sign-inverted so smaller = better).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

import config
from codec import FrozenSpec
from errors import CapacityError, RangeError
from polar_core import PathLabel, polarize
from puncturing import Mode, PuncturingTable, SourcePunctureSet, derive_source_puncture_set

logger = logging.getLogger("rcpp-toolkit")

METHODS = ("bound", "bec", "ga")

# trellis node: log-domain value plus "degenerate" flag (Z=1 for C0, Z=0 for C1)
_NODE = np.dtype([("value", np.float64), ("flag", np.bool_)])


@dataclass(frozen=True)
class ReliabilityVector:
    """Per-source metric, 0-based array for source indices 1..N; smaller = more reliable."""

    n: int
    values: np.ndarray = field(compare=False)
    mode: Mode
    method: str = "bound"

    @property
    def N(self) -> int:
        return 1 << self.n

    def value(self, i: int) -> float:
        """Metric of 1-based source index i."""
        return float(self.values[i - 1])


@dataclass(frozen=True)
class InfoSet:
    info: tuple[int, ...]
    frozen: tuple[int, ...]
    punctured: tuple[int, ...]

    @property
    def K(self) -> int:
        return len(self.info)


@dataclass(frozen=True)
class CodeConfig:
    """A fully specified RCPP code: table, mode and the info / frozen partition."""

    table: PuncturingTable
    mode: Mode
    K: int
    info: tuple[int, ...]
    punctured_source: tuple[int, ...]
    scheme: Optional[str] = None
    method: str = "bound"
    design_ebn0_db: Optional[float] = None

    @property
    def N(self) -> int:
        return self.table.N

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def M(self) -> int:
        return self.table.M

    @property
    def Q(self) -> int:
        return self.table.Q

    @property
    def rate(self) -> float:
        return self.K / self.M

    @property
    def frozen(self) -> tuple[int, ...]:
        info = set(self.info)
        return tuple(i for i in range(1, self.N + 1) if i not in info)

    def frozen_spec(self) -> FrozenSpec:
        return FrozenSpec(self.N, self.info)

    def partition_string(self) -> str:
        """A = information, F = frozen, P = punctured source position."""
        chars = ["F"] * self.N
        for i in self.punctured_source:
            chars[i - 1] = "P"
        for i in self.info:
            chars[i - 1] = "A"
        return "".join(chars)


def ebn0_linear(ebn0_db: float) -> float:
    return 10.0 ** (ebn0_db / 10.0)


def awgn_a0(ebn0_db: float, rate: float) -> float:
    """log2 of the AWGN Bhattacharyya parameter exp(−R·Eb/N0)."""
    if rate <= 0:
        raise RangeError(f"rate must be positive, got {rate}")
    return -rate * ebn0_linear(ebn0_db) / math.log(2.0)


def path_bounds(omega: PathLabel, a0: float) -> tuple[float, float]:
    """
    Closed-form lower / upper bounds on the recursion along one path.

    Returns:
        (2^d·a0 + f, 2^d·(a0 + f)) with d = path weight, f = complemental weight
    """
    if not a0 < 0:
        raise RangeError(f"a0 must be negative, got {a0}")
    d, f = omega.weight, omega.complemental_weight
    scale = float(1 << d)
    return scale * a0 + f, scale * (a0 + f)


def bound_recursion(omega: PathLabel, a0: float) -> float:
    """Plain recursion along ω: bit 0 maps A to A + 1, bit 1 maps A to 2A."""
    value = a0
    for b in omega.bits:
        value = 2.0 * value if b else value + 1.0
    return value


def _bound_combine(mode: Mode):
    def c0(a, b):
        minus, plus = np.empty_like(a), np.empty_like(a)
        merged = np.maximum(a["value"], b["value"])
        minus["value"], plus["value"] = merged + 1.0, 2.0 * merged
        degenerate = a["flag"] | b["flag"]
        minus["value"][degenerate] = 0.0
        other = np.where(a["flag"], b["value"], a["value"])
        plus["value"][degenerate] = other[degenerate]
        minus["flag"], plus["flag"] = a["flag"] | b["flag"], a["flag"] & b["flag"]
        return minus, plus

    def c1(a, b):
        minus, plus = np.empty_like(a), np.empty_like(a)
        merged = np.minimum(a["value"], b["value"])
        minus["value"], plus["value"] = merged + 1.0, 2.0 * merged
        degenerate = a["flag"] | b["flag"]
        other = np.where(a["flag"], b["value"], a["value"])
        minus["value"][degenerate] = other[degenerate]
        plus["value"][degenerate] = -np.inf
        minus["flag"], plus["flag"] = a["flag"] & b["flag"], a["flag"] | b["flag"]
        return minus, plus

    return c0 if mode is Mode.C0 else c1


def propagate_bounds(
    t: PuncturingTable, a0: float, mode: "Mode | str | None" = None
) -> ReliabilityVector:
    """
    Log-domain Bhattacharyya bounds of every source channel under puncturing.

    Punctured code-bit channels start at 0 (C0, useless) or −inf (C1, perfect);
    the rest start at a0. A butterfly with a degenerate input passes the other
    input through; otherwise both inputs are merged (max for C0, min for C1)
    before A+1 / 2A. Values are not clipped at 0.
    """
    mode = Mode.parse(mode or t.mode)
    nodes = np.zeros(t.N, dtype=_NODE)
    punctured = t.as_array() == 0
    nodes["flag"] = punctured
    nodes["value"] = np.where(punctured, 0.0 if mode is Mode.C0 else -np.inf, a0)
    out = polarize(nodes, _bound_combine(mode))
    logger.debug("Propagated bounds: N=%s Q=%s mode=%s a0=%.4f", t.N, t.Q, mode.value, a0)
    return ReliabilityVector(t.n, out["value"].copy(), mode, "bound")


def bec_exact(t: PuncturingTable, epsilon: float, mode: "Mode | str | None" = None) -> np.ndarray:
    """Exact per-source erasure probabilities on a BEC(ε0) with punctured inputs 1 (C0) / 0 (C1)."""
    if not 0.0 <= epsilon <= 1.0:
        raise RangeError(f"erasure probability must lie in [0, 1], got {epsilon}")
    mode = Mode.parse(mode or t.mode)
    punctured = t.as_array() == 0
    z = np.where(punctured, 1.0 if mode is Mode.C0 else 0.0, epsilon)
    return polarize(z, lambda a, b: (a + b - a * b, a * b))


def _log_phi(x: float) -> float:
    """log φ(x) for the two-segment Gaussian-approximation φ."""
    if x <= 0.0:
        return 0.0
    if x < 10.0:
        return min(-0.4527 * x**0.86 + 0.0218, 0.0)
    return 0.5 * math.log(math.pi / x) - x / 4.0 + math.log1p(-10.0 / (7.0 * x))


def _phi_inverse(target: float) -> float:
    """Mean m with log φ(m) = target (target ≤ 0)."""
    if target >= 0.0:
        return 0.0
    hi = 1.0
    while _log_phi(hi) > target:
        hi *= 2.0
    return brentq(lambda x: _log_phi(x) - target, 0.0, hi, xtol=1e-12)


def _check_node_mean(a: float, b: float) -> float:
    la, lb = _log_phi(a), _log_phi(b)
    if la == 0.0 or lb == 0.0:
        return 0.0
    # 1 − (1 − φa)(1 − φb) = φa + φb·(1 − φa)
    return _phi_inverse(float(np.logaddexp(la, lb + math.log1p(-math.exp(la)))))


def _ga_combine(a: np.ndarray, b: np.ndarray):
    check = np.vectorize(_check_node_mean, otypes=[np.float64])(a, b)
    return check, a + b


def construct_ga(
    t: PuncturingTable, sigma: float, mode: "Mode | str | None" = None
) -> ReliabilityVector:
    """
    Gaussian-approximation mean LLRs, returned negated so that the smallest
    value is the most reliable channel.
    """
    if not sigma > 0:
        raise RangeError(f"sigma must be positive, got {sigma}")
    mode = Mode.parse(mode or t.mode)
    punctured = t.as_array() == 0
    known = config.GA_SATURATION
    means = np.where(punctured, 0.0 if mode is Mode.C0 else known, 2.0 / sigma**2)
    out = polarize(means, _ga_combine)
    return ReliabilityVector(t.n, -out, mode, "ga")


def select_info_set(r: ReliabilityVector, K: int, removed: SourcePunctureSet) -> InfoSet:
    """
    Pick the K most reliable source indices outside 𝒟.

    Ties go to the smaller index; everything not selected is frozen to 0.
    """
    if K < 0:
        raise RangeError(f"K must be non-negative, got {K}")
    gone = set(removed.indices)
    candidates = np.array([i for i in range(1, r.N + 1) if i not in gone], dtype=int)
    if K > candidates.size:
        raise CapacityError(f"K={K} exceeds the {candidates.size} unpunctured source positions")
    order = np.argsort(r.values[candidates - 1], kind="stable")
    info = tuple(sorted(int(i) for i in candidates[order[:K]]))
    chosen = set(info)
    frozen = tuple(i for i in range(1, r.N + 1) if i not in chosen)
    return InfoSet(info, frozen, tuple(removed.indices))


def reliability_for(
    t: PuncturingTable, rate: float, method: str, ebn0_db: float, mode: Mode
) -> ReliabilityVector:
    """Evaluate one construction metric at a design Eb/N0."""
    if method == "bound":
        a0 = awgn_a0(ebn0_db, rate)
        if a0 > -1.0:
            # once node values pass 1, 2A exceeds A + 1 and plus channels rank below minus channels
            logger.warning(
                "Bound construction at %.2f dB and rate %.3f gives a0=%.3f > -1; "
                "channel ordering may invert, raise the design Eb/N0 or use method=ga",
                ebn0_db, rate, a0,
            )
        return propagate_bounds(t, a0, mode)
    if method == "bec":
        epsilon = math.exp(-rate * ebn0_linear(ebn0_db))
        return ReliabilityVector(t.n, bec_exact(t, epsilon, mode), mode, "bec")
    if method == "ga":
        sigma = math.sqrt(1.0 / (2.0 * rate * ebn0_linear(ebn0_db)))
        return construct_ga(t, sigma, mode)
    raise RangeError(f"unknown construction method {method!r} (expected one of {', '.join(METHODS)})")


def construct(
    t: PuncturingTable,
    K: int,
    method: str = "ga",
    ebn0_db: float = 0.0,
    mode: "Mode | str | None" = None,
    scheme: Optional[str] = None,
) -> CodeConfig:
    """
    Build a code from a puncturing table.

    Args:
        t: puncturing table
        K: information length, K ≤ M
        method: bound | bec | ga
        ebn0_db: design Eb/N0 in dB, turned into a0, ε0 or σ at rate K/M
        mode: overrides t.mode
        scheme: name recorded in the config

    Returns:
        CodeConfig

    Raises:
        CapacityError: K > M
        InvalidShorteningError: C1 table that is not a valid shortening
    """
    mode = Mode.parse(mode or t.mode)
    if K > t.M:
        raise CapacityError(f"K={K} exceeds M={t.M}")
    if K < 1:
        raise RangeError(f"K must be at least 1, got {K}")
    removed = derive_source_puncture_set(t, mode)
    r = reliability_for(t, K / t.M, method, ebn0_db, mode)
    chosen = select_info_set(r, K, removed)
    logger.info(
        "Constructed code: scheme=%s N=%s M=%s K=%s mode=%s method=%s design=%.2f dB",
        scheme, t.N, t.M, K, mode.value, method, ebn0_db,
    )
    return CodeConfig(
        table=t.with_mode(mode),
        mode=mode,
        K=K,
        info=chosen.info,
        punctured_source=chosen.punctured,
        scheme=scheme,
        method=method,
        design_ebn0_db=ebn0_db,
    )
