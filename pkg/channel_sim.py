"""
BI-AWGN transmission of punctured codewords and Monte-Carlo BLER estimation.

Mapping is 0 -> +1, 1 -> -1 and LLRs are positive-favors-0. Every trial draws
its own generator from (seed, point index, trial index), so a record can be
reproduced from its seed alone.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.stats import norm

import config
from codec import DecoderSpec, decode
from errors import RangeError, ShapeError
from polar_core import polar_encode
from puncturing import Mode, PuncturingTable
from reliability import CodeConfig, ebn0_linear

logger = logging.getLogger("rcpp-toolkit")

BLER_COLUMNS = ("scheme", "mode", "N", "M", "K", "ebn0_db", "trials", "errors", "bler", "ci95", "seed")


@dataclass(frozen=True)
class ChannelParams:
    ebn0_db: float
    rate: float

    @property
    def sigma(self) -> float:
        return sigma_from_ebn0(self.ebn0_db, self.rate)


@dataclass(frozen=True)
class BlerRecord:
    scheme: str
    mode: str
    N: int
    M: int
    K: int
    ebn0_db: float
    trials: int
    errors: int
    bler: float
    ci95: float
    seed: int
    decoder: str = "sc"
    point_index: int = 0

    def as_row(self) -> dict:
        row = asdict(self)
        return {key: row[key] for key in BLER_COLUMNS}


def sigma_from_ebn0(ebn0_db: float, rate: float) -> float:
    """Noise standard deviation with σ² = 1 / (2·R·10^(Eb/N0 / 10))."""
    if rate <= 0:
        raise RangeError(f"rate must be positive, got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * ebn0_linear(ebn0_db)))


def wilson_interval(errors: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        return 0.0, 1.0
    if not 0 <= errors <= trials:
        raise RangeError(f"errors={errors} outside 0..{trials}")
    z = float(norm.ppf(0.5 + level / 2.0))
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    low = 0.0 if errors == 0 else max(0.0, center - half)
    high = 1.0 if errors == trials else min(1.0, center + half)
    return low, high


def puncture(x: np.ndarray, t: PuncturingTable) -> np.ndarray:
    """Keep the code bits at the table's ones, in natural order."""
    x = np.asarray(x)
    if x.shape[-1] != t.N:
        raise ShapeError(f"codeword length {x.shape[-1]} does not match table length {t.N}")
    return x[..., t.as_array() == 1]


def transmit(x_punctured: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """BPSK over AWGN, returning LLR = 2y/σ²."""
    if not sigma > 0:
        raise RangeError(f"sigma must be positive, got {sigma}")
    symbols = 1.0 - 2.0 * np.asarray(x_punctured, dtype=np.float64)
    y = symbols + rng.normal(0.0, sigma, size=symbols.shape)
    return 2.0 * y / sigma**2


def depuncture_llr(
    received: Sequence[float], t: PuncturingTable, mode: "Mode | str | None" = None
) -> np.ndarray:
    """
    Spread M received LLRs back over N positions.

    Punctured positions get 0 (C0) or the +saturation constant (C1).
    """
    mode = Mode.parse(mode or t.mode)
    received = np.asarray(received, dtype=np.float64)
    if received.shape[-1] != t.M:
        raise ShapeError(f"expected {t.M} received LLRs, got {received.shape[-1]}")
    fill = 0.0 if mode is Mode.C0 else config.LLR_SATURATION
    out = np.full(received.shape[:-1] + (t.N,), fill)
    out[..., t.as_array() == 1] = received
    return out


def trial_rng(seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, point_index, trial_index])


def simulate_point(
    cfg: CodeConfig,
    decoder: DecoderSpec,
    ebn0_db: float,
    point_index: int = 0,
    seed: int = config.DEFAULT_SEED,
    max_trials: int = config.MAX_TRIALS,
    max_errors: int = config.MAX_ERRORS,
) -> BlerRecord:
    """
    Estimate the BLER at one Eb/N0.

    Stops after max_trials blocks or max_errors block errors, whichever comes first.
    """
    if max_trials < 1 or max_errors < 1:
        raise RangeError("max_trials and max_errors must be positive")
    sigma = sigma_from_ebn0(ebn0_db, cfg.rate)
    frozen = cfg.frozen_spec()
    payload = decoder.crc.payload_length(cfg.K) if decoder.crc is not None else cfg.K

    trials = errors = 0
    while trials < max_trials and errors < max_errors:
        rng = trial_rng(seed, point_index, trials)
        message = rng.integers(0, 2, size=payload, dtype=np.uint8)
        info = decoder.crc.attach(message) if decoder.crc is not None else message
        x = polar_encode(frozen.place(info))
        llr = depuncture_llr(transmit(puncture(x, cfg.table), sigma, rng), cfg.table, cfg.mode)
        result = decode(decoder, llr, frozen)
        trials += 1
        if not np.array_equal(result.info_bits, info):
            errors += 1

    low, high = wilson_interval(errors, trials)
    record = BlerRecord(
        scheme=cfg.scheme or "custom",
        mode=cfg.mode.value,
        N=cfg.N,
        M=cfg.M,
        K=cfg.K,
        ebn0_db=float(ebn0_db),
        trials=trials,
        errors=errors,
        bler=errors / trials,
        ci95=(high - low) / 2.0,
        seed=seed,
        decoder=decoder.label,
        point_index=point_index,
    )
    logger.info(
        "BLER point done: scheme=%s decoder=%s Eb/N0=%.2f dB trials=%s errors=%s bler=%.3e",
        record.scheme, record.decoder, ebn0_db, trials, errors, record.bler,
    )
    return record


def run_bler(
    cfg: CodeConfig,
    decoder: DecoderSpec,
    ebn0_list: Iterable[float],
    max_trials: int = config.MAX_TRIALS,
    max_errors: int = config.MAX_ERRORS,
    seed: Optional[int] = None,
) -> list[BlerRecord]:
    """Sweep Eb/N0 points; point i uses streams derived from (seed, i, trial)."""
    seed = config.DEFAULT_SEED if seed is None else seed
    return [
        simulate_point(cfg, decoder, ebn0, index, seed, max_trials, max_errors)
        for index, ebn0 in enumerate(ebn0_list)
    ]
