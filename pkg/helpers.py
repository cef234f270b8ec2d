"""
Helper functions for CLI commands - argument checks and common validations.
"""
import logging
from typing import Optional

from puncturing import SCHEMES

logger = logging.getLogger("rcpp-toolkit")


def check_parent_length(N: Optional[int]) -> tuple[bool, Optional[str]]:
    """
    Check that N is a usable parent code length.

    Returns:
        Tuple of (is_valid, error_message)
    """
    if N is None:
        return False, "--n (parent code length) is required"
    if N < 2 or N & (N - 1):
        return False, f"--n must be a power of two ≥ 2, got {N}"
    return True, None


def check_code_size(N: int, M: Optional[int], K: Optional[int] = None) -> tuple[bool, Optional[str]]:
    """Check N/2 < M ≤ N and, when given, 1 ≤ K ≤ M."""
    ok, error = check_parent_length(N)
    if not ok:
        return ok, error
    if M is None:
        return False, "--m (transmitted length) is required"
    if not N // 2 < M <= N:
        return False, f"--m must satisfy {N // 2} < M ≤ {N}, got {M}"
    if K is not None and not 1 <= K:
        return False, f"--k must be positive, got {K}"
    return True, None


def check_scheme(scheme: Optional[str]) -> tuple[bool, Optional[str]]:
    if scheme is None or scheme.lower() not in SCHEMES:
        return False, f"--scheme must be one of {', '.join(SCHEMES)}, got {scheme!r}"
    return True, None


def parse_m_range(text: Optional[str], N: int) -> tuple[Optional[range], Optional[str]]:
    """
    Parse "a..b" (inclusive) into the transmitted lengths to sweep.

    Lengths with M ≤ N/2 cannot be reached by puncturing and are dropped.

    Returns:
        Tuple of (range or None, error_message)
    """
    if not text:
        return None, None
    try:
        low_text, high_text = text.split("..")
        low, high = int(low_text), int(high_text)
    except ValueError:
        return None, f"--m-range must look like 513..1024, got {text!r}"
    if low > high or high > N or low < 1:
        return None, f"--m-range {text!r} must be increasing and inside 1..{N}"
    first = max(low, N // 2 + 1)
    if first > low:
        logger.warning("Skipping M=%s..%s: at most N/2 bits may be punctured", low, first - 1)
    return range(first, high + 1), None


def parse_float_list(text: Optional[str]) -> tuple[Optional[list[float]], Optional[str]]:
    """Parse "1.0,1.5,2" or "1:3:0.5" (start:stop:step, stop inclusive)."""
    if not text:
        return None, "--ebn0 is required"
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0:
                return None, "--ebn0 step must be positive"
            count = int(round((stop - start) / step)) + 1
            return [round(start + i * step, 10) for i in range(count)], None
        return [float(part) for part in text.replace(" ", ",").split(",") if part], None
    except ValueError:
        return None, f"could not parse Eb/N0 list {text!r}"
