"""
Configuration module - loads and validates environment variables.
"""
import os
from dotenv import load_dotenv

# Load environment variables from .env if present
load_dotenv()

VERSION = "1.0.0"
# Bumped whenever a CSV column is added, removed or renamed
CSV_SCHEMA_VERSION = 1

OUTPUT_DIR = os.getenv("RCPP_OUTPUT_DIR", "out").strip() or "out"
DB_PATH = os.getenv("RCPP_DB_PATH", "rcpp.db").strip() or "rcpp.db"
LOG_LEVEL = os.getenv("RCPP_LOG_LEVEL", "INFO").strip().upper() or "INFO"

# Monte-Carlo defaults
DEFAULT_SEED = int(os.getenv("RCPP_SEED", "2024").strip() or 2024)
MAX_TRIALS = int(os.getenv("RCPP_MAX_TRIALS", "1000000").strip() or 1000000)
MAX_ERRORS = int(os.getenv("RCPP_MAX_ERRORS", "100").strip() or 100)

# CRC generator, written without the leading x^degree term (0x1021 = CRC-16-CCITT)
CRC_POLY = int(os.getenv("RCPP_CRC_POLY", "0x1021").strip() or "0x1021", 16)
CRC_DEGREE = int(os.getenv("RCPP_CRC_DEGREE", "16").strip() or 16)

# Finite stand-ins for infinite LLR / GA mean of known (C1) bits
LLR_SATURATION = float(os.getenv("RCPP_LLR_SATURATION", "1e9").strip() or 1e9)
GA_SATURATION = float(os.getenv("RCPP_GA_SATURATION", "1e3").strip() or 1e3)

CHECK_NODE = os.getenv("RCPP_CHECK_NODE", "exact").strip().lower() or "exact"

if CHECK_NODE not in ("exact", "minsum"):
    raise RuntimeError(f"RCPP_CHECK_NODE must be 'exact' or 'minsum', got {CHECK_NODE!r}.")
if MAX_TRIALS < 1 or MAX_ERRORS < 1:
    raise RuntimeError("RCPP_MAX_TRIALS and RCPP_MAX_ERRORS must be positive.")
if CRC_DEGREE < 1 or CRC_POLY >= (1 << CRC_DEGREE):
    raise RuntimeError("RCPP_CRC_POLY does not fit RCPP_CRC_DEGREE.")
if LLR_SATURATION <= 0 or GA_SATURATION <= 0:
    raise RuntimeError("Saturation constants must be positive.")
