"""Enumerate the indices n whose harmonic number H_n has numerator divisible by p."""

__version__ = "0.1.0"

from .census import CensusRecord, census, density_table, is_harmonic
from .enumerator import EnumConfig, JpNode, JpSummary, enumerate_jp, expand, initial_block
from .kernel import PrefixTable, block_walk, prefix_table, restricted_sums
from .oracle import exact_valuation, naive_jp
from .padic import PadicInt, Valuation, add, batch_inverse, div_exact_p, inv_unit, mul, valuation
from .series import SeriesApprox, eval_lift, fit_coefficients, tail_precision

__all__ = [
    "CensusRecord", "EnumConfig", "JpNode", "JpSummary", "PadicInt", "PrefixTable",
    "SeriesApprox", "Valuation", "add", "batch_inverse", "block_walk", "census",
    "density_table", "div_exact_p", "enumerate_jp", "eval_lift", "exact_valuation",
    "expand", "fit_coefficients", "initial_block", "inv_unit", "is_harmonic", "mul",
    "naive_jp", "prefix_table", "restricted_sums", "tail_precision", "valuation",
]
