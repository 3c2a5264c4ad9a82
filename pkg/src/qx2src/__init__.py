"""Two-source randomness extraction with exact quantum-adversary verification.

The package has three layers: bit-level extractor primitives
(:mod:`qx2src.gf2`, :mod:`qx2src.extractors`), an exact small-dimension
quantum verifier (:mod:`qx2src.qsim`) with concrete adversaries
(:mod:`qx2src.adversaries`), and closed-form parameter calculators
(:mod:`qx2src.bounds`), orchestrated by the ``qx2src`` CLI
(:mod:`qx2src.cli`, :mod:`qx2src.harness`).
"""

from .bounds import BoundReport, ParamSet
from .extractors import (FlatSource, SeededExtractorSpec, compose_two_source,
                         ip_extract, multibit_extract, toeplitz_extract,
                         transformed_ip_extract, trevisan_extract, weak_design)
from .gf2 import BitMatrix, BitVector, Gf2Poly, find_irreducible, inner_product

__version__ = "0.1.0"

__all__ = [
    "BitMatrix", "BitVector", "BoundReport", "FlatSource", "Gf2Poly",
    "ParamSet", "SeededExtractorSpec", "compose_two_source",
    "find_irreducible", "inner_product", "ip_extract", "multibit_extract",
    "toeplitz_extract", "transformed_ip_extract", "trevisan_extract",
    "weak_design", "__version__",
]
