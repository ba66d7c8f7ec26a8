"""Speech enhancement for impulsive noise: EEMD decomposition with
alpha-stable mode selection, plus objective quality metrics."""

from ._core import (
    DegenerateInputError,
    FormatError,
    eemd,
    emd,
    enhance,
    estimate_alpha,
    fwsnrseg,
    llr,
    map_intelligibility,
    read_wav,
    sample_sas,
    stoi,
    write_wav,
)

__all__ = [
    "DegenerateInputError",
    "FormatError",
    "eemd",
    "emd",
    "enhance",
    "estimate_alpha",
    "fwsnrseg",
    "llr",
    "map_intelligibility",
    "read_wav",
    "sample_sas",
    "stoi",
    "write_wav",
]
