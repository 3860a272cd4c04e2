"""Duct-flow magnetic nanoparticle link: channel model, OOK modem and
shape fitting. All quantities are SI."""

from ._core import (
    Error,
    SystemParameters,
    SystemResponse,
    center_velocity,
    decode,
    decode_bits,
    effective_velocity,
    encode_text,
    fit_beta,
    format_parameters,
    min_pulse_peak,
    oracle,
    parse_parameters,
    peclet_number,
    reynolds_number,
    susceptibility,
    synthesize,
    table1_parameters,
)

__version__ = "0.1.0"
