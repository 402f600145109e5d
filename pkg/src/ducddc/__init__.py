"""Bit-exact, cycle-accurate digital up/down converters for power-line carrier links."""

from .cic import CicDecimator, CicInterpolator, CicSpec, cic_magnitude
from .clocking import ClockId, ClockState, TickEvents, ticks_between
from .dds import FrequencyTuningWord, Nco, build_sine_lut, ftw_for_frequency
from .filters import (FirSpec, MacFilter, design_cic_compensator, design_highpass,
                      design_lowpass, fir_behavioral)
from .fixedpoint import QSample, mul_full, rescale, wrapping_add
from .pipeline import (DdcConfig, DucConfig, PipelineTrace, assert_latency, ddc_run,
                       duc_run)
from .refmodel import FloatStream, compare_spectra, ref_ddc, ref_duc, ref_duc_if

__version__ = "0.1.0"

__all__ = [
    "CicDecimator", "CicInterpolator", "CicSpec", "ClockId", "ClockState", "DdcConfig",
    "DucConfig", "FirSpec", "FloatStream", "FrequencyTuningWord", "MacFilter", "Nco", "PipelineTrace",
    "QSample", "TickEvents", "assert_latency", "build_sine_lut", "cic_magnitude",
    "compare_spectra", "ddc_run", "design_cic_compensator", "design_highpass", "design_lowpass", "duc_run",
    "fir_behavioral", "ftw_for_frequency", "mul_full", "ref_ddc", "ref_duc", "ref_duc_if", "rescale", "ticks_between",
    "wrapping_add",
]
