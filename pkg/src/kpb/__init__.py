"""Transverse stability of periodic KP waves via Fourier-Bloch spectra."""
from .errors import (BubbleNotFound, ComputationError, ConfigError, InvalidAmplitude,
                     KPBError, NoConvergence, NonConvergence, NoSignChange,
                     NotHermitian, OutOfRange, ParamMismatch, SingularSymbol)
from .operators import BlochParams, OperatorMatrix, build_A, build_L, build_M
from .spectra import (NegativeCountReport, SpectrumReport, analyze, classify,
                      eig_general, eig_hermitian, krein_audit, negative_count,
                      spectrum)
from .waves import FourierCoeffs, Wave, eval_wave, ode_residual, solve_wave, wave_asymptotic

__version__ = "0.1.0"
