"""Multifractal DFA with surrogate-based decomposition of multifractality sources."""

from .decomposition import MagnitudeSignPair, magnitude_sign, nonlinearity_report
from .dfa import (DfaConfig, FluctuationSurface, HqCurve, dfa_hurst, fit_scaling,
                  fluctuation_function, generalized_hurst, local_fluctuation, profile, sample_boxes)
from .generators import DistributionSpec, binomial_cascade, fgn, sample
from .harness import (EnsembleResult, ExperimentPlan, analyze, distribution_sweep, emit,
                      iaaft_compare, run_ensemble, run_experiment, truncation_sweep)
from .series import PriceSeries, ReturnSeries, ingest_csv, log_returns
from .spectrum import (SingularitySpectrum, TauCurve, legendre, shift_diagnostic, spectrum_from_h,
                       spectrum_width, tau_from_h)
from .surrogates import SurrogateSpec, iaaft, rank_remap, shuffle, truncate

__version__ = "0.1.0"
