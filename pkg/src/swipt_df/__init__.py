"""Outage analysis of energy-harvesting decode-and-forward relaying over log-normal fading."""

from .analytic import OutageValue, first_hop_success, outage, second_term
from .channel import FadingParams, cdf_gain_sq, make_rng, pdf_gain_sq, sample_gain_sq
from .errors import AgreementError, ConvergenceError, DomainError, SwiptError
from .model import IRR, PSR, TSR, SystemConfig, capacity, harvested_energy, outage_constants, relay_power, snrs
from .montecarlo import McEstimate, McTerms, estimate_outage, estimate_terms
from .optimize import OptimumResult, optimize_factor

__version__ = "0.1.0"
