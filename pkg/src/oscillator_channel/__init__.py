"""Truncated quantum channel of a harmonic oscillator spring-coupled to a thermal bath oscillator.

Pipeline: OscillatorParams -> DecoupledFrame -> IntegralTable -> GroupedSums
-> AmplitudeTensor(t) -> ChoiMatrix -> leakage and fidelity figures, with
rigorous truncation-error bounds from ``bounds``.
"""
from .amplitudes import (
    AmplitudeTensor, GroupedSums, TruncationSpec, amplitude_sweep, amplitudes_at,
    build_grouped_sums,
)
from .bounds import BoundConstants, ErrorBudget, compute_constants, error_budget, theorem1_bound
from .channel import (
    ChoiMatrix, SpectralData, apply_truncated_channel, bk_recovery_fidelity, build_choi,
    fidelity_no_recovery, leakage_lower_bound, spectral,
)
from .errors import (
    DegenerateCoupling, DegenerateResonance, DomainError, InvalidState, NonHermitianInput,
    OscillatorChannelError, ParseError, SingularForm, ValidationError,
)
from .gauss_integrals import IntegralTable, build_integral_table, integral_I, integral_J
from .hermite import HermiteEvaluator, NormTable, build_norm_table, eval_psi
from .model import DecoupledFrame, OscillatorParams, case_study_params, derive_frame

__version__ = "0.1.0"
