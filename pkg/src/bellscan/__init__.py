"""Joint CHSH and no-signalling analysis of heralded Bell-test data."""

from ._backend import kernels as _kernels
from .herald import EventColumns, count_selected, select_sample
from .io import read_events, read_scan_csv, write_events, write_scan_csv
from .model import (
    CandidateEvent,
    CountsTable,
    DegenerateStatisticError,
    DomainError,
    EmptyCellError,
    HeraldFilter,
    ScanResult,
    StatWithSigma,
    validate_event,
)
from .scan import PValueHistogram, ScanGrid, analyze, pvalue_histogram, scan_1d, scan_2d
from .stats import (
    NoSignalSet,
    chi2_nosignal,
    chsh,
    correlation,
    joint_prob,
    marginal_A,
    marginal_B,
    nosignal,
    p_chsh_binomial,
    p_two_tailed,
    pooled_two_proportion_z,
    tabulate,
)
from .synth import SynthConfig, generate

BACKEND = _kernels.BACKEND

__version__ = "0.1.0"
