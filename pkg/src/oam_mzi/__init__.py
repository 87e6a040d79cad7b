"""Simulation of phase estimation in a lossy Mach-Zehnder interferometer
with orbital-angular-momentum gearing and non-Gaussian squeezed inputs.

Two independent evaluation paths are exposed: a truncated-Fock numeric
engine (states -> interferometer -> measures) and closed-form expressions
(closed_forms) for the cases where one exists, validated against each other
to below 1e-6.  The sweeps/cli layer runs deterministic parameter scans.
"""

from .characterization import (
    JointDistribution,
    WignerGrid,
    WignerGridSpec,
    entropy,
    joint_distribution,
    wigner,
)
from .errors import (
    ConfigError,
    CutoffCapExceeded,
    DegenerateState,
    DerivativeVanished,
    GridTooCoarse,
    InvalidTransmittance,
    IoError,
    LeakageExceeded,
    NoPeak,
    SimulationError,
    TargetUnreachable,
    ZeroInformation,
    ZeroNorm,
)
from .fock import (
    DensityOperator,
    Mode,
    TwoModeState,
    apply_annihilation,
    apply_creation,
    basis_state,
    embed,
    joint_index,
    normalize,
    pure_density,
    reduced_density,
    vacuum,
)
from .interferometer import (
    BiasMode,
    InterferometerConfig,
    LossBranch,
    PropagationResult,
    beam_splitter,
    loss,
    oam_phase,
    propagate,
)
from .measures import (
    ParityFringe,
    QfiResult,
    SensitivityResult,
    fwhm,
    invert_mean_photon,
    mean_photon,
    mean_photon_of_spec,
    parity_expectation,
    parity_fringe,
    qfi,
    sensitivity,
)
from .states import (
    OperatorConvention,
    StateKind,
    StateSpec,
    build_state,
    choose_cutoff,
    diagonal_weights,
    tmsv,
)
from .sweeps import (
    Experiment,
    ResultTable,
    StateRequest,
    SweepSpec,
    emit,
    parse_config,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BiasMode",
    "ConfigError",
    "CutoffCapExceeded",
    "DegenerateState",
    "DensityOperator",
    "DerivativeVanished",
    "Experiment",
    "GridTooCoarse",
    "InterferometerConfig",
    "InvalidTransmittance",
    "IoError",
    "JointDistribution",
    "LeakageExceeded",
    "LossBranch",
    "Mode",
    "NoPeak",
    "OperatorConvention",
    "ParityFringe",
    "PropagationResult",
    "QfiResult",
    "ResultTable",
    "SensitivityResult",
    "SimulationError",
    "StateKind",
    "StateRequest",
    "StateSpec",
    "SweepSpec",
    "TargetUnreachable",
    "TwoModeState",
    "WignerGrid",
    "WignerGridSpec",
    "ZeroInformation",
    "ZeroNorm",
    "apply_annihilation",
    "apply_creation",
    "basis_state",
    "beam_splitter",
    "build_state",
    "choose_cutoff",
    "diagonal_weights",
    "embed",
    "emit",
    "entropy",
    "fwhm",
    "invert_mean_photon",
    "joint_distribution",
    "joint_index",
    "loss",
    "mean_photon",
    "mean_photon_of_spec",
    "normalize",
    "oam_phase",
    "parity_expectation",
    "parity_fringe",
    "parse_config",
    "propagate",
    "pure_density",
    "qfi",
    "reduced_density",
    "run_sweep",
    "sensitivity",
    "tmsv",
    "vacuum",
    "wigner",
]
