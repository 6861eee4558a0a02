"""Data models for Frontier Lab."""

from .dataset import Dataset
from .distribution import (
    ClosedFormCheck,
    ClosedFormDiagnostics,
    EntropyKind,
    EntropyOrders,
    IncGammaArgs,
    MatsuokaParams,
    MleFit,
    ReliabilityPair,
    ShapeInfo,
)
from .frontier import SCHEMA_VERSION, EfficiencyReport, FrontierModel
from .run_config import RunConfig
from .simulation import DgpKind, DgpSpec, GeneratedData, ReplicaRecord, SimReport
from .smoothing import Bandwidths, DesignMatrixSlice, SmootherFit, SmootherMethod

__all__ = [
    "IncGammaArgs",
    "MatsuokaParams",
    "ReliabilityPair",
    "EntropyOrders",
    "EntropyKind",
    "MleFit",
    "ShapeInfo",
    "ClosedFormCheck",
    "ClosedFormDiagnostics",
    "Dataset",
    "Bandwidths",
    "DesignMatrixSlice",
    "SmootherFit",
    "SmootherMethod",
    "FrontierModel",
    "EfficiencyReport",
    "SCHEMA_VERSION",
    "DgpKind",
    "DgpSpec",
    "GeneratedData",
    "ReplicaRecord",
    "SimReport",
    "RunConfig",
]
