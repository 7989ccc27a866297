"""Multi-view CCA toolkit: joint projections between question, answer, and
image feature spaces, correlation-based answer ranking, and the associated
evaluation battery."""

from . import cca, dataio, linalg, metrics, ranking
from .cca import CcaConfig, CcaModel, ViewSpec, embed, fit, load_model, save_model
from .errors import MvccaError
from .metrics import EvalReport, OtsuStats
from .ranking import RankResult, RetrievalResult

__all__ = [
    "cca", "dataio", "linalg", "metrics", "ranking",
    "CcaConfig", "CcaModel", "ViewSpec", "embed", "fit",
    "load_model", "save_model", "MvccaError",
    "EvalReport", "OtsuStats", "RankResult", "RetrievalResult",
]

__version__ = "0.1.0"
