from .assess import (
    Assessor,
    LevelAssessment,
    LocationDetail,
    OutsideCoverage,
    RiskAssessment,
    UnknownArea,
    UnknownDate,
)
from .pois import Poi, ScoredPoi, load_pois, nearby_pois
from .weights import (
    GammaProfile,
    RiskError,
    contribution_breakdown,
    index_of,
    load_gamma,
    risk_index,
    risk_vector,
    save_gamma,
)

__all__ = [
    "Assessor",
    "GammaProfile",
    "LevelAssessment",
    "LocationDetail",
    "OutsideCoverage",
    "Poi",
    "RiskAssessment",
    "RiskError",
    "ScoredPoi",
    "UnknownArea",
    "UnknownDate",
    "contribution_breakdown",
    "index_of",
    "load_gamma",
    "load_pois",
    "nearby_pois",
    "risk_index",
    "risk_vector",
    "save_gamma",
]
