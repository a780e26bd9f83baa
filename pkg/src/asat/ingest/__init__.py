from .locations import GazetteerIndex, LocationMatch
from .parsers import (
    parse_demographics,
    parse_disease,
    parse_mobility,
    parse_posts,
)
from .records import (
    DemographicRecord,
    DiseaseRecord,
    IngestError,
    MobilityRecord,
    ParseResult,
    RawPost,
    Rejection,
)
from .snapshot import Snapshot, build_snapshot, read_snapshot, write_snapshot

__all__ = [
    "DemographicRecord",
    "DiseaseRecord",
    "GazetteerIndex",
    "IngestError",
    "LocationMatch",
    "MobilityRecord",
    "ParseResult",
    "RawPost",
    "Rejection",
    "Snapshot",
    "build_snapshot",
    "parse_demographics",
    "parse_disease",
    "parse_mobility",
    "parse_posts",
    "read_snapshot",
    "write_snapshot",
]
