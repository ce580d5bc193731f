"""Higher-index covering arrays built from multi-stage algorithm selections."""

__version__ = "0.1.0"

from higher_index_ca.algorithms import Algorithm, StageGoal, WorkCounter, run_stage  # noqa: E402
from higher_index_ca.core import (  # noqa: E402
    CAParams,
    CoverageState,
    Interaction,
    interaction_count,
    rank,
    row_covers,
    unrank,
)
from higher_index_ca.multistage import (  # noqa: E402
    ExecutionRecord,
    PrefixCache,
    StageSelection,
    TimeMode,
    execute,
)
from higher_index_ca.verify import is_covering_array  # noqa: E402

__all__ = [
    "Algorithm",
    "CAParams",
    "CoverageState",
    "ExecutionRecord",
    "Interaction",
    "PrefixCache",
    "StageGoal",
    "StageSelection",
    "TimeMode",
    "WorkCounter",
    "__version__",
    "execute",
    "interaction_count",
    "is_covering_array",
    "rank",
    "row_covers",
    "run_stage",
    "unrank",
]
