"""Numerical toolkit for smooth actions of matrix Lie groups.

Submodules:

* :mod:`lieact.groups`: matrix Lie groups, exp/log, translations, charts
* :mod:`lieact.actions`: actions on Euclidean domains, orbit maps, ranks
* :mod:`lieact.fields`: invariant and conjugate fields, transport, RK4 flows
* :mod:`lieact.lifted`: left/right lifted actions on G x M
* :mod:`lieact.frames`: cross-sections, flat charts, moving frames, induced action
* :mod:`lieact.estimators`: scikit-learn transformer for invariant coordinates
* :mod:`lieact.suites`, :mod:`lieact.report`, :mod:`lieact.cli`: verification driver
"""
__version__ = "0.1.0"

from .actions import (  # noqa: E402
    ActionSpec,
    Point,
    act,
    builtin_action,
    builtin_actions,
    orbit_sample,
    psi_eval,
    rank_at,
)
from .config import RunConfig, load_config  # noqa: E402
from .errors import (  # noqa: E402
    ChartDomainError,
    ConfigError,
    ConstructionError,
    DomainError,
    LieActError,
    NotInGroupError,
    NumericalDegradationError,
    UsageError,
)
from .estimators import InvariantCoordinates  # noqa: E402
from .fields import InvariantField, flow_integrate, transport  # noqa: E402
from .frames import build_cross_section, flat_chart, invariant_coords, moving_frame  # noqa: E402
from .groups import AlgebraVector, GroupDescriptor, GroupElement, builtin_group  # noqa: E402
from .report import run_suite  # noqa: E402

__all__ = [
    "ActionSpec", "AlgebraVector", "ChartDomainError", "ConfigError", "ConstructionError",
    "DomainError", "GroupDescriptor", "GroupElement", "InvariantCoordinates",
    "InvariantField", "LieActError", "NotInGroupError", "NumericalDegradationError",
    "Point", "RunConfig", "UsageError", "act", "build_cross_section", "builtin_action",
    "builtin_actions", "builtin_group", "flat_chart", "flow_integrate", "invariant_coords",
    "load_config", "moving_frame", "orbit_sample", "psi_eval", "rank_at", "run_suite",
    "transport",
]
