"""satsim: a digital-twin simulator for satellite Internet constellations.

Pipeline: Walker-shell synthesis or TLE import -> circular-orbit propagation
-> per-slot link budgets (antenna pattern, interference, SINR, Shannon
capacity) -> time-varying topology graphs -> pluggable path computation ->
deterministic packet-level emulation, all driven by declarative scenario
files through a CLI and an HTTP gateway.
"""

__version__ = "0.1.0"

from .constants import (
    BOLTZMANN_J_K,
    EARTH_RADIUS_KM,
    EARTH_ROTATION_RAD_S,
    MU_EARTH_KM3_S2,
    SPEED_OF_LIGHT_KM_S,
    SPEED_OF_LIGHT_M_S,
)
from .constellation import (
    Constellation,
    GroundStation,
    OrbitalElements,
    SatelliteState,
    ShellSpec,
    elevation_deg,
    ground_ecef,
    mean_motion_rad_s,
    orbital_period_s,
    positions_at,
    propagate,
    synthesize_walker,
)
from .engine import (
    Emulator,
    FlowDirective,
    FlowStats,
    MetricsLog,
    PingDirective,
    ProcessingModel,
    RttSample,
    ScenarioBundle,
    SlotTransform,
)
from .errors import DomainError, NoRouteError, ValidationError
from .metrics import KINDS, RunLog, canonical_line
from .phy import (
    AntennaModel,
    CapacitySchedule,
    RadioLink,
    RadioParams,
    antenna_gain,
    bessel_j1,
    capacity_schedule,
    channel_capacity,
    channel_coefficient,
    db_from_linear,
    interference_power,
    linear_from_db,
    sinr,
    slot_count,
)
from .pathcomp import (
    CentralizedShortestPath,
    LocalState,
    PathRecord,
    PathTable,
    RoutingAlgorithm,
    StateAwareGreedy,
    available_algorithms,
    get_algorithm,
    local_state,
    register_algorithm,
    route,
    state_aware_next_hop,
)
from .runs import Run, RunManager, UnknownRunError, new_run_id
from .scenario import (
    Scenario,
    ScenarioError,
    bundled_scenario,
    bundled_scenarios,
    load_scenario,
    parse_scenario,
)
from .tle import export_tle, import_tle
from .topology import (
    FailurePlan,
    Link,
    TopologySnapshot,
    build_snapshot,
    grid_isls,
    snapshot_series,
)
