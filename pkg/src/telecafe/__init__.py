"""telecafe: a deterministic avatar-robot cafe.

Remote operators with heterogeneous input abilities drive semi-automated
avatar robots through a timed cafe-service workflow; a telemetry pipeline
turns the event logs into work metrics.
"""

from .channel import ChannelModel, transmit
from .events import ServiceEvent, log_digest, read_log, write_log
from .floorplan import FloorPlan, reference_plan
from .inputs import InputModality, dwell_select, scan_step
from .robot import (
    DEFAULT_CATALOG, JointState, LinePath, MotionCatalog, RobotSpec, RobotState,
)
from .scenario import ScenarioScript, run_scenario, standard_day_script
from .session import DaySchedule, SessionPlan, assign_shifts, phase_at, working_seconds
from .telemetry import (
    FaceScaleEntry, SessionMetrics, SurveyResponse, WorkBreakdown,
    face_scale_deltas, session_metrics, survey_summary, work_breakdown,
)
from .world import World

__version__ = "0.1.0"
