"""Rydberg atomic quantum receiver for satellite uplinks, from the atomic
steady state up to BER, rate, coverage and sensing bounds."""

from .atomic import (
    AtomicSystem,
    Detection,
    OpticalDrive,
    PhotoReceiver,
    RfDrive,
    eit_spectrum,
    equivalent_field_sensitivity,
    photodetection_noise,
    rabi_from_beam,
    steady_state_coherence,
    superhet_transduction_gain,
)
from .channel import ChannelMatrix, UlaGeometry, los_channel, steering_vector, wideband_extension
from .config import Config, ConfigError, load_config
from .detection import (
    BerSetup,
    DetectionReport,
    Detector,
    PilotConfig,
    StoppingRule,
    ber_monte_carlo,
    detect_symbols,
    interpolate_csi,
    mmse_channel_estimate,
)
from .link import ClassicalRxChain, LinkScenario, ReceiverModel, path_gain_db
from .metrics import SensingConfig, achievable_rate_curve, coverage_distance, crb_range_speed
from .network import ConstellationConfig, build_scenario, constellation_sweep, global_detect, local_detect_fuse

__version__ = "0.1.0"
