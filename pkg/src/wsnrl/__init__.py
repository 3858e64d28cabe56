"""Solar-harvesting sensor-network simulator and PPO duty-cycle controller."""
from .battery import Mode, battery_step, consumption
from .cases import CASES, CaseSpec, get_case
from .config import ConfigError, NetworkConfig, load_config
from .connectivity import LinkModel, link_probability, sample_links
from .degradation import OnlineDegradation, damage, degradation, rainflow
from .env import StepResult, WsnEnv, episode_return
from .rng import seeded_rng_streams
from .solar import SolarProfile, harvested_energy, load_solar_csv, sample_field, synth_solar
from .topology import Topology, generate_topology

__version__ = "0.1.0"
