"""
Scenario pipeline nodes

Processing nodes for the scenario graph: state preparation, noise channels,
protocol simulation, analysis and report writing.
"""

from .analysis import analysis_node
from .noise_channels import noise_channels_node
from .protocol_simulation import protocol_simulation_node
from .report import report_node
from .state_preparation import state_preparation_node

__all__ = [
    "state_preparation_node",
    "noise_channels_node",
    "protocol_simulation_node",
    "analysis_node",
    "report_node",
]
