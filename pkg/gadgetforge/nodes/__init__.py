from .partitioner import partition_node, partition_term
from .gap_selector import analytical_delta, gap_selector_node
from .builder import builder_node, iteration_target
from .measurer import measurer_node
from .checker import check_reduction_status, check_step

__all__ = [
    "analytical_delta",
    "builder_node",
    "check_reduction_status",
    "check_step",
    "gap_selector_node",
    "iteration_target",
    "measurer_node",
    "partition_node",
    "partition_term",
]
