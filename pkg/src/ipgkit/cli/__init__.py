"""Command-line interface: instance I/O, solver dispatch, batch runs."""

from .runner import run_algorithm, run_safely
from .serialize import (
    LoadedInstance,
    ResultRecord,
    dumps_instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    loads_instance,
    save_instance,
)

__all__ = [
    "LoadedInstance",
    "ResultRecord",
    "dumps_instance",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "loads_instance",
    "run_algorithm",
    "run_safely",
    "save_instance",
]
