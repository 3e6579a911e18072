"""
towerlab - explicit recursive towers of modular curves over finite fields
"""

from .errors import TowerLabError
from .finitefield import field_create
from .towercore import catalog, get_tower

__all__ = ['root_agent', 'TowerLabError', 'field_create', 'catalog', 'get_tower']


def __getattr__(name):
    # The agent stack is only imported when the agent is asked for.
    if name == "root_agent":
        from .agent import root_agent

        return root_agent
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
