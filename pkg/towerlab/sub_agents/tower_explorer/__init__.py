"""
Tower Explorer sub-agent
"""

from .agent import tower_explorer_agent

__all__ = ['tower_explorer_agent']
