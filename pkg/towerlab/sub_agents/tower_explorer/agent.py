"""
Tower Explorer sub-agent
"""

import os

from dotenv import load_dotenv
from google.adk.agents import LlmAgent

from .prompt import TOWER_EXPLORER_PROMPT
from .tools import (
    analyze_ramification_tool,
    count_chains_tool,
    find_complete_set_tool,
    list_towers_tool,
    optimality_report_tool,
    reduce_relation_tool,
    tower_genus_tool,
)

load_dotenv()
MODEL = os.getenv("MODEL", "gemini-2.5-pro")

tower_explorer_agent = LlmAgent(
    model=MODEL,
    name="TowerExplorer",
    description="Counts points, complete sets, genera and ramification of the catalog towers",
    tools=[
        list_towers_tool,
        count_chains_tool,
        find_complete_set_tool,
        tower_genus_tool,
        analyze_ramification_tool,
        optimality_report_tool,
        reduce_relation_tool,
    ],
    instruction=TOWER_EXPLORER_PROMPT,
    output_key="tower_exploration_result",
)
