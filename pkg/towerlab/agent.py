"""
Tower agent - root agent delegating to the verification and exploration specialists
"""

import os

from dotenv import load_dotenv
from google.adk.agents import LlmAgent

from .prompt import ROOT_AGENT_PROMPT
from .sub_agents.identity_verifier import identity_verifier_agent
from .sub_agents.tower_explorer import tower_explorer_agent

load_dotenv()

MODEL_GEMINI_2_5_PRO = "gemini-2.5-pro"
MODEL = os.getenv("MODEL", MODEL_GEMINI_2_5_PRO)

root_agent = LlmAgent(
    model=MODEL,
    name="root_agent",
    sub_agents=[identity_verifier_agent, tower_explorer_agent],
    instruction=ROOT_AGENT_PROMPT,
)

if __name__ == "__main__":
    from google.adk.runners import run
    run(root_agent)
