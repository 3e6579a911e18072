"""
Identity Verifier sub-agent
"""

import os

from dotenv import load_dotenv
from google.adk.agents import LlmAgent

from .prompt import IDENTITY_VERIFIER_PROMPT
from .tools import check_all_identities_tool, check_identity_tool, list_identities_tool

load_dotenv()
MODEL = os.getenv("MODEL", "gemini-2.5-pro")

identity_verifier_agent = LlmAgent(
    model=MODEL,
    name="IdentityVerifier",
    description="Checks q-series and rational identities behind the tower equations",
    tools=[list_identities_tool, check_identity_tool, check_all_identities_tool],
    instruction=IDENTITY_VERIFIER_PROMPT,
    output_key="identity_verification_result",
)
