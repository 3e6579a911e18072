"""
Identity Verifier sub-agent
"""

from .agent import identity_verifier_agent

__all__ = ['identity_verifier_agent']
