"""
Tools for the identity verifier sub-agent
"""

import logging
from typing import Any, Dict, List

from google.adk.tools import FunctionTool

from ...config import DEFAULT_PRECISION_TERMS, GRID
from ...errors import TowerLabError
from ...qexpansion import Q_IDENTITIES, rational_identities, verify_qidentity, verify_rational_identity
from ...geometry import triangle_identities

logger = logging.getLogger(__name__)


def list_identities() -> Dict[str, Any]:
    """
    List every identity that can be checked.

    Returns:
        Status dict with the q-series identity ids (with descriptions) and the rational identity ids
    """
    return {
        "status": "success",
        "q_series": [{"id": i.id, "description": i.description} for i in Q_IDENTITIES.values()],
        "rational": sorted(rational_identities()),
    }


def check_identity(identity_id: str, precision_terms: int = DEFAULT_PRECISION_TERMS) -> Dict[str, Any]:
    """
    Check one identity by id.

    Args:
        identity_id: A q-series identity id (e.g. "h2_level") or a rational identity id
        precision_terms: Integral q-terms used for q-series identities

    Returns:
        The identity report with a "status" of pass, fail or error
    """
    try:
        if identity_id in rational_identities():
            return verify_rational_identity(identity_id)
        return verify_qidentity(identity_id, precision_terms * GRID)
    except TowerLabError as e:
        logger.warning("Identity check %s failed to run: %s", identity_id, e)
        return {"status": "error", "id": identity_id, "error": str(e)}


def check_all_identities(precision_terms: int = DEFAULT_PRECISION_TERMS) -> Dict[str, Any]:
    """Check every identity and the triangle-cover facts; summarize failures."""
    reports: List[Dict[str, Any]] = [check_identity(i.id, precision_terms) for i in Q_IDENTITIES.values()]
    reports += [check_identity(name) for name in sorted(rational_identities())]
    triangle = triangle_identities()
    failed = [r["id"] for r in reports if r["status"] != "pass"]
    failed += [name for name, ok in triangle.items() if not ok]
    return {
        "status": "success" if not failed else "error",
        "reports": reports,
        "triangle": triangle,
        "failed": failed,
    }


list_identities_tool = FunctionTool(list_identities)
check_identity_tool = FunctionTool(check_identity)
check_all_identities_tool = FunctionTool(check_all_identities)
