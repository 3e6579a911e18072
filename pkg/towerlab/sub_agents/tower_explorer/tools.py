"""
Tools for the tower explorer sub-agent
"""

import logging
from typing import Any, Dict, Optional

from google.adk.tools import FunctionTool

from ...config import DEFAULT_SURROGATES
from ...errors import TowerLabError
from ...finitefield import field_create
from ...geometry import genus_table, ramification_consensus
from ...optimality import run_experiment
from ...tools import render_value, save_csv_file
from ...towercore import catalog, chain_count, complete_set, encode_point, get_tower, reduce_mod_p

logger = logging.getLogger(__name__)


def _error(e: Exception) -> Dict[str, Any]:
    logger.warning("Tower tool failed: %s", e)
    return {"status": "error", "error": str(e)}


def list_towers() -> Dict[str, Any]:
    """List the catalog towers with degree, base curve and excluded characteristics."""
    return {
        "status": "success",
        "towers": [
            {
                "name": t.name,
                "l": t.l,
                "base": t.base,
                "label": t.label,
                "excluded": sorted(t.excluded),
            }
            for t in catalog()
        ],
    }


def count_chains(tower: str, p: int, k: int = 1, levels: int = 3) -> Dict[str, Any]:
    """
    Count rational chains over GF(p^k) for lengths 1..levels.

    Args:
        tower: Catalog name, e.g. "x0_2"
        p: Field characteristic
        k: Extension degree
        levels: Longest chain length

    Returns:
        Status dict with a count per level
    """
    try:
        spec, ctx = get_tower(tower), field_create(p, k)
        counts = {m: chain_count(spec, ctx, m) for m in range(1, levels + 1)}
        return {"status": "success", "tower": spec.name, "q": ctx.q, "counts": counts}
    except TowerLabError as e:
        return _error(e)


def find_complete_set(tower: str, p: int, k: int = 1) -> Dict[str, Any]:
    """Greatest complete set of the tower over GF(p^k) and its size."""
    try:
        spec, ctx = get_tower(tower), field_create(p, k)
        S = complete_set(spec, ctx)
        return {
            "status": "success",
            "tower": spec.name,
            "q": ctx.q,
            "size": len(S),
            "points": [encode_point(P) for P in S.points],
        }
    except TowerLabError as e:
        return _error(e)


def tower_genus(tower: str, levels: int, cross_check: bool = True) -> Dict[str, Any]:
    """Genus of each curve level with the method used and the cross-check outcome."""
    try:
        return {"status": "success", "tower": tower, "rows": genus_table(get_tower(tower), levels, cross_check)}
    except TowerLabError as e:
        return _error(e)


def analyze_ramification(tower: str, depth: int = 6) -> Dict[str, Any]:
    """Ramification per level and the level where it stabilizes, agreed on by both surrogate primes."""
    try:
        report = ramification_consensus(get_tower(tower), depth, DEFAULT_SURROGATES)
        return dict(report, status="success")
    except TowerLabError as e:
        return _error(e)


def optimality_report(
    tower: str, p: int, k: int = 1, levels: int = 4, output_file_path: Optional[str] = None
) -> Dict[str, Any]:
    """
    Compare point counts to the genus and to sqrt(q) - 1.

    Args:
        tower: Catalog name
        p: Field characteristic
        k: Extension degree
        levels: Highest chain length
        output_file_path: Optional CSV destination

    Returns:
        Status dict with one row per level, plus the save result when a path is given
    """
    try:
        rows = [render_value(row.as_dict()) for row in run_experiment(get_tower(tower), field_create(p, k), levels)]
    except TowerLabError as e:
        return _error(e)
    result: Dict[str, Any] = {"status": "success", "rows": rows}
    if output_file_path:
        result["saved"] = save_csv_file(rows, output_file_path)
    return result


def reduce_relation(tower: str, p: int, substitution: str = "inverse_minus_one") -> Dict[str, Any]:
    """Relation between consecutive coordinates after the change of variable, modulo p."""
    try:
        reduced = reduce_mod_p(get_tower(tower), p, substitution)
        return {"status": "success", "tower": reduced.tower, "p": p, "relation": str(reduced)}
    except TowerLabError as e:
        return _error(e)


list_towers_tool = FunctionTool(list_towers)
count_chains_tool = FunctionTool(count_chains)
find_complete_set_tool = FunctionTool(find_complete_set)
tower_genus_tool = FunctionTool(tower_genus)
analyze_ramification_tool = FunctionTool(analyze_ramification)
optimality_report_tool = FunctionTool(optimality_report)
reduce_relation_tool = FunctionTool(reduce_relation)
