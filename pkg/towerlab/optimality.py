"""
Drinfeld-Vladut experiments: point counts and splitting-set bounds against genus
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import isqrt, sqrt
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .config import MAX_WORKERS
from .errors import GenusUnavailableError, TowerLabError
from .finitefield import FieldCtx, field_create
from .geometry import tower_genus_seq
from .towercore import TowerSpec, chain_count, check_admissible, complete_set, get_tower

logger = logging.getLogger(__name__)


def dv_bound(q: int) -> Union[int, float]:
    """sqrt(q) - 1, exact when q is a perfect square."""
    if q < 2:
        raise TowerLabError(f"Field size must be at least 2, got {q}")
    root = isqrt(q)
    if root * root == q:
        return root - 1
    return sqrt(q) - 1


@dataclass(frozen=True)
class OptimalityRow:
    tower: str
    q: int
    level: int
    genus: int
    genus_method: str
    S: int
    s_chain_bound: int
    model_count: int
    ratio: Optional[Fraction]
    dv: Union[int, float]

    def as_dict(self) -> Dict:
        return asdict(self)


def run_experiment(spec: TowerSpec, ctx: FieldCtx, nmax: int) -> List[OptimalityRow]:
    """One row per chain length n = 1..nmax over the field ``ctx``.

    The curve of n-tuples sits at genus level n + 1, so genus comes from
    ``tower_genus_seq`` up to nmax + 1.
    """
    check_admissible(spec, ctx)
    if nmax < 1:
        raise TowerLabError(f"Level bound must be at least 1, got {nmax}")
    genus_rows = {row.level: row for row in tower_genus_seq(spec, nmax + 1, cross_check=False)}
    S = complete_set(spec, ctx)
    dv = dv_bound(ctx.q)
    rows = []
    for n in range(1, nmax + 1):
        genus_row = genus_rows.get(n + 1)
        if genus_row is None:
            raise GenusUnavailableError(f"No genus for {spec.name} at level {n + 1}")
        model = chain_count(spec, ctx, n)
        bound = S.chain_bound(n)
        ratio = Fraction(bound, genus_row.genus) if genus_row.genus >= 1 else None
        if bound > model:
            logger.error("%s over GF(%d) level %d: bound %d exceeds count %d", spec.name, ctx.q, n, bound, model)
        if ratio is not None and ratio > dv:
            logger.warning(
                "%s over GF(%d) level %d: ratio %s above sqrt(q) - 1 at finite level",
                spec.name, ctx.q, n, ratio,
            )
        rows.append(
            OptimalityRow(
                tower=spec.name,
                q=ctx.q,
                level=n,
                genus=genus_row.genus,
                genus_method=genus_row.method,
                S=len(S),
                s_chain_bound=bound,
                model_count=model,
                ratio=ratio,
                dv=dv,
            )
        )
    oracle_levels = [row.level for row in rows if row.genus_method == "oracle-formula"]
    if oracle_levels:
        logger.warning("%s levels %s: genus from the X0(N) formula", spec.name, oracle_levels)
    logger.info("%s over GF(%d): %d optimality rows", spec.name, ctx.q, len(rows))
    return rows


def run_batch(
    tasks: Sequence[Tuple[str, int, int, int]], max_workers: int = MAX_WORKERS
) -> List[List[OptimalityRow]]:
    """Run (tower, p, k, nmax) experiments concurrently, results in task order."""
    results: List[Optional[List[OptimalityRow]]] = [None] * len(tasks)
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_index = {
            executor.submit(run_experiment, get_tower(name), field_create(p, k), nmax): index
            for index, (name, p, k, nmax) in enumerate(tasks)
        }
        for future in as_completed(future_to_index):
            results[future_to_index[future]] = future.result()
    return results
