"""
Command-line interface for towerlab
"""

import functools
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

import click

from .config import DEFAULT_PRECISION_TERMS, DEFAULT_SURROGATES, GRID, MAX_DEPTH
from .errors import TowerLabError
from .finitefield import field_create
from .geometry import genus_table, ramification_consensus
from .optimality import run_experiment
from .qexpansion import verify_all
from .relations import x, y
from .towercore import (
    catalog,
    chain_count,
    chain_record,
    complete_set,
    encode_point,
    get_tower,
    iter_chains,
    reduce_mod_p,
)
from .tools import csv_text, json_text, jsonl_text, save_csv_file, save_json_file, save_jsonl_file

logger = logging.getLogger(__name__)

FORMATS = click.Choice(["csv", "json"])


def _handle_errors(func: Callable) -> Callable:
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except TowerLabError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(2)

    return wrapper


def _emit(data: Any, fmt: str, output: Optional[str]) -> None:
    """Write rows (csv), a report (json) or chain records (jsonl) to stdout or a file."""
    if fmt == "csv":
        text, saver = csv_text(data), save_csv_file
    elif fmt == "jsonl":
        text, saver = jsonl_text(data), save_jsonl_file
    else:
        text, saver = json_text(data), save_json_file
    if output is None:
        click.echo(text, nl=False)
        return
    result = saver(data, output)
    if result["status"] != "success":
        click.echo(f"Error: {result['error']}", err=True)
        sys.exit(2)


def _surrogates(value: str):
    try:
        primes = tuple(int(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated primes, got '{value}'")
    if not primes:
        raise click.BadParameter("at least one surrogate prime is required")
    return primes


tower_option = click.option("--tower", required=True, help="Catalog tower name, e.g. x0_2.")
p_option = click.option("--p", "p", type=int, required=True, help="Field characteristic.")
k_option = click.option("--k", "k", type=int, default=1, show_default=True, help="Extension degree.")
output_option = click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
                             help="Write to this file instead of stdout.")


def format_option(default: str):
    return click.option("--format", "fmt", type=FORMATS, default=default, show_default=True)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress and detail to stderr.")
def main(verbose: bool) -> None:
    """Explicit recursive modular towers over finite fields."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@main.command("verify-identities")
@click.option("--precision", type=int, default=DEFAULT_PRECISION_TERMS, show_default=True,
              help="Number of integral q-terms to verify.")
@format_option("json")
@output_option
@_handle_errors
def verify_identities(precision: int, fmt: str, output: Optional[str]) -> None:
    """Check every q-series and rational identity; exit 1 if any fails."""
    reports = verify_all(precision * GRID)
    rows = [
        {
            "id": r["id"],
            "status": r["status"],
            "residual_leading_exponent": r.get("residual_leading_exponent"),
            "precision": r.get("precision"),
            "witness": r.get("witness"),
        }
        for r in reports
    ]
    _emit(rows, fmt, output)
    failed = [r["id"] for r in reports if r["status"] != "pass"]
    if failed:
        click.echo(f"Failed identities: {', '.join(failed)}", err=True)
        sys.exit(1)


@main.command("catalog")
@format_option("csv")
@output_option
@_handle_errors
def catalog_command(fmt: str, output: Optional[str]) -> None:
    """List the towers with their correspondences."""
    rows = []
    for tower in catalog():
        involution = "(2,3)-P" if tower.base == "elliptic" else str(tower.involution.coefficients)
        rows.append(
            {
                "name": tower.name,
                "l": tower.l,
                "base": tower.base,
                "label": tower.label,
                "excluded": ";".join(str(p) for p in sorted(tower.excluded)),
                "involution": involution,
                "phi": str(tower.correspondence.affine_expr(x, y)),
            }
        )
    _emit(rows, fmt, output)


@main.command("count")
@tower_option
@p_option
@k_option
@click.option("--levels", type=int, required=True, help="Count chains of length 1..LEVELS.")
@click.option("--multiplicity", is_flag=True, help="Count pairs with fiber multiplicity.")
@format_option("csv")
@output_option
@_handle_errors
def count_command(tower, p, k, levels, multiplicity, fmt, output) -> None:
    """Rational chain counts per level."""
    spec, ctx = get_tower(tower), field_create(p, k)
    rows = [
        {"tower": spec.name, "q": ctx.q, "level": m,
         "count": chain_count(spec, ctx, m, distinct_only=not multiplicity)}
        for m in range(1, levels + 1)
    ]
    _emit(rows, fmt, output)


@main.command("complete-set")
@tower_option
@p_option
@k_option
@format_option("json")
@output_option
@_handle_errors
def complete_set_command(tower, p, k, fmt, output) -> None:
    """Greatest complete set S of the tower over GF(p^k).

    Points use the same encoding as the chains command.
    """
    spec, ctx = get_tower(tower), field_create(p, k)
    S = complete_set(spec, ctx)
    points = [encode_point(P) for P in S.points]
    if fmt == "csv":
        _emit([{"tower": spec.name, "q": ctx.q, "point": P} for P in points], fmt, output)
    else:
        _emit({"tower": spec.name, "q": ctx.q, "size": len(S), "points": points}, fmt, output)


@main.command("genus")
@tower_option
@click.option("--levels", type=int, required=True, help="Highest curve level.")
@click.option("--no-cross-check", is_flag=True, help="Skip the ramification cross-check.")
@format_option("csv")
@output_option
@_handle_errors
def genus_command(tower, levels, no_cross_check, fmt, output) -> None:
    """Genus of each curve level of a tower."""
    _emit(genus_table(get_tower(tower), levels, cross_check=not no_cross_check), fmt, output)


@main.command("ramify")
@tower_option
@click.option("--depth", type=click.IntRange(1, MAX_DEPTH), default=8, show_default=True)
@click.option("--surrogates", default=",".join(str(p) for p in DEFAULT_SURROGATES),
              show_default=True, help="Comma-separated surrogate primes.")
@format_option("json")
@output_option
@_handle_errors
def ramify_command(tower, depth, surrogates, fmt, output) -> None:
    """Ramification per level and the stabilization level."""
    report = ramification_consensus(get_tower(tower), depth, _surrogates(surrogates))
    if fmt == "csv":
        rows = [dict(entry, tower=report["tower"], stabilization_level=report["stabilization_level"])
                for entry in report["levels"]]
        _emit(rows, fmt, output)
    else:
        _emit(report, fmt, output)


@main.command("optimality")
@tower_option
@p_option
@k_option
@click.option("--levels", type=int, required=True, help="Highest chain length.")
@format_option("csv")
@output_option
@_handle_errors
def optimality_command(tower, p, k, levels, fmt, output) -> None:
    """Point counts, splitting-set bounds and ratios against sqrt(q) - 1."""
    rows = [row.as_dict() for row in run_experiment(get_tower(tower), field_create(p, k), levels)]
    _emit(rows, fmt, output)


@main.command("chains")
@tower_option
@p_option
@k_option
@click.option("--level", type=int, required=True, help="Chain length.")
@click.option("--within-s", is_flag=True, help="Only chains inside the complete set.")
@output_option
@_handle_errors
def chains_command(tower, p, k, level, within_s, output) -> None:
    """Dump chains as JSON lines in lexicographic order.

    \b
    Points are encoded as
      - a field element: the integer whose base-p digits are its
        coefficients in t modulo the field modulus (digit i multiplies t^i);
      - "inf" for the point (1:0) or the elliptic origin;
      - [x, y] for an affine point of the elliptic base.
    """
    spec, ctx = get_tower(tower), field_create(p, k)
    within = frozenset(complete_set(spec, ctx).points) if within_s else None
    records: List[Dict] = [chain_record(c) for c in iter_chains(spec, ctx, level, within=within)]
    _emit(records, "jsonl", output)


@main.command("reduce")
@tower_option
@p_option
@click.option("--sub", default="inverse_minus_one", show_default=True,
              type=click.Choice(["inverse_minus_one", "one_minus_inverse"]))
@_handle_errors
def reduce_command(tower, p, sub) -> None:
    """Print the relation between consecutive coordinates modulo p."""
    click.echo(str(reduce_mod_p(get_tower(tower), p, sub)))


if __name__ == "__main__":
    main()
