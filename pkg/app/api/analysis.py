import io
from pathlib import Path
from typing import Optional

import orjson
import pandas as pd
import typer

from app.config import logger, settings
from app.cycles import (
    GeneralQcMatrix,
    bike_census,
    fourcycle_free_feasible,
    fourcycle_free_feasible_simplified,
    max_fourcycle_free_d,
    prob_max_below,
)
from app.errors import MdpcError, OracleMismatch
from app.repository import KeyRepository
from app.spectrum import compute_spectrum, mspec
from app.tanner import from_general_qc, oracle_count

router = typer.Typer()


def _emit(payload):
    typer.echo(orjson.dumps(payload, option=orjson.OPT_NON_STR_KEYS).decode())


def _fail(exc: Exception, code: int = 1):
    logger.error(str(exc))
    typer.echo(f"error: {exc}", err=True)
    raise typer.Exit(code)


def _selected(keys, index: Optional[int]):
    if index is None:
        return list(enumerate(keys))
    if not 0 <= index < len(keys):
        raise typer.BadParameter(f"--index {index} outside [0, {len(keys)})")
    return [(index, keys[index])]


@router.command()
def spectrum(
    key: Path = typer.Option(..., "--key", exists=True, dir_okay=False, help="JSONL key file"),
    index: Optional[int] = typer.Option(None, help="Only this record (0-based)"),
    lax: bool = typer.Option(False, help="Accept blocks whose weight differs from d"),
):
    """Distance-multiplicity spectra of h0 and h1, one JSON line per key."""
    try:
        keys = KeyRepository.load_keys(key, lax=lax)
    except MdpcError as exc:
        _fail(exc)
    for number, qc in _selected(keys, index):
        blocks = {}
        for name, h in (("h0", qc.h0), ("h1", qc.h1)):
            report = compute_spectrum(h)
            blocks[name] = {**report.model_dump(), "mspec": mspec(report)}
        _emit({"index": number, "r": qc.params.r, "d": qc.params.d, **blocks})


@router.command()
def cycles(
    key: Path = typer.Option(..., "--key", exists=True, dir_okay=False, help="JSONL key file"),
    index: Optional[int] = typer.Option(None, help="Only this record (0-based)"),
    oracle: bool = typer.Option(False, help="Cross-check against an explicit Tanner graph"),
    lax: bool = typer.Option(False, help="Accept blocks whose weight differs from d"),
):
    """4-cycle census of each key; with --oracle a mismatch exits with status 2."""
    try:
        keys = KeyRepository.load_keys(key, lax=lax)
    except MdpcError as exc:
        _fail(exc)
    max_r = settings.get("ORACLE_MAX_R", 1200)
    for number, qc in _selected(keys, index):
        census = bike_census(qc.h0, qc.h1)
        if oracle:
            if qc.params.r > max_r:
                logger.warning(f"Oracle on r={qc.params.r} above ORACLE_MAX_R={max_r}, this may be slow")
            census.oracle = oracle_count(from_general_qc(GeneralQcMatrix.bike(qc.h0, qc.h1)))
        _emit({"index": number, **census.model_dump()})
        if census.oracle is not None and census.oracle != census.total:
            _fail(OracleMismatch(census.total, census.oracle), code=2)


@router.command("prob-table")
def prob_table(
    r: int = typer.Option(..., help="Block size"),
    dmin: int = typer.Option(..., help="Smallest block weight"),
    dmax: int = typer.Option(..., help="Largest block weight"),
    tail: bool = typer.Option(False, help="Use pi_m = P(mu >= m) instead of P(mu = m)"),
):
    """CSV of P(every multiplicity < 2) and 4-cycle-free feasibility for d in [dmin, dmax]."""
    if not 2 <= dmin <= dmax <= r:
        raise typer.BadParameter(f"Need 2 <= dmin <= dmax <= r, got {dmin}, {dmax}, {r}")
    try:
        rows = [
            {
                "r": r,
                "d": d,
                "p_max_below_2": prob_max_below(r, d, 2, tail=tail),
                "feasible": fourcycle_free_feasible(r, d),
                "feasible_simplified": fourcycle_free_feasible_simplified(r, d),
            }
            for d in range(dmin, dmax + 1)
        ]
    except MdpcError as exc:
        _fail(exc)
    buffer = io.StringIO()
    pd.DataFrame(rows).to_csv(buffer, index=False, float_format="%.6g")
    typer.echo(buffer.getvalue(), nl=False)
    logger.info(f"Largest 4-cycle-free candidate weight for r={r}: {max_fourcycle_free_d(r)}")
