from pathlib import Path
from typing import Optional

import orjson
import typer
from pydantic import ValidationError

from app.config import logger, settings
from app.errors import ConfigError, MdpcError, ParameterError
from app.harness import compare, corpus_cycles, dfr_estimate, run_campaign
from app.keys import default_filter, filter_key, threshold_filter
from app.models import BikeParams, CampaignSpec, DecoderConfig, FilterConfig, FilterMode, Task
from app.repository import KeyRepository
from app.utils.capabilities import CAPABILITIES, get_params

router = typer.Typer()


def _emit(payload):
    typer.echo(orjson.dumps(payload).decode())


def _fail(exc: Exception, code: int = 1):
    logger.error(str(exc))
    typer.echo(f"error: {exc}", err=True)
    raise typer.Exit(code)


def _params(r: int, d: int, t: Optional[int], preset: Optional[str] = None) -> BikeParams:
    if preset is not None:
        return get_params(preset)
    try:
        return BikeParams(r=r, d=d, t=t or settings.get("DEFAULT_T", 18))
    except ValidationError as exc:
        raise ParameterError(f"Invalid parameters r={r}, d={d}, t={t}: {exc.errors()[0]['msg']}") from exc


def _parse_weights(text: str) -> tuple:
    try:
        return tuple(int(w) for w in text.split(","))
    except ValueError as exc:
        raise typer.BadParameter(f"--weights must be comma separated integers, got {text!r}") from exc


def _filter_options(
    d: int,
    weights: Optional[str],
    threshold: Optional[int],
    mode: FilterMode,
    t_filter: Optional[int],
) -> Optional[FilterConfig]:
    if t_filter is not None:
        if weights is not None:
            raise typer.BadParameter("--t-filter and --weights are mutually exclusive")
        return threshold_filter(d, t_filter)
    if weights is None and threshold is None:
        return None
    if threshold is None:
        raise typer.BadParameter("--weights needs --threshold")
    if weights is None:
        return default_filter(d, threshold, mode)
    try:
        return FilterConfig(weights=_parse_weights(weights), threshold=threshold, mode=mode, label=weights)
    except ValidationError as exc:
        raise ConfigError(f"Invalid filter: {exc.errors()[0]['msg']}") from exc


@router.command("filter")
def filter_keys(
    r: int = typer.Option(..., help="Block size"),
    d: int = typer.Option(..., help="Block weight"),
    weights: Optional[str] = typer.Option(None, help="Comma separated w_0,...,w_d; default C(m,2)"),
    threshold: int = typer.Option(..., help="Rejection threshold s"),
    mode: FilterMode = typer.Option(FilterMode.PER, help="per: any single m, cum: summed over m"),
    source: Path = typer.Option(..., "--in", exists=True, dir_okay=False, help="Input key file"),
    out: Path = typer.Option(..., help="Accepted keys"),
):
    """Keep the keys of a file that pass the column-intersection filter."""
    try:
        config = _filter_options(d, weights, threshold, mode, None)
        accepted, rejected = [], 0
        for number, record in KeyRepository.read(source):
            if (record.r, record.d) != (r, d):
                raise ParameterError(f"{source}:{number} holds r={record.r}, d={record.d}")
            verdict = filter_key(KeyRepository.to_key(record), config)
            if verdict.accepted:
                accepted.append(record.model_copy(update={"accepted": True, "filter": config.label}))
            else:
                rejected += 1
                logger.info(f"{source}:{number} rejected at m={verdict.witness} (score {verdict.score})")
        KeyRepository.write(out, accepted)
    except MdpcError as exc:
        _fail(exc)
    _emit({"accepted": len(accepted), "rejected": rejected, "filter": config.label})


@router.command()
def keygen(
    r: int = typer.Option(settings.get("DEFAULT_R", 587), help="Block size"),
    d: int = typer.Option(settings.get("DEFAULT_D", 15), help="Block weight"),
    t: Optional[int] = typer.Option(None, help="Error weight recorded with the keys"),
    count: int = typer.Option(..., min=1, help="Number of keys"),
    seed: int = typer.Option(settings.get("MASTER_SEED", 0), min=0, help="Master seed"),
    weights: Optional[str] = typer.Option(None, help="Filter weights w_0,...,w_d"),
    threshold: Optional[int] = typer.Option(None, help="Filter threshold s"),
    mode: FilterMode = typer.Option(FilterMode.PER, help="Filter mode"),
    t_filter: Optional[int] = typer.Option(None, help="Reject any intersection of T or more"),
    out: Optional[Path] = typer.Option(None, help="Write key lines here instead of stdout"),
    workers: int = typer.Option(settings.get("WORKERS", 1), min=1),
    max_attempts: int = typer.Option(
        settings.get("MAX_FILTER_ATTEMPTS", 1_000_000), min=1, help="Draws per key before the filter gives up"
    ),
    preset: Optional[str] = typer.Option(None, help="Named parameter set; overrides --r, --d and --t"),
):
    """Generate keys, optionally keeping only those accepted by a filter."""
    try:
        params = _params(r, d, t, preset)
        spec = CampaignSpec(
            params=params,
            n_keys=count,
            filter=_filter_options(params.d, weights, threshold, mode, t_filter),
            master_seed=seed,
            tasks=set(),
            workers=workers,
            max_attempts=max_attempts,
        )
        result = run_campaign(spec, out=out)
    except MdpcError as exc:
        _fail(exc)
    if out is not None:
        return
    for record in result.records:
        typer.echo(KeyRepository.dumps(record).decode())


@router.command()
def campaign(
    r: int = typer.Option(settings.get("DEFAULT_R", 587), help="Block size"),
    d: int = typer.Option(settings.get("DEFAULT_D", 15), help="Block weight"),
    t: Optional[int] = typer.Option(None, help="Error weight recorded with the keys"),
    keys: int = typer.Option(settings.get("N_KEYS", 1000), min=1, help="Number of accepted keys"),
    seed: int = typer.Option(settings.get("MASTER_SEED", 0), min=0, help="Master seed"),
    t_filter: Optional[int] = typer.Option(None, help="Reject any intersection of T or more"),
    spectra: bool = typer.Option(False, help="Also store the multiplicity spectra of each key"),
    out: Optional[Path] = typer.Option(None, help="Key records with their cycle counts"),
    workers: int = typer.Option(settings.get("WORKERS", 1), min=1),
    preset: Optional[str] = typer.Option(None, help="Named parameter set; overrides --r, --d and --t"),
):
    """Generate keys, count their 4-cycles and print the corpus statistics."""
    tasks = {Task.CYCLES, Task.SPECTRUM} if spectra else {Task.CYCLES}
    try:
        params = _params(r, d, t, preset)
        spec = CampaignSpec(
            params=params,
            n_keys=keys,
            filter=threshold_filter(params.d, t_filter) if t_filter is not None else None,
            master_seed=seed,
            tasks=tasks,
            workers=workers,
        )
        result = run_campaign(spec, out=out)
    except MdpcError as exc:
        _fail(exc)
    _emit(result.stats.model_dump())


@router.command()
def dfr(
    r: int = typer.Option(settings.get("DEFAULT_R", 587), help="Block size"),
    d: int = typer.Option(settings.get("DEFAULT_D", 15), help="Block weight"),
    t: int = typer.Option(settings.get("DEFAULT_T", 18), help="Error weight"),
    keys: int = typer.Option(..., min=1, help="Number of keys"),
    trials: int = typer.Option(settings.get("DFR_TRIALS_PER_KEY", 10), min=1, help="Decodings per key"),
    seed: int = typer.Option(settings.get("MASTER_SEED", 0), min=0, help="Master seed"),
    decoder_cfg: Optional[Path] = typer.Option(None, exists=True, dir_okay=False, help="JSON DecoderConfig"),
    t_filter: Optional[int] = typer.Option(None, help="Decode only under keys passing the T filter"),
    dump: Optional[Path] = typer.Option(None, help="Write failing keys and errors here"),
    workers: int = typer.Option(settings.get("WORKERS", 1), min=1),
    preset: Optional[str] = typer.Option(None, help="Named parameter set; overrides --r, --d and --t"),
):
    """Estimate the decoding failure rate of the BGF decoder."""
    try:
        decoder = DecoderConfig.from_settings()
        if decoder_cfg is not None:
            try:
                decoder = DecoderConfig.model_validate(orjson.loads(decoder_cfg.read_bytes()))
            except (orjson.JSONDecodeError, ValidationError) as exc:
                raise ConfigError(f"{decoder_cfg}: {exc}") from exc
        params = _params(r, d, t, preset)
        spec = CampaignSpec(
            params=params,
            n_keys=keys,
            filter=threshold_filter(params.d, t_filter) if t_filter is not None else None,
            master_seed=seed,
            tasks={Task.DFR},
            dfr_trials_per_key=trials,
            workers=workers,
        )
        report = dfr_estimate(spec, decoder)
    except MdpcError as exc:
        _fail(exc)
    if dump is not None:
        with open(dump, "wb") as handle:
            for failure in report.failing:
                handle.write(orjson.dumps(failure.model_dump()) + b"\n")
    _emit(report.model_dump(exclude={"failing"}))


@router.command()
def stats(
    a: Path = typer.Option(..., exists=True, dir_okay=False, help="First key corpus"),
    b: Path = typer.Option(..., exists=True, dir_okay=False, help="Second key corpus"),
    column: str = typer.Option("total", help="within, within_0, within_1, cross or total"),
    lax: bool = typer.Option(False, help="Accept blocks whose weight differs from d"),
):
    """Welch t-test p-value between the cycle counts of two corpora."""
    try:
        result = compare(corpus_cycles(a, lax=lax), corpus_cycles(b, lax=lax), column)
    except MdpcError as exc:
        _fail(exc)
    result["p_value"] = float(f"{result['p_value']:.6g}")
    _emit(result)


@router.command()
def presets():
    """Named parameter sets accepted by --preset."""
    _emit(CAPABILITIES)
