"""Key campaigns: generate filtered keys, count their cycles, compare corpora, estimate DFR."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from app.config import logger
from app.cycles import count_cross, count_within
from app.decoder import ErrorVector, bgf_decode, syndrome
from app.errors import DegenerateSample, InvariantViolation, MdpcError, ParameterError
from app.keys import QcKey, filter_key, generate_key
from app.models import (
    CampaignSpec,
    CycleRecord,
    CycleStats,
    DecoderConfig,
    DfrFailure,
    DfrReport,
    KeyRecord,
    Task,
)
from app.repository import KeyRepository
from app.spectrum import compute_spectrum, mspec
from app.utils.rng import key_seed, trial_rng


@dataclass
class CampaignResult:
    records: List[KeyRecord]
    rejections: int
    stats: Optional[CycleStats] = None
    attempts: List[int] = field(default_factory=list)


def cycle_record(key: QcKey) -> CycleRecord:
    within_0 = count_within(key.h0)
    within_1 = count_within(key.h1)
    cross = count_cross(key.h0, key.h1)
    return CycleRecord(within_0=within_0, within_1=within_1, cross=cross, total=within_0 + within_1 + cross)


def accepted_key(spec: CampaignSpec, index: int) -> Tuple[QcKey, int, int]:
    """Key number `index` of the campaign, its seed and how many draws the filter rejected."""
    for attempt in range(spec.max_attempts):
        seed = key_seed(spec.master_seed, index, attempt)
        key = generate_key(spec.params, seed)
        if spec.filter is None or filter_key(key, spec.filter).accepted:
            return key, seed, attempt
    raise ParameterError(
        f"Filter {spec.filter.label} rejected all {spec.max_attempts} draws for key {index}"
    )


def _campaign_item(spec: CampaignSpec, index: int) -> Tuple[KeyRecord, int]:
    key, seed, rejected = accepted_key(spec, index)
    extra = {}
    if spec.filter is not None:
        extra.update(accepted=True, filter=spec.filter.label)
    if Task.CYCLES in spec.tasks:
        extra["cycles"] = cycle_record(key)
    if Task.SPECTRUM in spec.tasks:
        extra["mspec"] = {"h0": mspec(compute_spectrum(key.h0)), "h1": mspec(compute_spectrum(key.h1))}
    return KeyRepository.from_key(key, seed=seed, **extra), rejected


def _iter_items(func, spec: CampaignSpec, indices: Sequence[int]) -> Iterator:
    if spec.workers <= 1 or len(indices) < 2:
        for i in indices:
            yield func(spec, i)
        return
    chunk = max(1, len(indices) // (spec.workers * 4))
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        yield from pool.map(func, [spec] * len(indices), indices, chunksize=chunk)


def _run_items(func, spec: CampaignSpec, indices: Sequence[int]) -> list:
    return list(_iter_items(func, spec, indices))


def aggregate_stats(r: int, cycles: Iterable[CycleRecord], rejections: int = 0) -> CycleStats:
    """Within counts pool both blocks, so a corpus of N keys gives 2N within samples."""
    df = pd.DataFrame([c.model_dump() for c in cycles])
    if df.empty:
        raise DegenerateSample("No cycle records to aggregate")
    within = pd.concat([df["within_0"], df["within_1"]], ignore_index=True)
    return CycleStats(
        r=r,
        n_keys=len(df),
        rejections=rejections,
        within_avg=float(within.mean()),
        within_min=int(within.min()),
        within_max=int(within.max()),
        cross_avg=float(df["cross"].mean()),
        cross_min=int(df["cross"].min()),
        cross_max=int(df["cross"].max()),
        total_avg=float(df["total"].mean()),
        total_min=int(df["total"].min()),
        total_max=int(df["total"].max()),
    )


def run_campaign(spec: CampaignSpec, out: Optional[Union[str, Path]] = None) -> CampaignResult:
    """With `out`, records are appended there in key order instead of kept in memory."""
    label = spec.filter.label if spec.filter else "none"
    logger.info(
        f"Campaign r={spec.params.r} d={spec.params.d}: {spec.n_keys} keys, filter {label}, "
        f"seed {spec.master_seed}, {spec.workers} worker(s)"
    )
    if out is not None:
        Path(out).write_bytes(b"")
    records, cycles, attempts = [], [], []
    for record, rejected in _iter_items(_campaign_item, spec, list(range(spec.n_keys))):
        attempts.append(rejected)
        if record.cycles is not None:
            cycles.append(record.cycles)
        if out is None:
            records.append(record)
        else:
            KeyRepository.append(out, record)
    if out is not None:
        logger.info(f"Streamed {len(attempts)} key records to {out}")
    rejections = sum(attempts)
    result = CampaignResult(records=records, rejections=rejections, attempts=attempts)
    if Task.CYCLES in spec.tasks:
        result.stats = aggregate_stats(spec.params.r, cycles, rejections)
        logger.info(
            f"Average 4-cycles: within {result.stats.within_avg:.1f}, "
            f"cross {result.stats.cross_avg:.1f}, total {result.stats.total_avg:.1f}"
        )
    if spec.filter is not None:
        rate = spec.n_keys / (spec.n_keys + rejections)
        logger.info(f"Filter {label} accepted {rate:.4%} of {spec.n_keys + rejections} draws")
    return result


def ingest_keys(path, lax: bool = False, t: Optional[int] = None) -> List[QcKey]:
    return KeyRepository.load_keys(path, lax=lax, t=t)


def corpus_cycles(path, lax: bool = False) -> List[CycleRecord]:
    """Stored cycle counts where present, recomputed otherwise."""
    cycles, bad = [], []
    for number, record in KeyRepository.read(path):
        if record.cycles is not None:
            cycles.append(record.cycles)
            continue
        try:
            cycles.append(cycle_record(KeyRepository.to_key(record, lax=lax)))
        except MdpcError as exc:
            logger.warning(f"{path}:{number}: {exc}")
            bad.append(number)
    if bad:
        raise InvariantViolation("key violates the block invariants", path=str(path), lines=bad)
    return cycles


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided p-value of Welch's unequal-variance t-test."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise DegenerateSample(f"Need at least two values per sample, got {a.size} and {b.size}")
    if a.var() == 0 and b.var() == 0:
        raise DegenerateSample("Both samples have zero variance")
    return float(stats.ttest_ind(a, b, equal_var=False).pvalue)


def compare(a: Iterable[CycleRecord], b: Iterable[CycleRecord], column: str = "total") -> dict:
    df_a = pd.DataFrame([c.model_dump() for c in a])
    df_b = pd.DataFrame([c.model_dump() for c in b])
    if column == "within":
        left = pd.concat([df_a["within_0"], df_a["within_1"]], ignore_index=True)
        right = pd.concat([df_b["within_0"], df_b["within_1"]], ignore_index=True)
    elif column in CycleRecord.model_fields:
        left, right = df_a[column], df_b[column]
    else:
        raise ParameterError(f"Unknown column {column!r}")
    return {
        "column": column,
        "n_a": int(left.size),
        "n_b": int(right.size),
        "mean_a": float(left.mean()),
        "mean_b": float(right.mean()),
        "p_value": welch_t_test(left.to_numpy(), right.to_numpy()),
    }


def _dfr_item(spec: CampaignSpec, index: int) -> Tuple[int, int, List[DfrFailure]]:
    key, seed, _ = accepted_key(spec, index)
    config = spec.decoder or DecoderConfig()
    r, t = spec.params.r, spec.params.t
    failures, miscorrections, failing = 0, 0, []
    for trial in range(spec.dfr_trials_per_key):
        error = ErrorVector.random(2 * r, t, trial_rng(spec.master_seed, index, trial))
        result = bgf_decode(key, syndrome(key, error), config)
        if result.success and result.error == error:
            continue
        failures += 1
        if result.success:
            miscorrections += 1
        failing.append(
            DfrFailure(
                key_index=index,
                seed=seed,
                r=r,
                d=spec.params.d,
                h0=list(key.h0.support),
                h1=list(key.h1.support),
                error=list(error.support),
                decoded=result.success,
            )
        )
    return failures, miscorrections, failing


def dfr_estimate(spec: CampaignSpec, decoder: Optional[DecoderConfig] = None) -> DfrReport:
    """Decode dfr_trials_per_key random weight-t errors under each campaign key.

    A trial fails when the decoder gives up or returns an error other than the one sent.
    """
    if Task.DFR not in spec.tasks or spec.dfr_trials_per_key < 1:
        raise ParameterError("Campaign has no DFR task or no trials per key")
    if spec.params.t > 2 * spec.params.r:
        raise ParameterError(f"Error weight t={spec.params.t} exceeds code length {2 * spec.params.r}")
    if decoder is not None:
        spec = spec.model_copy(update={"decoder": decoder})
    elif spec.decoder is None:
        spec = spec.model_copy(update={"decoder": DecoderConfig.from_settings()})

    logger.info(
        f"DFR run r={spec.params.r} d={spec.params.d} t={spec.params.t}: "
        f"{spec.n_keys} keys x {spec.dfr_trials_per_key} trials"
    )
    items = _run_items(_dfr_item, spec, list(range(spec.n_keys)))
    report = summarize_dfr(spec, items)
    if report.failures:
        logger.warning(
            f"{report.failures} of {report.trials} decodings failed ({report.miscorrections} miscorrections)"
        )
    else:
        logger.info(f"No decoding failures in {report.trials} trials")
    return report


def summarize_dfr(spec: CampaignSpec, items: Sequence[Tuple[int, int, List[DfrFailure]]]) -> DfrReport:
    """Fold per-key (failures, miscorrections, failing) triples into one report."""
    trials = spec.n_keys * spec.dfr_trials_per_key
    failures = sum(item[0] for item in items)
    return DfrReport(
        r=spec.params.r,
        d=spec.params.d,
        t=spec.params.t,
        keys=spec.n_keys,
        trials=trials,
        failures=failures,
        miscorrections=sum(item[1] for item in items),
        rate=failures / trials if trials else 0.0,
        failing=[failure for item in items for failure in item[2]],
    )
