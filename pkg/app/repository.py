from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Tuple, Union

import orjson
from pydantic import ValidationError

from app.config import logger, settings
from app.errors import InvariantViolation, MdpcError, ParseError
from app.gf2ring import SparsePoly, from_hex, to_hex
from app.keys import QcKey
from app.models import BikeParams, KeyRecord

PathLike = Union[str, Path]


def _block(r: int, value: Union[List[int], str], lax: bool) -> SparsePoly:
    if isinstance(value, str):
        return from_hex(r, value)
    if lax:
        value = sorted(value)
    return SparsePoly(r, tuple(value))


class KeyRepository:
    """Key files hold one JSON object per line: {"r", "d", "h0", "h1", ...}.

    h0 and h1 are sorted exponent lists, or little-endian hex of the packed polynomial.
    """

    @staticmethod
    def iter_lines(path: PathLike) -> Iterator[Tuple[int, bytes]]:
        with open(path, "rb") as handle:
            for number, line in enumerate(handle, start=1):
                line = line.strip()
                if line:
                    yield number, line

    @staticmethod
    def read(path: PathLike) -> List[Tuple[int, KeyRecord]]:
        records, bad = [], []
        for number, line in KeyRepository.iter_lines(path):
            try:
                records.append((number, KeyRecord.model_validate(orjson.loads(line))))
            except (orjson.JSONDecodeError, ValidationError) as exc:
                logger.warning(f"{path}:{number}: {exc}")
                bad.append(number)
        if bad:
            raise ParseError("malformed key record", path=str(path), lines=bad)
        return records

    @staticmethod
    def to_key(record: KeyRecord, t: Optional[int] = None, lax: bool = False) -> QcKey:
        try:
            params = BikeParams(r=record.r, d=record.d, t=t or settings.get("DEFAULT_T", 18))
        except ValidationError as exc:
            raise InvariantViolation(f"r={record.r}, d={record.d}: {exc.errors()[0]['msg']}") from exc
        h0 = _block(record.r, record.h0, lax)
        h1 = _block(record.r, record.h1, lax)
        return QcKey(params, h0, h1, checked=not lax)

    @staticmethod
    def load_keys(path: PathLike, lax: bool = False, t: Optional[int] = None) -> List[QcKey]:
        keys, bad = [], []
        for number, record in KeyRepository.read(path):
            try:
                keys.append(KeyRepository.to_key(record, t=t, lax=lax))
            except MdpcError as exc:
                logger.warning(f"{path}:{number}: {exc}")
                bad.append(number)
        if bad:
            raise InvariantViolation("key violates the block invariants", path=str(path), lines=bad)
        logger.info(f"Loaded {len(keys)} keys from {path}")
        return keys

    @staticmethod
    def from_key(key: QcKey, seed: Optional[int] = None, hex_form: bool = False, **extra) -> KeyRecord:
        if hex_form:
            h0, h1 = to_hex(key.h0), to_hex(key.h1)
        else:
            h0, h1 = list(key.h0.support), list(key.h1.support)
        return KeyRecord(r=key.params.r, d=key.params.d, h0=h0, h1=h1, seed=seed, **extra)

    @staticmethod
    def dumps(record: KeyRecord) -> bytes:
        return orjson.dumps(record.model_dump(exclude_none=True))

    @staticmethod
    def write(path: PathLike, records: Iterable[KeyRecord]) -> int:
        written = 0
        with open(path, "wb") as handle:
            for record in records:
                handle.write(KeyRepository.dumps(record) + b"\n")
                written += 1
        logger.info(f"Wrote {written} key records to {path}")
        return written

    @staticmethod
    def append(path: PathLike, record: KeyRecord) -> None:
        with open(path, "ab") as handle:
            handle.write(KeyRepository.dumps(record) + b"\n")
