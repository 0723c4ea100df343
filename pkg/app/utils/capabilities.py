from typing import Optional

from app.errors import ParameterError
from app.models import BikeParams

# d_total is the row weight of the full H = [H0 | H1]; blocks carry half each.
CAPABILITIES = {
    "params": [
        {"name": "desk-557", "r": 557, "d": 15, "t": 18, "security": None},
        {"name": "desk-587", "r": 587, "d": 15, "t": 18, "security": None},
        {"name": "bike-l1", "r": 12323, "d_total": 142, "t": 134, "security": 128},
        {"name": "bike-l3", "r": 24659, "d_total": 206, "t": 99, "security": 192},
        {"name": "bike-l5", "r": 40973, "d_total": 274, "t": 264, "security": 256},
    ]
}


def preset_names():
    return [entry["name"] for entry in CAPABILITIES["params"]]


def get_params(name: str, d_override: Optional[int] = None) -> BikeParams:
    """Resolve a preset; full-size presets use d = d_total / 2 unless told otherwise."""
    for entry in CAPABILITIES["params"]:
        if entry["name"] != name:
            continue
        d = entry.get("d", entry.get("d_total", 0) // 2)
        if d_override is not None:
            d = d_override
        label = f"{entry['security']}-bit" if entry["security"] else name
        return BikeParams(r=entry["r"], d=d, t=entry["t"], security_label=label)
    raise ParameterError(f"Unknown parameter preset {name!r}; choose one of {preset_names()}")
