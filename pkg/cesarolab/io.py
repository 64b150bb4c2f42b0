import csv
import json
import logging
import os
from enum import Enum
from typing import Any, Iterable, TextIO, Union

import numpy as np

from cesarolab.series import Evaluable, TruncatedSeries
from cesarolab.testfns import CompositeRadial, custom, f_a, f_k, h_a, log_kernel

logger = logging.getLogger(__name__)


class FunctionKind(Enum):
    """FunctionKind is the `kind` tag of a function-spec JSON object.

    SERIES: {"kind": "series", "dim": n, "cap": N, "terms": [[[i1, ...], re, im], ...]}.
    LOG_KERNEL, HA, FA, FK: {"kind": ..., "a": [[re, im], ...]}; log_kernel also accepts
    "closed": true for an anchor on the unit sphere, f_k accepts "literal": true.
    CUSTOM: {"kind": "custom", "a": [...], "coeffs": [[re, im], ...]}."""

    SERIES = "series"
    LOG_KERNEL = "log_kernel"
    HA = "h_a"
    FA = "f_a"
    FK = "f_k"
    CUSTOM = "custom"


class OutputFormat(Enum):
    """OutputFormat of CLI tables.

    CSV: one row per grid point, nested values JSON-encoded.
    JSON: the full report envelope."""

    CSV = "csv"
    JSON = "json"


def encode_complex(c: complex) -> list[float]:
    c = complex(c)
    return [c.real, c.imag]


def decode_complex(value: Any) -> complex:
    """Accept a plain number or a [re, im] pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"Complex numbers are [re, im] pairs, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)):
        return complex(value)
    raise ValueError(f"Not a complex number: {value!r}")


def _anchor(spec: dict) -> np.ndarray:
    if "a" not in spec:
        raise ValueError(f'Function spec of kind "{spec.get("kind")}" needs an anchor "a"')
    raw = spec["a"]
    if not isinstance(raw, list) or len(raw) == 0:
        raise ValueError(f"Anchor must be a nonempty list of [re, im] pairs, got {raw!r}")
    return np.array([decode_complex(x) for x in raw], dtype=complex)


def parse_function_spec(spec: Any) -> Evaluable:
    """Build a series or a composite test function from its JSON object.

    Composites may carry "radial_order": m, the number of radial derivatives applied.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError(f"Function spec must be an object with a kind, got {spec!r}")
    try:
        kind = FunctionKind(spec["kind"])
    except ValueError:
        raise ValueError(f"Unsupported function kind: {spec['kind']}")
    if kind == FunctionKind.SERIES:
        return TruncatedSeries.from_dict(spec)
    order = _radial_order(spec)
    a = _anchor(spec)
    F = _composite(kind, a, spec)
    return F.derived(order) if order else F


def _radial_order(spec: dict) -> int:
    raw = spec.get("radial_order", 0)
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < 0:
        raise ValueError(f"radial_order must be a nonnegative integer, got {raw!r}")
    return raw


def _composite(kind: FunctionKind, a: np.ndarray, spec: dict) -> CompositeRadial:
    closed = bool(spec.get("closed", False))
    if kind == FunctionKind.LOG_KERNEL:
        return log_kernel(a, closed=closed)
    if kind == FunctionKind.HA:
        return h_a(a)
    if kind == FunctionKind.FA:
        return f_a(a)
    if kind == FunctionKind.FK:
        return f_k(a, literal_prefactor=bool(spec.get("literal", False)))
    if "coeffs" not in spec:
        raise ValueError('Custom function spec needs "coeffs"')
    return custom(a, [decode_complex(c) for c in spec["coeffs"]], closed=closed)


def load_function_spec(text: str) -> Evaluable:
    """Parse inline JSON, or read JSON from a file path (optionally prefixed with @)."""
    source = text.strip()
    path = source[1:] if source.startswith("@") else source
    if not source.startswith("{") and os.path.exists(path):
        logger.debug(f"Reading function spec from {path}")
        with open(path, "r") as f:
            return parse_function_spec(json.load(f))
    return parse_function_spec(json.loads(source))


def function_to_dict(F: Union[TruncatedSeries, CompositeRadial]) -> dict:
    if not isinstance(F, (TruncatedSeries, CompositeRadial)):
        raise TypeError(f"No function spec for {type(F).__name__}")
    return F.to_dict()


def describe(F: Evaluable) -> str:
    if isinstance(F, TruncatedSeries):
        return f"series(dim={F.dim}, degree={F.degree}, cap={F.cap})"
    return getattr(F, "label", type(F).__name__)


def function_summary(F: Evaluable) -> dict:
    """Kind, display label and, for series and composites, the function spec of F as recorded in reports."""
    summary: dict = {"kind": profile_kind_of(F), "label": describe(F)}
    if isinstance(F, (TruncatedSeries, CompositeRadial)):
        summary["spec"] = function_to_dict(F)
    return summary


def is_function_spec(text: str) -> bool:
    """True for inline JSON or an existing file, false for a preset name."""
    source = text.strip()
    return source.startswith("{") or source.startswith("@") or os.path.exists(source)


def dumps_json(obj: Any) -> str:
    """Deterministic JSON: fixed key order as built, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _cell(value: Any) -> Any:
    if isinstance(value, (list, dict, tuple)):
        return json.dumps(value)
    if isinstance(value, complex):
        return json.dumps(encode_complex(value))
    if isinstance(value, Enum):
        return value.value
    return value


def write_rows_csv(rows: Iterable[dict], out: TextIO):
    """Write dict rows as CSV; the header is the union of keys in first-seen order."""
    rows = list(rows)
    header: list[str] = []
    for row in rows:
        for k in row:
            if k not in header:
                header.append(k)
    writer = csv.DictWriter(out, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})


def profile_kind_of(F: Evaluable) -> str:
    if isinstance(F, CompositeRadial):
        return F.kind.value
    if isinstance(F, TruncatedSeries):
        return FunctionKind.SERIES.value
    return type(F).__name__


__all__ = [
    "FunctionKind",
    "OutputFormat",
    "decode_complex",
    "describe",
    "dumps_json",
    "encode_complex",
    "function_summary",
    "function_to_dict",
    "is_function_spec",
    "load_function_spec",
    "parse_function_spec",
    "profile_kind_of",
    "write_rows_csv",
]
