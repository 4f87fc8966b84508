"""Plain-text reports: one ``key: value`` line per field, keys sorted."""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable


def fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, (list, tuple)):
        return " ".join(fmt_value(x) for x in v)
    if isinstance(v, dict):
        return " ".join(f"{k}:{fmt_value(v[k])}" for k in sorted(v))
    return str(v)


def format_report(fields: dict) -> str:
    return "".join(f"{k}: {fmt_value(fields[k])}\n" for k in sorted(fields))


def histogram(values: Iterable[int]) -> dict[int, int]:
    return dict(sorted(Counter(values).items()))


def run_trials(fn: Callable, args: list, jobs: int = 1) -> list:
    """Map ``fn`` over ``args`` preserving order; parallel when ``jobs > 1``."""
    if jobs <= 1 or len(args) < 2:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, args, chunksize=max(1, len(args) // (4 * jobs))))
