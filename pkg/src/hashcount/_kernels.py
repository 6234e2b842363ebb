"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``HASHCOUNT_IMPL=python`` or ``=native`` to force a side; the default
``auto`` prefers the compiled kernels and silently falls back.  Both sides
produce identical results, so selection never changes any output, only speed.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

from . import _purepy

_choice = os.environ.get("HASHCOUNT_IMPL", "auto").strip().lower() or "auto"
if _choice not in ("auto", "native", "python"):
    raise ValueError(f"HASHCOUNT_IMPL must be auto, native, or python, got {_choice!r}")

native = None
if _choice in ("auto", "native"):
    try:
        from . import _rexcore as native  # type: ignore[no-redef]
    except ImportError:
        native = None
    if native is None and _choice == "native":
        raise ImportError("HASHCOUNT_IMPL=native but the compiled kernel is unavailable")

IMPL_NAME = native.IMPL_NAME if native is not None else _purepy.IMPL_NAME

_INT64_SAFE = 1 << 62


def available_impls() -> tuple:
    return ("native", "python") if native is not None else ("python",)


def _module(impl: Optional[str]):
    if impl in (None, "auto"):
        return native if native is not None else _purepy
    if impl == "python":
        return _purepy
    if impl == "native":
        if native is None:
            raise ValueError("native kernel requested but unavailable")
        return native
    raise ValueError(f"unknown impl {impl!r}")


def bsat_from_base(ctx, pb, p: int, threshold: int, state: int, impl: Optional[str] = None):
    mod = _module(impl)
    if mod is not _purepy:
        fits = (
            ctx.kernel_ok
            and pb.kernel_ok
            and ctx.q - p <= 62
            and threshold < _INT64_SAFE
        )
        if not fits:
            mod = _purepy
    return mod.bsat_from_base(ctx, pb, p, threshold, state)


def ge_bsat_cells(n, masks, pats, rows, rhs, stop_at, impl: Optional[str] = None):
    mod = _module(impl)
    if mod is not _purepy and (n > 64 or stop_at >= _INT64_SAFE):
        mod = _purepy
    if mod is _purepy:
        return _purepy.ge_bsat_cells(n, list(masks), list(pats), list(rows), list(rhs), stop_at)
    return mod.ge_bsat_cells(
        n,
        np.array(masks, dtype=np.uint64),
        np.array(pats, dtype=np.uint64),
        np.array(rows, dtype=np.uint64),
        np.array(rhs, dtype=np.uint8),
        stop_at,
    )


def exact_count_small(n, masks, pats, impl: Optional[str] = None):
    mod = _module(impl)
    if mod is not _purepy and n <= 62:
        return mod.exact_count_small(
            n, np.array(masks, dtype=np.uint64), np.array(pats, dtype=np.uint64)
        )
    return _purepy.exact_count_small(n, masks, pats)
