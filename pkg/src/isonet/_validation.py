"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import math
from numbers import Real

import numpy as np

from .graph import WeightedDigraph


def check_graph(G, name: str = "G") -> WeightedDigraph:
    if not isinstance(G, WeightedDigraph):
        raise TypeError(f"{name} must be a WeightedDigraph, got {type(G).__name__}")
    return G


def split_list(value) -> list[str]:
    """``"v1,v3"`` or an iterable of labels -> list of labels."""
    if value is None:
        return []
    if isinstance(value, str):
        return [s.strip() for s in value.split(",") if s.strip()]
    return [str(v) for v in value]


def check_vertex_set(G: WeightedDigraph, S, *, allow_empty: bool = False) -> list[str]:
    labels = split_list(S)
    if len(set(labels)) != len(labels):
        raise ValueError(f"repeated vertices in {labels}")
    if not labels and not allow_empty:
        raise ValueError("vertex set must be nonempty")
    return G.subset(labels)


def check_floats(value, n: int | None = None, name: str = "value") -> list[float]:
    """Comma-separated numbers (or a sequence) -> list of finite floats."""
    items = value.split(",") if isinstance(value, str) else list(value)
    try:
        out = [float(v) for v in items]
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a list of numbers, got {value!r}") from None
    if not all(math.isfinite(v) for v in out):
        raise ValueError(f"{name} entries must be finite")
    if n is not None and len(out) != n:
        raise ValueError(f"{name} needs {n} numbers, got {len(out)}")
    return out


def check_window(window) -> tuple[float, float, float, float]:
    x0, x1, y0, y1 = check_floats(window, 4, "window")
    if not (x0 < x1 and y0 < y1):
        raise ValueError("window must satisfy x0 < x1 and y0 < y1")
    return x0, x1, y0, y1


def check_square_matrix(A, name: str = "A") -> np.ndarray:
    M = np.asarray(A)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {M.shape}")
    if not np.issubdtype(M.dtype, np.number):
        raise ValueError(f"{name} must be numeric")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} entries must be finite")
    return M


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_alpha(alpha, alpha_range=None) -> float | None:
    if alpha is None:
        return None
    if not isinstance(alpha, Real) or not math.isfinite(alpha):
        raise ValueError(f"alpha must be a finite number, got {alpha!r}")
    if alpha_range is not None:
        lo, hi = alpha_range
        if not lo <= alpha <= hi:
            raise ValueError(f"alpha = {alpha} lies outside the declared range [{lo}, {hi}]")
    return float(alpha)
