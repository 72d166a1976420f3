"""Gershgorin regions: classic disc unions and their reduction-improved versions."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .graph import WeightedDigraph, is_complete_structural_set, NotStructuralError
from .ratfunc import LAMBDA, poly_roots
from .reduce import reduce_once

__all__ = [
    "ClassicRegion",
    "ReducedRegion",
    "Raster",
    "classic_region",
    "reduced_region",
    "radius_bound",
    "raster_region",
]

SLACK = 1e-12


def _as_matrix(A) -> np.ndarray:
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("Gershgorin regions need a square matrix")
    return M


@dataclass(frozen=True)
class ClassicRegion:
    """Union of discs ``|z - A_ii| <= sum_{j != i} |A_ij|``."""

    centers: np.ndarray
    radii: np.ndarray
    kind: str = "classic"

    def contains(self, z, slack: float = SLACK):
        z = np.asarray(z, dtype=complex)
        if not len(self.centers):
            return np.zeros(z.shape, dtype=bool)
        d = np.abs(z[..., None] - self.centers)
        return np.any(d <= self.radii + slack, axis=-1)

    def radius_bound(self, tol: float = 0.0) -> float:
        return float(np.max(np.abs(self.centers) + self.radii)) if len(self.centers) else 0.0


def classic_region(A) -> ClassicRegion:
    M = _as_matrix(A)
    absM = np.abs(M)
    radii = absM.sum(axis=1) - np.abs(np.diag(M))
    return ClassicRegion(np.diag(M).copy(), radii)


@dataclass(frozen=True)
class ReducedRegion:
    """``{z != 0 : |z - A_S(z)_ii| <= sum_{j != i} |A_S(z)_ij| for some i}``.

    ``reduced`` is the exact isospectral reduction of the graph of ``A``;
    ``outer`` is the classic region of ``A``, which contains this one.
    """

    reduced: WeightedDigraph
    outer: ClassicRegion
    kind: str = "reduced"

    def __post_init__(self):
        R = self.reduced
        evals = [[R.edges[(u, v)].evaluator() if (u, v) in R.edges else None
                  for v in R.vertices] for u in R.vertices]
        object.__setattr__(self, "_evals", evals)
        # a row with no off-diagonal entries contributes only the roots of
        # lambda - A_S(lambda)_ii, which sampling cannot find
        points = []
        for i, row in enumerate(evals):
            if all(f is None for j, f in enumerate(row) if j != i):
                v = R.vertices[i]
                g = LAMBDA - R.loop_weight(v)
                points.extend(r for r in poly_roots(g.num).values() if r != 0)
        object.__setattr__(self, "isolated_points", np.array(points, dtype=complex))

    def contains(self, z, slack: float = SLACK):
        scalar = np.isscalar(z)
        z = np.asarray(z, dtype=complex)
        if scalar and z == 0:
            raise ValueError("the reduced region only localises nonzero eigenvalues; z = 0 rejected")
        out = np.zeros(z.shape, dtype=bool)
        nz = z != 0
        w = z[nz]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            hit = np.zeros(w.shape, dtype=bool)
            for i, row in enumerate(self._evals):
                diag = row[i](w) if row[i] is not None else 0
                off = np.zeros(w.shape)
                for j, f in enumerate(row):
                    if j != i and f is not None:
                        off = off + np.abs(f(w))
                hit |= np.abs(w - diag) <= off + slack
        out[nz] = hit
        return bool(out) if scalar else out

    def radius_bound(self, tol: float = 1e-6) -> float:
        return radius_bound(self, tol)


def reduced_region(A, S, labels=None) -> ReducedRegion:
    """Reduced region of ``A`` over a complete structural set ``S`` of its graph.

    Numeric entries are converted exactly, so ``A_S`` is the exact reduction.
    """
    M = np.asarray(A)
    G = WeightedDigraph.from_matrix(M.tolist(), labels)
    check = is_complete_structural_set(G, S)
    if not check:
        raise NotStructuralError(f"not a complete structural set: {check.reason} {check.witness}",
                                 check.witness)
    return ReducedRegion(reduce_once(G, S), classic_region(M))


def radius_bound(region, tol: float = 1e-6, n_angles: int = 1440, n_radii: int = 4000) -> float:
    """Upper estimate of ``sup{|z| : z in region}``.

    Classic regions are exact.  Reduced regions are scanned on circles
    ``|z| = r`` (angular samples, including the positive real axis) from the
    outer classic bound downward; the first hit is refined by bisection and
    the outer end of the final bracket is returned.  Rows of the reduced
    matrix without off-diagonal entries are handled exactly through their
    isolated points.
    """
    if isinstance(region, ClassicRegion):
        return region.radius_bound()
    isolated = float(np.abs(region.isolated_points).max()) if len(region.isolated_points) else 0.0
    return max(isolated, _scan_radius(region, tol, n_angles, n_radii))


def _scan_radius(region, tol, n_angles, n_radii) -> float:
    theta = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
    ring = np.exp(1j * theta)

    def hits(r):
        return r > 0 and bool(np.any(region.contains(r * ring)))

    r_hi = region.outer.radius_bound()
    if r_hi <= 0:
        return 0.0
    if hits(r_hi):
        return r_hi
    radii = np.linspace(r_hi, 0.0, n_radii + 1)[1:-1]
    outside, inside = r_hi, None
    for r in radii:
        if hits(r):
            inside = r
            break
        outside = r
    if inside is None:
        return 0.0
    while outside - inside > tol:
        mid = 0.5 * (inside + outside)
        if hits(mid):
            inside = mid
        else:
            outside = mid
    return float(outside)


@dataclass
class Raster:
    re: np.ndarray
    im: np.ndarray
    inside: np.ndarray

    def unit_circle(self) -> np.ndarray:
        """Cells the unit circle passes through (within half a cell diagonal)."""
        dx = (self.re[-1] - self.re[0]) / max(len(self.re) - 1, 1)
        dy = (self.im[-1] - self.im[0]) / max(len(self.im) - 1, 1)
        Z = self.re[None, :] + 1j * self.im[:, None]
        return np.abs(np.abs(Z) - 1) <= 0.5 * np.hypot(dx, dy)

    def to_csv(self, stream=None, unit_circle: bool = False) -> str | None:
        buf = io.StringIO() if stream is None else stream
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "inside"] + (["unit_circle"] if unit_circle else []))
        circle = self.unit_circle() if unit_circle else None
        for r, y in enumerate(self.im):
            for c, x in enumerate(self.re):
                row = [repr(float(x)), repr(float(y)), int(self.inside[r, c])]
                if circle is not None:
                    row.append(int(circle[r, c]))
                w.writerow(row)
        return buf.getvalue() if stream is None else None


def raster_region(region, window=(-2.0, 2.0, -2.0, 2.0), resolution: int = 400) -> Raster:
    """Boolean occupancy grid; rows follow the imaginary axis, columns the real axis."""
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    x0, x1, y0, y1 = map(float, window)
    if not (x0 < x1 and y0 < y1):
        raise ValueError("window must satisfy x0 < x1 and y0 < y1")
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    Z = xs[None, :] + 1j * ys[:, None]
    return Raster(xs, ys, np.asarray(region.contains(Z), dtype=bool))
