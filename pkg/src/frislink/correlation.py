"""Planar surface geometry and spatial correlation of its elements.

Elements sit on a rectangular grid in the x-z plane, indexed row-major
from the origin: index i maps to column i % m_x (x axis) and row
i // m_x (z axis). Correlation between two elements depends only on
their Euclidean separation through an isotropic scattering kernel.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .special import bessel_j0_cylindrical, bessel_j0_spherical

__all__ = [
    "SurfaceGeometry",
    "CorrelationSqrt",
    "element_position",
    "pairwise_distance",
    "jakes_coefficient",
    "build_correlation_matrix",
    "psd_sqrt",
    "principal_submatrix",
    "uniform_grid_selection",
    "export_correlation_csv",
    "KERNELS",
]

KERNELS = ("spherical", "cylindrical")

# Relative eigenvalue floor used when factoring a numerically singular
# correlation matrix; anything below tol * max_eigenvalue is treated as zero.
_EIG_CLAMP_REL = 1e-12


@dataclass(frozen=True)
class SurfaceGeometry:
    """Rectangular element grid spanning an aperture of w_x x w_z wavelengths.

    m_x, m_z   elements per axis
    w_x, w_z   aperture extent along each axis, in carrier wavelengths
    wavelength carrier wavelength in metres
    """

    m_x: int
    m_z: int
    w_x: float
    w_z: float
    wavelength: float

    def __post_init__(self):
        for name in ("m_x", "m_z"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ValueError(f"geometry.{name}: must be a positive integer, got {v!r}")
        for name in ("w_x", "w_z", "wavelength"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"geometry.{name}: must be a positive finite number, got {v!r}")

    @property
    def m(self) -> int:
        """Total element count."""
        return self.m_x * self.m_z

    @property
    def d_x(self) -> float:
        """Element pitch along x, in metres."""
        return self.w_x * self.wavelength / self.m_x

    @property
    def d_z(self) -> float:
        """Element pitch along z, in metres."""
        return self.w_z * self.wavelength / self.m_z


def element_position(index: int, geom: SurfaceGeometry) -> tuple[float, float]:
    """(x, z) position in metres of the element at a row-major index."""
    if not 0 <= index < geom.m:
        raise ValueError(f"element index {index} out of range [0, {geom.m})")
    col = index % geom.m_x
    row = index // geom.m_x
    return col * geom.d_x, row * geom.d_z


def pairwise_distance(i: int, j: int, geom: SurfaceGeometry) -> float:
    """Euclidean separation in metres between elements i and j."""
    xi, zi = element_position(i, geom)
    xj, zj = element_position(j, geom)
    return math.hypot(xi - xj, zi - zj)


def jakes_coefficient(distance: float, wavelength: float, kernel: str = "spherical") -> float:
    """Spatial correlation of two elements a given distance apart.

    Isotropic scattering in 3-D gives sin(u)/u and in the azimuth plane
    J0(u), with u = 2 pi d / lambda.
    """
    if distance < 0:
        raise ValueError(f"distance must be nonnegative, got {distance!r}")
    if wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength!r}")
    u = 2.0 * math.pi * distance / wavelength
    if kernel == "spherical":
        return bessel_j0_spherical(u)
    if kernel == "cylindrical":
        return bessel_j0_cylindrical(u)
    raise ValueError(f"kernel: expected one of {KERNELS}, got {kernel!r}")


def build_correlation_matrix(geom: SurfaceGeometry, kernel: str = "spherical") -> np.ndarray:
    """M x M element correlation matrix for the given grid and kernel.

    Entries depend only on the absolute index offsets per axis, so the
    kernel is evaluated once per unique offset pair and broadcast.
    """
    table = np.empty((geom.m_x, geom.m_z))
    for dx in range(geom.m_x):
        for dz in range(geom.m_z):
            d = math.hypot(dx * geom.d_x, dz * geom.d_z)
            table[dx, dz] = jakes_coefficient(d, geom.wavelength, kernel)
    idx = np.arange(geom.m)
    col = idx % geom.m_x
    row = idx // geom.m_x
    off_x = np.abs(col[:, None] - col[None, :])
    off_z = np.abs(row[:, None] - row[None, :])
    return table[off_x, off_z]


@dataclass(frozen=True, eq=False)
class CorrelationSqrt:
    """Symmetric PSD square root of a correlation matrix.

    matrix        the factor S with S @ S ~= J
    clamped_count eigenvalues treated as zero during factorization
    """

    matrix: np.ndarray
    clamped_count: int


def psd_sqrt(j: np.ndarray, clamp_tol: float | None = None) -> CorrelationSqrt:
    """Symmetric square root of a correlation matrix via eigendecomposition.

    Dense grids make J numerically rank-deficient; eigenvalues below
    clamp_tol * max_eigenvalue (default 1e-12 relative) are clamped to
    zero rather than propagated as tiny negatives.
    """
    j = np.asarray(j, dtype=float)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise ValueError(f"correlation matrix must be square, got shape {j.shape}")
    evals, evecs = np.linalg.eigh(j)
    peak = float(evals[-1])
    if peak <= 0:
        raise np.linalg.LinAlgError("correlation matrix has no positive eigenvalue")
    tol = (_EIG_CLAMP_REL if clamp_tol is None else clamp_tol) * peak
    low = evals < tol
    clamped = int(np.count_nonzero(low))
    if np.any(evals[low] < -1e-6 * peak):
        raise np.linalg.LinAlgError(
            "correlation matrix is indefinite beyond numerical tolerance"
        )
    safe = np.where(low, 0.0, evals)
    root = (evecs * np.sqrt(safe)) @ evecs.T
    root = 0.5 * (root + root.T)  # enforce exact symmetry
    return CorrelationSqrt(matrix=root, clamped_count=clamped)


def principal_submatrix(j: np.ndarray, selection: np.ndarray) -> np.ndarray:
    """Rows and columns of J restricted to the selected element indices."""
    sel = np.asarray(selection, dtype=int)
    return j[np.ix_(sel, sel)]


def uniform_grid_selection(geom: SurfaceGeometry, k_x: int, k_z: int) -> np.ndarray:
    """Indices of a k_x x k_z subgrid spread evenly over the full grid.

    Per axis the chosen columns/rows are round(linspace(0, m-1, k)); the
    result is sorted and duplicate-free by construction.
    """
    if not 1 <= k_x <= geom.m_x:
        raise ValueError(f"k_x must be in [1, {geom.m_x}], got {k_x}")
    if not 1 <= k_z <= geom.m_z:
        raise ValueError(f"k_z must be in [1, {geom.m_z}], got {k_z}")
    cols = np.unique(np.round(np.linspace(0, geom.m_x - 1, k_x)).astype(int))
    rows = np.unique(np.round(np.linspace(0, geom.m_z - 1, k_z)).astype(int))
    if len(cols) != k_x or len(rows) != k_z:
        raise ValueError(
            f"uniform {k_x}x{k_z} selection collides on a {geom.m_x}x{geom.m_z} grid"
        )
    idx = (rows[:, None] * geom.m_x + cols[None, :]).ravel()
    idx.sort()
    return idx


def export_correlation_csv(path, matrix: np.ndarray) -> None:
    """Write a correlation matrix to CSV with a dimension header comment."""
    matrix = np.asarray(matrix)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# dim={matrix.shape[0]}\n")
        writer = csv.writer(f, lineterminator="\n")
        for row in matrix:
            writer.writerow([format(v, ".17g") for v in row])
