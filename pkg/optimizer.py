"""
Derivative-free search over Eve's polarization angles.

A deterministic grid scan over [0, pi) x [0, pi) locates the basin, then a
Nelder-Mead simplex (scipy.optimize) polishes the minimum. Both integrands
are pi-periodic in each angle, so the half-open square covers every basin
exactly once.

Grid nodes sit on the lower-left corner of each cell, phi_k = k * pi / n, so a
grid of resolution 2n contains every node of resolution n.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from adversary import intercept_resend_integrand, w_eve_integrand, wtilde_eve_integrand
from validators import (
    NumericalError,
    ValidationError,
    validate_angle,
    validate_count,
    validate_resolution,
    validate_tolerance,
    validate_workers,
)

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 720
DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITER = 4000
DEFAULT_STEP = 0.05

OBJECTIVES = {
    "w": w_eve_integrand,
    "wtilde": wtilde_eve_integrand,
    "ir": intercept_resend_integrand,
}


def get_objective(name) -> Callable:
    try:
        return OBJECTIVES[str(name).strip().lower()]
    except KeyError:
        raise ValidationError(f"objective must be one of: {', '.join(OBJECTIVES)}", "objective")


# ============== RESULT TYPES ==============

@dataclass(frozen=True)
class ScanGrid:
    resolution: int
    nodes: np.ndarray        # angle of each row/column, length resolution
    values: np.ndarray       # values[i, j] = objective(nodes[i], nodes[j])
    argmin_index: tuple
    min_value: float

    @property
    def argmin(self) -> tuple:
        i, j = self.argmin_index
        return float(self.nodes[i]), float(self.nodes[j])

    def iter_rows(self):
        """(phi_a, phi_b, value) triples in row-major order."""
        for i, phi_a in enumerate(self.nodes):
            row = self.values[i]
            for j, phi_b in enumerate(self.nodes):
                yield float(phi_a), float(phi_b), float(row[j])

    def write_csv(self, handle):
        """Write `phi_a,phi_b,value` rows, 17 significant digits, to an open text file."""
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["phi_a", "phi_b", "value"])
        for phi_a, phi_b, value in self.iter_rows():
            writer.writerow([f"{phi_a:.17g}", f"{phi_b:.17g}", f"{value:.17g}"])

    def summary(self) -> dict:
        phi_a, phi_b = self.argmin
        return {
            "resolution": self.resolution,
            "phi_a": phi_a,
            "phi_b": phi_b,
            "min_value": self.min_value,
        }


@dataclass(frozen=True)
class OptimizationResult:
    argmin: tuple
    min_value: float
    iterations: int
    converged: bool
    evaluations: int = 0
    start: Optional[tuple] = None
    start_value: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "phi_a": self.argmin[0],
            "phi_b": self.argmin[1],
            "min_value": self.min_value,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "start_phi_a": None if self.start is None else self.start[0],
            "start_phi_b": None if self.start is None else self.start[1],
            "start_value": self.start_value,
        }


# ============== GRID SCAN ==============

def grid_nodes(resolution) -> np.ndarray:
    resolution = validate_resolution(resolution)
    return np.arange(resolution, dtype=float) * (math.pi / resolution)


def _evaluate_rows(objective, nodes, start, stop):
    phi_a, phi_b = np.meshgrid(nodes[start:stop], nodes, indexing="ij")
    block = np.asarray(objective(phi_a, phi_b), dtype=float)
    if block.shape != phi_a.shape:
        block = np.broadcast_to(block, phi_a.shape).astype(float)
    return block


def grid_scan(objective: Callable, resolution=DEFAULT_RESOLUTION, workers=1) -> ScanGrid:
    """
    Evaluate objective(phi_a, phi_b) on the resolution x resolution grid.

    Points are the lower-left cell corners k*pi/resolution, not the cell
    centres: the grid at 2N then contains every point of the grid at N, so
    doubling the resolution never raises the minimum.

    Rows are evaluated in blocks, optionally on several threads; the argmin is
    reduced in row-major order, so the first of several equal minima wins and
    the result does not depend on the worker count.

    Raises: NumericalError at the first (row-major) non-finite value
    """
    resolution = validate_resolution(resolution)
    workers = validate_workers(workers)
    nodes = grid_nodes(resolution)

    bounds = np.linspace(0, resolution, min(workers, resolution) + 1).astype(int)
    spans = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

    if len(spans) == 1:
        blocks = [_evaluate_rows(objective, nodes, *spans[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            blocks = list(pool.map(lambda s: _evaluate_rows(objective, nodes, *s), spans))
    values = np.vstack(blocks)

    bad = ~np.isfinite(values)
    if bad.any():
        i, j = np.unravel_index(int(np.argmax(bad)), values.shape)
        point = (float(nodes[i]), float(nodes[j]))
        raise NumericalError(f"Objective is not finite at phi_a={point[0]!r}, phi_b={point[1]!r}", point)

    flat = int(np.argmin(values))
    i, j = np.unravel_index(flat, values.shape)
    values.setflags(write=False)

    grid = ScanGrid(
        resolution=resolution,
        nodes=nodes,
        values=values,
        argmin_index=(int(i), int(j)),
        min_value=float(values[i, j]),
    )
    logger.debug("grid scan %dx%d: min %r at %r", resolution, resolution, grid.min_value, grid.argmin)
    return grid


# ============== LOCAL REFINEMENT ==============

def _scalar(objective, phi_a, phi_b) -> float:
    value = float(objective(phi_a, phi_b))
    if not math.isfinite(value):
        raise NumericalError(f"Objective is not finite at phi_a={phi_a!r}, phi_b={phi_b!r}", (phi_a, phi_b))
    return value


def refine(objective: Callable, start, tolerance=DEFAULT_TOLERANCE,
           max_iter=DEFAULT_MAX_ITER, step=DEFAULT_STEP, wrap=False) -> OptimizationResult:
    """
    Nelder-Mead descent from `start`.

    Converged means the simplex diameter and the spread of its values both fell
    below `tolerance` before `max_iter` iterations. The returned value never
    exceeds objective(start). With wrap=True the minimizer is reported in
    [0, pi) x [0, pi).
    """
    tolerance = validate_tolerance(tolerance)
    max_iter = validate_count(max_iter, "max_iter", minimum=1)
    step = validate_tolerance(step, "step")
    try:
        x0 = np.array([validate_angle(start[0], "start phi_a"), validate_angle(start[1], "start phi_b")])
    except (TypeError, IndexError):
        raise ValidationError("start must be a pair of angles", "start")

    start_value = _scalar(objective, x0[0], x0[1])
    simplex = np.array([x0, x0 + [step, 0.0], x0 + [0.0, step]])

    res = optimize.minimize(
        lambda x: _scalar(objective, x[0], x[1]),
        x0,
        method="Nelder-Mead",
        options={
            "xatol": tolerance,
            "fatol": tolerance,
            "maxiter": max_iter,
            "maxfev": 4 * max_iter + 10,
            "initial_simplex": simplex,
        },
    )

    best = np.asarray(res.x, dtype=float)
    if wrap:
        best = np.mod(best, math.pi)
    value = _scalar(objective, best[0], best[1])
    if value > start_value:
        best, value = x0, start_value

    result = OptimizationResult(
        argmin=(float(best[0]), float(best[1])),
        min_value=value,
        iterations=int(res.nit),
        converged=bool(res.status == 0),
        evaluations=int(res.nfev) + 2,
        start=(float(x0[0]), float(x0[1])),
        start_value=start_value,
    )
    if not result.converged:
        logger.warning("refine stopped without converging after %d iterations: %s", res.nit, res.message)
    logger.debug("refine from %r: %r after %d iterations", result.start, value, result.iterations)
    return result


# ============== SEARCHES ==============

def search(objective: Callable, resolution=DEFAULT_RESOLUTION, tolerance=DEFAULT_TOLERANCE, workers=1) -> OptimizationResult:
    """Grid scan followed by simplex refinement from the grid minimum."""
    grid = grid_scan(objective, resolution, workers=workers)
    result = refine(objective, grid.argmin, tolerance, wrap=True)
    logger.info("search: grid min %r -> refined %r", grid.min_value, result.min_value)
    return result


def find_min_wtilde_eve(resolution=DEFAULT_RESOLUTION, tolerance=DEFAULT_TOLERANCE, workers=1) -> OptimizationResult:
    return search(wtilde_eve_integrand, resolution, tolerance, workers)


def find_min_w_eve(resolution=DEFAULT_RESOLUTION, tolerance=DEFAULT_TOLERANCE, workers=1) -> OptimizationResult:
    return search(w_eve_integrand, resolution, tolerance, workers)


def find_min_intercept_resend(resolution=DEFAULT_RESOLUTION, tolerance=DEFAULT_TOLERANCE, workers=1) -> OptimizationResult:
    return search(intercept_resend_integrand, resolution, tolerance, workers)


FINDERS = {
    "w": find_min_w_eve,
    "wtilde": find_min_wtilde_eve,
    "ir": find_min_intercept_resend,
}
