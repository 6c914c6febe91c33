from __future__ import annotations
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .cauchy import cauchy_integral, cauchy_matrix, exterior_trace, kernel_matrix, theta_derivative
from .curves import curve_distance, curve_radius, distance_to_curve, sample_curve, winding_number
from .models import (
    BoundaryFunction, CurveSample, GraphReport, GrunskyBlocks, HTuple, KDecomposition,
    LaurentMap, TaylorMap, ValidationReport,
)
from .rational import RationalFunction
from .spaces import chord_arc_constant

logger = logging.getLogger(__name__)

THREADS_ENV = "GRUNSKYKIT_THREADS"
TAIL_TOLERANCE = 1e-6
BUDGET_DIVISOR = 64


class RiggingError(ValueError):
    pass


class OverlapError(RiggingError):
    pass


class UnderResolvedError(ValueError):
    pass


class BudgetError(ValueError):
    pass


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        logger.warning("invalid %s=%r, using 1 worker", THREADS_ENV, raw)
        return 1
    if value < 1:
        logger.warning("invalid %s=%r, using 1 worker", THREADS_ENV, raw)
        return 1
    return value


def check_budget(K: int, N: int) -> None:
    if K < 1:
        raise BudgetError(f"K must be positive, got {K}")
    if K > N // BUDGET_DIVISOR:
        raise BudgetError(f"K={K} exceeds the budget N/{BUDGET_DIVISOR}={N // BUDGET_DIVISOR} for N={N}")


@dataclass(frozen=True, eq=False)
class Rigging:
    """Interior caps f_0..f_{n-1} (TaylorMap) and the outer cap f_n (LaurentMap)."""
    maps: tuple
    sample_N: int = 1024

    def __post_init__(self):
        maps = tuple(self.maps)
        object.__setattr__(self, "maps", maps)
        if len(maps) < 2:
            raise RiggingError("a rigging needs at least one interior and one exterior map")
        for i, fmap in enumerate(maps[:-1]):
            if not isinstance(fmap, TaylorMap):
                raise RiggingError(f"map {i} must be a TaylorMap")
        if not isinstance(maps[-1], LaurentMap):
            raise RiggingError(f"map {len(maps) - 1} must be a LaurentMap")

    @property
    def n(self) -> int:
        return len(self.maps) - 1

    @cached_property
    def curves(self) -> tuple[CurveSample, ...]:
        return tuple(sample_curve(fmap, self.sample_N) for fmap in self.maps)

    @cached_property
    def boundary_curves(self) -> tuple[CurveSample, ...]:
        """Curves oriented as the boundary of the working domain."""
        return tuple(c.with_orientation("negative") if i < self.n else c for i, c in enumerate(self.curves))

    @cached_property
    def kernels(self) -> tuple[np.ndarray, ...]:
        return tuple(kernel_matrix(c) for c in self.curves)

    def to_raw(self) -> dict:
        return {"n": self.n, "sample_N": self.sample_N, "maps": [m.to_raw() for m in self.maps]}


def _pair_key(i: int, j: int) -> str:
    return f"{i}-{j}"


def validate_rigging(r: Rigging, raise_on_overlap: bool = True) -> ValidationReport:
    n = r.n
    if abs(r.maps[0].center) > 1e-12:
        raise RiggingError("f_0 must be centered at 0")
    centers = [m.center for m in r.maps[:-1]]
    for i in range(n):
        for j in range(i + 1, n):
            if centers[i] == centers[j]:
                raise RiggingError(f"caps {i} and {j} share the center {centers[i]}")
    curves = r.curves
    distances = {}
    windings = {}
    offending = None
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            distances[_pair_key(i, j)] = curve_distance(curves[i], curves[j])
    for i in range(n + 1):
        for j in range(n + 1):
            if i == j:
                continue
            # curve j must stay out of cap i
            w = winding_number(curves[i].points, curves[j].points)
            ok = bool(np.all(w == (1 if i == n else 0)))
            windings[f"{j}/{i}"] = ok
            if not ok and offending is None:
                offending = (min(i, j), max(i, j))
    min_distance = min(distances.values())
    if min_distance <= 0 and offending is None:
        offending = tuple(int(x) for x in min(distances, key=distances.get).split("-"))
    report = ValidationReport(
        valid=offending is None,
        min_distance=float(min_distance),
        pair_distances=distances,
        winding_checks=windings,
        chord_arc=tuple(chord_arc_constant(c) for c in curves),
    )
    logger.info("rigging n=%s valid=%s min_distance=%.6g", n, report.valid, min_distance)
    if offending is not None and raise_on_overlap:
        raise OverlapError(f"caps {offending[0]} and {offending[1]} overlap")
    return report


def split_H(t: HTuple) -> tuple[HTuple, HTuple]:
    """Minus and plus parts; the last slot swaps the roles of its Fourier halves."""
    n = t.n
    minus, plus = [], []
    for i, u in enumerate(t.components):
        negative = u.restrict("negative")
        nonnegative = u.restrict("nonnegative")
        if i < n:
            minus.append(negative)
            plus.append(nonnegative)
        else:
            minus.append(nonnegative)
            plus.append(negative)
    return HTuple(tuple(minus)), HTuple(tuple(plus))


def input_modes(n: int, K: int) -> tuple[np.ndarray, ...]:
    return tuple(-np.arange(1, K + 1) if i < n else np.arange(0, K + 1) for i in range(n + 1))


def output_modes(n: int, K: int) -> tuple[np.ndarray, ...]:
    return tuple(np.arange(0, K + 1) if j < n else -np.arange(1, K + 1) for j in range(n + 1))


def _slot_response(r: Rigging, i: int, values: np.ndarray) -> list[np.ndarray]:
    """Traces on every slot circle of the Cauchy integral over the i-th boundary curve."""
    out = []
    for j, target in enumerate(r.curves):
        if j == i:
            minus = exterior_trace(r.curves[i], values, theta_derivative(values), r.kernels[i])
            out.append(-minus if i < r.n else values + minus)
        else:
            out.append(cauchy_matrix(r.boundary_curves[i], target.points) @ values)
    return out


def _spectrum(values: np.ndarray) -> np.ndarray:
    return np.fft.fft(values, axis=0) / values.shape[0]


def _tail(spectrum: np.ndarray) -> np.ndarray:
    N = spectrum.shape[0]
    freq = np.abs(np.fft.fftfreq(N, 1.0 / N))
    return np.max(np.abs(spectrum[freq >= N // 4]), axis=0)


def assemble_grunsky_blocks(r: Rigging, K: int) -> GrunskyBlocks:
    """Block Grunsky operator; blocks[i][j] carries slot-i minus modes to slot-j plus modes."""
    N = r.sample_N
    check_budget(K, N)
    n = r.n
    ins = input_modes(n, K)
    outs = output_modes(n, K)
    theta = r.curves[0].theta
    # fill the cached geometry before worker threads read it
    _ = (r.kernels, r.boundary_curves)

    def column_batch(i: int) -> list[np.ndarray]:
        values = np.exp(1j * np.outer(theta, ins[i]))
        return [_spectrum(resp) for resp in _slot_response(r, i, values)]

    workers = max(1, min(worker_count(), n + 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        spectra = list(pool.map(column_batch, range(n + 1)))

    blocks = []
    identity_residual = 0.0
    stray = 0.0
    for i in range(n + 1):
        row = []
        for j in range(n + 1):
            spectrum = spectra[i][j]
            tail = _tail(spectrum)
            peak = np.max(np.abs(spectrum), axis=0)
            bad = np.flatnonzero(tail > TAIL_TOLERANCE * np.maximum(1.0, peak))
            if bad.size:
                k = int(ins[i][bad[0]])
                raise UnderResolvedError(
                    f"under-resolved column (i={i}, j={j}, k={k}): tail {tail[bad[0]]:.3e} at N={N}")
            row.append(spectrum[outs[j] % N, :])
            minus_part = spectrum[ins[j] % N, :]
            if i == j:
                identity_residual = max(identity_residual,
                                        float(np.max(np.abs(minus_part - np.eye(len(ins[i]))))))
            else:
                stray = max(stray, float(np.max(np.abs(minus_part))))
        blocks.append(tuple(row))
    logger.info("assembled blocks n=%s K=%s N=%s identity=%.3e stray=%.3e",
                n, K, N, identity_residual, stray)
    return GrunskyBlocks(n, K, tuple(blocks), ins, outs, identity_residual, stray)


def apply_Wf(r: Rigging, g: HTuple, K: int) -> HTuple:
    if g.n != r.n:
        raise RiggingError(f"tuple has {g.n + 1} slots, rigging has {r.n + 1}")
    N = r.sample_N
    totals = [np.zeros(N, dtype=complex) for _ in range(r.n + 1)]
    for i, u in enumerate(g.components):
        if not np.any(u.fourier):
            continue
        for j, resp in enumerate(_slot_response(r, i, u.sample_values(N))):
            totals[j] += resp
    return HTuple(tuple(BoundaryFunction.from_samples(None, t, K) for t in totals))


def wf_identity_report(r: Rigging, K: int, blocks: GrunskyBlocks | None = None) -> dict:
    blocks = blocks if blocks is not None else assemble_grunsky_blocks(r, K)
    return {
        "identity_residual": blocks.identity_residual,
        "stray_minus_mass": blocks.stray_minus_mass,
        "basis_vectors": int(sum(len(m) for m in blocks.input_modes)),
    }


def _check_probes(r: Rigging, probes: np.ndarray) -> None:
    n = r.n
    for i in range(n):
        if np.any(winding_number(r.curves[i].points, probes) != 0):
            raise RiggingError(f"probe inside cap {i}")
    if np.any(winding_number(r.curves[n].points, probes) != 1):
        raise RiggingError(f"probe inside cap {n}")


def cauchy_sum(r: Rigging, boundary: Sequence[BoundaryFunction], probes) -> np.ndarray:
    probes = np.atleast_1d(np.asarray(probes, dtype=complex))
    if len(boundary) != r.n + 1:
        raise RiggingError(f"expected {r.n + 1} boundary functions, got {len(boundary)}")
    _check_probes(r, probes)
    total = np.zeros(probes.shape, dtype=complex)
    for curve, u in zip(r.boundary_curves, boundary):
        total += cauchy_integral(curve, u, probes)
    return total


def interior_probes(r: Rigging, count: int = 50, seed: int = 0, margin: float = 0.1) -> np.ndarray:
    rng = np.random.default_rng(seed)
    outer = r.curves[r.n].points
    x0, x1 = outer.real.min(), outer.real.max()
    y0, y1 = outer.imag.min(), outer.imag.max()
    radii = [curve_radius(c) for c in r.curves]
    found: list[complex] = []
    for _ in range(200):
        z = rng.uniform(x0, x1, 4 * count) + 1j * rng.uniform(y0, y1, 4 * count)
        ok = winding_number(outer, z) == 1
        for i, curve in enumerate(r.curves):
            if i < r.n:
                ok &= winding_number(curve.points, z) == 0
            ok &= distance_to_curve(curve, z) >= margin * radii[i]
        found.extend(z[ok].tolist())
        if len(found) >= count:
            return np.array(found[:count], dtype=complex)
    raise RiggingError(f"could not place {count} probes with margin {margin}")


def apply_K(r: Rigging, h: RationalFunction, probes=None) -> KDecomposition:
    probes = interior_probes(r) if probes is None else np.atleast_1d(np.asarray(probes, dtype=complex))
    _check_probes(r, probes)
    components = np.array([
        cauchy_integral(r.boundary_curves[i], h.trace(r.curves[i]), probes) for i in range(r.n + 1)
    ])
    residual = float(np.max(np.abs(components.sum(axis=0) - h(probes))))
    logger.debug("apply_K probes=%s round-trip residual=%.3e", len(probes), residual)
    return KDecomposition(probes, components, residual)


def verify_graph(r: Rigging, h: Callable, K: int, blocks: GrunskyBlocks | None = None) -> GraphReport:
    blocks = blocks if blocks is not None else assemble_grunsky_blocks(r, K)
    N = r.sample_N
    n = r.n
    spectra = [_spectrum(np.asarray(h(c.points), dtype=complex)) for c in r.curves]
    freq = np.fft.fftfreq(N, 1.0 / N).astype(int)
    slot_residuals = []
    for j in range(n + 1):
        predicted = sum(blocks.block(i, j) @ spectra[i][blocks.input_modes[i] % N] for i in range(n + 1))
        actual = spectra[j][blocks.output_modes[j] % N]
        slot_residuals.append(float(np.max(np.abs(predicted - actual))))
    minus_tail = 0.0
    for i, spectrum in enumerate(spectra):
        beyond = (freq < -K) if i < n else (freq > K)
        if beyond.any():
            minus_tail = max(minus_tail, float(np.max(np.abs(spectrum[beyond]))))
    report = GraphReport(max(slot_residuals), tuple(slot_residuals), minus_tail)
    logger.info("graph residual=%.3e minus tail=%.3e", report.residual, minus_tail)
    return report


def _basis_norms(modes: np.ndarray) -> np.ndarray:
    return np.where(modes == 0, 1.0, np.sqrt(np.pi * np.abs(modes)))


def operator_matrix(blocks: GrunskyBlocks, orthonormal: bool = True) -> np.ndarray:
    rows = np.cumsum([0] + [len(m) for m in blocks.output_modes])
    cols = np.cumsum([0] + [len(m) for m in blocks.input_modes])
    M = np.zeros((rows[-1], cols[-1]), dtype=complex)
    for i in range(blocks.n + 1):
        for j in range(blocks.n + 1):
            B = blocks.block(i, j)
            if orthonormal:
                B = B * _basis_norms(blocks.output_modes[j])[:, None] / _basis_norms(blocks.input_modes[i])[None, :]
            M[rows[j]:rows[j + 1], cols[i]:cols[i + 1]] = B
    return M


def _mode_labels(mode_sets: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate([np.abs(m) for m in mode_sets])


def hilbert_schmidt_norm(blocks: GrunskyBlocks) -> float:
    return float(np.linalg.norm(operator_matrix(blocks)))


def hs_partial_sums(blocks: GrunskyBlocks) -> np.ndarray:
    """HS norm of the operator truncated to |mode| <= k, for k = 1..K."""
    M = np.abs(operator_matrix(blocks)) ** 2
    out_k = _mode_labels(blocks.output_modes)
    in_k = _mode_labels(blocks.input_modes)
    return np.sqrt(np.array([
        M[np.ix_(out_k <= k, in_k <= k)].sum() for k in range(1, blocks.K + 1)
    ]))


def singular_values(blocks: GrunskyBlocks) -> np.ndarray:
    return np.linalg.svd(operator_matrix(blocks), compute_uv=False)
