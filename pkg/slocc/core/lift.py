"""Floating-point witness search, rounded back to exact operators.

A damped Gauss-Newton iteration fits (A1, A2, A3, A4) with
(A1 (x) A2 (x) A3 (x) A4) psi = psi2 in complex arithmetic. When psi has a
continuous stabilizer the solutions form a positive-dimensional set; entries
along the remaining tangent directions are pinned to nearby small Gaussian
rationals until the fit is isolated, then every entry is rounded and the
quadruple is accepted only after exact application reproduces psi2.
"""

from dataclasses import dataclass
from fractions import Fraction
import logging
from typing import Optional

import numpy as np

from slocc.core.exact import ExactMatrix, Scalar, gq, is_invertible
from slocc.core.state import LocalOperatorQuad, StateTensor, apply_slocc
from slocc.errors import DimensionMismatch

logger = logging.getLogger(__name__)

_RANK_TOLERANCE = 1e-8


@dataclass(frozen=True)
class LiftOptions:
    restarts: int = 6
    iterations: int = 300
    pin_iterations: int = 80
    tolerance: float = 1e-11
    denominators: tuple[int, ...] = (64, 1024)
    seed: int = 20240101


def _to_float(q) -> float:
    return float(Fraction(int(q.numerator), int(q.denominator)))


def to_complex(z: Scalar) -> complex:
    return complex(_to_float(z.x), _to_float(z.y))


def to_array(psi: StateTensor) -> np.ndarray:
    array = np.zeros(tuple(psi.shape.dims), dtype=complex)
    for index, v in psi.amplitudes.items():
        array[tuple(i - 1 for i in index)] = to_complex(v)
    return array


def rationalize(value: complex, max_denominator: int) -> Scalar:
    return gq(Fraction(value.real).limit_denominator(max_denominator),
              Fraction(value.imag).limit_denominator(max_denominator))


class _Fit:
    """Residual and Jacobian of the multilinear map x -> (A1 (x) ... (x) A4) psi - psi2."""

    def __init__(self, psi: np.ndarray, target: np.ndarray):
        self.psi = psi
        self.target = target
        self.dims = psi.shape
        self.size = sum(d * d for d in self.dims)
        self.scale = max(1.0, float(np.linalg.norm(target)))

    def unpack(self, x: np.ndarray) -> list[np.ndarray]:
        mats, offset = [], 0
        for d in self.dims:
            mats.append(x[offset:offset + d * d].reshape(d, d))
            offset += d * d
        return mats

    def residual(self, x: np.ndarray) -> np.ndarray:
        image = np.einsum("ai,bj,ck,dl,ijkl->abcd", *self.unpack(x), self.psi)
        return (image - self.target).reshape(-1)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        mats = self.unpack(x)
        blocks = []
        for k, d in enumerate(self.dims):
            partial = self.psi
            for axis, m in enumerate(mats):
                if axis != k:
                    partial = np.moveaxis(np.tensordot(m, partial, axes=([1], [axis])), 0, axis)
            # d image[.., a_k, ..] / d A_k[a, i] = delta(a_k, a) partial[.., i, ..]
            block = np.einsum("pa,...i->p...ai", np.eye(d), np.moveaxis(partial, k, -1))
            blocks.append(np.moveaxis(block, 0, k).reshape(-1, d * d))
        return np.hstack(blocks)

    def system(self, x: np.ndarray, pins: dict[int, complex]) -> tuple[np.ndarray, np.ndarray]:
        residual, jacobian = self.residual(x), self.jacobian(x)
        if pins:
            indices = list(pins)
            rows = np.zeros((len(indices), self.size), dtype=complex)
            rows[np.arange(len(indices)), indices] = 1.0
            residual = np.concatenate([residual, x[indices] - np.array([pins[i] for i in indices])])
            jacobian = np.vstack([jacobian, rows])
        return residual, jacobian

    def converged(self, error: float, tolerance: float) -> bool:
        return error < tolerance * self.scale


def damped_gauss_newton(fit: _Fit, x: np.ndarray, pins: dict[int, complex], iterations: int,
                        tolerance: float) -> tuple[np.ndarray, bool]:
    """Levenberg-Marquardt steps on the stacked residual; the damping adapts to each step's gain."""
    residual, jacobian = fit.system(x, pins)
    error = float(np.linalg.norm(residual))
    damp = 1e-3
    for _ in range(iterations):
        if fit.converged(error, tolerance):
            return x, True
        normal = jacobian.conj().T @ jacobian
        gradient = jacobian.conj().T @ residual
        try:
            step = np.linalg.solve(normal + damp * np.eye(fit.size), -gradient)
        except np.linalg.LinAlgError:
            damp *= 10
            continue
        trial = x + step
        trial_residual, trial_jacobian = fit.system(trial, pins)
        trial_error = float(np.linalg.norm(trial_residual))
        if trial_error < error:
            x, residual, jacobian, error = trial, trial_residual, trial_jacobian, trial_error
            damp = max(damp / 3, 1e-12)
        else:
            damp *= 4
    return x, fit.converged(error, tolerance)


def _nearby_values(value: complex) -> list[complex]:
    options = [complex(round(value.real), round(value.imag)),
               complex(round(2 * value.real) / 2, round(2 * value.imag) / 2),
               1.0, 0.0]
    unique: list[complex] = []
    for v in options:
        if all(abs(v - u) > 1e-12 for u in unique):
            unique.append(v)
    return unique


def _free_directions(jacobian: np.ndarray) -> np.ndarray:
    _, singular, vh = np.linalg.svd(jacobian)
    if not singular.size or singular[0] == 0:
        return vh.conj().T
    rank = int(np.sum(singular > _RANK_TOLERANCE * singular[0]))
    return vh[rank:].conj().T


def isolate(fit: _Fit, x: np.ndarray, options: LiftOptions) -> Optional[tuple[np.ndarray, dict[int, complex]]]:
    """Pin coordinates one at a time until the fitted solution has no tangent freedom left."""
    pins: dict[int, complex] = {}
    while len(pins) < fit.size:
        _, jacobian = fit.system(x, pins)
        free = _free_directions(jacobian)
        if free.shape[1] == 0:
            return x, pins
        weights = np.linalg.norm(free, axis=1)
        order = [i for i in np.argsort(-weights) if i not in pins][:3]
        for index in order:
            for value in _nearby_values(complex(x[index])):
                trial, ok = damped_gauss_newton(fit, x, {**pins, int(index): value},
                                                options.pin_iterations, options.tolerance)
                if ok:
                    x = trial
                    pins[int(index)] = value
                    break
            else:
                continue
            break
        else:
            return None
    return x, pins


def _exact_quad(fit: _Fit, x: np.ndarray, max_denominator: int) -> Optional[LocalOperatorQuad]:
    operators = []
    for m in fit.unpack(x):
        exact = ExactMatrix.from_rows([[rationalize(complex(v), max_denominator) for v in row] for row in m])
        if not is_invertible(exact):
            return None
        operators.append(exact)
    return LocalOperatorQuad(*operators)


def lift_witness(psi: StateTensor, psi2: StateTensor,
                 options: Optional[LiftOptions] = None) -> Optional[LocalOperatorQuad]:
    """Quadruple with apply_slocc(psi, w) == psi2 exactly, or None if the search finds none.

    None is not evidence of inequivalence.
    """
    if psi.shape != psi2.shape:
        raise DimensionMismatch(f"states have shapes {psi.shape} and {psi2.shape}")
    options = options or LiftOptions()
    fit = _Fit(to_array(psi), to_array(psi2))
    rng = np.random.default_rng(options.seed)
    for restart in range(options.restarts):
        start = rng.standard_normal(fit.size) + 1j * rng.standard_normal(fit.size)
        x, ok = damped_gauss_newton(fit, start, {}, options.iterations, options.tolerance)
        if not ok:
            logger.debug(f"Lift restart {restart}: no numeric fit")
            continue
        isolated = isolate(fit, x, options)
        if isolated is None:
            logger.debug(f"Lift restart {restart}: could not isolate the fit")
            continue
        x, pins = isolated
        for max_denominator in options.denominators:
            quad = _exact_quad(fit, x, max_denominator)
            if quad is not None and apply_slocc(psi, quad) == psi2:
                logger.debug(f"Lift restart {restart}: exact witness after {len(pins)} pinned entries")
                return quad
        logger.debug(f"Lift restart {restart}: rounding did not reproduce the target")
    return None
