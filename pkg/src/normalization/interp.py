"""
DenseTile: Fast Interpolation
Быстрая билинейная интерполяция 2x2 -> NxN и уплотнение моментов 3x3
"""

from functools import lru_cache

import numpy as np

from src.errors import BadGranularity, NonPositiveSigma, OddPatchSize, ShapeMismatch
from src.models.schemas import BasisMatrices, Neighborhood3x3, PixelMomentField


@lru_cache(maxsize=None)
def precompute_basis(n: int) -> BasisMatrices:
    """Базис для размера патча n; вычисляется один раз на процесс"""
    if n < 2 or n % 2:
        raise OddPatchSize(n)
    return BasisMatrices.from_size(n)


def fast_interp_cell(q: np.ndarray, basis: BasisMatrices) -> np.ndarray:
    """Q' = q00*M00 + q01*M01 + q10*M10 + q11*M11"""
    q = np.asarray(q, dtype=np.float64).reshape(4)
    return np.tensordot(q, basis.stack, axes=1)


def reformulated_interp_cell(q: np.ndarray, n: int) -> np.ndarray:
    """Та же сумма, но весовые матрицы строятся заново при каждом вызове"""
    return fast_interp_cell(q, BasisMatrices.from_size(n))


def naive_bilinear_cell(q: np.ndarray, n: int) -> np.ndarray:
    """
    Эталонная билинейная интерполяция по пикселям

    Q'[i][j] = [N - v_i, v_i] . q . [N - v_j, v_j]^T / N^2,
    веса пересчитываются для каждого пикселя. Намеренно медленная.
    """
    q = np.asarray(q, dtype=np.float64).reshape(2, 2)
    q00, q01, q10, q11 = (float(x) for x in q.ravel())
    n2 = float(n * n)
    out = np.empty((n, n))

    for i in range(n):
        for j in range(n):
            v_i = i * n / (n - 1)
            v_j = j * n / (n - 1)
            left0, left1 = n - v_i, v_i
            right0, right1 = n - v_j, v_j
            out[i, j] = (
                left0 * (q00 * right0 + q01 * right1) + left1 * (q10 * right0 + q11 * right1)
            ) / n2

    return out


def _corner_quadrants(n: int) -> list[tuple[slice, slice, slice, slice, slice, slice]]:
    """
    Для каждого угла 3x3: (строки/столбцы 2x2 подматрицы,
    место в центральном кропе, часть базиса, попадающая в кроп)
    """
    h = n // 2
    head, tail = slice(0, h), slice(h, n)
    top, bottom = slice(0, 2), slice(1, 3)
    return [
        (top, top, head, head, tail, tail),
        (top, bottom, head, tail, tail, head),
        (bottom, top, tail, head, head, tail),
        (bottom, bottom, tail, tail, head, head),
    ]


def assemble_corners(values: np.ndarray, basis: BasisMatrices) -> np.ndarray:
    """Матрица 2N x 2N из четырёх интерполированных углов (один канал)"""
    n = basis.n
    values = np.asarray(values, dtype=np.float64)
    big = np.empty((2 * n, 2 * n))
    big[:n, :n] = fast_interp_cell(values[0:2, 0:2], basis)
    big[:n, n:] = fast_interp_cell(values[0:2, 1:3], basis)
    big[n:, :n] = fast_interp_cell(values[1:3, 0:2], basis)
    big[n:, n:] = fast_interp_cell(values[1:3, 1:3], basis)
    return big


def interpolate_crop(values: np.ndarray, basis: BasisMatrices) -> np.ndarray:
    """
    Центральный кроп [N/2, 3N/2) матрицы углов для всех каналов, (N, N, C)

    Интерполируется только та четверть каждого угла, что попадает в кроп.
    """
    n = basis.n
    channels = values.shape[-1]
    out = np.empty((n, n, channels))

    for qi, qj, oi, oj, bi, bj in _corner_quadrants(n):
        q = values[qi, qj].reshape(4, channels)
        out[oi, oj] = np.tensordot(basis.stack[:, bi, bj], q, axes=([0], [0]))

    return out


def densify(
    neighborhood: Neighborhood3x3,
    basis: BasisMatrices,
    reciprocal_sigma: bool = True,
) -> PixelMomentField:
    """
    Попиксельные моменты патча из окрестности 3x3

    σ̃ обращается поэлементно до интерполяции, результат σ̂* используется
    как множитель без повторного обращения. При reciprocal_sigma=False
    интерполируется σ̃ и обращается уже попиксельное поле.
    """
    mu = np.asarray(neighborhood.mu, dtype=np.float64)
    sigma = np.asarray(neighborhood.sigma, dtype=np.float64)
    if mu.shape[:2] != (3, 3) or sigma.shape != mu.shape:
        raise ShapeMismatch((3, 3) + mu.shape[2:], sigma.shape)
    if np.any(sigma <= 0):
        raise NonPositiveSigma(float(sigma.min()))

    mu_hat = interpolate_crop(mu, basis)
    if reciprocal_sigma:
        inv_sigma_hat = interpolate_crop(1.0 / sigma, basis)
    else:
        inv_sigma_hat = 1.0 / interpolate_crop(sigma, basis)

    return PixelMomentField(mu_hat=mu_hat, inv_sigma_hat=inv_sigma_hat)


def quantize_granularity(field: np.ndarray, g: int) -> np.ndarray:
    """Кусочно-постоянное поле блоками g x g по левому верхнему отсчёту"""
    field = np.asarray(field)
    height, width = field.shape[:2]
    if g < 1 or height % g or width % g:
        raise BadGranularity(g, height)
    if g == 1:
        return field

    sampled = field[::g, ::g]
    return np.repeat(np.repeat(sampled, g, axis=0), g, axis=1)


def quantize_field(field: PixelMomentField, g: int) -> PixelMomentField:
    """quantize_granularity для μ̂ и σ̂* одновременно"""
    if g == 1:
        return field
    return PixelMomentField(
        mu_hat=quantize_granularity(field.mu_hat, g),
        inv_sigma_hat=quantize_granularity(field.inv_sigma_hat, g),
    )
