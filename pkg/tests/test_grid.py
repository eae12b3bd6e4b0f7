"""
DenseTile: Grid Tests
Тесты геометрии сетки и диспетчера
"""

import pytest

from src.errors import NonMultipleDimensions, OddPatchSize, OutOfGrid
from src.tiling.grid import (
    coord_of,
    dispatch_lag,
    dispatch_sequence,
    iter_coords,
    linear_index,
    make_grid,
    neighbors,
)


def prefetch_steps(grid, radius=1) -> dict:
    return {
        item.prefetch: item.step
        for item in dispatch_sequence(grid, radius)
        if item.prefetch is not None
    }


class TestMakeGrid:
    """Тесты для make_grid"""

    @pytest.mark.unit
    def test_rows_and_cols(self):
        grid = make_grid(1536, 1024, 512)
        assert (grid.rows, grid.cols) == (3, 2)
        assert grid.num_patches == 6

    @pytest.mark.unit
    def test_single_patch(self):
        grid = make_grid(512, 512, 512)
        assert (grid.rows, grid.cols) == (1, 1)

    @pytest.mark.unit
    def test_non_multiple(self):
        with pytest.raises(NonMultipleDimensions) as exc:
            make_grid(1000, 512, 512)
        assert exc.value.height_px == 1000

    @pytest.mark.unit
    @pytest.mark.parametrize("n", [0, 1, 3, 7])
    def test_odd_patch_size(self, n):
        with pytest.raises(OddPatchSize):
            make_grid(42, 42, n)


class TestLinearIndex:
    """Тесты для linear_index и coord_of"""

    @pytest.mark.unit
    def test_column_major(self, grid_3x2):
        assert linear_index((2, 0), grid_3x2) == 2
        assert linear_index((0, 1), grid_3x2) == 3
        assert linear_index((0, 0), grid_3x2) == 0

    @pytest.mark.unit
    def test_inverse(self, grid_4x4):
        for index in range(grid_4x4.num_patches):
            assert linear_index(coord_of(index, grid_4x4), grid_4x4) == index

    @pytest.mark.unit
    def test_out_of_grid(self, grid_3x2):
        with pytest.raises(OutOfGrid):
            linear_index((3, 0), grid_3x2)
        with pytest.raises(OutOfGrid):
            coord_of(6, grid_3x2)

    @pytest.mark.unit
    def test_iter_coords_order(self, grid_3x2):
        assert list(iter_coords(grid_3x2)) == [
            (0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)
        ]


class TestDispatchSequence:
    """Тесты для dispatch_sequence"""

    @pytest.mark.unit
    def test_lag(self, grid_3x2):
        assert dispatch_lag(grid_3x2) == 5
        assert dispatch_lag(grid_3x2, radius=2) == 9

    @pytest.mark.unit
    def test_hand_enumerated_steps(self, grid_3x2):
        steps = {item.step: item for item in dispatch_sequence(grid_3x2)}

        assert steps[-5].inference is None
        assert steps[-5].prefetch == (0, 0)
        assert steps[0].inference == (0, 0)
        assert steps[0].prefetch == (2, 1)
        assert steps[5].inference == (2, 1)
        assert steps[5].prefetch is None

    @pytest.mark.unit
    def test_length_and_coverage(self, grid_4x4):
        items = list(dispatch_sequence(grid_4x4))
        h, w = grid_4x4.rows, grid_4x4.cols

        assert len(items) == h * w + h + 2
        assert items[0].step == -(h + 2)
        assert items[-1].step == h * w - 1
        inference = [i.inference for i in items if i.inference is not None]
        prefetch = [i.prefetch for i in items if i.prefetch is not None]
        assert inference == list(iter_coords(grid_4x4))
        assert prefetch == list(iter_coords(grid_4x4))

    @pytest.mark.unit
    def test_deterministic(self, grid_3x2):
        assert list(dispatch_sequence(grid_3x2)) == list(dispatch_sequence(grid_3x2))

    @pytest.mark.unit
    def test_neighbors_prefetched_earlier_exhaustive(self):
        for rows in range(1, 11):
            for cols in range(1, 11):
                grid = make_grid(rows * 2, cols * 2, 2)
                prefetched_at = prefetch_steps(grid)
                for item in dispatch_sequence(grid):
                    if item.inference is None:
                        continue
                    for coord in neighbors(item.inference, grid):
                        assert prefetched_at[coord] < item.step, (rows, cols, coord)

    @pytest.mark.unit
    def test_wider_radius_covers_window(self):
        for rows in range(1, 8):
            for cols in range(1, 8):
                grid = make_grid(rows * 2, cols * 2, 2)
                prefetched_at = prefetch_steps(grid, radius=2)
                for item in dispatch_sequence(grid, radius=2):
                    if item.inference is None:
                        continue
                    for coord in neighbors(item.inference, grid, radius=2):
                        assert prefetched_at[coord] < item.step


class TestNeighbors:
    """Тесты для neighbors"""

    @pytest.mark.unit
    def test_interior_and_corner(self, grid_4x4):
        assert len(neighbors((1, 1), grid_4x4)) == 9
        assert sorted(neighbors((0, 0), grid_4x4)) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    @pytest.mark.unit
    def test_single_patch_grid(self):
        grid = make_grid(8, 8, 8)
        assert neighbors((0, 0), grid) == [(0, 0)]
