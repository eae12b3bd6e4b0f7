"""
DenseTile: Pipeline Tests
Тесты стилизатора и исполнителей конвейера
"""

import numpy as np
import pytest

from src.errors import ShapeMismatch
from src.models.schemas import AffineParams, NormKind, StrategyConfig, StylizerSpec
from src.monitoring.metrics import seam_energy
from src.monitoring.tracing import AccessTracer
from src.normalization.moments import compute_moments
from src.normalization.strategies import instance_normalize
from src.pipeline.executor import run_single_pass, run_two_stage, translate_image
from src.pipeline.stylizer import PatchTranslator, stylize_patch
from src.tiling.grid import iter_coords, make_grid
from src.tiling.imageio import ArrayTileSource, assemble_tiles
from src.tiling.synthetic import gradient_image


EPS = 1e-5


def strategies() -> list[StrategyConfig]:
    return [
        StrategyConfig(kind=NormKind.PATCH_IN),
        StrategyConfig(kind=NormKind.TIN),
        StrategyConfig(kind=NormKind.KIN, kin_kernel=3),
        StrategyConfig(kind=NormKind.DN),
    ]


class TestStylizePatch:
    """Тесты для stylize_patch"""

    @pytest.mark.unit
    def test_zero_normalized(self):
        target = StylizerSpec(target_mean=[0.5], target_std=[0.2])
        out = stylize_patch(np.zeros((2, 2)), np.zeros((2, 2)), target)
        np.testing.assert_allclose(out, 0.5)

    @pytest.mark.unit
    def test_identity_recolor(self, rng, identity_stylizer):
        normalized = rng.normal(size=(4, 4, 3))
        np.testing.assert_array_equal(
            stylize_patch(normalized, normalized, identity_stylizer), normalized
        )

    @pytest.mark.unit
    def test_by_hand(self):
        target = StylizerSpec(target_mean=[0.5], target_std=[0.2])
        out = stylize_patch(np.zeros((1, 1)), np.full((1, 1), 1.5), target)
        assert out[0, 0, 0] == pytest.approx(0.8)

    @pytest.mark.unit
    def test_channel_mismatch(self, stylizer):
        with pytest.raises(ShapeMismatch):
            stylize_patch(np.zeros((2, 2)), np.zeros((2, 2)), stylizer)


class TestPatchTranslator:
    """Тесты для PatchTranslator"""

    @pytest.mark.unit
    def test_affine_comes_from_stylizer(self, grid_3x2):
        target = StylizerSpec(
            target_mean=[0.0], target_std=[1.0], affine=AffineParams(gamma=[3.0], beta=[1.0])
        )
        translator = PatchTranslator(StrategyConfig(kind=NormKind.PATCH_IN), target, grid_3x2)
        assert translator.normalizer.affine.gamma == [3.0]
        assert not translator.needs_prefetch

    @pytest.mark.unit
    def test_busy_time_recorded(self, grid_3x2, rng):
        target = StylizerSpec(target_mean=[0.5], target_std=[0.1])
        translator = PatchTranslator(StrategyConfig(kind=NormKind.PATCH_IN), target, grid_3x2)
        translator.translate((0, 0), rng.uniform(size=(8, 8, 1)))
        assert translator.busy["inference"] > 0

    @pytest.mark.unit
    def test_table_only_for_prefetching_strategies(self, grid_3x2, stylizer):
        for kind in NormKind:
            translator = PatchTranslator(StrategyConfig(kind=kind), stylizer, grid_3x2)
            assert (translator.table is not None) == translator.needs_prefetch


class TestSinglePass:
    """Тесты для run_single_pass"""

    @pytest.mark.unit
    async def test_single_patch_dn_equals_in(self, rng, stylizer):
        grid = make_grid(16, 16, 16)
        image = rng.uniform(size=(16, 16, 3))
        source = ArrayTileSource(image, grid)

        tiles, _ = await run_single_pass(source, grid, StrategyConfig(), stylizer)

        expected = stylize_patch(
            image, instance_normalize(image, compute_moments(image, EPS)), stylizer
        )
        np.testing.assert_allclose(tiles[(0, 0)], expected, atol=1e-6)

    @pytest.mark.unit
    async def test_patch_in_is_independent_per_patch(self, random_image, stylizer):
        grid = make_grid(48, 32, 16)
        source = ArrayTileSource(random_image, grid)

        tiles, _ = await run_single_pass(
            source, grid, StrategyConfig(kind=NormKind.PATCH_IN), stylizer
        )

        for coord in iter_coords(grid):
            patch = source.read(coord)
            expected = stylize_patch(
                patch, instance_normalize(patch, compute_moments(patch, EPS)), stylizer
            )
            np.testing.assert_array_equal(tiles[coord], expected)

    @pytest.mark.unit
    async def test_step_count(self, random_image, stylizer):
        grid = make_grid(48, 32, 16)
        h, w = grid.rows, grid.cols
        source = ArrayTileSource(random_image, grid)

        _, report = await run_single_pass(source, grid, StrategyConfig(), stylizer)

        assert report.steps_executed == h * w + h + 2
        assert report.patches_translated == h * w
        assert report.mode == "single"
        assert set(report.wall_time_ms) == {"prefetch", "inference", "total"}

    @pytest.mark.unit
    @pytest.mark.parametrize("threads", [1, 2])
    async def test_no_read_before_write(self, random_image, stylizer, threads):
        grid = make_grid(48, 32, 8)
        source = ArrayTileSource(random_image, grid)
        tracer = AccessTracer()

        await run_single_pass(
            source, grid, StrategyConfig(), stylizer, threads=threads, tracer=tracer
        )

        assert len(tracer.writes()) == grid.num_patches
        assert tracer.reads()
        assert tracer.violations() == []

    @pytest.mark.unit
    async def test_kin_wide_window_is_safe(self, random_image, stylizer):
        grid = make_grid(48, 32, 8)
        tracer = AccessTracer()

        await run_single_pass(
            ArrayTileSource(random_image, grid),
            grid,
            StrategyConfig(kind=NormKind.KIN, kin_kernel=5),
            stylizer,
            tracer=tracer,
        )

        assert tracer.violations() == []


class TestTwoStage:
    """Тесты для run_two_stage"""

    @pytest.mark.unit
    async def test_step_count(self, random_image, stylizer):
        grid = make_grid(48, 32, 16)
        _, report = await run_two_stage(
            ArrayTileSource(random_image, grid), grid, StrategyConfig(), stylizer
        )
        assert report.steps_executed == 2 * grid.num_patches
        assert report.mode == "two-stage"

    @pytest.mark.unit
    @pytest.mark.parametrize("strategy", strategies(), ids=lambda s: s.kind.value)
    async def test_constant_image(self, strategy, stylizer):
        grid = make_grid(32, 32, 16)
        image = np.full((32, 32, 3), 0.3)
        tiles, _ = await run_two_stage(ArrayTileSource(image, grid), grid, strategy, stylizer)
        out = assemble_tiles(tiles, grid)
        np.testing.assert_allclose(
            out, np.broadcast_to(stylizer.target_mean, out.shape), atol=1e-9
        )

    @pytest.mark.unit
    async def test_reads_follow_writes(self, random_image, stylizer):
        grid = make_grid(48, 32, 8)
        tracer = AccessTracer()
        await run_two_stage(
            ArrayTileSource(random_image, grid), grid, StrategyConfig(), stylizer, tracer=tracer
        )
        assert tracer.violations() == []


class TestExecutorEquivalence:
    """Однопроходный и двухэтапный режимы дают одинаковый результат"""

    @pytest.mark.unit
    @pytest.mark.parametrize("strategy", strategies(), ids=lambda s: s.kind.value)
    @pytest.mark.parametrize("threads", [1, 2])
    async def test_bit_identical(self, strategy, threads, random_image, stylizer):
        grid = make_grid(48, 32, 8)
        source = ArrayTileSource(random_image, grid)

        single, _ = await run_single_pass(source, grid, strategy, stylizer, threads=threads)
        staged, _ = await run_two_stage(source, grid, strategy, stylizer)

        assert single.keys() == staged.keys()
        for coord in single:
            assert np.array_equal(single[coord], staged[coord]), coord

    @pytest.mark.unit
    @pytest.mark.parametrize("run", [run_single_pass, run_two_stage])
    async def test_injected_translator_keeps_table(self, run, random_image, stylizer):
        grid = make_grid(48, 32, 8)
        source = ArrayTileSource(random_image, grid)
        translator = PatchTranslator(StrategyConfig(), stylizer, grid)

        tiles, _ = await run(source, grid, StrategyConfig(), stylizer, translator=translator)
        plain, _ = await run(source, grid, StrategyConfig(), stylizer)

        assert translator.table.is_complete
        for coord in iter_coords(grid):
            moments = compute_moments(source.read(coord), EPS)
            np.testing.assert_array_equal(translator.table.get(coord).mean, moments.mean)
            assert np.array_equal(tiles[coord], plain[coord]), coord

    @pytest.mark.slow
    @pytest.mark.parametrize("strategy", strategies(), ids=lambda s: s.kind.value)
    async def test_bit_identical_large(self, strategy, stylizer):
        for seed in range(20):
            image = np.random.default_rng(seed).uniform(size=(1024, 1024, 3))
            single, _, _ = await translate_image(image, 256, strategy, stylizer)
            staged, _, _ = await translate_image(
                image, 256, strategy, stylizer, pipeline="two-stage"
            )
            assert np.array_equal(single, staged), seed


class TestTranslateImage:
    """Тесты для translate_image"""

    @pytest.mark.unit
    async def test_pads_and_crops(self, rng, stylizer):
        image = rng.uniform(size=(40, 28, 3))
        output, report, padded = await translate_image(image, 16, StrategyConfig(), stylizer)

        assert output.shape == (40, 28, 3)
        assert padded.pixels.shape == (48, 32, 3)
        assert report.patches_translated == 6

    @pytest.mark.integration
    async def test_dn_suppresses_seams(self, stylizer):
        image = gradient_image(256, 256, seed=3)
        grid = make_grid(256, 256, 64)

        dense, _, _ = await translate_image(image, 64, StrategyConfig(), stylizer)
        plain, _, _ = await translate_image(
            image, 64, StrategyConfig(kind=NormKind.PATCH_IN), stylizer
        )

        dense_seams = seam_energy(np.clip(dense, 0, 1), grid)
        plain_seams = seam_energy(np.clip(plain, 0, 1), grid)
        assert dense_seams.seam_ratio < plain_seams.seam_ratio
