"""
DenseTile: Model Tests
Тесты для Pydantic моделей и иерархии ошибок
"""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import (
    BadGranularity,
    BenchmarkGateFailed,
    ConfigurationError,
    DecodeError,
    ImageIOError,
    MissingEntry,
    NonMultipleDimensions,
    PipelineProtocolError,
    ShapeMismatch,
)
from src.models.schemas import (
    AffineParams,
    BasisMatrices,
    ChannelMoments,
    GridSpec,
    NormKind,
    PassReport,
    SeamReport,
    StrategyConfig,
    StylizerSpec,
)


class TestGridSpec:
    """Тесты для GridSpec"""

    @pytest.mark.unit
    def test_contains_and_clamp(self):
        grid = GridSpec(height_px=24, width_px=16, patch_size=8, rows=3, cols=2)
        assert grid.num_patches == 6
        assert grid.contains((2, 1))
        assert not grid.contains((3, 0))
        assert grid.clamp((-1, 5)) == (0, 1)

    @pytest.mark.unit
    def test_frozen(self):
        grid = GridSpec(height_px=8, width_px=8, patch_size=8, rows=1, cols=1)
        with pytest.raises(ValidationError):
            grid.rows = 2


class TestChannelMoments:
    """Тесты для ChannelMoments"""

    @pytest.mark.unit
    def test_valid(self):
        moments = ChannelMoments(mean=np.zeros(3), stddev=np.ones(3))
        assert moments.channels == 3

    @pytest.mark.unit
    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            ChannelMoments(mean=np.zeros(3), stddev=np.ones(2))
        with pytest.raises(ValidationError):
            ChannelMoments(mean=np.zeros((2, 2)), stddev=np.ones((2, 2)))


class TestBasisMatrices:
    """Тесты для BasisMatrices"""

    @pytest.mark.unit
    def test_weights_sum_to_one(self):
        basis = BasisMatrices.from_size(6)
        assert basis.stack.shape == (4, 6, 6)
        np.testing.assert_allclose(basis.stack.sum(axis=0), 1.0)

    @pytest.mark.unit
    def test_too_small(self):
        with pytest.raises(ValueError):
            BasisMatrices.from_size(1)


class TestAffineParams:
    """Тесты для AffineParams"""

    @pytest.mark.unit
    def test_broadcast(self):
        gamma, beta = AffineParams(gamma=[2.0], beta=[0.1]).as_arrays(3)
        np.testing.assert_array_equal(gamma, [2.0, 2.0, 2.0])
        np.testing.assert_array_equal(beta, [0.1, 0.1, 0.1])

    @pytest.mark.unit
    def test_wrong_length(self):
        with pytest.raises(ShapeMismatch):
            AffineParams(gamma=[1.0, 2.0]).as_arrays(3)

    @pytest.mark.unit
    @pytest.mark.parametrize("gamma", [[], [float("nan")], [1.0, float("inf")]])
    def test_must_be_finite(self, gamma):
        with pytest.raises(ValidationError):
            AffineParams(gamma=gamma)


class TestStrategyConfig:
    """Тесты для StrategyConfig"""

    @pytest.mark.unit
    def test_defaults(self):
        config = StrategyConfig()
        assert config.kind == NormKind.DN
        assert config.epsilon == 1e-5
        assert config.granularity == 1

    @pytest.mark.unit
    def test_even_kernel_rejected(self):
        with pytest.raises(ValidationError):
            StrategyConfig(kind=NormKind.KIN, kin_kernel=4)

    @pytest.mark.unit
    def test_lookahead(self):
        assert StrategyConfig(kind=NormKind.KIN, kin_kernel=5).lookahead == 2
        assert StrategyConfig(kind=NormKind.KIN, kin_kernel=1).lookahead == 0
        assert StrategyConfig(kind=NormKind.DN).lookahead == 1
        assert StrategyConfig(kind=NormKind.PATCH_IN).lookahead == 1

    @pytest.mark.unit
    def test_non_positive_epsilon(self):
        with pytest.raises(ValidationError):
            StrategyConfig(epsilon=0.0)


class TestStylizerSpec:
    """Тесты для StylizerSpec"""

    @pytest.mark.unit
    def test_valid(self):
        assert StylizerSpec(target_mean=[0.5, 0.5], target_std=[0.1, 0.2]).channels == 2

    @pytest.mark.unit
    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            StylizerSpec(target_mean=[0.5, 0.5], target_std=[0.1])

    @pytest.mark.unit
    def test_non_positive_std(self):
        with pytest.raises(ValidationError):
            StylizerSpec(target_mean=[0.5], target_std=[0.0])


class TestReports:
    """Тесты сериализации отчётов"""

    @pytest.mark.unit
    def test_schema_alias(self):
        report = PassReport(
            mode="single", steps_executed=7, patches_translated=4, strategy=StrategyConfig()
        )
        payload = json.loads(report.to_json())
        assert payload["schema"] == 1
        assert "schema_version" not in payload
        assert payload["strategy"]["kind"] == "dn"

    @pytest.mark.unit
    def test_seam_ratio_non_negative(self):
        with pytest.raises(ValidationError):
            SeamReport(boundary_mean_absdiff=0.1, interior_mean_absdiff=0.1, seam_ratio=-1.0)


class TestErrors:
    """Тесты кодов выхода"""

    @pytest.mark.unit
    def test_exit_codes(self):
        assert NonMultipleDimensions(10, 16, 8).exit_code == 2
        assert BadGranularity(3, 16).exit_code == 2
        assert DecodeError("x.png", "bad").exit_code == 3
        assert MissingEntry((0, 1)).exit_code == 4
        assert BenchmarkGateFailed("precomputed", 0.1).exit_code == 4

    @pytest.mark.unit
    def test_families(self):
        assert isinstance(ShapeMismatch((3,), (2,)), ConfigurationError)
        assert isinstance(DecodeError("x.png", "bad"), ImageIOError)
        assert isinstance(MissingEntry((0, 0)), PipelineProtocolError)
        assert MissingEntry((0, 1)).coord == (0, 1)
