import pytest

from gradcheck_util import max_grad_rel_error
from qanet.ribcage import ArchConfig

TOL = 1e-4


def _toy(variant, **kw):
    return ArchConfig(
        variant=variant, input_size=8, n_blocks=2, features_per_block=(3, 4), fc_widths=(5,), **kw
    )


@pytest.mark.parametrize("variant", ["ribcage", "siamese", "naive"])
def test_analytic_gradients_match_finite_differences(variant):
    assert max_grad_rel_error(_toy(variant), seed=0) < TOL


def test_gradients_with_head_reading_ribs():
    assert max_grad_rel_error(_toy("ribcage", head_reads_ribs=True), seed=0) < TOL


def test_gradients_with_binary_encoding():
    assert max_grad_rel_error(_toy("ribcage", input_encoding="binary"), seed=0) < TOL
