import numpy as np
import pytest

from levybarrier.contours import GWR, SINH_LAPLACE, MethodModelError
from levybarrier.engine import PayoffSpec
from levybarrier.levy import LevyModel
from levybarrier.pricing import PriceRequest, choose_block, price, price_curve, resolve_method
from levybarrier.tables import SPOTS

NT = PayoffSpec.no_touch(-0.05, 0.05)


@pytest.mark.parametrize("nu, payoff, expected", [
    (1.2, NT, 0.216239237263554),
    (1.2, PayoffSpec.digital_put(-0.01, -0.05, 0.05), 0.0786094461300362),
    (1.2, PayoffSpec.call(0.0, -0.05, 0.05), 0.00212237950197215),
    (0.2, NT, 0.880407965481731),
])
def test_benchmark_spot(nu, payoff, expected):
    m = LevyModel.kobol(nu, 1.0, -2.0, m2=0.1)
    assert abs(price(PriceRequest(m, payoff, 0.25, [0.0])).values[0] - expected) <= 1e-12


def test_knocked_spots(kobol12):
    rep = price(PriceRequest(kobol12, NT, 0.25, [-0.05, -0.06, 0.0, 0.05]))
    assert list(rep.knocked) == [True, True, False, True]
    assert rep.values[0] == rep.values[1] == rep.values[3] == 0.0


def test_notouch_bounded_and_decreasing_in_T(kobol12):
    vals = [price(PriceRequest(kobol12, NT, T, SPOTS)).values for T in (0.004, 0.25, 1.0)]
    for v in vals:
        assert np.all((v >= 0) & (v <= 1))
    assert np.all(vals[0] > vals[1]) and np.all(vals[1] > vals[2])


def test_digital_increasing_in_strike(kobol12):
    vals = [price(PriceRequest(kobol12, PayoffSpec.digital_put(a, -0.05, 0.05), 0.25, [0.0])).values[0]
            for a in (-0.03, -0.01, 0.01, 0.03)]
    assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))


def test_method_resolution(kobol02):
    drifted = kobol02.with_drift(0.02)
    assert resolve_method(drifted, "auto") == GWR
    assert resolve_method(kobol02, "auto") == SINH_LAPLACE
    with pytest.raises(MethodModelError):
        price(PriceRequest(drifted, NT, 0.25, [0.0], method=SINH_LAPLACE))
    rep = price(PriceRequest(drifted, NT, 0.25, [0.0]))
    assert rep.method == GWR and 0 < rep.values[0] < 1


def test_block_choice(kobol12, kobol02):
    assert choose_block(kobol12, 0.25) == "truncated" and choose_block(kobol12, 1.0) == "resolvent"
    assert choose_block(kobol02, 1.0) == "truncated" and choose_block(kobol02, 3.0) == "resolvent"


def test_blocks_agree_at_short_maturity(kobol12):
    a = price(PriceRequest(kobol12, NT, 0.25, SPOTS, block="truncated")).values
    b = price(PriceRequest(kobol12, NT, 0.25, SPOTS, block="resolvent")).values
    assert np.abs(a - b).max() <= 1e-12


def test_dual_run_error_estimate(kobol12):
    rep = price(PriceRequest(kobol12, NT, 0.25, SPOTS, dual_run=True))
    assert rep.errors is not None and rep.errors.max() <= 1e-12


def test_threads_do_not_change_result(kobol12):
    a = price(PriceRequest(kobol12, NT, 0.25, SPOTS, threads=1)).values
    b = price(PriceRequest(kobol12, NT, 0.25, SPOTS, threads=3)).values
    assert np.array_equal(a, b)


def test_curve_shape_and_normalization(kobol12):
    xs = np.linspace(-0.05, 0.05, 41)[1:-1]
    rows, _ = price_curve(PriceRequest(kobol12, NT, 0.25, xs), normalize=True)
    v = np.array([r[1] for r in rows])
    norm = np.array([r[2] for r in rows])
    edge = price(PriceRequest(kobol12, NT, 0.25, [-0.05 + 1e-5, 0.05 - 1e-5])).values
    # V ~ A (x - h_-)^{0.6}: about 1e-3 of the peak this close to a barrier
    assert np.all(edge < 0.01 * v.max())
    assert 12 <= int(np.argmax(v)) <= 26
    assert np.all(np.isfinite(norm)) and np.all(norm > 0)
    # (x - h_-)^{nu/2} scaling: the normalized curve levels off near the lower barrier
    assert abs(norm[1] / norm[0] - 1) < abs(v[1] / v[0] - 1)


def test_mirror_symmetry_digital(kobol12):
    # P(x + X_T <= a, no exit) equals the reflected model's P(-x - X_T >= -a, ...)
    p = PayoffSpec.digital_put(-0.01, -0.05, 0.05)
    xs = np.array([-0.03, 0.0, 0.02])
    v = price(PriceRequest(kobol12, p, 0.25, xs)).values
    nt = price(PriceRequest(kobol12, NT, 0.25, xs)).values
    q = PayoffSpec.digital_put(0.01, -0.05, 0.05)
    vm = price(PriceRequest(kobol12.mirrored(), q, 0.25, -xs)).values
    assert np.abs(v - (nt - vm)).max() <= 1e-12


def test_request_validation(kobol12):
    with pytest.raises(ValueError):
        PriceRequest(kobol12, NT, 0.0, [0.0])
    with pytest.raises(ValueError):
        PriceRequest(kobol12, NT, 1.0, [0.0], method="talbot")
    with pytest.raises(ValueError):
        PriceRequest(kobol12, NT, 1.0, [0.0], tolerance=2.0)
