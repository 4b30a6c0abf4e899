import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from netga.benchmarks import DimensionError, Function, ObjectiveSpec, clamp_to_domain, evaluate

SPECS = {f: ObjectiveSpec(f) for f in Function}


def ackley_oracle(x):
    mpmath.mp.dps = 40
    d = len(x)
    r = mpmath.sqrt(sum(mpmath.mpf(v) ** 2 for v in x) / d)
    c = sum(mpmath.cos(2 * mpmath.pi * mpmath.mpf(v)) for v in x) / d
    return float(-20 * mpmath.exp(-0.2 * r) - mpmath.exp(c) + mpmath.e + 20)


class TestWorkedExamples:
    @pytest.mark.parametrize("fn", list(Function))
    def test_origin_is_zero(self, fn):
        assert abs(evaluate(SPECS[fn], [0.0, 0.0])) <= 1e-12

    def test_sphere_3_4(self):
        assert evaluate(SPECS[Function.SPHERE], [3.0, 4.0]) == 25.0

    def test_rastrigin_1_1(self):
        assert evaluate(SPECS[Function.RASTRIGIN], [1.0, 1.0]) == pytest.approx(2.0, abs=1e-9)

    def test_ackley_1_1(self):
        expected = 3.625384938440363  # 20 * (1 - e**-0.2), 40-digit mpmath
        assert evaluate(SPECS[Function.ACKLEY], [1.0, 1.0]) == pytest.approx(expected, abs=1e-9)
        assert ackley_oracle([1.0, 1.0]) == pytest.approx(expected, abs=1e-15)


def test_default_bounds():
    assert SPECS[Function.RASTRIGIN].bounds == (-5.12, 5.12)
    assert SPECS[Function.SPHERE].bounds == (-5.12, 5.12)
    assert SPECS[Function.ACKLEY].bounds == (-32.768, 32.768)


def test_spec_validation():
    with pytest.raises(ValueError):
        ObjectiveSpec("sphere", 0)
    with pytest.raises(ValueError):
        ObjectiveSpec("sphere", 2, 1.0, -1.0)
    with pytest.raises(ValueError):
        ObjectiveSpec("griewank")
    assert ObjectiveSpec("ACKLEY").function is Function.ACKLEY


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        evaluate(SPECS[Function.SPHERE], [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        clamp_to_domain(SPECS[Function.SPHERE], [1.0])


def test_batch_matches_single():
    rng = np.random.default_rng(3)
    for spec in SPECS.values():
        x = rng.uniform(spec.lower_bound, spec.upper_bound, size=(20, 2))
        batch = evaluate(spec, x)
        assert batch.shape == (20,)
        np.testing.assert_array_equal(batch, [evaluate(spec, row) for row in x])


@pytest.mark.parametrize(
    "fn, x, expected",
    [
        (Function.RASTRIGIN, (6.0, -6.0), (5.12, -5.12)),
        (Function.SPHERE, (0.5, -0.5), (0.5, -0.5)),
        (Function.ACKLEY, (40.0, 0.0), (32.768, 0.0)),
    ],
)
def test_clamp(fn, x, expected):
    out = clamp_to_domain(SPECS[fn], x)
    np.testing.assert_array_equal(out, expected)
    np.testing.assert_array_equal(clamp_to_domain(SPECS[fn], out), out)


genomes = arrays(np.float64, 2, elements=st.floats(-5.12, 5.12))


@given(fn=st.sampled_from(list(Function)), x=genomes)
@settings(max_examples=300)
def test_nonnegative_even_symmetric(fn, x):
    spec = SPECS[fn]
    v = evaluate(spec, x)
    assert v >= -1e-12
    assert evaluate(spec, -x) == pytest.approx(v, rel=1e-12, abs=1e-12)
    assert evaluate(spec, x[::-1]) == pytest.approx(v, rel=1e-12, abs=1e-12)
    if np.any(np.abs(x) > 1e-3):
        assert v > 1e-12


@given(x=arrays(np.float64, st.integers(1, 6), elements=st.floats(-5.12, 5.12)))
def test_sphere_matches_loop(x):
    spec = ObjectiveSpec("sphere", x.size)
    total = 0.0
    for v in x:
        total += v * v
    assert evaluate(spec, x) == pytest.approx(total, rel=1e-12, abs=1e-300)


@given(x=arrays(np.float64, 3, elements=st.floats(-32.768, 32.768)))
def test_ackley_matches_high_precision(x):
    assert evaluate(ObjectiveSpec("ackley", 3), x) == pytest.approx(ackley_oracle(x), abs=1e-12)


def test_rastrigin_high_precision():
    rng = np.random.default_rng(0)
    mpmath.mp.dps = 40
    for x in rng.uniform(-5.12, 5.12, size=(50, 2)):
        ref = 20 + sum(mpmath.mpf(v) ** 2 - 10 * mpmath.cos(2 * mpmath.pi * mpmath.mpf(v)) for v in x)
        assert evaluate(SPECS[Function.RASTRIGIN], x) == pytest.approx(float(ref), abs=1e-12)
