import json

import numpy as np
import pytest

from stabilizer_lab.errors import SchemaError
from stabilizer_lab.gaussian_core import GaussianDissipatorSpec, UnitaryChannelSpec, channel_K1, channel_K3, linear_model
from stabilizer_lab.operators import DensityOperator, LindbladSet, random_density, random_lindblads
from stabilizer_lab.serialize import (
    covariance_from_json,
    covariance_to_json,
    density_from_json,
    density_to_json,
    dumps,
    gaussian_spec_from_json,
    gaussian_spec_to_json,
    lindblads_from_json,
    lindblads_to_json,
    matrix_from_json,
)


def test_density_round_trip(rng):
    rho = random_density(3, rng)
    back = density_from_json(json.loads(dumps(density_to_json(rho))))
    np.testing.assert_array_equal(back.matrix, rho.matrix)


def test_lindblad_round_trip(rng):
    lind = random_lindblads(3, 2, rng, gamma=0.4)
    back = lindblads_from_json(json.loads(dumps(lindblads_to_json(lind))))
    assert back.gamma == 0.4
    for a, b in zip(back.operators, lind.operators):
        np.testing.assert_array_equal(a, b)


def test_gaussian_round_trip():
    spec = GaussianDissipatorSpec(
        0.8, linear_model("iii", 0.3), 0.2, UnitaryChannelSpec(((0.25, channel_K1(0.4)), (0.75, channel_K3(0.1))))
    )
    back = gaussian_spec_from_json(json.loads(dumps(gaussian_spec_to_json(spec))))
    np.testing.assert_array_equal(back.linear.C, spec.linear.C)
    assert [k for k, _ in back.unitary.channels] == [0.25, 0.75]
    v = np.diag([0.6, 0.6, 1.1, 1.1])
    np.testing.assert_array_equal(covariance_from_json(covariance_to_json(v)), v)


def test_dumps_is_deterministic_and_exact():
    doc = {"x": 0.1, "y": [1 / 3, 2.0], "z": None, "w": True}
    text = dumps(doc)
    assert text == dumps(doc)
    assert json.loads(text)["y"][0] == 1 / 3
    with pytest.raises(SchemaError):
        dumps({"bad": float("nan")})


@pytest.mark.parametrize(
    "doc",
    [
        {"d": -1, "re": [], "im": []},
        {"d": 2, "re": [[1, 0]], "im": [[0, 0]]},
        {"re": [[1]]},
        {"d": True, "re": [[1]], "im": [[0]]},
    ],
)
def test_matrix_schema_errors(doc):
    with pytest.raises(SchemaError):
        matrix_from_json(doc)


def test_kind_checks():
    with pytest.raises(SchemaError):
        density_from_json({"kind": "other", "d": 1, "re": [[1]]})
    with pytest.raises(SchemaError):
        lindblads_from_json({"kind": "lindblad_set", "operators": []})
    with pytest.raises(SchemaError):
        covariance_from_json({"N": 2, "V": [[1.0]]})
    assert isinstance(density_from_json(density_to_json(DensityOperator.from_matrix(np.eye(2) / 2))), DensityOperator)
    assert isinstance(lindblads_from_json(lindblads_to_json(LindbladSet((np.eye(2),)))), LindbladSet)
