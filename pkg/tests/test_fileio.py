import json

import numpy as np
import pytest

from qdet import fileio
from qdet.errors import NotCompleteError, NotPositiveError, ValidationError
from qdet.povm import make_ensemble
from qdet.sic import sic_qubit, tetrahedral_group


def write(tmp_path, obj, name="f.json"):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def test_povm_round_trip(tmp_path, sic):
    path = str(tmp_path / "sic.json")
    fileio.save_povm(path, sic.elements)
    np.testing.assert_array_equal(fileio.load_povm(path).elements, sic.elements)


def test_real_entries_are_accepted(tmp_path):
    path = write(tmp_path, {"dim": 2, "elements": [[[1, 0], [0, 0]], [[0, 0], [0, [1.0, 0.0]]]]})
    np.testing.assert_allclose(fileio.load_povm(path).elements[1], np.diag([0, 1]))


def test_ensemble_and_group_round_trip(tmp_path):
    ens = make_ensemble([0.25, 0.75], np.array([[1, 0], [0.6, 0.8j]]))
    path = str(tmp_path / "ens.json")
    fileio.save_ensemble(path, ens)
    back = fileio.load_ensemble(path)
    np.testing.assert_array_equal(back.priors, ens.priors)
    np.testing.assert_array_equal(back.states, ens.states)
    g = tetrahedral_group()
    gpath = str(tmp_path / "g.json")
    text = fileio.save_group(gpath, g)
    assert json.loads(text)["identity"] == g.identity + 1
    back = fileio.load_group(gpath)
    np.testing.assert_array_equal(back.permutations, g.permutations)
    np.testing.assert_array_equal(back.unitaries, g.unitaries)
    back.verify(sic_qubit().povm)


def test_cost_file(tmp_path):
    np.testing.assert_array_equal(fileio.load_cost(write(tmp_path, {"cost": [[0, 1], [2, 0]]})), [[0, 1], [2, 0]])
    with pytest.raises(ValidationError):
        fileio.load_cost(write(tmp_path, {"cost": [1, 2]}))


@pytest.mark.parametrize(
    "payload, fragment",
    [
        ("{not json", "invalid JSON"),
        ({"dim": 2}, "missing field 'elements'"),
        ({"dim": 2, "elements": [[[1, 0], [0, "x"]]]}, "elements[1][2][2]"),
        ({"dim": 2, "elements": [[[1, 0]]]}, "not square"),
        ({"dim": 3, "elements": [[[1, 0], [0, 1]]]}, "expected 3x3"),
        ({"dim": 2, "elements": [[[1, 0], [0, 1]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]]}, "expected 2x2"),
        ({"dim": 2, "elements": [[[True, 0], [0, 1]]]}, "elements[1][1][1]"),
    ],
)
def test_malformed_files_name_the_problem(tmp_path, payload, fragment):
    with pytest.raises(ValidationError, match=None) as info:
        fileio.load_povm(write(tmp_path, payload))
    assert fragment in str(info.value)


def test_invalid_povms(tmp_path):
    with pytest.raises(NotCompleteError):
        fileio.load_povm(write(tmp_path, {"elements": [[[1, 0], [0, 0]]]}))
    with pytest.raises(NotPositiveError):
        fileio.load_povm(write(tmp_path, {"elements": [[[1.5, 0], [0, 0.5]], [[-0.5, 0], [0, 0.5]]]}))
    with pytest.raises(ValidationError, match="cannot read"):
        fileio.load_povm(str(tmp_path / "missing.json"))
