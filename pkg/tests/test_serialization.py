"""Wire formats: exact round-trips and field-naming schema errors."""

from __future__ import annotations

import json

import numpy as np
import pytest

from waylab import serialization as ser
from waylab.catalog import ex3_measurement, ex5_multimeter
from waylab.errors import SchemaError
from waylab.observables import spin_observable

from conftest import random_normal_measurement


class TestRoundTrip:
    def test_observable(self):
        obs = spin_observable([0.3, -0.4, 0.5])
        doc = json.loads(ser.dumps(ser.observable_to_json(obs)))
        back = ser.observable_from_json(doc)
        assert back.outcomes == obs.outcomes
        for x, e in obs.items():
            assert np.array_equal(back.effect(x), e)

    def test_measurement_entrywise_exact(self, rng):
        nm = random_normal_measurement(rng, 2, 3)
        doc = json.loads(ser.dumps(ser.measurement_to_json(nm)))
        back = ser.measurement_from_json(doc)
        assert np.array_equal(back.coupling, nm.coupling)
        assert np.array_equal(back.probe, nm.probe)
        for x, e in nm.pointer.items():
            assert np.array_equal(back.pointer.effect(x), e)

    def test_multimeter(self):
        mm = ex5_multimeter()
        doc = json.loads(ser.dumps(ser.multimeter_to_json(mm)))
        back = ser.multimeter_from_json(doc)
        assert np.array_equal(back.coupling, mm.coupling)

    def test_quantity(self, rng):
        q = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        doc = json.loads(ser.dumps(ser.quantity_to_json(q)))
        assert np.array_equal(ser.quantity_from_json(doc), q)

    def test_serialized_text_deterministic(self):
        nm = ex3_measurement(1)
        assert ser.dumps(ser.measurement_to_json(nm)) == ser.dumps(
            ser.measurement_to_json(nm)
        )


class TestSchemaErrors:
    def _measurement_doc(self):
        return ser.measurement_to_json(ex3_measurement(1))

    def test_missing_field_names_path(self):
        doc = self._measurement_doc()
        del doc["coupling"]
        with pytest.raises(SchemaError) as err:
            ser.measurement_from_json(doc, "model")
        assert "model.coupling" in str(err.value)

    def test_wrong_type(self):
        doc = self._measurement_doc()
        doc["system_dim"] = "two"
        with pytest.raises(SchemaError) as err:
            ser.measurement_from_json(doc)
        assert "system_dim" in str(err.value)

    def test_non_square_matrix(self):
        with pytest.raises(SchemaError) as err:
            ser.pairs_to_matrix([[1.0, 0.0]] * 3, "quantity.matrix")
        assert "quantity.matrix" in str(err.value)

    def test_dim_mismatch(self):
        doc = self._measurement_doc()
        doc["probe"] = doc["probe"][:1]
        with pytest.raises(SchemaError) as err:
            ser.measurement_from_json(doc, "model")
        assert "model.probe" in str(err.value)

    def test_bad_pair(self):
        with pytest.raises(SchemaError) as err:
            ser.pairs_to_vector([[1.0, "x"]], "probe")
        assert "probe[0]" in str(err.value)

    def test_effects_outcomes_count(self):
        doc = ser.observable_to_json(spin_observable([0, 0, 1.0]))
        doc["outcomes"] = ["+"]
        with pytest.raises(SchemaError) as err:
            ser.observable_from_json(doc, "pointer")
        assert "pointer.effects" in str(err.value)

    def test_states_need_labels(self):
        with pytest.raises(SchemaError):
            ser.states_from_json({"states": [{"vector": [[1.0, 0.0]]}]})
        with pytest.raises(SchemaError):
            ser.states_from_json({"states": []})

    def test_states_parse(self):
        doc = {
            "states": [
                {"label": "a", "vector": [[1.0, 0.0], [0.0, 0.0]]},
                {"label": "b", "vector": [[0.0, 0.0], [1.0, 0.0]]},
            ]
        }
        states = ser.states_from_json(doc)
        assert [s[0] for s in states] == ["a", "b"]
        assert np.array_equal(states[0][1], np.array([1.0, 0.0]))
