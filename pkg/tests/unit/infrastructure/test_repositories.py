"""
Tests for repository implementations.

Tests the JSON network/sample files and the report writer.
"""

import csv
import json

import numpy as np
import pytest

from src.core.interfaces.network_repository import NetworkLoadError, Sample
from src.core.interfaces.report_repository import ReportWriteError
from src.infrastructure.repositories.json_network_repository import JsonNetworkRepository
from src.infrastructure.repositories.report_repository import FileReportRepository


@pytest.fixture
def repository():
    """Create a fresh repository for each test."""
    return JsonNetworkRepository()


def _write(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


class TestNetworkFiles:
    """Test cases for NetworkFile loading and saving."""

    @pytest.mark.parametrize("fixture_name", ["small_dense", "small_conv"])
    def test_save_and_load(self, repository, tmp_path, request, fixture_name):
        network = request.getfixturevalue(fixture_name)
        path = tmp_path / f"{fixture_name}.json"

        repository.save_network(network, path)
        loaded = repository.load_network(path)

        assert loaded == network
        assert loaded.name == network.name
        for mine, theirs in zip(loaded.layers, network.layers):
            if theirs.weights is not None:
                assert np.array_equal(mine.weights, theirs.weights)

    def test_document_layout(self, repository, small_dense):
        document = repository.to_document(small_dense)

        assert document["format_version"] == "1"
        first = document["layers"][0]
        assert first["kind"] == "dense"
        assert first["weights_shape"] == [3, 2]
        assert first["weights"] == [1.0, -1.0, 0.5, 0.5, -1.0, 2.0]
        assert first["output_shape"] == [3]

    def test_missing_file(self, repository, tmp_path):
        with pytest.raises(NetworkLoadError, match="Cannot read") as info:
            repository.load_network(tmp_path / "absent.json")

        assert info.value.path == tmp_path / "absent.json"

    def test_invalid_json(self, repository, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\n  \"layers\": [", encoding="utf-8")

        with pytest.raises(NetworkLoadError, match="invalid JSON at line"):
            repository.load_network(path)

    def test_unsupported_version(self, repository, small_dense):
        document = repository.to_document(small_dense)
        document["format_version"] = "2"

        with pytest.raises(NetworkLoadError, match="format_version") as info:
            repository.parse_network(document)

        assert info.value.field == "format_version"

    def test_empty_layers(self, repository):
        with pytest.raises(NetworkLoadError, match="non-empty"):
            repository.parse_network({"format_version": "1", "layers": []})

    def test_unknown_top_level_field(self, repository, small_dense):
        document = repository.to_document(small_dense)
        document["optimizer"] = "adam"

        with pytest.raises(NetworkLoadError, match="optimizer"):
            repository.parse_network(document)

    def test_document_must_be_an_object(self, repository):
        with pytest.raises(NetworkLoadError) as info:
            repository.parse_network([{"kind": "relu"}])

        assert info.value.field == "document"
        assert info.value.layer_index is None

    def test_missing_layer_field_names_the_layer(self, repository, small_dense):
        document = repository.to_document(small_dense)
        del document["layers"][2]["input_shape"]

        with pytest.raises(NetworkLoadError, match="layer 2: field 'input_shape'") as info:
            repository.parse_network(document)

        assert info.value.layer_index == 2
        assert info.value.field == "input_shape"

    def test_unnamed_network_takes_the_file_stem(self, repository, tmp_path, small_dense):
        document = repository.to_document(small_dense)
        del document["name"]
        path = _write(tmp_path / "anonymous.json", document)

        assert repository.load_network(path).name == "anonymous"

    def test_unknown_layer_kind(self, repository, small_dense):
        document = repository.to_document(small_dense)
        document["layers"][1]["kind"] = "softmax"

        with pytest.raises(NetworkLoadError) as info:
            repository.parse_network(document)

        assert info.value.layer_index == 1
        assert info.value.field == "kind"

    def test_weight_count_mismatch(self, repository, small_dense):
        document = repository.to_document(small_dense)
        document["layers"][2]["weights"] = document["layers"][2]["weights"][:-1]

        with pytest.raises(NetworkLoadError, match="layer 2") as info:
            repository.parse_network(document)

        assert info.value.field == "weights"

    def test_bias_length_mismatch(self, repository, small_dense):
        document = repository.to_document(small_dense)
        document["layers"][0]["bias"] = [0.0]

        with pytest.raises(NetworkLoadError) as info:
            repository.parse_network(document)

        assert info.value.field == "bias"

    def test_parameters_on_relu(self, repository, small_dense):
        document = repository.to_document(small_dense)
        document["layers"][1]["bias"] = [0.0, 0.0, 0.0]

        with pytest.raises(NetworkLoadError, match="no parameters"):
            repository.parse_network(document)

    def test_declared_output_shape_checked(self, repository, small_dense):
        document = repository.to_document(small_dense)
        document["layers"][0]["output_shape"] = [4]

        with pytest.raises(NetworkLoadError) as info:
            repository.parse_network(document)

        assert info.value.field == "output_shape"


class TestSampleFiles:
    """Test cases for SampleFile loading and saving."""

    def test_save_and_load_keep_order(self, repository, tmp_path):
        samples = [
            Sample(id="b", values=np.array([0.1, 0.2]), label=1),
            Sample(id="a", values=np.array([0.3, 0.4])),
        ]
        path = tmp_path / "samples.json"

        repository.save_samples(samples, path, num_classes=2)
        loaded = repository.load_samples(path)

        assert [s.id for s in loaded] == ["b", "a"]
        assert [s.label for s in loaded] == [1, None]
        assert loaded[0].values.tolist() == [0.1, 0.2]
        assert not loaded[0].values.flags.writeable

    def test_label_checked_against_classes(self, repository, tmp_path):
        path = _write(tmp_path / "samples.json", {"samples": [{"id": "s7", "values": [0.0], "label": 3}]})

        with pytest.raises(NetworkLoadError, match="s7") as info:
            repository.load_samples(path, num_classes=3)

        assert info.value.sample_id == "s7"
        assert info.value.field == "label"

    def test_declared_class_count_used(self, repository, tmp_path):
        path = _write(tmp_path / "samples.json", {"num_classes": 2, "samples": [{"id": "x", "values": [0.0], "label": 2}]})

        with pytest.raises(NetworkLoadError, match="not below 2"):
            repository.load_samples(path)

    def test_non_finite_values(self, repository, tmp_path):
        path = tmp_path / "samples.json"
        path.write_text('{"samples": [{"id": "n", "values": [NaN]}]}', encoding="utf-8")

        with pytest.raises(NetworkLoadError) as info:
            repository.load_samples(path)

        assert info.value.field == "values"

    def test_unknown_sample_field(self, repository, tmp_path):
        path = _write(tmp_path / "samples.json", {"samples": [{"id": "u", "values": [1.0], "weight": 2}]})

        with pytest.raises(NetworkLoadError, match="weight"):
            repository.load_samples(path)

    def test_declared_class_count_validated(self, repository, tmp_path):
        path = _write(tmp_path / "samples.json", {"num_classes": 0, "samples": []})

        with pytest.raises(NetworkLoadError, match="num_classes") as info:
            repository.load_samples(path)

        assert info.value.field == "num_classes"

    def test_top_level_must_be_an_object(self, repository, tmp_path):
        path = _write(tmp_path / "samples.json", [{"id": "x", "values": [0.0]}])

        with pytest.raises(NetworkLoadError, match="'samples' list"):
            repository.load_samples(path)

    def test_samples_must_be_a_list(self, repository, tmp_path):
        path = _write(tmp_path / "samples.json", {"samples": {"id": "x"}})

        with pytest.raises(NetworkLoadError, match="'samples' list"):
            repository.load_samples(path)


class TestFileReportRepository:
    """Test cases for JSON and CSV reports."""

    @pytest.fixture
    def reports(self):
        return FileReportRepository()

    def test_json_is_sorted_and_null_safe(self, reports, tmp_path):
        path = tmp_path / "out" / "report.json"

        reports.write_json({"b": float("inf"), "a": [1.5, float("nan")]}, path)

        text = path.read_text(encoding="utf-8")
        assert json.loads(text) == {"a": [1.5, None], "b": None}
        assert text.index('"a"') < text.index('"b"')

    def test_json_identical_across_writes(self, reports, tmp_path):
        payload = {"z": 1, "y": {"x": 0.25}}

        reports.write_json(payload, tmp_path / "one.json")
        reports.write_json(payload, tmp_path / "two.json")

        assert (tmp_path / "one.json").read_bytes() == (tmp_path / "two.json").read_bytes()

    def test_csv_cells(self, reports, tmp_path):
        path = tmp_path / "rows.csv"
        rows = [{"id": "s1", "implied": True, "min_lower": 0.1, "extra": 5}, {"id": "s2", "implied": None, "min_lower": float("inf")}]

        reports.write_csv(rows, ["id", "implied", "min_lower"], path)

        with path.open(encoding="utf-8", newline="") as handle:
            read = list(csv.reader(handle))
        assert read == [["id", "implied", "min_lower"], ["s1", "true", "0.1"], ["s2", "", ""]]

    def test_unwritable_target(self, reports, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("file")

        with pytest.raises(ReportWriteError, match="Failed to write report"):
            reports.write_json({"a": 1}, blocker / "report.json")
