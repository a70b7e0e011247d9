"""
JSON implementation of the network repository.

Reads and writes NetworkFile and SampleFile documents. Every validation
failure is reported as a NetworkLoadError naming the file and, where it
applies, the layer index and field or the sample id.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from ...core.entities.layer import LayerKind, LayerSpec
from ...core.entities.network import Network
from ...core.exceptions import ImplyLPError
from ...core.interfaces.network_repository import NetworkLoadError, NetworkRepositoryInterface, Sample
from .network_file import FORMAT_VERSION, LayerRecord, NetworkFile, SampleFile

logger = logging.getLogger(__name__)

INLINE = Path("<inline>")


def _first_error(error: ValidationError) -> Tuple[Tuple[Any, ...], str]:
    detail = error.errors()[0]
    return tuple(detail.get("loc") or ()), detail.get("msg", str(error))


class JsonNetworkRepository(NetworkRepositoryInterface):
    """
    Network and sample persistence as UTF-8 JSON files.
    """

    def load_network(self, path: Path) -> Network:
        """
        Load and validate a network file.

        Raises:
            NetworkLoadError: If the file is missing, malformed or inconsistent
        """
        path = Path(path)
        network = self.parse_network(self._read_json(path), path)
        logger.info(f"Loaded network '{network.name}' from {path} ({network.depth} layers)")
        return network

    def parse_network(self, document: Any, path: Path = INLINE) -> Network:
        """
        Validate an already decoded NetworkFile document.

        Args:
            document: Decoded JSON object
            path: Source named in error messages

        Raises:
            NetworkLoadError: If the document is malformed or inconsistent
        """
        try:
            network_file = NetworkFile.model_validate(document)
        except ValidationError as e:
            location, message = _first_error(e)
            if len(location) >= 2 and location[0] == "layers" and isinstance(location[1], int):
                index = location[1]
                field = str(location[2]) if len(location) > 2 else "layers"
                raise NetworkLoadError(
                    f"{path}: layer {index}: field '{field}': {message}",
                    cause=e, path=path, layer_index=index, field=field,
                )
            field = str(location[0]) if location else "document"
            raise NetworkLoadError(f"{path}: field '{field}': {message}", cause=e, path=path, field=field)

        layers = [self._layer_from_record(path, index, record) for index, record in enumerate(network_file.layers)]
        try:
            network = Network(layers, name=network_file.name or (path.stem if path != INLINE else "network"))
        except ImplyLPError as e:
            raise NetworkLoadError(f"{path}: {e}", cause=e, path=path)
        return network

    def save_network(self, network: Network, path: Path) -> None:
        """
        Write a network file. Floats are written with their shortest exact
        decimal representation, so a reload gives bit-identical values.

        Raises:
            NetworkLoadError: If the file cannot be written
        """
        path = Path(path)
        if not network.layers:
            raise NetworkLoadError("Cannot save a network without layers", path=path, field="layers")
        self._write_json(self.to_document(network), path)
        logger.info(f"Saved network '{network.name}' to {path}")

    def to_document(self, network: Network) -> Dict[str, Any]:
        """NetworkFile document of ``network``, ready for ``json.dumps``."""
        return {
            "format_version": FORMAT_VERSION,
            "name": network.name,
            "layers": [self._record_from_layer(layer) for layer in network.layers],
        }

    def load_samples(self, path: Path, num_classes: Optional[int] = None) -> List[Sample]:
        """
        Load samples in file order.

        Raises:
            NetworkLoadError: If the file is missing, malformed or a sample is invalid
        """
        path = Path(path)
        document = self._read_json(path)
        try:
            sample_file = SampleFile.model_validate(document)
        except ValidationError as e:
            location, message = _first_error(e)
            if len(location) >= 2 and location[0] == "samples" and isinstance(location[1], int):
                raw = document["samples"][location[1]]
                sample_id = str(raw.get("id", location[1])) if isinstance(raw, dict) else str(location[1])
                field = str(location[2]) if len(location) > 2 else "samples"
                raise NetworkLoadError(
                    f"{path}: sample '{sample_id}': field '{field}': {message}",
                    cause=e, path=path, field=field, sample_id=sample_id,
                )
            if not location or location[0] == "samples":
                raise NetworkLoadError(
                    f"{path}: expected an object with a 'samples' list ({message})",
                    cause=e, path=path, field="samples",
                )
            field = str(location[0])
            raise NetworkLoadError(f"{path}: field '{field}': {message}", cause=e, path=path, field=field)

        limit = num_classes if num_classes is not None else sample_file.num_classes
        samples = []
        for record in sample_file.samples:
            if limit is not None and record.label is not None and record.label >= limit:
                raise NetworkLoadError(
                    f"{path}: sample '{record.id}': label {record.label} not below {limit} classes",
                    path=path, field="label", sample_id=record.id,
                )
            values = np.array(record.values, dtype=np.float64)
            values.setflags(write=False)
            samples.append(Sample(id=record.id, values=values, label=record.label))

        logger.info(f"Loaded {len(samples)} samples from {path}")
        return samples

    def save_samples(self, samples: List[Sample], path: Path, num_classes: Optional[int] = None) -> None:
        """Write samples in the given order."""
        payload: Dict[str, Any] = {
            "samples": [
                {"id": s.id, "values": [float(v) for v in np.ravel(s.values)], "label": s.label}
                for s in samples
            ]
        }
        if num_classes is not None:
            payload["num_classes"] = num_classes
        self._write_json(payload, Path(path))

    # Conversion

    def _layer_from_record(self, path: Path, index: int, record: LayerRecord) -> LayerSpec:
        def fail(field: str, message: str, cause: Exception | None = None):
            return NetworkLoadError(
                f"{path}: layer {index} ({record.kind}): field '{field}': {message}",
                cause=cause, path=path, layer_index=index, field=field,
            )

        kind = LayerKind(record.kind)
        weights = bias = None
        if kind in (LayerKind.DENSE, LayerKind.CONV2D):
            for field in ("weights", "weights_shape", "bias"):
                if getattr(record, field) is None:
                    raise fail(field, "required for this layer kind")
            expected_rank = 2 if kind == LayerKind.DENSE else 4
            if len(record.weights_shape) != expected_rank:
                raise fail("weights_shape", f"must have {expected_rank} entries")
            if int(np.prod(record.weights_shape)) != len(record.weights):
                raise fail("weights", f"has {len(record.weights)} values, shape {record.weights_shape} needs "
                                      f"{int(np.prod(record.weights_shape))}")
            out_dim = record.weights_shape[0] if kind == LayerKind.DENSE else record.weights_shape[-1]
            if len(record.bias) != out_dim:
                raise fail("bias", f"length {len(record.bias)} does not match {out_dim} outputs")
            weights = np.array(record.weights, dtype=np.float64).reshape(record.weights_shape)
            bias = np.array(record.bias, dtype=np.float64)
            for field, values in (("weights", weights), ("bias", bias)):
                if not np.all(np.isfinite(values)):
                    raise fail(field, "contains non-finite values")
        elif record.weights is not None or record.bias is not None:
            raise fail("weights", "this layer kind carries no parameters")

        try:
            layer = LayerSpec(
                kind,
                record.input_shape,
                weights=weights,
                bias=bias,
                pool_size=record.pool_size,
                padding=record.padding,
                stride=record.stride,
            )
        except ImplyLPError as e:
            raise fail("input_shape", str(e), cause=e)

        if record.output_shape is not None and tuple(record.output_shape) != layer.output_shape:
            raise fail("output_shape", f"declared {record.output_shape}, derived {list(layer.output_shape)}")
        return layer

    @staticmethod
    def _record_from_layer(layer: LayerSpec) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            "kind": layer.kind.value,
            "input_shape": list(layer.input_shape),
            "output_shape": list(layer.output_shape),
        }
        if layer.weights is not None:
            record["weights_shape"] = list(layer.weights.shape)
            record["weights"] = [float(v) for v in layer.weights.ravel()]
            record["bias"] = [float(v) for v in layer.bias]
        if layer.pool_size is not None:
            record["pool_size"] = layer.pool_size
        if layer.padding is not None:
            record["padding"] = list(layer.padding)
        if layer.kind in (LayerKind.CONV2D, LayerKind.MAX_POOL2D):
            record["stride"] = list(layer.stride)
        return record

    # File access

    @staticmethod
    def _read_json(path: Path) -> Any:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise NetworkLoadError(f"Cannot read {path}: {e.strerror or e}", cause=e, path=path)
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise NetworkLoadError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}", cause=e, path=path)

    @staticmethod
    def _write_json(payload: Dict[str, Any], path: Path) -> None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(payload, allow_nan=False) + "\n", encoding="utf-8")
        except (OSError, ValueError) as e:
            raise NetworkLoadError(f"Cannot write {path}: {e}", cause=e, path=path)
