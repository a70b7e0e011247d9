"""End-to-end API tests."""

import pytest
from fastapi.testclient import TestClient

from src.core.domain_services.oracle import demo_networks
from src.infrastructure.repositories.json_network_repository import JsonNetworkRepository
from src.main import app

pytestmark = pytest.mark.integration


class TestVerificationAPI:
    """Test the verification API endpoints."""

    def setup_method(self):
        """Set up test client and the demo network documents."""
        self.client = TestClient(app)
        repository = JsonNetworkRepository()
        implied, implier = demo_networks()
        self.net1 = repository.to_document(implied)
        self.net2 = repository.to_document(implier)

    def _pair(self, **overrides):
        body = {"net1": self.net1, "net2": self.net2, "sample": [0.5, 0.5], "label": 0, "delta": 0.3}
        body.update(overrides)
        return body

    def test_health_check(self):
        """Test health check endpoint."""
        response = self.client.get("/health")

        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "healthy"
        assert data["version"] == "1.0.0"

    def test_verify_implication(self):
        """The implier's correctness implies the implied network's."""
        response = self.client.post("/verify", json=self._pair(sample_id="center"))

        assert response.status_code == 200
        data = response.json()
        assert data["sample_id"] == "center"
        assert data["implied"] is True
        assert data["reverse_implied"] is False
        assert data["min_lower"] == pytest.approx(0.2, abs=1e-7)
        assert data["pair_bounds"][0]["pair"] == [0, 1]
        assert data["pair_bounds"][0]["lower_status"] == "optimal"

    def test_verify_full_matrix(self):
        """Every ordered pair is bounded on request."""
        response = self.client.post("/verify", json=self._pair(full_matrix=True))

        assert response.status_code == 200
        assert sorted(tuple(b["pair"]) for b in response.json()["pair_bounds"]) == [(0, 1), (1, 0)]

    def test_verify_pure_variant(self):
        """The pure variant is echoed back."""
        response = self.client.post("/verify", json=self._pair(variant="pure"))

        assert response.status_code == 200
        assert response.json()["variant"] == "pure"

    def test_misclassified_center_is_skipped(self):
        """The implier is wrong at the low corner."""
        response = self.client.post("/verify", json=self._pair(sample=[0.2, 0.2], delta=0.05))

        assert response.status_code == 200
        data = response.json()
        assert data["skipped"] is True
        assert data["implied"] is False

    def test_compare(self):
        """Joint bounds are tighter than independent ones."""
        response = self.client.post("/compare", json=self._pair())

        assert response.status_code == 200
        data = response.json()
        assert data["pairs"] == 1
        assert data["rows"][0]["improvement_pct"] > 50
        assert data["aggregate"]["improvement_pct"]["std"] == 0.0

    def test_invalid_network(self):
        """Inconsistent weights are reported as a bad request."""
        broken = dict(self.net1)
        broken["layers"] = [dict(layer) for layer in self.net1["layers"]]
        broken["layers"][0]["weights"] = broken["layers"][0]["weights"][:-1]

        response = self.client.post("/verify", json=self._pair(net1=broken))

        assert response.status_code == 400
        data = response.json()
        assert data["error"] == "Invalid network"
        assert "layer 0" in data["detail"]

    def test_label_out_of_range(self):
        """Class indices are checked against the networks."""
        response = self.client.post("/verify", json=self._pair(label=5))

        assert response.status_code == 400
        assert response.json()["error"] == "ClassIndexError"

    def test_wrong_sample_size(self):
        """The sample must match the network input."""
        response = self.client.post("/verify", json=self._pair(sample=[0.5, 0.5, 0.5]))

        assert response.status_code == 400

    def test_request_validation(self):
        """Negative radii never reach the verifier."""
        response = self.client.post("/verify", json=self._pair(delta=-0.1))

        assert response.status_code == 422
