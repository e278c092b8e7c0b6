"""
HTTP surface: the same runner behind FastAPI.
"""

import pytest
from fastapi.testclient import TestClient

from app import app


@pytest.fixture
def client():
    return TestClient(app)


class TestServiceEndpoints:
    """Root and health"""

    def test_health(self, client):
        """Test health check"""
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_root_lists_subcommands(self, client):
        """Test root lists subcommands"""
        data = client.get("/").json()
        assert "jacobi" in data["subcommands"]
        assert "batch" in data["subcommands"]

    def test_subcommands(self, client):
        """Test subcommand listing"""
        data = client.get("/api/subcommands").json()
        assert "koszul-rank" in data["subcommands"]


class TestRunEndpoint:
    """POST /api/run"""

    def test_passing_check(self, client):
        """Test passing check"""
        response = client.post("/api/run", json={"command": "jacobi", "op": "W[0,1,2]", "deg": 6})
        assert response.status_code == 200
        body = response.json()
        assert body["exit_code"] == 0
        assert body["report"]["passed"] is True
        assert body["report"]["tuples_total"] == 21

    def test_failing_check_is_still_200(self, client):
        """Test failing check is still 200"""
        response = client.post("/api/run", json={"command": "finite", "algebra": "threshold"})
        assert response.status_code == 200
        body = response.json()
        assert body["exit_code"] == 1
        assert body["report"]["passed"] is False
        assert body["report"]["witness"]["arguments"] == ["x", "y", "z"]

    def test_value_command(self, client):
        """Test value command"""
        response = client.post("/api/run", json={"command": "wronskian", "args": "-2x,1"})
        assert response.json()["report"]["result"] == "2"

    def test_bad_operator(self, client):
        """Test bad operator"""
        response = client.post("/api/run", json={"command": "jacobi", "op": "nonsense"})
        assert response.status_code == 422

    def test_budget_refusal(self, client):
        """Test budget refusal"""
        response = client.post(
            "/api/run", json={"command": "jacobi", "op": "W[0,1,2]", "deg": 10, "budget": 5}
        )
        assert response.status_code == 413

    def test_invalid_body(self, client):
        """Test invalid body"""
        response = client.post("/api/run", json={"command": "jacobi", "op": "W[0,1]", "budget": 0})
        assert response.status_code == 422
