import pytest
from fastapi.testclient import TestClient

import privlogit.service.app as service_app
from privlogit import NumericalError, __version__
from privlogit.experiments import REPORT_HEADER


@pytest.fixture
def client():
    return TestClient(service_app.create_app())


def tiny_request(**overrides):
    request = {
        "source": {"kind": "synthetic", "n": 120, "d": 3, "separation": 3.0, "seed": 5},
        "algorithms": ["NOISELESS", "OFPA"],
        "grid": [0.4, 0.8],
        "repetitions": 2,
        "epochs": 4,
        "max_rounds": 3,
        "seed": 9,
    }
    request.update(overrides)
    return request


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["version"] == __version__


def test_epsilon_sweep_endpoint(client):
    response = client.post("/sweeps/epsilon", json=tiny_request())
    assert response.status_code == 200
    body = response.json()
    assert len(body["rows"]) == 4  # 2 algorithms x 2 grid points
    assert body["csv"].splitlines()[0] == REPORT_HEADER
    row = body["rows"][0]
    assert set(row) == {
        "algorithm",
        "sweep_axis",
        "sweep_value",
        "mean_miscls",
        "std_miscls",
        "mean_seconds",
        "rounds_used",
    }


def test_repeated_requests_give_identical_csv(client):
    a = client.post("/sweeps/epsilon", json=tiny_request()).json()["csv"]
    b = client.post("/sweeps/epsilon", json=tiny_request()).json()["csv"]
    assert a == b


def test_cardinality_and_dimensionality_endpoints(client):
    response = client.post(
        "/sweeps/cardinality", json=tiny_request(grid=[0.5, 1.0], epsilon=0.8)
    )
    assert response.status_code == 200
    assert {r["sweep_axis"] for r in response.json()["rows"]} == {"cardinality"}
    response = client.post("/sweeps/dimensionality", json=tiny_request(grid=[2, 3]))
    assert response.status_code == 200
    assert {r["sweep_axis"] for r in response.json()["rows"]} == {"dimensionality"}


def test_timing_endpoint_reports_seconds(client):
    response = client.post(
        "/sweeps/timing", json=tiny_request(algorithms=["OFPA"], grid=[0.8])
    )
    assert response.status_code == 200
    assert all(r["mean_seconds"] > 0 for r in response.json()["rows"])


def test_missing_data_file_maps_to_data_error(client):
    request = tiny_request(
        source={
            "kind": "csv",
            "data_path": "/definitely/not/here.csv",
            "schema_path": "/nor/this.schema",
        }
    )
    response = client.post("/sweeps/epsilon", json=request)
    assert response.status_code == 400
    body = response.json()
    assert body["kind"] == "data_error"
    assert "here.csv" in body["detail"]


def test_unknown_algorithm_maps_to_usage_error(client):
    response = client.post("/sweeps/epsilon", json=tiny_request(algorithms=["MAGIC"]))
    assert response.status_code == 400
    assert response.json()["kind"] == "usage_error"


def test_fractional_dimension_grid_rejected(client):
    response = client.post("/sweeps/dimensionality", json=tiny_request(grid=[1.5, 3]))
    assert response.status_code == 400
    assert response.json()["kind"] == "usage_error"


def test_pydantic_validation_is_422(client):
    response = client.post("/sweeps/epsilon", json=tiny_request(repetitions=0))
    assert response.status_code == 422


def test_numerical_error_maps_to_numerical_kind(client, monkeypatch):
    def explode(spec):
        raise NumericalError("non-finite parameters after gradient step at epoch 3")

    monkeypatch.setitem(service_app._SWEEPS, "epsilon", explode)
    fresh = TestClient(service_app.create_app())
    response = fresh.post("/sweeps/epsilon", json=tiny_request())
    assert response.status_code == 400
    assert response.json()["kind"] == "numerical_error"
