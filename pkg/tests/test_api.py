from pytest import fixture
from fastapi.testclient import TestClient

from qfe.golden import THM41_SYSTEM
from qfe.main import app

THM41_PARAMS = {"B11": 2, "B22": 1, "B12": 1, "D1": 2}
AG_K3_PARAMS = {"B11": 4, "B22": 2, "B12": 2, "C1": -2, "C2": -1, "D1": 2}


@fixture
def client() -> TestClient:
    return TestClient(app)


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_expand(client):
    response = client.post("/api/series/expand", json={"params": THM41_PARAMS, "order": 5, "x_power": 0})
    assert response.status_code == 200
    assert response.json()["q_coefficients"] == [1, 1, 2, 3, 4, 6]


def test_expand_inadmissible(client):
    params = dict(THM41_PARAMS, C1=-5)
    response = client.post("/api/series/expand", json={"params": params, "order": 5})
    assert response.status_code == 422


def test_expand_product(client):
    response = client.post("/api/series/product", json={"product": "(q^1,q^4;q^5)_inf^-1", "order": 6})
    assert response.status_code == 200
    assert response.json()["q_coefficients"] == [1, 1, 1, 1, 2, 2, 3]
    assert client.post("/api/series/product", json={"product": "(q^1;q^4)_inf^1 * (q^1;q^5)_inf^1"}).status_code == 400


def test_contiguous(client):
    response = client.post("/api/systems/contiguous", json={"params": AG_K3_PARAMS, "box": [-2, 1, -1, 1]})
    assert response.status_code == 200
    data = response.json()
    assert len(data["equations"]) == data["count_equations"] == 16
    assert data["count_series"] == 24
    assert data["rect_sizes"] == [2, 1, 0, 1, 2, 1]


def test_contiguous_bad_box(client):
    response = client.post("/api/systems/contiguous", json={"params": AG_K3_PARAMS, "box": [1, 0, 0, 0]})
    assert response.status_code == 400


def test_solve(client):
    response = client.post("/api/systems/solve", json={
        "params": THM41_PARAMS, "box": [0, 2, 0, 1], "keep": [[0, 0], [1, 0]], "verify_order": 20,
    })
    assert response.status_code == 200
    data = response.json()
    assert data["verified"] is True
    assert data["equations"] == THM41_SYSTEM


def test_solve_keep_outside_box(client):
    response = client.post("/api/systems/solve", json={
        "params": THM41_PARAMS, "box": [0, 2, 0, 1], "keep": [[0, 0], [7, 0]],
    })
    assert response.status_code == 400


def test_euler_scan(client):
    response = client.post("/api/euler/scan", json={"params": THM41_PARAMS, "order": 40, "kmax": 12})
    assert response.status_code == 200
    found = {(h["c1"], h["c2"], h["s"]): h for h in response.json()}
    assert found[(0, 0, 0)]["period"] == 4


def test_partition_report(client):
    response = client.get("/api/partitions/thm12", params={"N": 6})
    assert response.status_code == 200
    data = response.json()
    assert data["ok"] is True
    assert data["rows"][6] == [6, 9, 9, 9]
    assert client.get("/api/partitions/thm12", params={"N": 99}).status_code == 422


def test_repro(client):
    names = client.get("/api/repro").json()
    assert "thm11-n14" in names
    response = client.get("/api/repro/thm11-n14")
    assert response.status_code == 200
    assert response.json()["passed"] is True
    assert response.json()["output"][0] == "partitions of 14: 26"
    assert client.get("/api/repro/nothing").status_code == 404
