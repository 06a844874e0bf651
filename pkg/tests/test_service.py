import json
import threading
import urllib.request
from urllib.error import HTTPError

from mph import invariants as inv
from mph.service import ServerThread

from conftest import band_presentation, staircase_presentation


def get(port, path, origin=None):
    req = urllib.request.Request(f"http://127.0.0.1:{port}{path}")
    if origin:
        req.add_header("Origin", origin)
    with urllib.request.urlopen(req, timeout=10) as resp:
        return resp.status, resp.read().decode(), dict(resp.headers)


def test_meta_endpoint():
    with ServerThread(staircase_presentation()) as srv:
        status, body, _ = get(srv.port, "/meta")
        assert status == 200
        meta = json.loads(body)
        assert meta["sizes"] == {"gens": 2, "rels": 5}
        assert meta["bounds"]["lo"] == [0.0, 0.0]
        assert meta["bounds"]["hi"] == [3.0, 3.0]
        assert meta["field"] == 2


def test_meta_empty_module():
    from mph.core import GradedMatrix
    from mph.present import Presentation
    pres = Presentation(GradedMatrix(2, [], [], []))
    with ServerThread(pres) as srv:
        status, body, _ = get(srv.port, "/meta")
        assert json.loads(body)["sizes"] == {"gens": 0, "rels": 0}


def test_cached_invariants_match_library():
    pres = band_presentation()
    with ServerThread(pres, bounded=True) as srv:
        _, hilbert, _ = get(srv.port, "/hilbert")
        _, betti, _ = get(srv.port, "/betti")
        _, signed, _ = get(srv.port, "/signed-barcode")
        grid = inv.GradeGrid.from_presentation(pres, sentinel=False)
        assert hilbert == inv.dumps(inv.hilbert_payload(pres, grid))
        sb = inv.signed_barcode(inv.rank_invariant(pres, grid))
        assert signed == inv.dumps(inv.signed_payload(sb))
        assert len(json.loads(signed)["positive"]) == 4
        assert len(json.loads(signed)["negative"]) == 2
        assert json.loads(betti)["b0"] == [[1.0, 0.0, 1], [0.0, 1.0, 1]]


def test_slice_byte_identical_to_cli(rng):
    pres = staircase_presentation()
    with ServerThread(pres) as srv:
        for _ in range(25):
            vx = 1.0 + rng.random() * 3
            vy = 1.0 + rng.random() * 3
            bx = rng.uniform(-3, 3)
            by = rng.uniform(-3, 3)
            _, body, _ = get(srv.port,
                             f"/slice?vx={vx!r}&vy={vy!r}&bx={bx!r}&by={by!r}")
            assert body == inv.slice_json(pres, vx, vy, bx, by)


def test_slice_rejects_inadmissible_line():
    with ServerThread(staircase_presentation()) as srv:
        try:
            get(srv.port, "/slice?vx=0.5&vy=1&bx=0&by=0")
            assert False, "expected 400"
        except HTTPError as e:
            assert e.code == 400
            assert "inadmissible" in e.read().decode()
        try:
            get(srv.port, "/slice?vx=1&vy=1")
            assert False, "expected 400"
        except HTTPError as e:
            assert e.code == 400


def test_unknown_route_404():
    with ServerThread(staircase_presentation()) as srv:
        try:
            get(srv.port, "/nope")
            assert False
        except HTTPError as e:
            assert e.code == 404


def test_cors_localhost_only():
    with ServerThread(staircase_presentation()) as srv:
        _, _, headers = get(srv.port, "/meta", origin="http://localhost:3000")
        assert headers.get("Access-Control-Allow-Origin") == \
            "http://localhost:3000"
        _, _, headers = get(srv.port, "/meta", origin="http://evil.example")
        assert "Access-Control-Allow-Origin" not in headers


def test_cors_override():
    with ServerThread(staircase_presentation(), allow_origin="*") as srv:
        _, _, headers = get(srv.port, "/meta", origin="http://evil.example")
        assert headers.get("Access-Control-Allow-Origin") == "*"


def test_concurrent_queries_match_serial():
    pres = staircase_presentation()
    with ServerThread(pres) as srv:
        lines = [(1.0 + k / 7, 1.0 + (k % 3) / 2, -1.0 + k / 5, 0.5 - k / 9)
                 for k in range(16)]
        expected = [inv.slice_json(pres, *ln) for ln in lines]
        results = [None] * len(lines)

        def fetch(i):
            vx, vy, bx, by = lines[i]
            _, body, _ = get(srv.port,
                             f"/slice?vx={vx!r}&vy={vy!r}&bx={bx!r}&by={by!r}")
            results[i] = body

        threads = [threading.Thread(target=fetch, args=(i,))
                   for i in range(len(lines))]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert results == expected
