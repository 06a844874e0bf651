"""Read-only HTTP query server over one loaded presentation.

Serves the cached Hilbert function, Betti numbers, and signed barcode,
plus on-demand fibered-barcode slices for the interactive explorer.  The
loaded module is immutable, so any number of concurrent readers get
answers identical to serial execution.  Slice responses are produced by
the same code path as the CLI and are byte-identical to it.
"""

from __future__ import annotations

import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from . import invariants as inv
from .present import Presentation, betti_numbers, minimal_resolution, minimize

_LOCALHOST = re.compile(r"^https?://(localhost|127\.0\.0\.1|\[::1\])(:\d+)?$")


class LoadedModule:
    """A presentation with all cached invariants, fixed at load time."""

    def __init__(self, pres: Presentation, bounded=False):
        pres = minimize(pres)  # idempotent; ensures genuine minimality
        self.pres = pres
        self.grid = inv.GradeGrid.from_presentation(pres, sentinel=not bounded)
        self.hilbert_body = inv.dumps(inv.hilbert_payload(pres, self.grid))
        res = minimal_resolution(pres)
        self.betti_body = inv.dumps(inv.betti_payload(betti_numbers(res)))
        ri = inv.rank_invariant(pres, self.grid)
        barcode = inv.signed_barcode(ri)
        self.signed_body = inv.dumps(inv.signed_payload(barcode))
        self._check_consistency(ri, barcode)
        grades = list(pres.row_grades) + list(pres.col_grades)
        if grades:
            lo = (min(g[0] for g in grades), min(g[1] for g in grades))
            hi = (max(g[0] for g in grades), max(g[1] for g in grades))
        else:
            lo = hi = (0.0, 0.0)
        self.meta_body = inv.dumps({
            "axes": list(pres.axes), "dirs": list(pres.dirs),
            "bounds": {"lo": list(lo), "hi": list(hi)},
            "hom": pres.hom_degree, "field": pres.p,
            "sizes": {"gens": pres.matrix.nrows, "rels": pres.matrix.ncols},
        })

    def _check_consistency(self, ri, barcode):
        hil = inv.hilbert_function(self.pres, self.grid)
        for cell in self.grid.cells():
            g = self.grid.grade(*cell)
            if ri.rank(cell, cell) != hil[g]:
                raise AssertionError(f"rank(s,s) != dim at {g}")
            for t in self.grid.cells():
                if cell[0] <= t[0] and cell[1] <= t[1]:
                    tg = self.grid.grade(*t)
                    if barcode.counting_rank(g, tg) != ri.rank(cell, t):
                        raise AssertionError(
                            f"signed barcode does not reconstruct rank at "
                            f"{g} -> {tg}")

    def slice_body(self, vx, vy, bx, by) -> str:
        return inv.slice_json(self.pres, vx, vy, bx, by)


def _make_handler(module: LoadedModule, allow_origin=None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _cors(self):
            origin = self.headers.get("Origin")
            if allow_origin:
                self.send_header("Access-Control-Allow-Origin", allow_origin)
            elif origin and _LOCALHOST.match(origin):
                self.send_header("Access-Control-Allow-Origin", origin)

        def _send(self, status, body: str, content_type="application/json"):
            data = body.encode()
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(data)))
            self._cors()
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            url = urlparse(self.path)
            route = url.path.rstrip("/") or "/"
            if route == "/meta":
                self._send(200, module.meta_body)
            elif route == "/hilbert":
                self._send(200, module.hilbert_body)
            elif route == "/betti":
                self._send(200, module.betti_body)
            elif route == "/signed-barcode":
                self._send(200, module.signed_body)
            elif route == "/slice":
                self._slice(parse_qs(url.query))
            else:
                self._send(404, inv.dumps({"error": f"no route {route}"}))

        def _slice(self, query):
            try:
                vals = {k: float(query[k][0]) for k in ("vx", "vy", "bx", "by")}
            except (KeyError, ValueError):
                self._send(400, inv.dumps(
                    {"error": "slice needs numeric vx, vy, bx, by parameters"}))
                return
            try:
                body = module.slice_body(vals["vx"], vals["vy"],
                                         vals["bx"], vals["by"])
            except ValueError as e:
                self._send(400, inv.dumps({"error": str(e)}))
                return
            self._send(200, body)

    return Handler


def serve(pres: Presentation, host="127.0.0.1", port=8050, bounded=False,
          allow_origin=None, ready_event=None):
    """Blocking server loop; ``ready_event`` is set once bound (for tests)."""
    module = LoadedModule(pres, bounded=bounded)
    httpd = ThreadingHTTPServer((host, port), _make_handler(module, allow_origin))
    if ready_event is not None:
        ready_event.port = httpd.server_address[1]
        ready_event.set()
    try:
        httpd.serve_forever()
    finally:
        httpd.server_close()


class ServerThread:
    """Background server for tests: starts, reports its port, stops."""

    def __init__(self, pres: Presentation, bounded=False, allow_origin=None):
        self.module = LoadedModule(pres, bounded=bounded)
        self.httpd = ThreadingHTTPServer(
            ("127.0.0.1", 0), _make_handler(self.module, allow_origin))
        self.port = self.httpd.server_address[1]
        self.thread = threading.Thread(target=self.httpd.serve_forever,
                                       daemon=True)

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        self.httpd.server_close()
        self.thread.join(timeout=5)
