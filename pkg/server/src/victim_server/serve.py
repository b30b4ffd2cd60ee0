"""Newline-delimited JSON oracle server.

One JSON document per line, ids echoed verbatim.  Supported ops:

    {"id": 0, "op": "info"}                      -> num_classes + input_dim
    {"id": n, "op": "predict", "graph": {...}}   -> {"id": n, "label": L}

Malformed input produces an error response (id echoed when parseable, null
otherwise) and the connection stays open.  Inference is stateless, so
concurrent connections each get serialized request handling.
"""

from __future__ import annotations

import json
import socket
import sys
import threading

from .inference import InferenceError, WeightBundle, graph_from_request


def handle_line(bundle: WeightBundle, line: str) -> str:
    req_id = None
    try:
        req = json.loads(line)
        if not isinstance(req, dict):
            raise InferenceError("request must be a JSON object")
        req_id = req.get("id")
        op = req.get("op")
        if op == "info":
            reply = {"id": req_id, "num_classes": bundle.num_classes, "input_dim": bundle.input_dim}
        elif op == "predict":
            adjacency, features = graph_from_request(req.get("graph") or {})
            reply = {"id": req_id, "label": bundle.predict(adjacency, features)}
        else:
            reply = {"id": req_id, "error": f"unknown op {op!r}"}
    except json.JSONDecodeError:
        reply = {"id": None, "error": "malformed JSON line"}
    except InferenceError as exc:
        reply = {"id": req_id, "error": str(exc)}
    return json.dumps(reply)


def _serve_stream(bundle: WeightBundle, rfile, wfile) -> None:
    for raw in rfile:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8", errors="replace")
        if not raw.strip():
            continue
        wfile.write((handle_line(bundle, raw) + "\n").encode("utf-8"))
        wfile.flush()


class OracleServer:
    """TCP server; each connection is handled on its own thread."""

    def __init__(self, bundle: WeightBundle, host: str = "127.0.0.1", port: int = 0):
        self.bundle = bundle
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(8)
        self.host, self.port = self._sock.getsockname()
        self._closed = False

    def serve_forever(self) -> None:
        while not self._closed:
            try:
                conn, _ = self._sock.accept()
            except OSError:
                return
            threading.Thread(target=self._handle, args=(conn,), daemon=True).start()

    def _handle(self, conn: socket.socket) -> None:
        with conn:
            rfile = conn.makefile("rb")
            wfile = conn.makefile("wb")
            try:
                _serve_stream(self.bundle, rfile, wfile)
            except (OSError, ValueError):
                pass

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread

    def close(self) -> None:
        self._closed = True
        self._sock.close()


def serve(weights_path: str, listen: str) -> None:
    """Run until interrupted.  ``listen`` is host:port, or '-' for stdio."""
    bundle = WeightBundle.load(weights_path)
    if listen == "-":
        _serve_stream(bundle, sys.stdin.buffer, sys.stdout.buffer)
        return
    host, _, port_s = listen.rpartition(":")
    server = OracleServer(bundle, host or "127.0.0.1", int(port_s))
    print(f"serving {weights_path} on {server.host}:{server.port}", file=sys.stderr)
    server.serve_forever()
