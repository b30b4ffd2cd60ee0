"""Client for hard-label oracles served over newline-delimited JSON.

One JSON document per line, UTF-8, ids echoed verbatim:

    -> {"id": 0, "op": "info"}
    <- {"id": 0, "num_classes": C, "input_dim": d}
    -> {"id": n, "op": "predict", "graph": {"num_nodes": ..., "edges": ...,
                                            "node_features": ...}}
    <- {"id": n, "label": L}            or  {"id": n, "error": "..."}

The client serializes calls over a single TCP connection behind a lock, which
satisfies the oracle thread-safety contract.
"""

from __future__ import annotations

import json
import socket
import threading

from .graphs import Graph, graph_to_json_dict


class RemoteVictimError(RuntimeError):
    """Transport failure, malformed response, id mismatch, or server error."""


class RemoteVictim:
    def __init__(self, host: str, port: int, timeout: float = 30.0):
        self._lock = threading.Lock()
        self._next_id = 1
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise RemoteVictimError(f"cannot connect to {host}:{port}: {exc}") from exc
        self._rfile = self._sock.makefile("rb")
        info = self._roundtrip({"id": 0, "op": "info"})
        try:
            self._num_classes = int(info["num_classes"])
            self.input_dim = int(info["input_dim"])
        except (KeyError, TypeError) as exc:
            raise RemoteVictimError(f"bad info response: {info!r}") from exc

    @classmethod
    def from_endpoint(cls, endpoint: str) -> "RemoteVictim":
        """Build from a 'host:port' address string."""
        host, _, port = endpoint.rpartition(":")
        if not host or not port.isdigit():
            raise RemoteVictimError(f"endpoint must be host:port, got {endpoint!r}")
        return cls(host, int(port))

    def _roundtrip(self, request: dict) -> dict:
        payload = (json.dumps(request) + "\n").encode("utf-8")
        with self._lock:
            try:
                self._sock.sendall(payload)
                line = self._rfile.readline()
            except OSError as exc:
                raise RemoteVictimError(f"transport failure: {exc}") from exc
        if not line:
            raise RemoteVictimError("connection closed by server")
        try:
            response = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise RemoteVictimError(f"malformed response line: {line!r}") from exc
        if not isinstance(response, dict):
            raise RemoteVictimError(f"malformed response: {response!r}")
        if response.get("id") != request["id"]:
            raise RemoteVictimError(
                f"response id {response.get('id')!r} does not match request id {request['id']}"
            )
        if "error" in response:
            raise RemoteVictimError(f"server error: {response['error']}")
        return response

    def predict(self, g: Graph) -> int:
        with self._lock:
            req_id = self._next_id
            self._next_id += 1
        response = self._roundtrip(
            {"id": req_id, "op": "predict", "graph": graph_to_json_dict(g, include_label=False)}
        )
        if "label" not in response:
            raise RemoteVictimError(f"response carries no label: {response!r}")
        return int(response["label"])

    def num_classes(self) -> int:
        return self._num_classes

    def close(self) -> None:
        try:
            self._rfile.close()
            self._sock.close()
        except OSError:
            pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def remote_victim(endpoint: str) -> RemoteVictim:
    return RemoteVictim.from_endpoint(endpoint)
