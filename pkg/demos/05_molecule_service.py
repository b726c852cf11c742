"""
Running the molecule service
============================

Start the HTTP service on a scratch directory and upload the two water
documents. Then search by formula and read one back in the other format.
"""

import json
import socket
import tempfile
import threading
import time
import urllib.request
from pathlib import Path

import uvicorn

from chemjson.server import ServerConfig, create_app

DOCS = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "documents"
TOKEN = "demo-token"

with socket.socket() as s:
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
base = f"http://127.0.0.1:{port}/api/v1/molecules"

data_dir = tempfile.mkdtemp(prefix="chemjson-demo-")
server = uvicorn.Server(uvicorn.Config(create_app(ServerConfig(data_dir, TOKEN)), port=port, log_level="warning"))
threading.Thread(target=server.run, daemon=True).start()
while not server.started:
    time.sleep(0.01)


def call(method, url, body=None):
    req = urllib.request.Request(url, data=body and body.encode(), method=method,
                                 headers={"Authorization": f"Bearer {TOKEN}"})
    with urllib.request.urlopen(req) as resp:
        return resp.status, resp.read().decode()


# The id is a digest of the canonical document, so uploading twice is harmless.
for name in ("water.cjson", "water_molecule.json", "water.cjson"):
    status, body = call("POST", base, (DOCS / name).read_text())
    print(f"POST {name}: {status} {json.loads(body)['id'][:16]}...")

status, body = call("GET", base + "?formula=H2O")
for hit in json.loads(body)["results"]:
    print(f"{hit['id'][:16]}...  {hit['sourceFormat']:<8} {hit['formula']}  atoms={hit['atomCount']}")

# The ExtendedChem upload, served as Chemical JSON with perceived bonds.
ext_id = next(h["id"] for h in json.loads(body)["results"] if h["sourceFormat"] == "extchem")
status, body = call("GET", f"{base}/{ext_id}?format=cjson")
print(body)

server.should_exit = True
