"""
Driving the command-line front end
==================================

The ``dde-certify`` command reads a system as JSON (``n``, ``m`` and the
matrices with entries as ``[re, im]`` pairs) and writes a JSON run report.
The exit code carries the verdict: 0 stable, 1 not stable, 2 inconclusive.
"""

import json
import os
import subprocess
import sys
import tempfile

from dde_certify.model import scalar_system

tmp = tempfile.mkdtemp()
path = os.path.join(tmp, "two_delay_unstable.json")
with open(path, "w") as fh:
    json.dump(scalar_system(-1, -0.7, 0.5 + 0.1j).to_json_dict(), fh)


def dde(*args):
    proc = subprocess.run([sys.executable, "-m", "dde_certify.cli", *args], capture_output=True, text=True)
    return proc.returncode, proc.stdout


# %% certificate and witness
code, out = dde("certify", path)
rep = json.loads(out)
print("exit", code, rep["result"]["verdict"], rep["result"]["witness"])

# %% roots as CSV for plotting
code, out = dde("spectrum", path, "--tau", "5,25", "--format", "csv")
print(out.splitlines()[:4])

# %% the asymptotic level-2 curve at eps = 0.1 (negative ranges need the = form)
code, out = dde("asymptotic", path, "--level", "2", "--phases", "0", "--epsilon", "0.1",
                "--omega-range=-1:1", "--samples", "5", "--format", "csv")
print(out)

# %% resonant delay families
code, out = dde("resonances", path, "--n-range", "1:3")
res = json.loads(out)["result"]
print(res["omega0"], [d["taus"] for d in res["delay_sets"]][:3])
