"""Drive the command-line runner from Python and summarize its JSON-Lines report.

Run: python3 demos/cli_report.py
"""
import collections
import json
import os
import tempfile

from torsion_lab.cli import main

path = os.path.join(tempfile.mkdtemp(), "report.jsonl")
code = main(["--suite", "weak-theorem", "--suite", "oracle-survey",
             "--manifold", "weighted_product:lambda1=2,lambda2=3",
             "--points", "5", "--report", path])
print("exit code:", code)

with open(path) as fh:
    header, *records = [json.loads(line) for line in fh]
print("header:", header)
print(collections.Counter(r["status"] for r in records))
