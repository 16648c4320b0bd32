"""Runs every command on every fixture with --json and validates the report."""
import json
import pathlib
import subprocess
import sys

import jsonschema

binary, fixtures, schema_path = sys.argv[1], pathlib.Path(sys.argv[2]), sys.argv[3]
schema = json.loads(pathlib.Path(schema_path).read_text())
validator = jsonschema.Draft202012Validator(schema)

programs = sorted(fixtures.glob("*.lam"))
dfas = sorted(fixtures.glob("*.dfa.json"))
signature = {"iszero.lam": ["-s", str(fixtures / "iszero.sig.json")]}

runs = []
for p in programs:
    extra = signature.get(p.name, [])
    runs.append(["cps", str(p), *extra])
    runs.append(["cps", str(p), "--instance", "cost", "--json-ast", *extra])
    runs.append(["cps", str(p), "--instance", "trace", "--typed", *extra])
    runs.append(["expected-cost", str(p), "--oracle", "--dump-oracle", "--max-unfold", "20000", *extra])
    runs.append(["expected-cost", str(p), "--moments", "2", "--unsafe-constants", "--max-unfold", "20000", *extra])
    for d in dfas:
        runs.append(["check-trace", str(p), "-d", str(d), "--oracle", "--dump-oracle", "--max-unfold", "20000", *extra])

failures = 0
codes = set()
for args in runs:
    r = subprocess.run([binary, *args, "--json"], capture_output=True, text=True, timeout=120)
    codes.add(r.returncode)
    try:
        report = json.loads(r.stdout)
        validator.validate(report)
        assert report["exit_code"] == r.returncode, "exit code mismatch"
    except Exception as e:  # noqa: BLE001
        failures += 1
        print("FAIL", " ".join(args), "->", e)
print(f"{len(runs)} reports, exit codes seen {sorted(codes)}, {failures} invalid")
sys.exit(1 if failures or not {0, 1, 2, 3, 4} <= codes else 0)
