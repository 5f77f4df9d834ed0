"""Run the CLI and validate each report against the published schema."""
import json
import subprocess
import sys

import jsonschema

binary, schema_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
validator = jsonschema.Draft202012Validator(schema)

runs = [
    ["classify", "--hamiltonian", "saddle-quadratic", "--N", "200"],
    ["action", "--hamiltonian", "sho", "--N", "200"],
    ["bounds", "--hamiltonian", "saddle-quadratic", "--N", "200", "--samples", "10"],
    ["bounds", "--hamiltonian", "sho", "--N", "200", "--samples", "10"],
    ["propagate", "--hamiltonian", "sho", "--sweep-count", "3"],
    ["propagate", "--rep", "momentum"],
    ["propagate", "--hamiltonian", "sho", "--t1", "3.14159265358979"],
    ["spin"],
    ["spin", "--N", "30"],
    ["hj-check", "--hamiltonian", "sho", "--endpoint-count", "2", "--t-count", "2"],
    ["legendre-check", "--paths", "2", "--N", "100"],
]
failures = 0
for args in runs:
    proc = subprocess.run([binary, *args], capture_output=True, text=True)
    report = json.loads(proc.stdout)
    errors = list(validator.iter_errors(report))
    if report["exit_code"] != proc.returncode:
        errors.append(f"exit code {proc.returncode} != reported {report['exit_code']}")
    status = "ok" if not errors else "FAIL"
    print(f"{status} {' '.join(args)}")
    for e in errors:
        print(f"  {getattr(e, 'message', e)}")
    failures += bool(errors)
sys.exit(1 if failures else 0)
