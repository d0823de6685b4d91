"""Generate decision reports with the CLI and validate them against the schema."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def functional(blocks, diags):
    return {
        "algebra": {"blocks": blocks},
        "densities": [[[v if i == k else 0.0 for k in range(len(d))] for i, v in enumerate(d)] for d in diags],
    }


CASES = [
    ("reach_yes", ["reach", "--with-oracle"], functional([2, 2], [[0.3, 0.1], [0.2, 0.4]]),
     functional([2, 2], [[0.2, 0.2], [0.5, 0.1]]), {0}),
    ("reach_no", ["reach"], functional([2, 2], [[0.3, 0.1], [0.2, 0.4]]),
     functional([2, 2], [[0.4, 0.2], [0.2, 0.2]]), {1}),
    ("reach_band", ["reach"], functional([1, 1], [[0.5], [0.5]]),
     functional([1, 1], [[0.5 + 5e-10], [0.5 - 5e-10]]), {2}),
    ("reach_hermitian", ["reach", "--mode", "hermitian"], functional([2], [[0.5, -0.5]]),
     functional([2], [[0.25, -0.25]]), {0}),
    ("reach_general", ["reach", "--mode", "general"], functional([2], [[0.5, -0.5]]),
     functional([2], [[0.75, -0.75]]), {1}),
    ("transport_no", ["transport"], functional([2], [[0.5, 0.5]]), functional([2], [[1.2, -0.2]]), {1}),
    ("maxmix", ["maxmix"], functional([2, 3], [[0.2, 0.2], [0.2, 0.2, 0.2]]), None, {0}),
]


def main():
    cli, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for name, args, omega, rho, codes in CASES:
            w = tmp / f"{name}_w.json"
            w.write_text(json.dumps(omega))
            cmd = [cli, *args, "--omega", str(w), "--out", str(tmp / f"{name}.json")]
            if rho is not None:
                r = tmp / f"{name}_r.json"
                r.write_text(json.dumps(rho))
                cmd += ["--rho", str(r)]
            proc = subprocess.run(cmd, capture_output=True, text=True)
            if proc.returncode not in codes:
                print(f"{name}: unexpected exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            report = json.loads((tmp / f"{name}.json").read_text())
            errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
            for e in errors:
                print(f"{name}: {'/'.join(map(str, e.path)) or '<root>'}: {e.message}")
            failures += bool(errors)
            print(f"{name}: {'ok' if not errors else 'INVALID'} ({report['verdict']})")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
