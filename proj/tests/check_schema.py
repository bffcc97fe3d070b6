"""Validates the reports emitted by `flowlens profile` for every fixture against the schema."""
import argparse
import json
import pathlib
import subprocess
import sys

import jsonschema


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--exe", required=True)
    ap.add_argument("--fixtures", required=True, type=pathlib.Path)
    ap.add_argument("--schema", required=True, type=pathlib.Path)
    args = ap.parse_args()

    schema = json.loads(args.schema.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    failures = 0
    specs = sorted(p for p in args.fixtures.glob("*.json") if ".events." not in p.name)
    for spec in specs:
        cmd = [args.exe, "profile", str(spec)]
        events = spec.with_name(spec.stem + ".events.json")
        if events.exists():
            cmd += ["--events", str(events)]
        out = subprocess.run(cmd, check=True, capture_output=True, text=True).stdout
        report = json.loads(out)
        errors = list(validator.iter_errors(report))
        for e in errors[:5]:
            print(f"{spec.name}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
        failures += bool(errors)
        print(f"{spec.name}: {'ok' if not errors else 'INVALID'} ({len(report['pulses'])} pulses)")

        broken = dict(report)
        del broken["pulses"]
        if validator.is_valid(broken):
            print(f"{spec.name}: schema accepted a report without pulses")
            failures += 1

    print(f"{len(specs) - failures}/{len(specs)} reports valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
