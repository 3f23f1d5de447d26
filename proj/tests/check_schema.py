"""Runs the CLI and validates its JSON output and sidecars against schema/."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource


def load(path):
    return json.loads(pathlib.Path(path).read_text())


def main():
    cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    schemas = {name: load(schema_dir / name) for name in ("meta.schema.json", "output.schema.json")}
    registry = Registry().with_resources(
        (s["$id"], Resource.from_contents(s)) for s in schemas.values()
    )
    meta = jsonschema.Draft202012Validator(schemas["meta.schema.json"], registry=registry)
    output = jsonschema.Draft202012Validator(schemas["output.schema.json"], registry=registry)

    with tempfile.TemporaryDirectory() as tmp:
        runs = [
            ["ghz", "--nbar", "10", "--format", "json", "--out", f"{tmp}/ghz.json"],
            ["bell", "--nbar", "10", "--ensemble", "3", "--out", f"{tmp}/bell.csv"],
            ["wigner", "--nbar", "10", "--format", "json", "--out", f"{tmp}/w.json"],
        ]
        for args in runs:
            subprocess.run([cli, *args], check=True, stderr=subprocess.DEVNULL)
        output.validate(load(f"{tmp}/ghz.json"))
        output.validate(load(f"{tmp}/w.json"))
        for sidecar in ("ghz.json.meta.json", "bell.csv.meta.json", "w.json.meta.json"):
            meta.validate(load(f"{tmp}/{sidecar}"))
    print("schema validation passed")


if __name__ == "__main__":
    main()
