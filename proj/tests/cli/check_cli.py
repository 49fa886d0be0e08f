"""Command-line checks: exit codes, determinism, and JSON outputs against schemas/."""
import argparse
import json
import subprocess
import sys
import tempfile
from pathlib import Path

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

ROOT = Path(__file__).resolve().parents[2]
SCHEMAS = ROOT / "schemas"
FIXTURES = ROOT / "fixtures"


def registry():
    resources = []
    for path in SCHEMAS.glob("*.json"):
        doc = json.loads(path.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
    return Registry().with_resources(resources)


REGISTRY = registry()


def validate(doc, schema_file, pointer=None):
    schema = json.loads((SCHEMAS / schema_file).read_text())
    if pointer:
        schema = {"$ref": f"{schema_file}#/$defs/{pointer}"}
    errors = sorted(Draft202012Validator(schema, registry=REGISTRY).iter_errors(doc), key=str)
    if errors:
        where = "/".join(str(p) for p in errors[0].absolute_path)
        raise AssertionError(f"{schema_file}{'#' + pointer if pointer else ''} at '{where}': {errors[0].message}")


class Cli:
    def __init__(self, exe):
        self.exe = exe

    def run(self, *args, expect=0):
        p = subprocess.run([self.exe, *map(str, args)], capture_output=True, text=True)
        if p.returncode != expect:
            raise AssertionError(f"{' '.join(map(str, args))}: exit {p.returncode}, wanted {expect}\n{p.stderr}")
        return p

    def json(self, *args):
        return json.loads(self.run(*args).stdout)


def check_diagnose(cli, tmp):
    ref = FIXTURES / "pap_counter" / "reference.c"
    report = cli.json("diagnose", "--student", ref, "--exercise", FIXTURES / "pap_counter")
    validate(report, "report.schema.json")
    assert report["mismatches"] == [], "identical files produced mismatches"
    assert report["correct"] is True

    mutant = tmp / "mutant.c"
    cli.run("mutate", "--exercise", FIXTURES / "bitmask", "--operator", "mask-fixation", "--output", mutant)
    report = cli.json("diagnose", "--student", mutant, "--exercise", FIXTURES / "bitmask",
                      "--student-id", "s2", "--data-dir", tmp / "data")
    validate(report, "report.schema.json")
    assert report["mismatches"], "a seeded fault went unnoticed"

    broken = tmp / "broken.c"
    broken.write_text("int main() {\n  variable value;\n  return 0;\n}\n")
    report = cli.json("diagnose", "--student", broken, "--exercise", FIXTURES / "bitmask")
    validate(report, "report.schema.json")
    assert report["parsed"] is False
    assert report["primary_category"] == "incorrect-recall"

    record = cli.json("sla", "show", "s2", "--data-dir", tmp / "data")
    validate(record, "sla_record.schema.json")


def check_simulate(cli, tmp):
    args = ["simulate", "--exercise", FIXTURES / "bitmask", "--profile",
            FIXTURES / "profiles" / "mask_modification.json", "--seed", 7]
    first, second = cli.run(*args).stdout, cli.run(*args).stdout
    assert first == second, "transcripts differ between identical runs"
    validate(json.loads(first), "transcript.schema.json")

    args = ["simulate", "--exercise", FIXTURES / "pap_counter", "--profile",
            FIXTURES / "profiles" / "declaration_recall.json", "--seed", 7]
    t = json.loads(cli.run(*args).stdout)
    validate(t, "transcript.schema.json")
    assert t["report"]["reason"] == "resolved", t["report"]


def check_errors(cli, tmp):
    p = cli.run("diagnose", "--no-such-flag", expect=1)
    validate(json.loads(p.stderr), "error.schema.json")
    p = cli.run("diagnose", "--student", tmp / "missing.c", "--exercise", FIXTURES / "bitmask", expect=2)
    validate(json.loads(p.stderr), "error.schema.json")
    p = cli.run("ingest", "survey", FIXTURES / "events" / "survey_missing_q7.jsonl",
                "--data-dir", tmp / "data", expect=2)
    err = json.loads(p.stderr)
    validate(err, "error.schema.json")
    assert err["error"].get("key") == "answers.7", err
    bad = tmp / "bad_config.json"
    bad.write_text(json.dumps({"dialog": {"alpha": -1}}))
    p = cli.run("simulate", "--exercise", FIXTURES / "bitmask", "--profile",
                FIXTURES / "profiles" / "mask_modification.json", "--config", bad, expect=2)
    assert json.loads(p.stderr)["error"].get("key") == "dialog.alpha", p.stderr
    cli.run("parse", FIXTURES / "bitmask" / "reference.c")
    cli.run("parse", tmp / "missing.c", expect=2)


def check_ingest(cli, tmp):
    data = tmp / "data"
    for kind in ["snapshots", "gaze", "emotion", "social", "survey"]:
        path = FIXTURES / "events" / f"{kind}.jsonl"
        first = cli.json("ingest", kind, path, "--data-dir", data)
        validate(first, "ingest_report.schema.json")
        again = cli.json("ingest", kind, path, "--data-dir", data)
        assert again["applied"] == 0 and again["duplicate"] == again["read"], again
    for student in ["s1", "s2"]:
        validate(cli.json("sla", "show", student, "--data-dir", data), "sla_record.schema.json")


def check_fixtures(cli, tmp):
    kinds = {"snapshots": "snapshot", "gaze": "gaze", "emotion": "emotion", "social": "social",
             "survey": "survey", "survey_missing_q7": "survey"}
    for stem, kind in kinds.items():
        for n, line in enumerate((FIXTURES / "events" / f"{stem}.jsonl").read_text().splitlines(), 1):
            if line.strip():
                validate(json.loads(line), "events.schema.json", kind)
    for path in (FIXTURES / "surveys").glob("*.json"):
        validate(json.loads(path.read_text()), "questionnaire.schema.json")
    for path in FIXTURES.glob("*/exercise.json"):
        validate(json.loads(path.read_text()), "exercise.schema.json")
    for path in (FIXTURES / "profiles").glob("*.json"):
        validate(json.loads(path.read_text()), "common.schema.json", "profile")
    for path in (FIXTURES / "config").glob("*.json"):
        validate(json.loads(path.read_text()), "config.schema.json")
        cli.run("simulate", "--exercise", FIXTURES / "bitmask", "--profile",
                FIXTURES / "profiles" / "mask_modification.json", "--config", path)


def check_bench(cli, tmp):
    out = cli.json("bench", "--category", "recall", "-n", 50, "--json")
    assert out["accuracy"] >= 0.8, out


CHECKS = {name[len("check_"):]: fn for name, fn in globals().items() if name.startswith("check_")}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cdiag", required=True)
    ap.add_argument("check", choices=sorted(CHECKS))
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        try:
            CHECKS[args.check](Cli(args.cdiag), Path(tmp))
        except AssertionError as e:
            print(f"FAIL {args.check}: {e}")
            return 1
    print(f"ok {args.check}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
