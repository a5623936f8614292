import json
import pathlib

import pytest

jsonschema = pytest.importorskip("jsonschema")
referencing = pytest.importorskip("referencing")

from relcalc.cli import main  # noqa: E402

SCHEMAS = pathlib.Path(__file__).resolve().parent.parent / "docs" / "schemas"

COMMANDS = [
    ["smith", "--matrix", "[[2,4],[6,8]]"],
    ["homgroup", "--source", "Z/4", "--target", "Z/6"],
    ["validate", "--window", "1"],
    ["yoneda-check", "--functor", "lin", "--window", "2"],
    ["crosseffect", "--functor", "pow(lin,2)", "--tuple", "1,1", "--window", "3"],
    ["degree", "--functor", "pow(lin,2)", "--n", "1", "--window", "3"],
    ["resolve", "--functor", "pow(lin,2)", "--n", "1", "--window", "2", "--depth", "2", "--point", "1"],
    ["tower", "--functor", "lin", "--window", "2", "--max-n", "1", "--depth", "2", "--point", "1"],
    ["compare-towers", "--functor", "lin", "--n", "1", "--window", "2", "--depth", "2", "--point", "1"],
]


@pytest.fixture(scope="module")
def registry():
    res = []
    for p in SCHEMAS.glob("*.json"):
        res.append((p.name, referencing.Resource.from_contents(json.loads(p.read_text()))))
    return referencing.Registry().with_resources(res)


def check(registry, name, instance):
    schema = registry.contents(name)
    jsonschema.Draft202012Validator(schema, registry=registry).validate(instance)


@pytest.mark.parametrize("argv", COMMANDS, ids=[a[0] for a in COMMANDS])
def test_report_matches_schema(argv, registry, capsys):
    assert main(argv) == 0
    rep = json.loads(capsys.readouterr().out)
    check(registry, "report.json", rep)
    check(registry, f"result_{argv[0].replace('-', '_')}.json", rep["result"])


def test_error_matches_schema(registry, capsys):
    assert main(["crosseffect", "--functor", "lin", "--tuple", "2,2", "--window", "3"]) == 1
    check(registry, "error.json", json.loads(capsys.readouterr().out))
