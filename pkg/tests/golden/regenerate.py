"""Rewrite the golden reports from cases.json (run after an intended output change)."""
import json
import pathlib

from galois_lift.cli import run
from galois_lift.jsonio import dumps

HERE = pathlib.Path(__file__).parent


def render(case):
    code, report = run([case["command"], "--input", json.dumps(case["input"]), "--seed", str(case["seed"])])
    return code, dumps(report)


if __name__ == "__main__":
    cases = json.loads((HERE / "cases.json").read_text())
    for name, case in cases.items():
        code, text = render(case)
        assert code == 0, (name, text)
        (HERE / f"{name}.json").write_text(text)
        print(name, "ok")
