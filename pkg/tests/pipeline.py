"""End-to-end run of the CLI over the UCD fixture inside a scratch workspace."""
import io
import shutil
from pathlib import Path

from reprokg.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
CREATED_AT = "2023-05-11T00:00:00Z"


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_pipeline(ws: Path) -> list:
    """Annotate, validate, check, evaluate and publish; returns (step, exit code) pairs."""
    src = ws / "inputs"
    if not src.exists():
        shutil.copytree(FIXTURES / "ucd", src)
    w = ("--workspace", ws)
    ann = ws / "annotations" / "ucd-inverter.ttl"
    steps = [
        ("annotate", cli("annotate", *w, "--suite", src / "suite.yaml",
                         "--test", src / "tests" / "nor.yaml", "--test", src / "tests" / "apr.yaml",
                         "--log", src / "logs" / "nor.csv", "--log", src / "logs" / "apr.csv",
                         "--channel-map", src / "channel-map.yaml", "--context", src / "context.yaml",
                         "--system-config", src / "config.yaml")),
        ("validate", cli("validate", *w, ann)),
        ("check", cli("check", *w, ann, "-o", ws / "reports" / "completeness.json")),
    ]
    for kind in ("nor", "apr"):
        steps.append((f"evaluate-{kind}", cli(
            "evaluate", *w, src / "logs" / f"{kind}.csv", "--kind", kind, "--un", "230", "--pn", "5000",
            "--channel-map", src / "channel-map.yaml", "-o", ws / "reports" / f"{kind}-verdict.json",
            "--rdf", ws / "reports" / f"{kind}-verdict.ttl",
            "--execution", f"http://example.org/lab/execution/{kind}",
            "--plot", ws / "reports" / f"{kind}-plot.csv")))
    reports = sorted((ws / "reports").glob("*"))
    steps.append(("publish", cli("publish", *w, "ucd-inverter", ann, *reports,
                                 "--title", "UCD inverter tests", "--publisher", "ucd", "--created-at", CREATED_AT)))
    steps.append(("verify", cli("publish", *w, "--verify")))
    return [(name, res[0], res) for name, res in steps]


def snapshot(ws: Path) -> dict:
    return {
        p.relative_to(ws).as_posix(): p.read_bytes()
        for p in sorted(ws.rglob("*"))
        if p.is_file() and not p.name.endswith(".lock") and "inputs" not in p.relative_to(ws).parts
    }
