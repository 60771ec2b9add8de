import io
import json
import subprocess
import sys

from comet_bridge.scorers import BUILTIN_CHECKPOINT, ChrfSurrogateScorer
from comet_bridge.stdio import run_stdio


def run_lines(lines: list[str]) -> list[dict]:
    stdout = io.StringIO()
    run_stdio(ChrfSurrogateScorer(), io.StringIO("".join(l + "\n" for l in lines)), stdout)
    return [json.loads(l) for l in stdout.getvalue().splitlines()]


class TestStdioLoop:
    def test_one_response_per_request(self):
        request = json.dumps({"records": [
            {"src": "s", "mt": "same words", "ref": "same words"}]})
        out = run_lines([request, request])
        assert len(out) == 2
        for response in out:
            assert response["scores"] == [1.0]
            assert response["checkpoint"] == BUILTIN_CHECKPOINT

    def test_bad_line_reports_error_and_continues(self):
        good = json.dumps({"records": [{"src": "s", "mt": "a", "ref": "a"}]})
        out = run_lines(["not json at all", good])
        assert "error" in out[0]
        assert out[1]["scores"] == [1.0]

    def test_schema_violation(self):
        out = run_lines([json.dumps({"records": [{"src": "s", "mt": "a"}]})])
        assert "error" in out[0]
        assert "ref" in out[0]["error"]

    def test_blank_lines_ignored(self):
        good = json.dumps({"records": [{"src": "s", "mt": "a", "ref": "a"}]})
        assert len(run_lines(["", good, ""])) == 1


class TestSubprocess:
    def test_cli_stdio_round_trip(self):
        request = json.dumps({"records": [
            {"src": "源", "mt": "hello world", "ref": "hello world"},
            {"src": "源", "mt": "other text", "ref": "hello world"},
        ]})
        proc = subprocess.run(
            [sys.executable, "-m", "comet_bridge.cli", "stdio",
             "--checkpoint", BUILTIN_CHECKPOINT],
            input=request + "\n", capture_output=True, text=True, timeout=60)
        assert proc.returncode == 0
        response = json.loads(proc.stdout.strip().splitlines()[-1])
        assert len(response["scores"]) == 2
        assert response["scores"][0] > response["scores"][1]
