import runpy
from pathlib import Path

SCRIPT = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"


def test_benchmark_runs_on_a_tiny_workload(capsys):
    main = runpy.run_path(str(SCRIPT))["main"]
    main(["--pairs", "200", "--dim", "8", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "sgns_pass" in out and "bicvm_pass" in out
