"""A desk-sized version of the method ladder.

Small sparse graphs keep the exact reference cheap, so every gap below is
against a true optimum. Rows with the DP attached should sit at or below
their oracle-only counterparts.
"""

from nfpt.harness import ExperimentConfig, emit_report, run_experiment

for kind in ("mis", "mvc", "maxcut"):
    cfg = ExperimentConfig(
        datasets=["ER_desk", "BA_desk", "Reg_desk"],
        count=5,
        problem=kind,
        eta=3,
        seeds=5,
        bestof=10,
    )
    rows = run_experiment(cfg)
    print(f"== {kind} ==")
    print(emit_report(rows, "text"))
