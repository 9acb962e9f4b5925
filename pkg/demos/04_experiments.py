"""End-to-end experiment runs through the harness (desk-scale settings).

Writes two run directories under ./runs: a residual-decay sweep and a
short balance-error co-integration.  Each run directory also gets a ready
figure spec for the plotting frontend:

    cd frontend && npm install && npm run build
    node dist/cli.js ../runs/<run>/figure.plotspec

Run:  python3 demos/04_experiments.py
"""

from qgbal.experiment import parse_config, run_experiment

RESIDUAL = """
[grid]
N = 16

[schedule]
eps = 0.0625
sigma = 0.5
mu = 0.05

[experiment]
kind = residual-decay
run_id = demo-residual
qtilde = dipole
amplitude = 0.4
eps_sweep = 0.0625, 0.01
"""

BALANCE = """
[grid]
N = 16

[schedule]
eps = 0.05
sigma = 0.5
mu = 0.1
kappa = 4.0

[experiment]
kind = balance-error
run_id = demo-balance
qtilde = dipole
amplitude = 0.4
eps_sweep = 0.1, 0.05
n_levels = 0, 1
t_end = 0.3
out_every = 0.05
"""

FIGURE_KIND = {"residual-decay": "residual-decay", "balance-error": "slope-fit"}

for text in (RESIDUAL, BALANCE):
    config = parse_config(text)
    result = run_experiment(config)
    print(f"{config.kind}: wrote {result.csv_path}")
    for name, ok, detail in result.assertions:
        print(f"  {'PASS' if ok else 'FAIL'}: {name} ({detail})")
    spec = result.directory / "figure.plotspec"
    spec.write_text(
        f'kind = "{FIGURE_KIND[config.kind]}"\n'
        f'input = "{result.csv_path.resolve()}"\n'
        f'output = "{(result.directory / "figure.svg").resolve()}"\n'
        + ('column = "err_v"\n' if config.kind == "balance-error" else "")
    )
    print(f"  figure spec: {spec}")
