"""Run every test family on one simulated sample and compare what each keeps.

The sample has 200 inequalities: the first 20 are violated by 0.05 and the
rest sit far inside the model (mean -0.75). A first step that prunes the slack
ones should buy a smaller critical value than the one-step tests.
"""
from momineq import MethodSpec, PenaltySpec, run_methods
from momineq.rng import stream
from momineq.simulate import DesignSpec, generate_sample

design = DesignSpec(8, p=200, rho=0.0, error_law="t4_scaled", n=400)
sample = generate_sample(design, stream(2026, 1))

c2 = PenaltySpec.from_c(2.0)
specs = []
for fam in ("SN", "MB", "EB"):
    boot = {} if fam == "SN" else {"B": 1000, "seed": 7}
    specs.append(MethodSpec(f"{fam}-1S", **boot))
    specs.append(MethodSpec(f"{fam}-2S", beta_n=0.001, **boot))
    specs.append(MethodSpec(f"{fam}-Lasso", penalty=c2, **boot))

print(f"{'method':<22}{'statistic':>10}{'critical':>10}{'kept':>6}  decision")
for o in run_methods(specs, sample):
    verdict = "reject" if o.reject else "accept"
    print(f"{o.label:<22}{o.statistic:>10.3f}{o.critical_value:>10.3f}{o.retained:>6}  {verdict}")
