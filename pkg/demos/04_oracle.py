"""Auditing certificates against known distributions.

The oracle checks a claimed certificate against exact MGFs, moments and tails
where these exist, and against Monte Carlo frequencies otherwise.
"""
from subg import oracle, transform
from subg.certkit import CertKind, Certificate

z = oracle.Gaussian(0.0, 1.0)
claims = {
    "true: Mgf(1, 1)": Certificate.from_rho(CertKind.MGF, 1.0, 1.0),
    "false: Mgf(0.81, 1)": Certificate.from_rho(CertKind.MGF, 0.81, 1.0),
    "true: Psi(4, sqrt 2)": Certificate.from_rho(CertKind.PSI_BOUND, 4.0, 2 ** 0.5),
    "false: Tail2(0.5, 1.5)": Certificate.from_rho(CertKind.TWO_SIDED_TAIL, 0.5, 1.5),
}
for label, cert in claims.items():
    rep = oracle.verify_certificate(z, cert, probes=41, mc_samples=200_000, seed=3)
    worst = max(rep.checks, key=lambda c: c.observed - c.bound)
    print(f"{label:<24} violations={rep.violations:<3} worst probe {worst.probe:+.3g} "
          f"({worst.method.value}): observed {worst.observed:.4g} vs bound {worst.bound:.4g}")

# a derived certificate: the sum of two independent standard normals
s = transform.sum_independent([claims["true: Mgf(1, 1)"]] * 2)
rep = oracle.verify_certificate(z.self_sum(2), s)
print(f"\nsum of two normals: {s.var_proxy:g}-proxy certificate, {rep.violations} violations")
