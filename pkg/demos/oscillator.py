"""Cubic symmetry algebra of the 2D singular oscillator on one energy level.

Run: python3 demos/oscillator.py
"""
from racahkit import oscillator as osc
from racahkit import racah_algebra as ra

for k1, k2 in [(0.5, 1.5), (0.75, 0.75), (2.0, -0.3)]:
    spec = osc.OscillatorSpec(k1, k2, 8)
    res = osc.verify_oscillator_algebra(spec)
    hahn = osc.hahn_operators(spec)
    fit = ra.extract_structure_constants(hahn.K1, hahn.K2).constants
    print(f"k=({k1}, {k2}), level {spec.N}: H = {spec.energy:.2f}, "
          f"alpha1 = {spec.alpha1:.3f}, alpha2 = {spec.alpha2:.3f}")
    print(f"  [D,C+-], cubic: {max(res):.1e}   Hahn relations: {hahn.residuals.max():.1e}")
    print(f"  fitted a1={fit.a1:.3f} a2={fit.a2:+.1e} c1={fit.c1:.4f} c2={fit.c2:.4f} "
          f"e1={fit.e1:.4f} e2={fit.e2:.4f}")
