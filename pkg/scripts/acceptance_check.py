#!/usr/bin/env python3
"""
Desk-scale acceptance checks.

Runs the quick checks (seconds to a few minutes) and prints one verdict
line per check. Exit code 0 when every check passes, 1 otherwise.
"""

import math
import os
import sys
from typing import Callable, List, Tuple

import numpy as np

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.enums import LatticeVector
from src.lattice import check_pairwise_disjoint, coprime_density, gap_points, generator_norms, prime_slope_gap, primes_up_to
from src.riesz import (
    MassSequence,
    assemble_lambda,
    certify_block,
    difference_mass,
    difference_mass_bruteforce,
    find_small_mass_ap,
    gram,
    gram_eigenvalues,
    mass_sequence,
    spot_check_subblocks,
)
from src.spectrum import fourier_coefficients, rasterize_rectangle, rectangle_table
from src.utils.logger import get_logger

logger = get_logger("acceptance")

SQUARE = (0.0, 0.6, 0.0, 0.6)


def check_coprime_density() -> bool:
    density = coprime_density(500)
    print(f"   coprime_density(500) = {density:.6f}")
    return abs(density - 6.0 / math.pi ** 2) < 0.005


def check_generator_growth() -> bool:
    norms = generator_norms(80)[:10_000]
    ratios = norms / np.sqrt(np.arange(1, len(norms) + 1))
    tail = ratios[999:]
    print(f"   min ratio {ratios.min():.4f}, tail range [{tail.min():.4f}, {tail.max():.4f}]")
    return len(norms) == 10_000 and ratios.min() >= 0.5 and 0.65 <= tail.min() and tail.max() <= 0.80


def check_prime_blocks_disjoint() -> bool:
    blocks = [prime_slope_gap(p, k) for p in primes_up_to(50) for k in range(1, p)]
    return check_pairwise_disjoint(blocks).disjoint


def check_difference_mass_identity() -> bool:
    rng = np.random.default_rng(0)
    for _ in range(100):
        p = int(rng.choice([2, 3, 5, 7]))
        spec = prime_slope_gap(p, int(rng.integers(1, p)))
        w = spec.w1
        masses = {(j * w.a, j * w.b): float(rng.random()) / p ** 2 for j in range(1, p * p)}
        a = MassSequence.from_mapping(masses, 400)
        if difference_mass(a, spec) != difference_mass_bruteforce(a, gap_points(spec)):
            return False
    return True


def check_fourier_oracle() -> bool:
    n, F = 1024, 32
    rng = np.random.default_rng(1)
    worst = 0.0
    ks = np.arange(-F, F + 1)
    ka, kb = np.meshgrid(ks, ks, indexing="ij")
    for _ in range(20):
        a1, b1 = np.sort(rng.random(2))
        a2, b2 = np.sort(rng.random(2))
        table = fourier_coefficients(rasterize_rectangle(a1, b1, a2, b2, n), F)
        exact = rectangle_table(a1, b1, a2, b2, max_freq=F)
        worst = max(worst, float(np.abs(table.values(ka, kb) - exact.values(ka, kb)).max()))
    print(f"   max error {worst:.3g} (limit {5 / n:.3g})")
    return worst <= 5 / n


def check_gram_spectrum() -> bool:
    table = rectangle_table(*SQUARE)
    rng = np.random.default_rng(2)
    for _ in range(50):
        freqs = {tuple(int(v) for v in rng.integers(-20, 21, size=2)) for _ in range(8)}
        block = [LatticeVector.of(a, b) for a, b in sorted(freqs)]
        eig = gram_eigenvalues(gram(table, block))
        if eig[0] < -1e-9 or eig[-1] > 1 + 1e-9:
            return False
        cert = certify_block(table, block, 0.0)
        if cert.hs_bound > cert.lambda_min + 1e-9:
            return False
    return True


def check_small_mass_block() -> bool:
    table = rectangle_table(*SQUARE)
    found = find_small_mass_ap(mass_sequence(table), 0.18 ** 2, primes_up_to(31))
    if not found.found:
        return False
    cert = certify_block(table, prime_slope_gap(found.p, found.k), 0.18)
    print(f"   block B({found.p},{found.k}): lambda_min {cert.lambda_min:.4f}, HS {cert.hs_bound:.4f}")
    return cert.lambda_min >= 0.18 and cert.hs_bound <= cert.lambda_min + 1e-9


def check_assembly() -> bool:
    table = rectangle_table(*SQUARE)
    result = assemble_lambda(table, [2, 3, 5, 7], 0.5)
    if result.empty or result.global_certificate is None:
        return False
    print(f"   {len(result.frequencies)} frequencies, gamma {result.global_gamma:.4f}, partial={result.partial}")
    for section in result.sections:
        print(f"   B({section.p},{section.k}) + {section.M.as_tuple()}")
    lows = spot_check_subblocks(table, result.frequencies, 20, max(1, len(result.frequencies) // 2), seed=0)
    return not result.partial and result.global_gamma >= 0.09 and min(lows) >= 0.09


CHECKS: List[Tuple[str, Callable[[], bool]]] = [
    ("coprime density", check_coprime_density),
    ("generator norm growth", check_generator_growth),
    ("prime-slope blocks disjoint", check_prime_blocks_disjoint),
    ("difference mass identity", check_difference_mass_identity),
    ("rectangle Fourier oracle", check_fourier_oracle),
    ("Gram spectrum in [0,1]", check_gram_spectrum),
    ("small-mass block certified", check_small_mass_block),
    ("Lambda assembly on [0,0.6]^2", check_assembly),
]


def main():
    """Run every check and report."""
    failed = 0
    for name, check in CHECKS:
        try:
            ok = check()
        except Exception as e:
            logger.error(f"{name} raised: {e}", exc_info=True)
            ok = False
        print(f"{'✅' if ok else '❌'} {name}")
        failed += 0 if ok else 1

    if failed:
        print(f"❌ {failed} of {len(CHECKS)} checks failed")
        sys.exit(1)
    print("✅ All checks passed")
    sys.exit(0)


if __name__ == "__main__":
    main()
