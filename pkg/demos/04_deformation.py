"""
Stability under deformations
============================

Smooth admissible deformations of a band-limited signal move the features
by at most C (R ||tau|| + ||omega||) ||f||. The sweep prints the bound next
to the measured distance as the displacement grows.
"""
from framescatter import Grid
from framescatter.deformation import check_admissible, random_smooth_field
from framescatter.frames import FrameCollection, build_wavelet_frame
from framescatter.verify import (Mollifier, random_bandlimited, stability_constant, tau_sweep,
                                 verify_deformation_stability, verify_intermediate_bound)

grid = Grid(2, 128)
R = 16
collection = FrameCollection([build_wavelet_frame(grid, J=5, K=4)])
f = random_bandlimited(2, R, seed=3).sample(grid)

mollifier = Mollifier(grid, R)
print(f"||eta||_1 = {mollifier.eta_l1:.4f}  ||grad eta||_1 = {mollifier.grad_eta_l1:.4f}  "
      f"C = {stability_constant(mollifier):.4f}")

field = random_smooth_field(grid, seed=7, dtau=0.2, omega=0.02)
verdict = check_admissible(field)
print(f"||D tau|| = {verdict.dtau_norm:.4f} <= {verdict.threshold}  "
      f"min det(I - D tau) = {verdict.min_determinant:.4f}")

rep = verify_deformation_stability(collection, f, field, R, max_depth=2, mollifier=mollifier)
print(f"features moved {rep.measured:.4f}, bound {rep.bound:.4f}")
inter = verify_intermediate_bound(f, field, R, mollifier=mollifier)
print(f"signal moved   {inter.measured:.4f}, bound {inter.bound:.4f}")

print("factor  ||tau||    bound      measured")
for row in tau_sweep(collection, f, field, R, [0.25, 0.5, 1.0], max_depth=2):
    print(f"{row['factor']:6.2f}  {row['tau_norm']:.5f}  {row['bound']:.5f}  {row['measured']:.5f}")
