#pragma once

namespace potlab {

// ω_n = |B(0,1)| in R^n.
double unit_ball_volume(int n);

// |B(x, r) ∩ B(0, rho)| with |x| = d. Closed forms for n <= 3, quadrature beyond.
double lens_volume(int n, double d, double r, double rho);
// Same quantity via cap integrals; valid for every n >= 1.
double lens_volume_generic(int n, double d, double r, double rho);
// Volume of the cap of height h cut from a ball of radius R in R^n.
double cap_volume(int n, double R, double h);

}  // namespace potlab
