#pragma once

namespace cwlab {

// Shared numerical tolerances; every field must stay strictly positive.
struct Tolerances {
  double geo = 1e-9;        // absolute, for O(1)-sized domains
  double characteristic = 1e-10;
  double classify = 1e-9;   // width of the glancing band
  double glance = 1e-9;     // |normal component| / |xi| below which a hit is glancing
  double eps_kick = 1e-6;   // offset from the incoming radial point on the link
};

void validate(const Tolerances& tol);

}  // namespace cwlab
