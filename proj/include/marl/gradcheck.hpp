#pragma once

#include <functional>
#include <vector>

#include "marl/rng.hpp"

namespace marl {

// Compares an analytic gradient against central finite differences of a
// scalar-valued function at `probes` random coordinates. Returns the worst
// relative error seen. Relative error uses a small floor so near-zero
// coordinates compare on the finite-difference noise scale.
double grad_check(const std::function<double(const std::vector<double>&)>& f,
                  const std::vector<double>& params,
                  const std::vector<double>& analytic, int probes, double h,
                  Rng& rng);

}  // namespace marl
