#include "marl/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace marl {

double grad_check(const std::function<double(const std::vector<double>&)>& f,
                  const std::vector<double>& params,
                  const std::vector<double>& analytic, int probes, double h,
                  Rng& rng) {
  if (params.size() != analytic.size()) {
    throw std::invalid_argument("grad_check: gradient size mismatch");
  }
  std::vector<double> p = params;
  double worst = 0.0;
  for (int probe = 0; probe < probes; ++probe) {
    const std::size_t i = rng.randint(p.size());
    const double orig = p[i];
    p[i] = orig + h;
    const double fp = f(p);
    p[i] = orig - h;
    const double fm = f(p);
    p[i] = orig;
    const double numeric = (fp - fm) / (2.0 * h);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-3});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace marl
