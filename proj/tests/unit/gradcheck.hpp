#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace crc::testing {

struct GradCheck {
  double max_rel = 0.0;   // worst element, |a - n| / max(|a|, |n|) over non-negligible entries
  double norm_rel = 0.0;  // ||a - n|| / (||a|| + ||n||)
};

/// Central differences of `loss` with respect to `values` (perturbed in place).
inline GradCheck check_gradient(std::vector<double>& values, const std::vector<double>& analytic,
                                const std::function<double()>& loss, double step = 1e-5,
                                double negligible = 1e-6) {
  GradCheck out;
  double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double keep = values[k];
    values[k] = keep + step;
    const double up = loss();
    values[k] = keep - step;
    const double down = loss();
    values[k] = keep;
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic[k];
    diff2 += (a - numeric) * (a - numeric);
    a2 += a * a;
    n2 += numeric * numeric;
    const double scale = std::max(std::abs(a), std::abs(numeric));
    if (scale > negligible) out.max_rel = std::max(out.max_rel, std::abs(a - numeric) / scale);
  }
  out.norm_rel = std::sqrt(diff2) / (std::sqrt(a2) + std::sqrt(n2) + 1e-300);
  return out;
}

}  // namespace crc::testing
