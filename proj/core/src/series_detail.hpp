#pragma once

// Shared by the cycle and surface traces: the Weyl-sum series against a kernel.

#include <cstdint>
#include <functional>

#include "qtrace/geodesics.hpp"

namespace qtrace::detail {

inline constexpr std::int64_t kSeriesCutoffCap = 10'000'000;

struct SeriesResult {
  /// sum_{4 | c <= X} T_m(c) K(4 pi m sqrt(D) / c)
  double sum = 0.0;
  /// Empirical partial-summation tail estimate, same units as sum.
  double tail = 0.0;
};

SeriesResult kernel_series(std::int64_t m, const GenusCharacterSpec& spec, const TraceSettings& settings,
                           const std::function<double(double)>& kernel);

}  // namespace qtrace::detail
