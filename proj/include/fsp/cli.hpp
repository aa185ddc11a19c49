#pragma once

#include <span>
#include <string>
#include <vector>

namespace fsp {

/// Exit codes: 0 success, 1 runtime failure, 2 configuration or assumption failure.
int cli_main(int argc, char** argv);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares fit of log y against log x. Needs two distinct x and positive values.
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace fsp
