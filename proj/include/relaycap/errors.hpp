// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace relaycap {

/// Raised when a numerical routine cannot produce a trustworthy result
/// (factorization breakdown, divergent iteration, ...).
class numerical_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when no quartic root passes the Stieltjes branch criteria.
/// Callers may retry with a larger imaginary offset.
class no_valid_root_error : public numerical_error {
  public:
    using numerical_error::numerical_error;
};

} // namespace relaycap
