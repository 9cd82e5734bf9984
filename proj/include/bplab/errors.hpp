#pragma once

#include <stdexcept>

namespace bplab {

// Requested LP scale does not fit below the grid Nyquist frequency.
struct ScaleOverflow : std::range_error {
  using std::range_error::range_error;
};

// Combined frequency support of a bilinear output would alias.
struct BandOverflow : std::range_error {
  using std::range_error::range_error;
};

// A checked numerical postcondition failed (CLI exit status 1).
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bplab
