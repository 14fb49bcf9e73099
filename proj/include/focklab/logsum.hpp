#pragma once

#include <cmath>
#include <limits>

namespace focklab {

/// Running sum of exp(l_i) held as max + scaled sum, so that terms of any
/// magnitude accumulate without overflow. Order of add/merge calls fixes the
/// rounding, which keeps reductions reproducible.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double l) {
    if (l == -std::numeric_limits<double>::infinity()) return;
    if (l > max) {
      sum = sum * std::exp(max - l) + 1.0;
      max = l;
    } else {
      sum += std::exp(l - max);
    }
  }

  void merge(const LogSum& other) {
    if (other.sum == 0.0) return;
    if (sum == 0.0) {
      *this = other;
    } else if (other.max > max) {
      sum = sum * std::exp(max - other.max) + other.sum;
      max = other.max;
    } else {
      sum += other.sum * std::exp(other.max - max);
    }
  }

  double log() const {
    return sum > 0.0 ? max + std::log(sum) : -std::numeric_limits<double>::infinity();
  }
};

}  // namespace focklab
