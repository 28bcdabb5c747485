#pragma once

#include <string>
#include <vector>

#include "tubesolv/types.hpp"

namespace tubesolv {

// Uniform nodes t_j = 2*pi*j/n on the time circle.  n must be even and >= 8.
struct CircleGrid {
  int n = 0;

  CircleGrid() = default;
  explicit CircleGrid(int n_t);

  Real step() const { return kTwoPi / n; }
  Real node(long j) const { return kTwoPi * Real(j) / n; }

  // fold any (possibly negative) lifted node index back onto [0, n)
  int wrap(long j) const {
    long r = j % n;
    return int(r < 0 ? r + n : r);
  }
};

// All xi in Z^N with 0 < |xi| <= K plus xi = 0, Euclidean norm, deduplicated
// and in lexicographic order so every module agrees on the enumeration.
struct FrequencyBox {
  int N = 1;
  Real K = 0;
  std::vector<Freq> freqs;
  std::vector<Real> norms;

  FrequencyBox() = default;
  FrequencyBox(int dim, Real cutoff);

  int size() const { return int(freqs.size()); }
  const Freq& operator[](int i) const { return freqs[i]; }

  // index of xi in the enumeration, -1 if absent
  int index_of(const Freq& xi) const;

  static Real norm_of(const Freq& xi);
};

std::string freq_to_string(const Freq& xi);

} // namespace tubesolv
