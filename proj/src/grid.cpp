#include "tubesolv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tubesolv {

CircleGrid::CircleGrid(int n_t) : n(n_t) {
  if (n_t < 8) throw std::invalid_argument("CircleGrid: n_t must be >= 8, got " + std::to_string(n_t));
  if (n_t % 2 != 0) throw std::invalid_argument("CircleGrid: n_t must be even, got " + std::to_string(n_t));
}

namespace {

void enumerate(int dim, Real K, Freq& cur, int pos, std::vector<Freq>& out) {
  if (pos == dim) {
    if (cur.cast<Real>().norm() <= K) out.push_back(cur);
    return;
  }
  const int kmax = int(std::floor(K));
  for (int v = -kmax; v <= kmax; ++v) {
    cur[pos] = v;
    enumerate(dim, K, cur, pos + 1, out);
  }
}

} // namespace

FrequencyBox::FrequencyBox(int dim, Real cutoff) : N(dim), K(cutoff) {
  if (dim < 1) throw std::invalid_argument("FrequencyBox: dimension must be positive");
  if (!(cutoff > 0)) throw std::invalid_argument("FrequencyBox: cutoff must be positive");
  Freq cur(dim);
  enumerate(dim, cutoff, cur, 0, freqs);
  std::sort(freqs.begin(), freqs.end(), [](const Freq& a, const Freq& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  freqs.erase(std::unique(freqs.begin(), freqs.end(),
                          [](const Freq& a, const Freq& b) { return a == b; }),
              freqs.end());
  norms.resize(freqs.size());
  for (size_t i = 0; i < freqs.size(); ++i) norms[i] = norm_of(freqs[i]);
}

int FrequencyBox::index_of(const Freq& xi) const {
  auto it = std::lower_bound(freqs.begin(), freqs.end(), xi, [](const Freq& a, const Freq& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  if (it == freqs.end() || !(*it == xi)) return -1;
  return int(it - freqs.begin());
}

Real FrequencyBox::norm_of(const Freq& xi) { return xi.cast<Real>().norm(); }

std::string freq_to_string(const Freq& xi) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < xi.size(); ++i) os << (i ? ";" : "") << xi[i];
  os << ")";
  return os.str();
}

} // namespace tubesolv
