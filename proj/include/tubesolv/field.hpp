#pragma once

#include <string>

#include "tubesolv/grid.hpp"

namespace tubesolv {

// Partial-Fourier data F[j, xi] for all grid times t_j and all xi in the box.
struct FourierField {
  CircleGrid grid;
  FrequencyBox box;
  MatrixXc data;  // grid.n rows, box.size() columns (one column per frequency)

  FourierField() = default;
  FourierField(const CircleGrid& g, const FrequencyBox& b)
      : grid(g), box(b), data(MatrixXc::Zero(g.n, b.size())) {}

  ArrayXc slice(int i) const { return data.col(i).array(); }
  void set_slice(int i, const ArrayXc& values) { data.col(i) = values.matrix(); }

  Real sup_norm() const { return data.size() ? data.cwiseAbs().maxCoeff() : 0; }

  // finite entries only
  void validate() const;
};

// Columnar formats, one record per (node, frequency): j, xi components, Re, Im.
// Both carry a version-tagged header line; the binary payload is little-endian
// 64-bit floats.
void write_field_csv(const std::string& path, const FourierField& f);
void write_field_binary(const std::string& path, const FourierField& f);
FourierField read_field(const std::string& path);

} // namespace tubesolv
