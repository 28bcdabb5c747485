#pragma once

#include <complex>

#include <Eigen/Dense>

namespace tubesolv {

using Real    = double;
using Complex = std::complex<double>;

using ArrayXr  = Eigen::ArrayXd;
using ArrayXc  = Eigen::ArrayXcd;
using MatrixXc = Eigen::MatrixXcd;

// one lattice frequency xi in Z^N
using Freq = Eigen::VectorXi;

inline constexpr Real kTwoPi = 6.283185307179586476925286766559;

// log-magnitude beyond which exp() overflows a double
inline constexpr Real kOverflowGuard = 709.0;

} // namespace tubesolv
