#pragma once

#include <complex>

namespace negmix {

using Complex = std::complex<double>;

/// Principal square root on the branch arg(z) in (-pi, pi]: for z = r e^{i t}
/// the result is r^{1/2} e^{i t/2}, whose argument lies in (-pi/2, pi/2].
/// Negative reals map to the positive imaginary axis, sqrt(-4) = 2i.
///
/// std::sqrt follows the sign bit of a zero imaginary part, so -0i inputs
/// are folded onto the +0i side first; every module goes through this single
/// function so that the branch is used consistently.
inline Complex principal_sqrt(Complex z) {
  if (z.imag() == 0.0) z = Complex(z.real(), 0.0);
  return std::sqrt(z);
}

/// 1 / principal_sqrt(z). For negative reals x this is -i |x|^{-1/2}.
inline Complex principal_inv_sqrt(Complex z) {
  return 1.0 / principal_sqrt(z);
}

}  // namespace negmix
