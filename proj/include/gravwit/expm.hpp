#pragma once

#include "gravwit/fock.hpp"

namespace gravwit::linalg {

/// exp(A) by scaling and squaring with a truncated Taylor series: A is scaled
/// by 2^-s so that its 1-norm is at most 0.5, the series stops once a term's
/// 1-norm drops below 1e-16, and the result is squared s times.
Matrix expm(const Matrix& a);

}  // namespace gravwit::linalg
