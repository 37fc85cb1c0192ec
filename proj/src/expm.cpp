#include "gravwit/expm.hpp"

#include <cmath>
#include <stdexcept>

namespace gravwit::linalg {

namespace {

double norm1(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

Matrix expm(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
    const double nrm = norm1(a);
    if (!std::isfinite(nrm)) throw std::invalid_argument("expm: non-finite matrix");

    int squarings = 0;
    if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
    const Matrix scaled = a / std::ldexp(1.0, squarings);

    Matrix result = Matrix::Identity(a.rows(), a.cols());
    Matrix term = result;
    for (int k = 1; k < 64; ++k) {
        term = (term * scaled) / static_cast<double>(k);
        result += term;
        if (norm1(term) < 1e-16) break;
    }
    for (int s = 0; s < squarings; ++s) result = (result * result).eval();
    return result;
}

}  // namespace gravwit::linalg
