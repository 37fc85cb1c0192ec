#include "gravwit/fock.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <stdexcept>

namespace gravwit {

namespace {

void require_same_space(const FockSpace& a, const FockSpace& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": space mismatch");
}

Matrix local_annihilator(std::size_t cutoff) {
    const auto n = static_cast<Eigen::Index>(cutoff);
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

}  // namespace

std::string_view mode_name(Mode mode) {
    switch (mode) {
        case Mode::g1: return "g1";
        case Mode::g2: return "g2";
        case Mode::m: return "m";
    }
    return "?";
}

std::optional<Mode> mode_from_name(std::string_view name) {
    if (name == "g1") return Mode::g1;
    if (name == "g2") return Mode::g2;
    if (name == "m") return Mode::m;
    return std::nullopt;
}

// ---------------------------------------------------------------- FockSpace

FockSpace::FockSpace(std::vector<ModeCutoff> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw std::invalid_argument("FockSpace: no modes");
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (modes_[i].cutoff == 0)
            throw std::invalid_argument("FockSpace: cutoff of mode " +
                                        std::string(mode_name(modes_[i].mode)) + " must be >= 1");
        if (i > 0 && static_cast<int>(modes_[i].mode) <= static_cast<int>(modes_[i - 1].mode))
            throw std::invalid_argument("FockSpace: modes must be distinct and ordered g1, g2, m");
        dim_ *= modes_[i].cutoff;
    }
}

std::optional<std::size_t> FockSpace::position(Mode mode) const noexcept {
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i].mode == mode) return i;
    return std::nullopt;
}

bool FockSpace::has(Mode mode) const noexcept { return position(mode).has_value(); }

std::size_t FockSpace::cutoff(Mode mode) const {
    const auto pos = position(mode);
    if (!pos) throw std::invalid_argument("mode " + std::string(mode_name(mode)) + " not in space");
    return modes_[*pos].cutoff;
}

std::size_t FockSpace::stride(Mode mode) const {
    const auto pos = position(mode);
    if (!pos) throw std::invalid_argument("mode " + std::string(mode_name(mode)) + " not in space");
    std::size_t s = 1;
    for (std::size_t i = *pos + 1; i < modes_.size(); ++i) s *= modes_[i].cutoff;
    return s;
}

std::size_t FockSpace::index(std::span<const std::size_t> occupations) const {
    if (occupations.size() != modes_.size())
        throw std::invalid_argument("FockSpace::index: expected one occupation per mode");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (occupations[i] >= modes_[i].cutoff)
            throw std::out_of_range("FockSpace::index: occupation exceeds cutoff");
        idx = idx * modes_[i].cutoff + occupations[i];
    }
    return idx;
}

std::size_t FockSpace::index(std::initializer_list<std::size_t> occupations) const {
    return index(std::span<const std::size_t>(occupations.begin(), occupations.size()));
}

std::vector<std::size_t> FockSpace::occupations(std::size_t index) const {
    if (index >= dim_) throw std::out_of_range("FockSpace::occupations: index out of range");
    std::vector<std::size_t> occ(modes_.size());
    for (std::size_t i = modes_.size(); i-- > 0;) {
        occ[i] = index % modes_[i].cutoff;
        index /= modes_[i].cutoff;
    }
    return occ;
}

std::size_t FockSpace::occupation(std::size_t index, Mode mode) const {
    return (index / stride(mode)) % cutoff(mode);
}

bool operator==(const FockSpace& a, const FockSpace& b) noexcept {
    if (a.modes_.size() != b.modes_.size()) return false;
    for (std::size_t i = 0; i < a.modes_.size(); ++i)
        if (a.modes_[i].mode != b.modes_[i].mode || a.modes_[i].cutoff != b.modes_[i].cutoff)
            return false;
    return true;
}

FockSpace make_space(std::size_t g1_cutoff, std::size_t g2_cutoff, std::size_t m_cutoff) {
    return FockSpace({{Mode::g1, g1_cutoff}, {Mode::g2, g2_cutoff}, {Mode::m, m_cutoff}});
}

FockSpace default_space() { return make_space(4, 4, 8); }

// -------------------------------------------------------------- StateVector

StateVector::StateVector(FockSpace space, Vector amplitudes, Normalization tag)
    : space_(std::move(space)), amp_(std::move(amplitudes)), tag_(tag) {
    if (static_cast<std::size_t>(amp_.size()) != space_.dim())
        throw std::invalid_argument("StateVector: amplitude length does not match space dimension");
}

StateVector vacuum(const FockSpace& space) {
    Vector amp = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    amp(0) = 1.0;
    return StateVector(space, std::move(amp), Normalization::normalized);
}

StateVector basis_state(const FockSpace& space, std::initializer_list<std::size_t> occupations) {
    Vector amp = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    amp(static_cast<Eigen::Index>(space.index(occupations))) = 1.0;
    return StateVector(space, std::move(amp), Normalization::normalized);
}

// ----------------------------------------------------------------- Operator

Operator::Operator(FockSpace space, Matrix mat) : space_(std::move(space)), mat_(std::move(mat)) {
    const auto d = static_cast<Eigen::Index>(space_.dim());
    if (mat_.rows() != d || mat_.cols() != d)
        throw std::invalid_argument("Operator: matrix shape does not match space dimension");
}

Operator Operator::adjoint() const { return Operator(space_, mat_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
    return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& rhs) {
    require_same_space(space_, rhs.space_, "Operator::operator+");
    mat_ += rhs.mat_;
    return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
    require_same_space(space_, rhs.space_, "Operator::operator-");
    mat_ -= rhs.mat_;
    return *this;
}

Operator& Operator::operator*=(cplx scalar) {
    mat_ *= scalar;
    return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
    require_same_space(lhs.space_, rhs.space_, "Operator::operator*");
    return Operator(lhs.space_, lhs.mat_ * rhs.mat_);
}

Operator identity(const FockSpace& space) {
    const auto d = static_cast<Eigen::Index>(space.dim());
    return Operator(space, Matrix::Identity(d, d));
}

Operator zero_operator(const FockSpace& space) {
    const auto d = static_cast<Eigen::Index>(space.dim());
    return Operator(space, Matrix::Zero(d, d));
}

Operator embed(const FockSpace& space, Mode mode, const Matrix& local) {
    const std::size_t c = space.cutoff(mode);
    if (local.rows() != static_cast<Eigen::Index>(c) || local.cols() != static_cast<Eigen::Index>(c))
        throw std::invalid_argument("embed: local matrix does not match mode cutoff");
    Matrix full = Matrix::Identity(1, 1);
    for (const auto& [m, cutoff] : space.modes()) {
        const auto n = static_cast<Eigen::Index>(cutoff);
        const Matrix factor = (m == mode) ? local : Matrix(Matrix::Identity(n, n));
        full = Eigen::kroneckerProduct(full, factor).eval();
    }
    return Operator(space, std::move(full));
}

Operator annihilator(const FockSpace& space, Mode mode) {
    if (!space.has(mode))
        throw std::invalid_argument("annihilator: mode " + std::string(mode_name(mode)) + " not in space");
    return embed(space, mode, local_annihilator(space.cutoff(mode)));
}

Operator creator(const FockSpace& space, Mode mode) { return annihilator(space, mode).adjoint(); }

Operator number_operator(const FockSpace& space, Mode mode) {
    return creator(space, mode) * annihilator(space, mode);
}

// ------------------------------------------------------------- expectations

StateVector apply(const Operator& op, const StateVector& state) {
    require_same_space(op.space(), state.space(), "apply");
    return StateVector(state.space(), op.matrix() * state.amplitudes());
}

cplx expect(const Operator& op, const StateVector& state) {
    require_same_space(op.space(), state.space(), "expect");
    return state.amplitudes().dot(op.matrix() * state.amplitudes());
}

double expect_gram(const Operator& m, const StateVector& state) {
    require_same_space(m.space(), state.space(), "expect_gram");
    return (m.matrix() * state.amplitudes()).squaredNorm();
}

// ----------------------------------------------------------------- Ensemble

Ensemble::Ensemble(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("Ensemble: no components");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight >= 0.0)) throw std::invalid_argument("Ensemble: negative weight");
        if (!(c.state.space() == components_.front().state.space()))
            throw std::invalid_argument("Ensemble: components live in different spaces");
        if (std::abs(c.state.norm() - 1.0) > 1e-10)
            throw std::invalid_argument("Ensemble: component not normalized");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("Ensemble: weights do not sum to 1");
}

cplx expect(const Operator& op, const Ensemble& ensemble) {
    cplx sum = 0.0;
    for (const auto& c : ensemble.components()) sum += c.weight * expect(op, c.state);
    return sum;
}

double expect_gram(const Operator& m, const Ensemble& ensemble) {
    double sum = 0.0;
    for (const auto& c : ensemble.components()) sum += c.weight * expect_gram(m, c.state);
    return sum;
}

}  // namespace gravwit
