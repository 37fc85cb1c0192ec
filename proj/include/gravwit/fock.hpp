#pragma once

// Truncated multimode Fock space: basis indexing, state vectors, and dense
// ladder-operator matrices on the composite space.
//
// Cutoff convention: a mode with cutoff c holds occupations 0..c-1, so its
// local dimension is c. Basis states are ordered row-major in the order the
// modes were declared (g1, g2, m for the full graviton-oscillator space).

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gravwit {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Mode { g1, g2, m };

inline constexpr std::array<Mode, 3> all_modes{Mode::g1, Mode::g2, Mode::m};

std::string_view mode_name(Mode mode);
std::optional<Mode> mode_from_name(std::string_view name);

class FockSpace {
  public:
    struct ModeCutoff {
        Mode mode;
        std::size_t cutoff;
    };

    /// Modes must be distinct, listed in the order g1, g2, m (any subset).
    explicit FockSpace(std::vector<ModeCutoff> modes);

    const std::vector<ModeCutoff>& modes() const noexcept { return modes_; }
    std::size_t dim() const noexcept { return dim_; }
    bool has(Mode mode) const noexcept;
    std::size_t cutoff(Mode mode) const;
    /// Distance in the flat index between neighbouring occupations of `mode`.
    std::size_t stride(Mode mode) const;

    /// Occupations are given per declared mode, in declaration order.
    std::size_t index(std::span<const std::size_t> occupations) const;
    std::size_t index(std::initializer_list<std::size_t> occupations) const;
    std::vector<std::size_t> occupations(std::size_t index) const;
    std::size_t occupation(std::size_t index, Mode mode) const;

    friend bool operator==(const FockSpace& a, const FockSpace& b) noexcept;

  private:
    std::optional<std::size_t> position(Mode mode) const noexcept;

    std::vector<ModeCutoff> modes_;
    std::size_t dim_ = 1;
};

/// Full three-mode space (g1, g2, m). Throws std::invalid_argument on a zero cutoff.
FockSpace make_space(std::size_t g1_cutoff, std::size_t g2_cutoff, std::size_t m_cutoff);

/// Production default: g1 and g2 at cutoff 4, m at cutoff 8 (dim 128).
FockSpace default_space();

enum class Normalization { normalized, unnormalized };

class StateVector {
  public:
    StateVector(FockSpace space, Vector amplitudes,
                Normalization tag = Normalization::unnormalized);

    const FockSpace& space() const noexcept { return space_; }
    const Vector& amplitudes() const noexcept { return amp_; }
    Normalization normalization() const noexcept { return tag_; }

    cplx operator[](std::size_t index) const { return amp_(static_cast<Eigen::Index>(index)); }
    double norm() const { return amp_.norm(); }

  private:
    FockSpace space_;
    Vector amp_;
    Normalization tag_;
};

StateVector vacuum(const FockSpace& space);
StateVector basis_state(const FockSpace& space, std::initializer_list<std::size_t> occupations);

class Operator {
  public:
    Operator(FockSpace space, Matrix mat);

    const FockSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return mat_; }

    Operator adjoint() const;
    bool is_hermitian(double tol) const;

    Operator& operator+=(const Operator& rhs);
    Operator& operator-=(const Operator& rhs);
    Operator& operator*=(cplx scalar);

    friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
    friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
    friend Operator operator*(Operator lhs, cplx scalar) { return lhs *= scalar; }
    friend Operator operator*(cplx scalar, Operator rhs) { return rhs *= scalar; }
    /// Matrix product in written order.
    friend Operator operator*(const Operator& lhs, const Operator& rhs);

  private:
    FockSpace space_;
    Matrix mat_;
};

Operator identity(const FockSpace& space);
Operator zero_operator(const FockSpace& space);
/// a|n> = sqrt(n)|n-1> on `mode`, identity on the other modes.
Operator annihilator(const FockSpace& space, Mode mode);
Operator creator(const FockSpace& space, Mode mode);
Operator number_operator(const FockSpace& space, Mode mode);
/// Embeds a single-mode matrix (cutoff x cutoff) into the composite space.
Operator embed(const FockSpace& space, Mode mode, const Matrix& local);

StateVector apply(const Operator& op, const StateVector& state);
/// psi^dagger (op psi); no normalization is applied.
cplx expect(const Operator& op, const StateVector& state);
/// <psi| M^dagger M |psi> evaluated as |M psi|^2, nonnegative by construction.
double expect_gram(const Operator& m, const StateVector& state);

class Ensemble {
  public:
    struct Component {
        double weight;
        StateVector state;
    };

    /// Weights must be nonnegative and sum to 1 within 1e-12; states normalized within 1e-10.
    explicit Ensemble(std::vector<Component> components);

    const std::vector<Component>& components() const noexcept { return components_; }
    const FockSpace& space() const { return components_.front().state.space(); }

  private:
    std::vector<Component> components_;
};

cplx expect(const Operator& op, const Ensemble& ensemble);
double expect_gram(const Operator& m, const Ensemble& ensemble);

}  // namespace gravwit
