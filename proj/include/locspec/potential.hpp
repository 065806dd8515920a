#pragma once

#include <optional>
#include <vector>

#include "locspec/types.hpp"

namespace locspec {

/// Highest polynomial degree accepted for a potential piece.
inline constexpr int kMaxPieceDegree = 8;

/// Matrix-valued polynomial  sum_k c_k (x - origin)^k  with m x m complex coefficients.
class PolyMatrix {
public:
    PolyMatrix() = default;
    PolyMatrix(int dimension, double origin, std::vector<Matrix> coeffs);

    static PolyMatrix constant(const Matrix& c, double origin = 0.0);

    int dimension() const { return dimension_; }
    double origin() const { return origin_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Matrix>& coeffs() const { return coeffs_; }

    Matrix operator()(double x) const;

    /// Product with itself, computed on the coefficients (degree doubles).
    PolyMatrix squared() const;

    /// Same polynomial expanded about a different origin (Taylor shift).
    PolyMatrix rebased(double new_origin) const;

    PolyMatrix& operator+=(const PolyMatrix& other);
    void add_constant(const Matrix& c);

private:
    int dimension_ = 0;
    double origin_ = 0.0;
    std::vector<Matrix> coeffs_;
};

struct PotentialPiece {
    Interval span;  // closed on the left; the last piece also owns its right end
    PolyMatrix poly;
};

/// A jump of Q at `x`; represents the term dq * delta(x - x0) of q = Q'.
struct PotentialJump {
    double x = 0.0;
    Matrix dq;
};

/// Q(x + period) = Q(x) + drift, with the base cell [cell_start, cell_start + period).
struct Periodicity {
    double period = 1.0;
    double cell_start = 0.0;
};

/// Hermitian antiderivative Q of a (possibly singular) matrix potential q = Q'.
///
/// Q is stored as polynomial pieces plus Heaviside jumps and is right-continuous at
/// every jump. All stored matrices are exactly Hermitian.
class HermitianPotential {
public:
    /// Validates and stores; throws ValidationError on non-Hermitian data, overlapping or
    /// gapped pieces, degree above kMaxPieceDegree, or jumps outside the pieces.
    HermitianPotential(int dimension, std::vector<PotentialPiece> pieces,
                       std::vector<PotentialJump> jumps,
                       std::optional<Periodicity> periodic = std::nullopt);

    static HermitianPotential zero(int dimension);

    /// Pieces given by coefficient lists in powers of (x - origin), origin 0 unless set.
    struct PieceSpec {
        double lo;
        double hi;
        std::vector<Matrix> coeffs;
        std::optional<double> origin;
    };
    static HermitianPotential from_polynomial_pieces(int dimension, const std::vector<PieceSpec>& pieces,
                                                     std::vector<PotentialJump> jumps = {},
                                                     std::optional<Periodicity> periodic = std::nullopt);

    /// Zero background with jumps `strengths[i]` at `locations[i]`. With a period, the locations
    /// must lie in the base cell and the comb repeats.
    static HermitianPotential delta_comb(int dimension, const std::vector<double>& locations,
                                         const std::vector<Matrix>& strengths,
                                         std::optional<Periodicity> periodic = std::nullopt);

    /// Piecewise-linear Q from the cumulative trapezoid rule applied to samples of q, pinned to
    /// Q(x_0) = 0. The support is [x_0, x_N].
    static HermitianPotential antiderivative_of_samples(const std::vector<double>& x,
                                                        const std::vector<Matrix>& q);

    int dimension() const { return dimension_; }
    Interval support() const;
    bool covers(Interval iv) const;
    const std::vector<PotentialPiece>& pieces() const { return pieces_; }
    const std::vector<PotentialJump>& jumps() const { return jumps_; }
    const std::optional<Periodicity>& periodicity() const { return periodic_; }
    /// Q(x + period) - Q(x); zero matrix for non-periodic potentials.
    const Matrix& drift() const { return drift_; }

    /// True when every stored coefficient is real (Q real symmetric).
    bool is_real_symmetric() const;
    int max_degree() const;

    /// Q(x), right limit at jumps. Throws DomainError outside the support.
    Matrix at(double x) const;
    /// Q(x) Q(x), Hermitian.
    Matrix squared_at(double x) const;

    /// Piece boundaries and jump locations strictly inside (a, b), sorted and deduplicated.
    std::vector<double> breakpoints_in(Interval iv) const;

    /// Polynomial equal to Q on the open segment; the segment must contain no breakpoint.
    PolyMatrix segment(Interval iv) const;

private:
    struct Located {
        const PotentialPiece* piece;
        long cell;      // periodic cell index, 0 otherwise
        double local;   // x mapped into the base cell
    };
    Located locate(double x) const;
    Matrix jump_sum_upto(double local_x) const;

    int dimension_;
    std::vector<PotentialPiece> pieces_;
    std::vector<PotentialJump> jumps_;
    std::vector<Matrix> jump_prefix_;  // jump_prefix_[i] = sum of jumps_[0..i)
    std::optional<Periodicity> periodic_;
    Matrix drift_;
};

/// q -> q + c I, i.e. Q -> Q + c x I.
HermitianPotential shifted(const HermitianPotential& p, double c);
/// Q -> Q + C for a constant Hermitian C (leaves q unchanged).
HermitianPotential gauge_shifted(const HermitianPotential& p, const Matrix& c);
/// Q -> U Q U^dagger for a constant unitary U.
HermitianPotential conjugated(const HermitianPotential& p, const Matrix& u);
/// Block-diagonal diag(Q1, Q2). Both potentials must share periodicity (or both have none).
HermitianPotential direct_sum(const HermitianPotential& a, const HermitianPotential& b);

/// Max-entry deviation from Hermitian, ||A - A^dagger||_max.
double hermitian_defect(const Matrix& a);

}  // namespace locspec
