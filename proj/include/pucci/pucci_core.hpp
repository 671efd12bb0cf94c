#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace pucci {

/// Ellipticity constants 0 < alpha <= beta of the Pucci operators.
struct EllipticityPair {
    double alpha = 1.0;
    double beta = 1.0;

    EllipticityPair() = default;
    EllipticityPair(double a, double b);

    bool is_laplacian() const { return alpha == beta; }
};

/// Which extremal operator: M+ (sup) or M- (inf).
enum class Sign { plus, minus };

inline Sign opposite(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }

/// Coefficient the Pucci rule applies to an eigenvalue (or directional
/// second derivative) `s`: for M+ it is beta on positive values and alpha
/// otherwise, for M- the roles swap.
inline double pucci_weight(double s, const EllipticityPair& ell, Sign sign) {
    if (sign == Sign::plus) return s > 0.0 ? ell.beta : ell.alpha;
    return s > 0.0 ? ell.alpha : ell.beta;
}

/// Inverse of s -> pucci_weight(s) * s, which is strictly increasing.
inline double pucci_weight_inverse(double g, const EllipticityPair& ell, Sign sign) {
    return g / pucci_weight(g, ell, sign);
}

/// Dense symmetric n x n matrix, row-major.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n);
    SymMatrix(int n, std::vector<double> entries);
    SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SymMatrix identity(int n);
    static SymMatrix diagonal(std::span<const double> d);

    int dim() const { return n_; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
    /// Sets both (i, j) and (j, i).
    void set(int i, int j, double v);

    double frobenius_norm() const;
    SymMatrix scaled(double t) const;
    SymMatrix operator-() const { return scaled(-1.0); }
    SymMatrix operator+(const SymMatrix& o) const;
    SymMatrix operator-(const SymMatrix& o) const;
    double trace() const;
    /// Q^T M Q for a square (not necessarily orthogonal) row-major Q.
    SymMatrix congruence(std::span<const double> q) const;

    std::span<const double> entries() const { return a_; }

private:
    int n_ = 0;
    std::vector<double> a_;
};

/// All eigenvalues in ascending order (cyclic Jacobi).
std::vector<double> sym_eigenvalues(const SymMatrix& m);

double pucci_plus(const SymMatrix& m, const EllipticityPair& ell);
double pucci_minus(const SymMatrix& m, const EllipticityPair& ell);
double pucci(const SymMatrix& m, const EllipticityPair& ell, Sign sign);

/// Monte-Carlo lower approximation of sup over A in A_{alpha,beta} of tr(AM).
/// Frame 0 is the identity; further frames are seeded random orthogonal
/// matrices. For each frame every spectrum a in {alpha, beta}^n is tried.
double pucci_sup_oracle(const SymMatrix& m, const EllipticityPair& ell, int num_frames, std::uint64_t seed);

/// Seeded random orthogonal n x n matrix (row-major) from Gram-Schmidt of a
/// standard normal matrix; the triangular factor has positive diagonal.
std::vector<double> random_orthogonal(int n, std::uint64_t seed);

}  // namespace pucci
