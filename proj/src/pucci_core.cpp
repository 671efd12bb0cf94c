#include "pucci/pucci_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "pucci/errors.hpp"

namespace pucci {

EllipticityPair::EllipticityPair(double a, double b) : alpha(a), beta(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a > 0.0) || !(a <= b)) {
        throw InputError("ellipticity requires 0 < alpha <= beta, got alpha=" + std::to_string(a) +
                         " beta=" + std::to_string(b));
    }
}

SymMatrix::SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
    if (n < 1) throw InputError("matrix dimension must be positive");
}

SymMatrix::SymMatrix(int n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
    if (n < 1 || a_.size() != static_cast<std::size_t>(n) * n) {
        throw InputError("matrix entry count does not match dimension");
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if ((*this)(i, j) != (*this)(j, i)) throw InputError("matrix is not symmetric");
        }
    }
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows) : n_(static_cast<int>(rows.size())) {
    for (const auto& r : rows) {
        if (r.size() != rows.size()) throw InputError("matrix must be square");
        a_.insert(a_.end(), r.begin(), r.end());
    }
    *this = SymMatrix(n_, std::move(a_));
}

SymMatrix SymMatrix::identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m.set(static_cast<int>(i), static_cast<int>(i), d[i]);
    return m;
}

void SymMatrix::set(int i, int j, double v) {
    a_[static_cast<std::size_t>(i * n_ + j)] = v;
    a_[static_cast<std::size_t>(j * n_ + i)] = v;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

SymMatrix SymMatrix::scaled(double t) const {
    SymMatrix r = *this;
    for (double& v : r.a_) v *= t;
    return r;
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
    if (o.n_ != n_) throw InputError("dimension mismatch");
    SymMatrix r = *this;
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] += o.a_[k];
    return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const { return *this + o.scaled(-1.0); }

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

SymMatrix SymMatrix::congruence(std::span<const double> q) const {
    const auto n = static_cast<std::size_t>(n_);
    if (q.size() != n * n) throw InputError("congruence factor has wrong size");
    // tmp = M Q
    std::vector<double> tmp(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double mik = a_[i * n + k];
            for (std::size_t j = 0; j < n; ++j) tmp[i * n + j] += mik * q[k * n + j];
        }
    SymMatrix r(n_);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += q[k * n + i] * tmp[k * n + j];
            r.set(static_cast<int>(i), static_cast<int>(j), s);
        }
    // Symmetrize explicitly: entries computed as (i,j), i<=j, mirrored by set().
    return r;
}

std::vector<double> sym_eigenvalues(const SymMatrix& m) {
    const int n = m.dim();
    for (double v : m.entries()) {
        if (!std::isfinite(v)) throw InputError("matrix has non-finite entries");
    }
    std::vector<double> a(m.entries().begin(), m.entries().end());
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * n + j)]; };

    const double scale = m.frobenius_norm();
    const double tol = 1e-14 * scale;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
        if (std::sqrt(off) <= tol) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(eig.begin(), eig.end());
    const double zero_band = 1e-13 * (1.0 + scale);
    for (double& v : eig)
        if (std::abs(v) <= zero_band) v = 0.0;
    return eig;
}

double pucci(const SymMatrix& m, const EllipticityPair& ell, Sign sign) {
    double v = 0.0;
    for (double mu : sym_eigenvalues(m)) v += pucci_weight(mu, ell, sign) * mu;
    return v;
}

double pucci_plus(const SymMatrix& m, const EllipticityPair& ell) { return pucci(m, ell, Sign::plus); }

double pucci_minus(const SymMatrix& m, const EllipticityPair& ell) { return pucci(m, ell, Sign::minus); }

namespace {

void fill_random_orthogonal(int n, std::mt19937_64& rng, std::vector<double>& q) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto un = static_cast<std::size_t>(n);
    q.resize(un * un);
    for (double& v : q) v = normal(rng);
    // Modified Gram-Schmidt on rows; positive norms give the sign fix.
    for (std::size_t i = 0; i < un; ++i) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < i; ++k) {
                double dot = 0.0;
                for (std::size_t j = 0; j < un; ++j) dot += q[i * un + j] * q[k * un + j];
                for (std::size_t j = 0; j < un; ++j) q[i * un + j] -= dot * q[k * un + j];
            }
        }
        double nrm = 0.0;
        for (std::size_t j = 0; j < un; ++j) nrm += q[i * un + j] * q[i * un + j];
        nrm = std::sqrt(nrm);
        for (std::size_t j = 0; j < un; ++j) q[i * un + j] /= nrm;
    }
}

}  // namespace

std::vector<double> random_orthogonal(int n, std::uint64_t seed) {
    if (n < 1) throw InputError("dimension must be positive");
    std::mt19937_64 rng(seed);
    std::vector<double> q;
    fill_random_orthogonal(n, rng, q);
    return q;
}

double pucci_sup_oracle(const SymMatrix& m, const EllipticityPair& ell, int num_frames, std::uint64_t seed) {
    if (num_frames < 1) throw InputError("oracle needs at least one frame");
    for (double v : m.entries()) {
        if (!std::isfinite(v)) throw InputError("matrix has non-finite entries");
    }
    const int n = m.dim();
    if (n > 20) throw InputError("oracle enumerates 2^n spectra; n must be <= 20");
    const auto un = static_cast<std::size_t>(n);
    std::mt19937_64 rng(seed);
    std::vector<double> q(un * un, 0.0);
    for (std::size_t i = 0; i < un; ++i) q[i * un + i] = 1.0;
    std::vector<double> d(un);
    double best = -std::numeric_limits<double>::infinity();
    const auto data = m.entries();
    for (int frame = 0; frame < num_frames; ++frame) {
        if (frame > 0) fill_random_orthogonal(n, rng, q);
        // tr(Q^T diag(a) Q M) = sum_i a_i q_i^T M q_i with q_i the rows of Q.
        for (std::size_t i = 0; i < un; ++i) {
            double s = 0.0;
            for (std::size_t r = 0; r < un; ++r) {
                double mr = 0.0;
                for (std::size_t c = 0; c < un; ++c) mr += data[r * un + c] * q[i * un + c];
                s += q[i * un + r] * mr;
            }
            d[i] = s;
        }
        const std::uint32_t combos = 1u << n;
        for (std::uint32_t mask = 0; mask < combos; ++mask) {
            double v = 0.0;
            for (std::size_t i = 0; i < un; ++i) v += ((mask >> i) & 1u ? ell.beta : ell.alpha) * d[i];
            best = std::max(best, v);
        }
    }
    return best;
}

}  // namespace pucci
