#ifndef PSEUDOENT_REPLICA_HPP
#define PSEUDOENT_REPLICA_HPP

// m-copy operator algebra.
//
// Basis ordering of the replicated space: copies outermost, sites innermost.
// A single-copy index is site-major (site 0 most significant); the full index
// is sum_c x_c * q^{m-1-c} with x_c the single-copy index of copy c.
//
// Replica convention: sigma-hat sends the content of copy j to copy sigma(j),
// so replica_operator(p * q) = replica_operator(p) * replica_operator(q).

#include "pseudoent/symgroup.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace pseudoent {

using cplx = std::complex<double>;
using Index = std::uint64_t;

/// Largest replicated dimension for index-map (sparse) replica operators.
inline constexpr Index kMaxReplicaDim = Index{1} << 22;
/// Largest replicated dimension for dense moment operators.
inline constexpr Index kMaxDenseMomentDim = 4096;

struct RegisterLayout {
    std::vector<int> site_dims;
    int m = 1;

    Index single_dim() const {
        Index q = 1;
        for (int d : site_dims) q *= static_cast<Index>(d);
        return q;
    }

    Index total_dim() const {
        Index t = 1;
        const Index q = single_dim();
        for (int c = 0; c < m; ++c) t *= q;
        return t;
    }

    int site_count() const { return static_cast<int>(site_dims.size()); }

    friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;
};

namespace detail {

/// Mixed-radix digits of a replicated index: digits[c * nsites + i] is the
/// digit of site i in copy c.
class ReplicaDigits {
public:
    explicit ReplicaDigits(const RegisterLayout& layout) : layout_(layout) {
        const int n = layout.site_count();
        weight_.resize(static_cast<std::size_t>(layout.m) * n);
        Index w = 1;
        for (int c = layout.m - 1; c >= 0; --c) {
            for (int i = n - 1; i >= 0; --i) {
                weight_[static_cast<std::size_t>(c) * n + i] = w;
                w *= static_cast<Index>(layout.site_dims[i]);
            }
        }
    }

    void decode(Index idx, std::vector<int>& digits) const {
        const int n = layout_.site_count();
        digits.resize(weight_.size());
        for (int c = layout_.m - 1; c >= 0; --c) {
            for (int i = n - 1; i >= 0; --i) {
                const auto base = static_cast<Index>(layout_.site_dims[i]);
                digits[static_cast<std::size_t>(c) * n + i] = static_cast<int>(idx % base);
                idx /= base;
            }
        }
    }

    Index weight(int copy, int site) const {
        return weight_[static_cast<std::size_t>(copy) * layout_.site_count() + site];
    }

private:
    RegisterLayout layout_;
    std::vector<Index> weight_;
};

}  // namespace detail

/// Index map of sigma-hat restricted to `sites` (identity on the others):
/// image[x] is the basis index sigma-hat sends x to.
inline std::vector<Index> replica_index_map(const RegisterLayout& layout, const Permutation& sigma,
                                            const std::vector<int>& sites) {
    if (sigma.m() != layout.m) throw std::invalid_argument("replica operator: permutation m differs from layout m");
    const Index dim = layout.total_dim();
    if (dim > kMaxReplicaDim) throw std::length_error("replica operator: replicated dimension exceeds cap");
    const int n = layout.site_count();
    std::vector<char> active(n, 0);
    for (int s : sites) {
        if (s < 0 || s >= n) throw std::invalid_argument("replica operator: site out of range");
        active[s] = 1;
    }
    detail::ReplicaDigits rd(layout);
    std::vector<Index> image(dim);
    std::vector<int> digits;
    for (Index x = 0; x < dim; ++x) {
        rd.decode(x, digits);
        Index y = 0;
        for (int c = 0; c < layout.m; ++c) {
            for (int i = 0; i < n; ++i) {
                const int target = active[i] ? sigma(c) : c;
                y += static_cast<Index>(digits[static_cast<std::size_t>(c) * n + i]) * rd.weight(target, i);
            }
        }
        image[x] = y;
    }
    return image;
}

/// sigma-hat on a replicated register, stored as a basis-index permutation.
class ReplicaOperator {
public:
    ReplicaOperator(const Permutation& sigma, RegisterLayout layout)
        : layout_(std::move(layout)), sigma_(sigma) {
        std::vector<int> all(layout_.site_count());
        std::iota(all.begin(), all.end(), 0);
        image_ = replica_index_map(layout_, sigma_, all);
    }

    const RegisterLayout& layout() const { return layout_; }
    const Permutation& permutation() const { return sigma_; }
    const std::vector<Index>& image() const { return image_; }

    Index trace() const {
        Index t = 0;
        for (Index x = 0; x < image_.size(); ++x) t += (image_[x] == x);
        return t;
    }

    Eigen::MatrixXcd dense() const {
        const auto dim = static_cast<Eigen::Index>(image_.size());
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
        for (Eigen::Index x = 0; x < dim; ++x) M(static_cast<Eigen::Index>(image_[x]), x) = 1.0;
        return M;
    }

private:
    RegisterLayout layout_;
    Permutation sigma_;
    std::vector<Index> image_;
};

inline ReplicaOperator replica_operator(const Permutation& sigma, const RegisterLayout& layout) {
    return ReplicaOperator(sigma, layout);
}

/// Dense Hermitian operator on the replicated register.
struct MomentOperator {
    RegisterLayout layout;
    Eigen::MatrixXcd matrix;

    static MomentOperator zero(const RegisterLayout& layout) {
        const Index dim = layout.total_dim();
        if (dim > kMaxDenseMomentDim) throw std::length_error("moment operator: replicated dimension exceeds dense cap");
        const auto n = static_cast<Eigen::Index>(dim);
        return {layout, Eigen::MatrixXcd::Zero(n, n)};
    }

    cplx trace() const { return matrix.trace(); }
    double hermiticity_error() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }
};

/// (q-1)! / (q+m-1)!
inline double haar_normalization(double q, int m) {
    double f = 1.0;
    for (int i = 0; i < m; ++i) f /= (q + i);
    return f;
}

inline MomentOperator haar_state_moment(const RegisterLayout& layout) {
    const Index q = layout.single_dim();
    if (static_cast<Index>(layout.m) >= q) throw std::invalid_argument("haar_state_moment: requires m < q");
    auto out = MomentOperator::zero(layout);
    const double f = haar_normalization(static_cast<double>(q), layout.m);
    for (const auto& sigma : enumerate_group(layout.m)) {
        const auto image = ReplicaOperator(sigma, layout).image();
        for (Index x = 0; x < image.size(); ++x)
            out.matrix(static_cast<Eigen::Index>(image[x]), static_cast<Eigen::Index>(x)) += f;
    }
    return out;
}

/// Reorders sites: site k of the result is site order[k] of the input.
inline MomentOperator permute_sites(const MomentOperator& op, const std::vector<int>& order) {
    const auto& in = op.layout;
    const int n = in.site_count();
    if (static_cast<int>(order.size()) != n) throw std::invalid_argument("permute_sites: order has wrong length");
    RegisterLayout outl{{}, in.m};
    for (int k = 0; k < n; ++k) outl.site_dims.push_back(in.site_dims[order[k]]);
    detail::ReplicaDigits rin(in), rout(outl);
    const Index dim = in.total_dim();
    std::vector<Index> to_out(dim);
    std::vector<int> digits;
    for (Index x = 0; x < dim; ++x) {
        rin.decode(x, digits);
        Index y = 0;
        for (int c = 0; c < in.m; ++c)
            for (int k = 0; k < n; ++k)
                y += static_cast<Index>(digits[static_cast<std::size_t>(c) * n + order[k]]) * rout.weight(c, k);
        to_out[x] = y;
    }
    MomentOperator out{outl, Eigen::MatrixXcd(op.matrix.rows(), op.matrix.cols())};
    for (Index j = 0; j < dim; ++j)
        for (Index i = 0; i < dim; ++i)
            out.matrix(static_cast<Eigen::Index>(to_out[i]), static_cast<Eigen::Index>(to_out[j])) =
                op.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

/// Exact Haar twirl of `op` on `sites` (all copies), identity elsewhere:
/// sum_{s,t} Wg_d(s t^{-1}) Tr_S(t-hat^dagger op) (x) s-hat.
inline MomentOperator haar_twirl(const MomentOperator& op, const std::vector<int>& sites, int d) {
    const auto& layout = op.layout;
    const int n = layout.site_count();
    const int m = layout.m;
    std::vector<char> active(n, 0);
    int dprod = 1;
    for (int s : sites) {
        if (s < 0 || s >= n || active[s]) throw std::invalid_argument("haar_twirl: sites must be distinct valid sites");
        active[s] = 1;
        dprod *= layout.site_dims[s];
    }
    if (sites.empty() || dprod != d) throw std::invalid_argument("haar_twirl: d must equal the product of the twirled site dims");
    if (m >= d) throw std::invalid_argument("haar_twirl: requires m < d");

    // Split the replicated index into (twirled part, spectator part), each copy-major.
    RegisterLayout lin{{}, m}, lout{{}, m};
    std::vector<int> in_sites, out_sites;
    for (int i = 0; i < n; ++i) {
        if (active[i]) {
            in_sites.push_back(i);
            lin.site_dims.push_back(layout.site_dims[i]);
        } else {
            out_sites.push_back(i);
            lout.site_dims.push_back(layout.site_dims[i]);
        }
    }
    const Index dim = layout.total_dim();
    const Index sdim = lin.total_dim();
    const Index rdim = lout.total_dim();
    detail::ReplicaDigits rd(layout), rs(lin), rr(lout);
    std::vector<Index> full(sdim * rdim);
    {
        std::vector<int> digits;
        for (Index x = 0; x < dim; ++x) {
            rd.decode(x, digits);
            Index si = 0, ri = 0;
            for (int c = 0; c < m; ++c) {
                for (std::size_t k = 0; k < in_sites.size(); ++k)
                    si += static_cast<Index>(digits[static_cast<std::size_t>(c) * n + in_sites[k]]) * rs.weight(c, static_cast<int>(k));
                for (std::size_t k = 0; k < out_sites.size(); ++k)
                    ri += static_cast<Index>(digits[static_cast<std::size_t>(c) * n + out_sites[k]]) * rr.weight(c, static_cast<int>(k));
            }
            full[si * rdim + ri] = x;
        }
    }

    const SymmetricGroup group(m);
    const WeingartenTable wg(m, d);
    const RegisterLayout twirled{{d}, m};
    std::vector<std::vector<Index>> perm_map(group.size());
    for (int t = 0; t < group.size(); ++t) perm_map[t] = ReplicaOperator(group[t], twirled).image();

    const auto R = static_cast<Eigen::Index>(rdim);
    // X_t[r, r'] = sum_{s'} op[(t s', r), (s', r')]
    std::vector<Eigen::MatrixXcd> X(group.size(), Eigen::MatrixXcd::Zero(R, R));
    for (int t = 0; t < group.size(); ++t) {
        for (Index sp = 0; sp < sdim; ++sp) {
            const Index s = perm_map[t][sp];
            for (Index rp = 0; rp < rdim; ++rp) {
                const auto col = static_cast<Eigen::Index>(full[sp * rdim + rp]);
                for (Index r = 0; r < rdim; ++r)
                    X[t](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(rp)) +=
                        op.matrix(static_cast<Eigen::Index>(full[s * rdim + r]), col);
            }
        }
    }

    MomentOperator out{layout, Eigen::MatrixXcd::Zero(op.matrix.rows(), op.matrix.cols())};
    for (int s = 0; s < group.size(); ++s) {
        Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(R, R);
        for (int t = 0; t < group.size(); ++t) Y += wg.at(group.ratio(s, t)) * X[t];
        for (Index sp = 0; sp < sdim; ++sp) {
            const Index si = perm_map[s][sp];
            for (Index rp = 0; rp < rdim; ++rp) {
                const auto col = static_cast<Eigen::Index>(full[sp * rdim + rp]);
                for (Index r = 0; r < rdim; ++r)
                    out.matrix(static_cast<Eigen::Index>(full[si * rdim + r]), col) +=
                        Y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(rp));
            }
        }
    }
    return out;
}

/// Eigenvalues of a Hermitian matrix (lower triangle is used).
inline Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Bare trace norm sum_i |lambda_i| of a Hermitian matrix.
inline double trace_norm(const Eigen::MatrixXcd& h) {
    return hermitian_eigenvalues(h).cwiseAbs().sum();
}

/// ||a - b||_tr without the conventional factor 1/2.
inline double trace_norm_distance(const MomentOperator& a, const MomentOperator& b) {
    if (!(a.layout == b.layout)) throw std::invalid_argument("trace_norm_distance: layout mismatch");
    return trace_norm(a.matrix - b.matrix);
}

/// Orthonormal basis of the symmetric subspace Sym^m(C^q), indexed by sorted
/// index tuples i_1 <= ... <= i_m.
class SymmetricBasis {
public:
    SymmetricBasis(Index q, int m) : q_(q), m_(m) {
        if (m < 1 || q < 1) throw std::invalid_argument("SymmetricBasis: need q, m >= 1");
        std::vector<Index> cur(m, 0);
        while (true) {
            tuples_.push_back(cur);
            int k = m - 1;
            while (k >= 0 && cur[k] == q - 1) --k;
            if (k < 0) break;
            ++cur[k];
            for (int j = k + 1; j < m; ++j) cur[j] = cur[k];
        }
        coeff_.reserve(tuples_.size());
        for (const auto& t : tuples_) {
            // sqrt(m! / prod mult!)
            double c = 1.0;
            for (int i = 2; i <= m; ++i) c *= i;
            for (std::size_t a = 0; a < t.size();) {
                std::size_t b = a;
                while (b < t.size() && t[b] == t[a]) ++b;
                for (std::size_t k = 2; k <= b - a; ++k) c /= static_cast<double>(k);
                a = b;
            }
            coeff_.push_back(std::sqrt(c));
        }
    }

    Index q() const { return q_; }
    int m() const { return m_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(tuples_.size()); }
    const std::vector<Index>& tuple(Eigen::Index k) const { return tuples_[static_cast<std::size_t>(k)]; }

    /// Coordinates of psi^{(x) m} in this basis.
    Eigen::VectorXcd embed_power(const Eigen::VectorXcd& psi) const {
        Eigen::VectorXcd v(size());
        for (Eigen::Index k = 0; k < size(); ++k) {
            cplx prod = coeff_[static_cast<std::size_t>(k)];
            for (Index i : tuples_[static_cast<std::size_t>(k)]) prod *= psi(static_cast<Eigen::Index>(i));
            v(k) = prod;
        }
        return v;
    }

    /// P X P expressed in this basis, for X on (C^q)^{(x) m}.
    Eigen::MatrixXcd project(const Eigen::MatrixXcd& X) const {
        const auto n = size();
        std::vector<std::vector<Index>> orbit(static_cast<std::size_t>(n));
        std::vector<double> norm(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) {
            auto t = tuples_[static_cast<std::size_t>(k)];
            do {
                Index idx = 0;
                for (Index i : t) idx = idx * q_ + i;
                orbit[static_cast<std::size_t>(k)].push_back(idx);
            } while (std::next_permutation(t.begin(), t.end()));
            norm[static_cast<std::size_t>(k)] = 1.0 / std::sqrt(static_cast<double>(orbit[static_cast<std::size_t>(k)].size()));
        }
        Eigen::MatrixXcd out(n, n);
        for (Eigen::Index b = 0; b < n; ++b) {
            for (Eigen::Index a = 0; a < n; ++a) {
                cplx acc = 0.0;
                for (Index ia : orbit[static_cast<std::size_t>(a)])
                    for (Index ib : orbit[static_cast<std::size_t>(b)])
                        acc += X(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(ib));
                out(a, b) = acc * norm[static_cast<std::size_t>(a)] * norm[static_cast<std::size_t>(b)];
            }
        }
        return out;
    }

private:
    Index q_;
    int m_;
    std::vector<std::vector<Index>> tuples_;
    std::vector<double> coeff_;
};

}  // namespace pseudoent

#endif  // PSEUDOENT_REPLICA_HPP
