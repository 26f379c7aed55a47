#ifndef PSEUDOENT_SYMGROUP_HPP
#define PSEUDOENT_SYMGROUP_HPP

// Symmetric-group algebra and Weingarten calculus.
//
// Permutations act on copy indices {0..m-1}. Composition is left action:
// (p * q)(i) = p(q(i)).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudoent {

/// Upper bound on m for anything that enumerates S_m.
inline constexpr int kMaxCopies = 6;

class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<int> mapping) : map_(std::move(mapping)) {
        std::vector<char> seen(map_.size(), 0);
        for (int v : map_) {
            if (v < 0 || v >= static_cast<int>(map_.size()) || seen[v]) {
                throw std::invalid_argument("Permutation: mapping is not a bijection");
            }
            seen[v] = 1;
        }
    }

    static Permutation identity(int m) {
        std::vector<int> v(m);
        std::iota(v.begin(), v.end(), 0);
        return Permutation(std::move(v));
    }

    /// Transposition of copies a and b.
    static Permutation transposition(int m, int a, int b) {
        auto p = identity(m);
        std::swap(p.map_[a], p.map_[b]);
        return p;
    }

    /// Cycle (0 1 ... m-1): i -> i+1 mod m.
    static Permutation full_cycle(int m) {
        std::vector<int> v(m);
        for (int i = 0; i < m; ++i) v[i] = (i + 1) % m;
        return Permutation(std::move(v));
    }

    int m() const { return static_cast<int>(map_.size()); }
    int operator()(int i) const { return map_[i]; }
    const std::vector<int>& mapping() const { return map_; }

    Permutation inverse() const {
        std::vector<int> inv(map_.size());
        for (int i = 0; i < m(); ++i) inv[map_[i]] = i;
        Permutation r;
        r.map_ = std::move(inv);
        return r;
    }

    bool is_identity() const {
        for (int i = 0; i < m(); ++i)
            if (map_[i] != i) return false;
        return true;
    }

    /// Number of cycles, |sigma| in the Weingarten literature.
    int cycle_count() const {
        std::vector<char> seen(map_.size(), 0);
        int cycles = 0;
        for (int i = 0; i < m(); ++i) {
            if (seen[i]) continue;
            ++cycles;
            for (int j = i; !seen[j]; j = map_[j]) seen[j] = 1;
        }
        return cycles;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation& a, const Permutation& b) { return a.map_ <=> b.map_; }

    std::string str() const {
        std::ostringstream os;
        os << '[';
        for (int i = 0; i < m(); ++i) os << (i ? " " : "") << map_[i];
        os << ']';
        return os.str();
    }

private:
    std::vector<int> map_;
};

/// (p * q)(i) = p(q(i)).
inline Permutation compose(const Permutation& p, const Permutation& q) {
    if (p.m() != q.m()) throw std::invalid_argument("compose: permutations act on different m");
    std::vector<int> r(p.m());
    for (int i = 0; i < p.m(); ++i) r[i] = p(q(i));
    return Permutation(std::move(r));
}

inline Permutation operator*(const Permutation& p, const Permutation& q) { return compose(p, q); }

/// Multiset of cycle lengths, sorted descending.
struct CycleType {
    std::vector<int> lengths;

    int m() const { return std::accumulate(lengths.begin(), lengths.end(), 0); }
    int cycle_count() const { return static_cast<int>(lengths.size()); }

    friend bool operator==(const CycleType&, const CycleType&) = default;
    friend auto operator<=>(const CycleType& a, const CycleType& b) { return a.lengths <=> b.lengths; }
};

inline CycleType cycle_type(const Permutation& p) {
    CycleType t;
    std::vector<char> seen(p.m(), 0);
    for (int i = 0; i < p.m(); ++i) {
        if (seen[i]) continue;
        int len = 0;
        for (int j = i; !seen[j]; j = p(j)) {
            seen[j] = 1;
            ++len;
        }
        t.lengths.push_back(len);
    }
    std::sort(t.lengths.begin(), t.lengths.end(), std::greater<>());
    return t;
}

/// All m! permutations in lexicographic order of their mapping; element 0 is the identity.
inline std::vector<Permutation> enumerate_group(int m, int cap = kMaxCopies) {
    if (m < 1) throw std::invalid_argument("enumerate_group: m must be positive");
    if (m > cap) throw std::invalid_argument("enumerate_group: m exceeds cap " + std::to_string(cap));
    std::vector<int> v(m);
    std::iota(v.begin(), v.end(), 0);
    std::vector<Permutation> out;
    do {
        out.emplace_back(v);
    } while (std::next_permutation(v.begin(), v.end()));
    return out;
}

/// Dense lookup tables over S_m: index of each element, products and inverses by index.
class SymmetricGroup {
public:
    explicit SymmetricGroup(int m) : m_(m), elems_(enumerate_group(m)) {
        const int n = size();
        for (int i = 0; i < n; ++i) index_[elems_[i]] = i;
        mul_.assign(static_cast<std::size_t>(n) * n, 0);
        inv_.resize(n);
        cycles_.resize(n);
        for (int i = 0; i < n; ++i) {
            inv_[i] = index_.at(elems_[i].inverse());
            cycles_[i] = elems_[i].cycle_count();
            for (int j = 0; j < n; ++j) mul_[static_cast<std::size_t>(i) * n + j] = index_.at(elems_[i] * elems_[j]);
        }
    }

    int m() const { return m_; }
    int size() const { return static_cast<int>(elems_.size()); }
    const Permutation& operator[](int i) const { return elems_[i]; }
    const std::vector<Permutation>& elements() const { return elems_; }
    int index(const Permutation& p) const { return index_.at(p); }
    int mul(int a, int b) const { return mul_[static_cast<std::size_t>(a) * size() + b]; }
    int inv(int a) const { return inv_[a]; }
    int cycles(int a) const { return cycles_[a]; }
    /// Index of a * b^{-1}.
    int ratio(int a, int b) const { return mul(a, inv_[b]); }

private:
    int m_;
    std::vector<Permutation> elems_;
    std::map<Permutation, int> index_;
    std::vector<int> mul_;
    std::vector<int> inv_;
    std::vector<int> cycles_;
};

inline double ipow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

inline std::uint64_t upow(std::uint64_t base, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

/// G[s][t] = d^{|s t^{-1}|} over S_m in enumerate_group order.
struct GramMatrix {
    int m = 0;
    int d = 0;
    Eigen::MatrixXd entries;
};

inline GramMatrix gram_matrix(int m, int d) {
    if (m < 1 || d < 2) throw std::invalid_argument("gram_matrix: need m >= 1 and d >= 2");
    SymmetricGroup g(m);
    GramMatrix G{m, d, Eigen::MatrixXd(g.size(), g.size())};
    for (int s = 0; s < g.size(); ++s)
        for (int t = 0; t < g.size(); ++t) G.entries(s, t) = ipow(d, g.cycles(g.ratio(s, t)));
    return G;
}

/// Weingarten function Wg_d on S_m, stored per conjugacy class.
class WeingartenTable {
public:
    WeingartenTable(int m, int d) : m_(m), d_(d) {
        if (m < 1) throw std::invalid_argument("weingarten_table: m must be positive");
        if (m >= d) {
            throw std::invalid_argument("weingarten_table: requires m < d (got m=" + std::to_string(m) +
                                        ", d=" + std::to_string(d) + ")");
        }
        SymmetricGroup g(m);
        const auto G = gram_matrix(m, d);
        const Eigen::MatrixXd inv = G.entries.fullPivLu().inverse();
        // Column of the identity: Wg(s e^{-1}) = Wg(s).
        by_element_.resize(g.size());
        for (int s = 0; s < g.size(); ++s) {
            by_element_[s] = inv(s, 0);
            by_class_.emplace(cycle_type(g[s]), inv(s, 0));
        }
        inverse_ = inv;
    }

    int m() const { return m_; }
    int d() const { return d_; }

    double operator()(const Permutation& p) const { return by_class_.at(cycle_type(p)); }
    double operator()(const CycleType& t) const { return by_class_.at(t); }
    /// Value by index into enumerate_group(m).
    double at(int element_index) const { return by_element_[element_index]; }
    const std::map<CycleType, double>& values() const { return by_class_; }
    /// Full inverse Gram matrix, kept for consistency checks.
    const Eigen::MatrixXd& inverse_gram() const { return inverse_; }

private:
    int m_;
    int d_;
    std::map<CycleType, double> by_class_;
    std::vector<double> by_element_;
    Eigen::MatrixXd inverse_;
};

inline WeingartenTable weingarten_table(int m, int d) { return WeingartenTable(m, d); }

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Product over cycles of the Catalan number C_{l-1} = binom(2(l-1), l-1) / l.
inline double catalan_factor(const CycleType& t) {
    double f = 1.0;
    for (int l : t.lengths) f *= binomial(2 * (l - 1), l - 1) / l;
    return f;
}

/// (d-1+m)! / (d-1)!, exact.
inline std::uint64_t rising_factorial(int d, int m) {
    std::uint64_t r = 1;
    for (int i = 0; i < m; ++i) r *= static_cast<std::uint64_t>(d + i);
    return r;
}

struct FactSums {
    std::uint64_t sum_gram = 0;  ///< sum_b d^{|b|}
    double sum_wg_signed = 0.0;  ///< sum_b Wg_d(b)
    double sum_wg_abs = 0.0;     ///< sum_b |Wg_d(b)|
};

inline FactSums fact_sums(int m, int d) {
    const WeingartenTable wg(m, d);
    SymmetricGroup g(m);
    FactSums s;
    for (int b = 0; b < g.size(); ++b) {
        s.sum_gram += upow(static_cast<std::uint64_t>(d), g.cycles(b));
        s.sum_wg_signed += wg.at(b);
        s.sum_wg_abs += std::abs(wg.at(b));
    }
    return s;
}

}  // namespace pseudoent

#endif  // PSEUDOENT_SYMGROUP_HPP
