#ifndef PSEUDOENT_EXPANSION_HPP
#define PSEUDOENT_EXPANSION_HPP

// Symbolic moment operators: real linear combinations of tensor products of
// per-wire factors, each factor one of
//   - a replica permutation sigma-hat on that wire,
//   - the replicated product state |0><0|^{(x) m},
//   - one half of a replicated Bell projector |Phi><Phi|^{(x) m} shared with a partner wire.
// Exact Haar twirls act on this form without materializing the m-copy space.

#include "pseudoent/replica.hpp"
#include "pseudoent/symgroup.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace pseudoent {

struct WireFactor {
    enum class Kind { Zero, Perm, Bell };
    Kind kind = Kind::Zero;
    /// Perm: index into enumerate_group(m). Bell: position of the partner wire.
    int value = 0;

    static WireFactor zero() { return {Kind::Zero, 0}; }
    static WireFactor perm(int element) { return {Kind::Perm, element}; }
    static WireFactor bell(int partner) { return {Kind::Bell, partner}; }

    friend bool operator==(const WireFactor&, const WireFactor&) = default;
    friend auto operator<=>(const WireFactor&, const WireFactor&) = default;
};

class ReplicaExpansion {
public:
    using Labels = std::vector<WireFactor>;

    explicit ReplicaExpansion(int m) : group_(std::make_shared<SymmetricGroup>(m)) { layout_.m = m; }

    /// Zero operator on `layout`.
    explicit ReplicaExpansion(RegisterLayout layout)
        : layout_(std::move(layout)), group_(std::make_shared<SymmetricGroup>(layout_.m)) {}

    /// Identity-free empty register holding the scalar `c`.
    static ReplicaExpansion scalar(int m, double c) {
        ReplicaExpansion e(m);
        e.terms_[{}] = c;
        return e;
    }

    /// f_{D,m} sum_sigma (x)_wires sigma-hat, the Haar state moment on `dims`.
    static ReplicaExpansion haar_moment(const std::vector<int>& dims, int m) {
        ReplicaExpansion e(m);
        e.layout_.site_dims = dims;
        const double q = static_cast<double>(e.layout_.single_dim());
        if (m >= q) throw std::invalid_argument("haar_moment: requires m < q");
        const double f = haar_normalization(q, m);
        for (int s = 0; s < e.group_->size(); ++s) e.terms_[Labels(dims.size(), WireFactor::perm(s))] = f;
        return e;
    }

    int m() const { return layout_.m; }
    const RegisterLayout& layout() const { return layout_; }
    const SymmetricGroup& group() const { return *group_; }
    const std::map<Labels, double>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    /// Adds c times the product of `labels` (one factor per wire).
    void add_term(const Labels& labels, double c) {
        if (static_cast<int>(labels.size()) != layout_.site_count()) throw std::invalid_argument("add_term: wrong label count");
        terms_[labels] += c;
    }

    /// Tensors |0><0|^{(x) m} on a new trailing wire.
    void add_zero_wire(int dim) {
        layout_.site_dims.push_back(dim);
        relabel([](Labels& l) { l.push_back(WireFactor::zero()); });
    }

    /// Tensors a replicated Bell projector on two new trailing wires.
    void add_bell_pair(int dim) {
        const int a = layout_.site_count();
        layout_.site_dims.push_back(dim);
        layout_.site_dims.push_back(dim);
        relabel([a](Labels& l) {
            l.push_back(WireFactor::bell(a + 1));
            l.push_back(WireFactor::bell(a));
        });
    }

    /// Haar twirl on `sites` (product dimension d). The twirled wires are
    /// removed and `out_dims` (same product) are appended at the end.
    ReplicaExpansion twirl(const std::vector<int>& sites, const std::vector<int>& out_dims) const {
        const int n = layout_.site_count();
        const int m = layout_.m;
        std::vector<char> active(n, 0);
        long long d = 1, dout = 1;
        for (int s : sites) {
            if (s < 0 || s >= n || active[s]) throw std::invalid_argument("twirl: invalid site set");
            active[s] = 1;
            d *= layout_.site_dims[s];
        }
        for (int x : out_dims) dout *= x;
        if (d != dout) throw std::invalid_argument("twirl: output dims do not match twirled dimension");
        const WeingartenTable wg(m, static_cast<int>(d));
        const auto& g = *group_;

        // Surviving wires keep their relative order; outputs are appended.
        std::vector<int> newpos(n, -1);
        ReplicaExpansion out(m);
        out.group_ = group_;
        for (int i = 0; i < n; ++i) {
            if (!active[i]) {
                newpos[i] = out.layout_.site_count();
                out.layout_.site_dims.push_back(layout_.site_dims[i]);
            }
        }
        const int first_out = out.layout_.site_count();
        for (int x : out_dims) out.layout_.site_dims.push_back(x);

        std::vector<double> tr(g.size());
        for (const auto& [labels, c] : terms_) {
            // Bell partners left outside the twirl receive tau-hat with factor chi^{-m}.
            std::vector<int> dangling;
            double bell_scale = 1.0;
            for (int t = 0; t < g.size(); ++t) tr[t] = 1.0;
            for (int i = 0; i < n; ++i) {
                if (!active[i]) continue;
                const auto& f = labels[i];
                if (f.kind == WireFactor::Kind::Perm) {
                    // Tr(tau-hat^dagger pi-hat) = chi^{|tau^{-1} pi|}
                    for (int t = 0; t < g.size(); ++t)
                        tr[t] *= ipow(layout_.site_dims[i], g.cycles(g.mul(g.inv(t), f.value)));
                } else if (f.kind == WireFactor::Kind::Bell && !active[f.value]) {
                    dangling.push_back(f.value);
                    bell_scale *= ipow(1.0 / layout_.site_dims[i], m);
                }
            }
            for (int t = 0; t < g.size(); ++t) {
                if (tr[t] == 0.0) continue;
                Labels base(out.layout_.site_count());
                for (int i = 0; i < n; ++i) {
                    if (active[i]) continue;
                    auto f = labels[i];
                    if (f.kind == WireFactor::Kind::Bell) {
                        if (active[f.value]) {
                            f = WireFactor::perm(t);
                        } else {
                            f.value = newpos[f.value];
                        }
                    }
                    base[newpos[i]] = f;
                }
                for (int s = 0; s < g.size(); ++s) {
                    const double w = c * bell_scale * tr[t] * wg.at(g.ratio(s, t));
                    if (w == 0.0) continue;
                    Labels l = base;
                    for (std::size_t k = 0; k < out_dims.size(); ++k) l[first_out + k] = WireFactor::perm(s);
                    out.terms_[l] += w;
                }
            }
        }
        return out;
    }

    /// Reorders wires: wire k of the result is wire order[k] of this.
    ReplicaExpansion permute_sites(const std::vector<int>& order) const {
        const int n = layout_.site_count();
        if (static_cast<int>(order.size()) != n) throw std::invalid_argument("permute_sites: order has wrong length");
        std::vector<int> where(n);
        for (int k = 0; k < n; ++k) where[order[k]] = k;
        ReplicaExpansion out(layout_.m);
        out.group_ = group_;
        for (int k = 0; k < n; ++k) out.layout_.site_dims.push_back(layout_.site_dims[order[k]]);
        for (const auto& [labels, c] : terms_) {
            Labels l(n);
            for (int k = 0; k < n; ++k) {
                auto f = labels[order[k]];
                if (f.kind == WireFactor::Kind::Bell) f.value = where[f.value];
                l[k] = f;
            }
            out.terms_[l] += c;
        }
        return out;
    }

    /// this + scale * other (identical layouts).
    ReplicaExpansion combined(const ReplicaExpansion& other, double scale) const {
        if (!(layout_ == other.layout_)) throw std::invalid_argument("combined: layout mismatch");
        ReplicaExpansion out = *this;
        for (const auto& [l, c] : other.terms_) out.terms_[l] += scale * c;
        return out;
    }

    /// Trace of the operator.
    double trace() const {
        double t = 0.0;
        for (const auto& [labels, c] : terms_) {
            double v = c;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                const auto& f = labels[i];
                if (f.kind == WireFactor::Kind::Perm) v *= ipow(layout_.site_dims[i], group_->cycles(f.value));
                // Zero and Bell factors have unit trace.
            }
            t += v;
        }
        return t;
    }

    bool permutations_only() const {
        for (const auto& [labels, c] : terms_)
            for (const auto& f : labels)
                if (f.kind != WireFactor::Kind::Perm) return false;
        return true;
    }

    /// Dense matrix in the layout's replicated basis.
    MomentOperator dense() const {
        auto out = MomentOperator::zero(layout_);
        const int n = layout_.site_count();
        const int m = layout_.m;
        detail::ReplicaDigits rd(layout_);
        const Index dim = layout_.total_dim();
        std::vector<int> digits;
        std::vector<int> odigits;
        for (const auto& [labels, c] : terms_) {
            if (c == 0.0) continue;
            for (Index x = 0; x < dim; ++x) {
                rd.decode(x, digits);
                double amp = c;
                bool alive = true;
                odigits.assign(digits.size(), 0);
                std::vector<int> bell_wires;
                for (int i = 0; i < n && alive; ++i) {
                    const auto& f = labels[i];
                    switch (f.kind) {
                        case WireFactor::Kind::Perm:
                            for (int cpy = 0; cpy < m; ++cpy)
                                odigits[static_cast<std::size_t>((*group_)[f.value](cpy)) * n + i] =
                                    digits[static_cast<std::size_t>(cpy) * n + i];
                            break;
                        case WireFactor::Kind::Zero:
                            for (int cpy = 0; cpy < m; ++cpy)
                                if (digits[static_cast<std::size_t>(cpy) * n + i] != 0) alive = false;
                            break;
                        case WireFactor::Kind::Bell:
                            if (f.value > i) {
                                for (int cpy = 0; cpy < m; ++cpy)
                                    if (digits[static_cast<std::size_t>(cpy) * n + i] !=
                                        digits[static_cast<std::size_t>(cpy) * n + f.value])
                                        alive = false;
                                amp *= ipow(1.0 / layout_.site_dims[i], m);
                                bell_wires.push_back(i);
                            }
                            break;
                    }
                }
                if (!alive) continue;
                // Enumerate all Bell output digits (equal on both legs, per copy).
                std::vector<int> counter(bell_wires.size() * m, 0);
                while (true) {
                    for (std::size_t b = 0; b < bell_wires.size(); ++b) {
                        const int i = bell_wires[b];
                        const int p = labels[i].value;
                        for (int cpy = 0; cpy < m; ++cpy) {
                            const int v = counter[b * m + cpy];
                            odigits[static_cast<std::size_t>(cpy) * n + i] = v;
                            odigits[static_cast<std::size_t>(cpy) * n + p] = v;
                        }
                    }
                    Index y = 0;
                    for (int cpy = 0; cpy < m; ++cpy)
                        for (int i = 0; i < n; ++i)
                            y += static_cast<Index>(odigits[static_cast<std::size_t>(cpy) * n + i]) * rd.weight(cpy, i);
                    out.matrix(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) += amp;
                    std::size_t k = 0;
                    for (; k < counter.size(); ++k) {
                        const int i = bell_wires[k / m];
                        if (++counter[k] < layout_.site_dims[i]) break;
                        counter[k] = 0;
                    }
                    if (k == counter.size()) break;
                }
            }
        }
        return out;
    }

private:
    template <class F>
    void relabel(F&& f) {
        std::map<Labels, double> next;
        for (const auto& [key, c] : terms_) {
            Labels l = key;
            f(l);
            next[l] += c;
        }
        terms_ = std::move(next);
    }

    RegisterLayout layout_;
    std::shared_ptr<const SymmetricGroup> group_;
    std::map<Labels, double> terms_;
};

/// Trace norm of a two-copy expansion built from {identity, swap} factors.
///
/// Per wire, identity and swap are diagonal on the symmetric (+1) and
/// antisymmetric (-1) subspaces, so the operator is diagonal on the 2^k
/// products of those sectors.
inline double sector_trace_norm(const ReplicaExpansion& e) {
    if (e.m() != 2) throw std::invalid_argument("sector_trace_norm: only m = 2 is supported");
    if (!e.permutations_only()) throw std::invalid_argument("sector_trace_norm: expansion has non-permutation factors");
    const auto& dims = e.layout().site_dims;
    const int k = static_cast<int>(dims.size());
    if (k > 30) throw std::length_error("sector_trace_norm: too many wires");
    const auto& g = e.group();
    double total = 0.0;
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << k); ++pattern) {
        double mult = 1.0;
        for (int w = 0; w < k; ++w) {
            const double q = dims[w];
            mult *= ((pattern >> w) & 1u) ? q * (q - 1) / 2 : q * (q + 1) / 2;
        }
        if (mult == 0.0) continue;
        double lambda = 0.0;
        for (const auto& [labels, c] : e.terms()) {
            double sign = 1.0;
            for (int w = 0; w < k; ++w)
                if (!g[labels[w].value].is_identity() && ((pattern >> w) & 1u)) sign = -sign;
            lambda += c * sign;
        }
        total += mult * std::abs(lambda);
    }
    return total;
}

}  // namespace pseudoent

#endif  // PSEUDOENT_EXPANSION_HPP
