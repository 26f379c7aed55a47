#ifndef PSEUDOENT_SPINMODEL_HPP
#define PSEUDOENT_SPINMODEL_HPP

// S_m spin models of Haar-averaged tensor-network states.
//
// Each unitary u becomes an out-spin sigma_u and an in-spin tau_u joined by a
// dashed bond of weight Wg_{d_u}(sigma_u tau_u^{-1}). A unitary-to-unitary
// edge of dimension chi is a solid bond chi^{|sigma_u tau_v^{-1}|}. A Bell
// pair feeding two unitaries is a solid bond between their in-spins and a
// factor chi^{-m}. Product inputs drop out. Output legs keep a boundary
// factor: sigma-hat of the emitting unitary, tau-hat (times chi^{-m}) of the
// unitary on the far side of a Bell pair, |0><0|^{(x) m}, or half of a
// replicated Bell projector.

#include "pseudoent/expansion.hpp"
#include "pseudoent/replica.hpp"
#include "pseudoent/symgroup.hpp"
#include "pseudoent/tngraph.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudoent {

/// Default cap on (configurations x bonds) for exhaustive sums.
inline constexpr double kMaxPartitionWork = 1e8;

struct SolidBond {
    int a = 0;
    int b = 0;
    int chi = 2;
};

struct DashedBond {
    int out_site = 0;
    int in_site = 0;
    int d = 2;
};

struct BoundaryFactor {
    enum class Kind { Site, Zero, Bell };
    Kind kind = Kind::Zero;
    int site = -1;     ///< Site: spin whose replica operator sits on this output
    int partner = -1;  ///< Bell: position of the partner output
    int dim = 2;
};

struct SpinModelGraph {
    int m = 2;
    std::shared_ptr<const SymmetricGroup> group;
    std::vector<int> site_unitary;  ///< unitary id of each site
    std::vector<char> site_is_out;  ///< 1 for sigma (out) spins, 0 for tau (in) spins
    std::vector<SolidBond> solid;
    std::vector<DashedBond> dashed;
    std::vector<int> outputs;              ///< output ids, ascending
    std::vector<BoundaryFactor> boundary;  ///< one per output
    double bell_exponent_log2 = 0.0;       ///< sum over Bell inputs of m log2 chi
    double bell_prefactor = 1.0;           ///< 2^{-bell_exponent_log2}
    std::map<int, WeingartenTable> weingarten;

    int site_count() const { return static_cast<int>(site_unitary.size()); }
};

inline SpinModelGraph from_tn_graph(const TensorNetworkGraph& g, int m) {
    const auto report = validate(g);
    if (!report.ok()) throw std::invalid_argument("from_tn_graph: invalid graph\n" + report.str());
    SpinModelGraph model;
    model.m = m;
    model.group = std::make_shared<SymmetricGroup>(m);
    std::map<int, int> out_site, in_site;
    for (int u : g.unitaries()) {
        const int d = static_cast<int>(g.gate_dim(u));
        if (m >= d) throw std::invalid_argument("from_tn_graph: requires m below every gate dimension");
        out_site[u] = model.site_count();
        model.site_unitary.push_back(u);
        model.site_is_out.push_back(1);
        in_site[u] = model.site_count();
        model.site_unitary.push_back(u);
        model.site_is_out.push_back(0);
        model.dashed.push_back({out_site[u], in_site[u], d});
        if (!model.weingarten.count(d)) model.weingarten.emplace(d, WeingartenTable(m, d));
    }
    model.outputs = g.outputs();
    std::map<int, int> out_pos;
    for (std::size_t k = 0; k < model.outputs.size(); ++k) out_pos[model.outputs[k]] = static_cast<int>(k);
    model.boundary.resize(model.outputs.size());
    for (std::size_t k = 0; k < model.outputs.size(); ++k) model.boundary[k].dim = g.output_dim(model.outputs[k]);

    for (const auto& e : g.edges()) {
        const auto sk = g.kind(e.src);
        const auto dk = g.kind(e.dst);
        if (sk == VertexKind::Unitary && dk == VertexKind::Unitary) {
            model.solid.push_back({out_site[e.src], in_site[e.dst], e.chi});
        } else if (sk == VertexKind::Unitary && dk == VertexKind::Output) {
            auto& b = model.boundary[out_pos[e.dst]];
            b.kind = BoundaryFactor::Kind::Site;
            b.site = out_site[e.src];
        } else if (sk == VertexKind::InputProduct && dk == VertexKind::Output) {
            model.boundary[out_pos[e.dst]].kind = BoundaryFactor::Kind::Zero;
        }
    }
    for (int b : g.ids_of(VertexKind::InputBell)) {
        const auto& legs = g.out_edges(b);
        const int x = g.edge(legs[0]).dst;
        const int y = g.edge(legs[1]).dst;
        const int chi = g.edge(legs[0]).chi;
        const bool xu = g.kind(x) == VertexKind::Unitary;
        const bool yu = g.kind(y) == VertexKind::Unitary;
        model.bell_exponent_log2 += m * std::log2(static_cast<double>(chi));
        if (xu && yu) {
            model.solid.push_back({in_site[x], in_site[y], chi});
        } else if (xu || yu) {
            const int u = xu ? x : y;
            const int o = xu ? y : x;
            auto& f = model.boundary[out_pos[o]];
            f.kind = BoundaryFactor::Kind::Site;
            f.site = in_site[u];
        } else {
            auto& fx = model.boundary[out_pos[x]];
            auto& fy = model.boundary[out_pos[y]];
            fx.kind = fy.kind = BoundaryFactor::Kind::Bell;
            fx.partner = out_pos[y];
            fy.partner = out_pos[x];
        }
    }
    model.bell_prefactor = std::exp2(-model.bell_exponent_log2);
    return model;
}

namespace detail {

/// Per-bond lookup tables indexed by the group index of the relative spin.
struct BondTables {
    std::vector<std::vector<double>> solid;
    std::vector<std::vector<double>> dashed;

    explicit BondTables(const SpinModelGraph& model) {
        const auto& g = *model.group;
        for (const auto& s : model.solid) {
            std::vector<double> t(g.size());
            for (int r = 0; r < g.size(); ++r) t[r] = ipow(s.chi, g.cycles(r));
            solid.push_back(std::move(t));
        }
        for (const auto& d : model.dashed) {
            const auto& wg = model.weingarten.at(d.d);
            std::vector<double> t(g.size());
            for (int r = 0; r < g.size(); ++r) t[r] = wg.at(r);
            dashed.push_back(std::move(t));
        }
    }
};

inline double config_weight(const SpinModelGraph& model, const BondTables& tables, const std::vector<int>& config) {
    const auto& g = *model.group;
    double w = model.bell_prefactor;
    for (std::size_t k = 0; k < model.dashed.size(); ++k)
        w *= tables.dashed[k][g.ratio(config[model.dashed[k].out_site], config[model.dashed[k].in_site])];
    for (std::size_t k = 0; k < model.solid.size(); ++k)
        w *= tables.solid[k][g.ratio(config[model.solid[k].a], config[model.solid[k].b])];
    return w;
}

inline void check_work(const SpinModelGraph& model, double cap) {
    const double configs = std::pow(static_cast<double>(model.group->size()), model.site_count());
    const double work = configs * static_cast<double>(model.solid.size() + model.dashed.size() + 1);
    if (work > cap) throw std::length_error("partition sum exceeds the enumeration cap");
}

/// Odometer over all configurations.
template <class F>
void for_each_config(const SpinModelGraph& model, F&& f) {
    const int n = model.site_count();
    const int G = model.group->size();
    std::vector<int> config(n, 0);
    while (true) {
        f(config);
        int k = n - 1;
        for (; k >= 0; --k) {
            if (++config[k] < G) break;
            config[k] = 0;
        }
        if (k < 0) break;
    }
}

}  // namespace detail

/// Signed Boltzmann weight of a configuration (group indices per site).
inline double boltzmann_weight(const SpinModelGraph& model, const std::vector<int>& config) {
    if (static_cast<int>(config.size()) != model.site_count())
        throw std::invalid_argument("boltzmann_weight: configuration size differs from site count");
    for (int c : config)
        if (c < 0 || c >= model.group->size()) throw std::invalid_argument("boltzmann_weight: spin out of range");
    return detail::config_weight(model, detail::BondTables(model), config);
}

inline double boltzmann_weight(const SpinModelGraph& model, const std::vector<Permutation>& config) {
    std::vector<int> idx;
    for (const auto& p : config) idx.push_back(model.group->index(p));
    return boltzmann_weight(model, idx);
}

/// Sum over configurations of weight times the boundary replica operators,
/// as a symbolic operator on the outputs.
inline ReplicaExpansion partition_expansion(const SpinModelGraph& model, double cap = kMaxPartitionWork) {
    detail::check_work(model, cap);
    RegisterLayout layout{{}, model.m};
    for (const auto& b : model.boundary) layout.site_dims.push_back(b.dim);
    ReplicaExpansion e(layout);
    const detail::BondTables tables(model);
    // Bell labels carry their own chi^{-m}, already counted in the prefactor.
    double relabel = 1.0;
    for (std::size_t k = 0; k < model.boundary.size(); ++k) {
        const auto& b = model.boundary[k];
        if (b.kind == BoundaryFactor::Kind::Bell && static_cast<int>(k) < b.partner) relabel *= ipow(b.dim, model.m);
    }
    ReplicaExpansion::Labels labels(model.boundary.size());
    detail::for_each_config(model, [&](const std::vector<int>& config) {
        const double w = detail::config_weight(model, tables, config);
        if (w == 0.0) return;
        for (std::size_t k = 0; k < model.boundary.size(); ++k) {
            const auto& b = model.boundary[k];
            switch (b.kind) {
                case BoundaryFactor::Kind::Site: labels[k] = WireFactor::perm(config[b.site]); break;
                case BoundaryFactor::Kind::Zero: labels[k] = WireFactor::zero(); break;
                case BoundaryFactor::Kind::Bell: labels[k] = WireFactor::bell(b.partner); break;
            }
        }
        e.add_term(labels, w * relabel);
    });
    return e;
}

inline MomentOperator moment_from_partition(const SpinModelGraph& model, double cap = kMaxPartitionWork) {
    return partition_expansion(model, cap).dense();
}

/// Exact ensemble-average purity E Tr(rho_A^2), pinning the swap on A and
/// the identity on the other outputs.
inline double purity_partition(const TensorNetworkGraph& g, const std::vector<int>& A, double cap = kMaxPartitionWork) {
    const auto model = from_tn_graph(g, 2);
    if (model.site_count() > 30) throw std::length_error("purity_partition: too many spins");
    std::vector<char> inA(model.outputs.size(), 0);
    for (int id : A) {
        bool found = false;
        for (std::size_t k = 0; k < model.outputs.size(); ++k) {
            if (model.outputs[k] == id) {
                inA[k] = 1;
                found = true;
            }
        }
        if (!found) throw std::invalid_argument("purity_partition: " + std::to_string(id) + " is not an output");
    }
    detail::check_work(model, cap);
    const auto& grp = *model.group;
    const int e = grp.index(Permutation::identity(2));
    const int s = 1 - e;
    const detail::BondTables tables(model);
    double total = 0.0;
    detail::for_each_config(model, [&](const std::vector<int>& config) {
        double w = detail::config_weight(model, tables, config);
        for (std::size_t k = 0; k < model.boundary.size() && w != 0.0; ++k) {
            const auto& b = model.boundary[k];
            const int pin = inA[k] ? s : e;
            switch (b.kind) {
                case BoundaryFactor::Kind::Site: w *= ipow(b.dim, grp.cycles(grp.mul(config[b.site], pin))); break;
                case BoundaryFactor::Kind::Zero: break;
                case BoundaryFactor::Kind::Bell:
                    // The chi^{-2} of the projector is in the prefactor: Tr = chi^{|p q^{-1}|}.
                    if (static_cast<int>(k) < b.partner) {
                        const int other = inA[b.partner] ? s : e;
                        w *= ipow(b.dim, grp.cycles(grp.ratio(pin, other)));
                    }
                    break;
            }
        }
        total += w;
    });
    return total;
}

/// -log2 of the exact mean purity: a lower bound on the mean entropy in bits.
inline double rt_lower_bound(const TensorNetworkGraph& g, const std::vector<int>& A, double cap = kMaxPartitionWork) {
    if (A.empty()) return 0.0;
    return -std::log2(purity_partition(g, A, cap));
}

}  // namespace pseudoent

#endif  // PSEUDOENT_SPINMODEL_HPP
