#ifndef PSEUDOENT_EXPERIMENTS_HPP
#define PSEUDOENT_EXPERIMENTS_HPP

// Experiment drivers: exact and sampled moment operators of tensor-network
// ensembles, distance sweeps, entropy profiles, min-cut checks, Weingarten
// identity tables, and their CSV rendering.

#include "pseudoent/ensembles.hpp"
#include "pseudoent/expansion.hpp"
#include "pseudoent/replica.hpp"
#include "pseudoent/seed.hpp"
#include "pseudoent/spinmodel.hpp"
#include "pseudoent/statesim.hpp"
#include "pseudoent/symgroup.hpp"
#include "pseudoent/tngraph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudoent {

// ------------------------------------------------------- exact moments

enum class MomentEngine { Expansion, Dense };

namespace detail {

/// op (x) local, with local's sites appended after op's sites.
inline MomentOperator append_sites(const MomentOperator& op, const MomentOperator& local) {
    const int m = op.layout.m;
    RegisterLayout out{op.layout.site_dims, m};
    out.site_dims.insert(out.site_dims.end(), local.layout.site_dims.begin(), local.layout.site_dims.end());
    auto res = MomentOperator::zero(out);
    const Index qa = op.layout.single_dim();
    const Index qb = local.layout.single_dim();
    const Index da = op.layout.total_dim();
    const Index db = local.layout.total_dim();
    // (i, j) -> copy-major index of the joint register.
    std::vector<Index> joint(da * db);
    for (Index i = 0; i < da; ++i) {
        for (Index j = 0; j < db; ++j) {
            Index ii = i, jj = j, y = 0, w = 1;
            for (int c = m - 1; c >= 0; --c) {
                const Index a = ii % qa, b = jj % qb;
                ii /= qa;
                jj /= qb;
                y += (a * qb + b) * w;
                w *= qa * qb;
            }
            joint[i * db + j] = y;
        }
    }
    for (Index i = 0; i < da; ++i)
        for (Index ip = 0; ip < da; ++ip) {
            const cplx a = op.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ip));
            if (a == cplx(0.0)) continue;
            for (Index j = 0; j < db; ++j)
                for (Index jp = 0; jp < db; ++jp) {
                    const cplx b = local.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(jp));
                    if (b == cplx(0.0)) continue;
                    res.matrix(static_cast<Eigen::Index>(joint[i * db + j]), static_cast<Eigen::Index>(joint[ip * db + jp])) += a * b;
                }
        }
    return res;
}

/// Sequential evaluation of the twirl network. `Engine` supplies
/// add_input(kind, chi), apply(positions, d, out_dims), reorder(order).
template <class Engine>
void run_twirl_network(const TensorNetworkGraph& g, Engine& eng) {
    const auto report = validate(g);
    if (!report.ok()) throw std::invalid_argument("ensemble moment: invalid graph\n" + report.str());
    std::vector<int> wires;
    std::vector<char> introduced(g.vertices().size(), 0);
    auto introduce = [&](int input_id) {
        const int p = g.position(input_id);
        if (introduced[p]) return;
        introduced[p] = 1;
        const auto& outs = g.out_edges(input_id);
        eng.add_input(g.kind(input_id), g.edge(outs[0]).chi);
        for (int e : outs) wires.push_back(e);
    };
    for (int u : topological_order(g)) {
        const auto& ins = g.in_edges(u);
        for (int e : ins)
            if (g.kind(g.edge(e).src) != VertexKind::Unitary) introduce(g.edge(e).src);
        std::vector<int> pos;
        std::vector<char> used(wires.size(), 0);
        for (int e : ins) {
            const int k = static_cast<int>(std::find(wires.begin(), wires.end(), e) - wires.begin());
            pos.push_back(k);
            used[k] = 1;
        }
        std::vector<int> out_dims;
        for (int e : g.out_edges(u)) out_dims.push_back(g.edge(e).chi);
        eng.apply(pos, static_cast<int>(g.gate_dim(u)), out_dims);
        std::vector<int> next;
        for (std::size_t k = 0; k < wires.size(); ++k)
            if (!used[k]) next.push_back(wires[k]);
        for (int e : g.out_edges(u)) next.push_back(e);
        wires = std::move(next);
    }
    for (const auto& v : g.vertices())
        if (v.kind == VertexKind::InputProduct || v.kind == VertexKind::InputBell) introduce(v.id);
    std::vector<int> order;
    for (int o : g.outputs()) {
        const int e = g.in_edges(o)[0];
        order.push_back(static_cast<int>(std::find(wires.begin(), wires.end(), e) - wires.begin()));
    }
    eng.reorder(order);
}

struct ExpansionEngine {
    ReplicaExpansion e;

    explicit ExpansionEngine(int m) : e(ReplicaExpansion::scalar(m, 1.0)) {}

    void add_input(VertexKind k, int chi) {
        if (k == VertexKind::InputProduct) {
            e.add_zero_wire(chi);
        } else {
            e.add_bell_pair(chi);
        }
    }
    void apply(const std::vector<int>& pos, int /*d*/, const std::vector<int>& out_dims) { e = e.twirl(pos, out_dims); }
    void reorder(const std::vector<int>& order) { e = e.permute_sites(order); }
};

struct DenseEngine {
    MomentOperator op;

    explicit DenseEngine(int m) : op{RegisterLayout{{}, m}, Eigen::MatrixXcd::Ones(1, 1)} {}

    void add_input(VertexKind k, int chi) {
        const int m = op.layout.m;
        auto local = ReplicaExpansion::scalar(m, 1.0);
        if (k == VertexKind::InputProduct) {
            local.add_zero_wire(chi);
        } else {
            local.add_bell_pair(chi);
        }
        op = append_sites(op, local.dense());
    }

    void apply(const std::vector<int>& pos, int d, const std::vector<int>& out_dims) {
        // Move the gate's wires to the end, merge them into one site, twirl,
        // then split into the output legs.
        const int n = op.layout.site_count();
        std::vector<int> order;
        std::vector<char> used(n, 0);
        for (int p : pos) used[p] = 1;
        for (int k = 0; k < n; ++k)
            if (!used[k]) order.push_back(k);
        for (int p : pos) order.push_back(p);
        op = permute_sites(op, order);
        const int keep = n - static_cast<int>(pos.size());
        op.layout.site_dims.resize(keep);
        op.layout.site_dims.push_back(d);
        op = haar_twirl(op, {keep}, d);
        op.layout.site_dims.pop_back();
        op.layout.site_dims.insert(op.layout.site_dims.end(), out_dims.begin(), out_dims.end());
    }

    void reorder(const std::vector<int>& order) { op = permute_sites(op, order); }
};

}  // namespace detail

/// Exact Haar-gate moment operator as a symbolic expansion on the outputs.
inline ReplicaExpansion ensemble_moment_expansion(const TensorNetworkGraph& g, int m) {
    detail::ExpansionEngine eng(m);
    detail::run_twirl_network(g, eng);
    return eng.e;
}

/// Exact Haar-gate moment operator, by sequential twirling channels.
inline MomentOperator ensemble_moment_exact(const TensorNetworkGraph& g, int m,
                                            MomentEngine engine = MomentEngine::Expansion) {
    if (engine == MomentEngine::Dense) {
        detail::DenseEngine eng(m);
        detail::run_twirl_network(g, eng);
        return eng.op;
    }
    return ensemble_moment_expansion(g, m).dense();
}

// ----------------------------------------------------- sampled moments

/// Mean of (|psi><psi|)^{(x) m} over sampled states, stored on the symmetric
/// subspace. The error scale is ||rho_1 - rho_2||_tr / 2 for the means of
/// the even and odd samples.
struct SampledMoment {
    std::shared_ptr<const SymmetricBasis> basis;
    Eigen::MatrixXcd mean;
    double stderr_ = 0.0;
    int samples = 0;
};

inline SampledMoment ensemble_moment_sampled(const TensorNetworkGraph& g, const EnsembleSpec& spec, int m, int samples,
                                             const SeedTree& node) {
    if (samples < 1) throw std::invalid_argument("ensemble_moment_sampled: samples must be positive");
    const auto shape = system_shape(g);
    const auto D = static_cast<Index>(std::llround(shape.D));
    auto basis = std::make_shared<const SymmetricBasis>(D, m);
    const auto n = basis->size();
    if (n > 4096) throw std::length_error("ensemble_moment_sampled: symmetric subspace too large");
    Eigen::MatrixXcd acc[2] = {Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n)};
    constexpr int kBatch = 64;
    Eigen::MatrixXcd batch[2] = {Eigen::MatrixXcd(n, kBatch), Eigen::MatrixXcd(n, kBatch)};
    int fill[2] = {0, 0};
    int count[2] = {0, 0};
    auto flush = [&](int h) {
        if (fill[h] == 0) return;
        acc[h].selfadjointView<Eigen::Lower>().rankUpdate(batch[h].leftCols(fill[h]));
        fill[h] = 0;
    };
    for (int s = 0; s < samples; ++s) {
        const auto st = build_state(g, spec, node.child(static_cast<std::uint64_t>(s)));
        const int h = s % 2;
        batch[h].col(fill[h]++) = basis->embed_power(st.amplitudes);
        ++count[h];
        if (fill[h] == kBatch) flush(h);
    }
    flush(0);
    flush(1);
    Eigen::MatrixXcd full[2];
    for (int h = 0; h < 2; ++h) full[h] = acc[h].selfadjointView<Eigen::Lower>();
    SampledMoment r;
    r.basis = basis;
    r.samples = samples;
    r.mean = (full[0] + full[1]) / static_cast<double>(samples);
    if (count[1] > 0) r.stderr_ = 0.5 * trace_norm(full[0] / count[0] - full[1] / count[1]);
    return r;
}

/// Trace-norm distance between a sampled moment and an exact one.
inline double sampled_distance(const SampledMoment& s, const MomentOperator& exact) {
    if (exact.layout.m != s.basis->m() || exact.layout.single_dim() != s.basis->q())
        throw std::invalid_argument("sampled_distance: layout mismatch");
    return trace_norm(s.mean - s.basis->project(exact.matrix));
}

// ------------------------------------------------------ distance records

struct DistanceRecord {
    int chi = 0;
    int nu = 0;
    int L = 0;
    double N = 0.0;
    int m = 0;
    double distance = 0.0;
    std::string method;  ///< "exact" or "sampled"
    int samples = 0;
    double stderr_ = 0.0;
};

/// Trace norm of an exact moment minus the Haar state moment on the same outputs.
inline double distance_to_haar(const ReplicaExpansion& moment) {
    const auto haar = ReplicaExpansion::haar_moment(moment.layout().site_dims, moment.m());
    const auto diff = moment.combined(haar, -1.0);
    if (moment.m() == 2 && diff.permutations_only()) return sector_trace_norm(diff);
    return trace_norm(diff.dense().matrix);
}

/// Exact Haar-gate staircase moments against the global Haar moment, per nu.
inline std::vector<DistanceRecord> lemma2_sweep(int L, const std::vector<int>& nus, int m) {
    if (nus.empty()) throw std::invalid_argument("lemma2_sweep: empty nu list");
    std::vector<DistanceRecord> out;
    for (int nu : nus) {
        const auto g = build_staircase(L, nu);
        DistanceRecord r;
        r.chi = 1 << nu;
        r.nu = nu;
        r.L = L;
        r.N = L + nu;
        r.m = m;
        r.distance = distance_to_haar(ensemble_moment_expansion(g, m));
        r.method = "exact";
        out.push_back(r);
    }
    return out;
}

/// Sampled moment of `spec` gates against the exact Haar-gate moment on a staircase.
inline DistanceRecord lemma1_check(int L, int nu, int m, int samples, const SeedTree& node,
                                   const EnsembleSpec& spec = EnsembleSpec::pfc()) {
    if (samples < 1) throw std::invalid_argument("lemma1_check: samples must be positive");
    const auto g = build_staircase(L, nu);
    const auto exact = ensemble_moment_exact(g, m);
    const auto sampled = ensemble_moment_sampled(g, spec, m, samples, node);
    DistanceRecord r;
    r.chi = 1 << nu;
    r.nu = nu;
    r.L = L;
    r.N = L + nu;
    r.m = m;
    r.distance = sampled_distance(sampled, exact);
    r.method = "sampled";
    r.samples = samples;
    r.stderr_ = sampled.stderr_;
    return r;
}

// --------------------------------------------------------- entropy views

struct AreaLawRow {
    int cut = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double page_mean = 0.0;
    double page_stderr = 0.0;
    bool has_page = false;
};

/// Prefix-cut profile of staircase(L, nu) alongside the global-Haar reference.
inline std::vector<AreaLawRow> area_law_profile(int L, int nu, const EnsembleSpec& spec, int samples, const SeedTree& node) {
    if (L + nu > 24) throw std::length_error("area_law_profile: more than 24 qubits");
    const auto g = build_staircase(L, nu);
    const auto prof = entropy_profile(g, spec, node.child(0), CutFamily::Prefix, samples);
    const int n = L + nu;
    std::vector<AreaLawRow> rows;
    std::vector<int> sizes;
    for (const auto& p : prof.points) {
        rows.push_back({p.last, p.mean, p.stderr_});
        sizes.push_back(p.last);
    }
    if (n <= 14) {
        const auto page = page_reference(n, sizes, samples, node.child(1));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            rows[k].page_mean = page.points[k].mean;
            rows[k].page_stderr = page.points[k].stderr_;
            rows[k].has_page = true;
        }
    }
    return rows;
}

struct RTReport {
    std::vector<int> region;
    int mincut_bits = 0;
    int mincut_edges = 0;
    double rt_lower_bound_bits = 0.0;
    double mean_entropy = 0.0;
    double stderr_ = 0.0;
    int samples = 0;
    int chi = 0;  ///< largest bond dimension
    double newton_ln = 0.0;
    double newton_log2 = 0.0;
    bool sandwich = false;
};

inline RTReport rt_verify(const TensorNetworkGraph& g, const std::vector<int>& A, const EnsembleSpec& spec, int samples,
                          const SeedTree& node) {
    if (samples < 1) throw std::invalid_argument("rt_verify: samples must be positive");
    RTReport r;
    r.region = A;
    const auto cut = min_cut(g, A);
    r.mincut_bits = cut.weight_bits;
    r.mincut_edges = cut.cardinality;
    r.rt_lower_bound_bits = rt_lower_bound(g, A);
    SampleStats stats;
    for (int s = 0; s < samples; ++s) stats.add(entropy(build_state(g, spec, node.child(static_cast<std::uint64_t>(s))), A));
    r.mean_entropy = stats.mean();
    r.stderr_ = stats.stderr_();
    r.samples = samples;
    // The network's bond dimension: the largest leg dimension.
    int chi = 0;
    for (const auto& e : g.edges()) chi = std::max(chi, e.chi);
    r.chi = chi;
    if (chi > 1) {
        r.newton_ln = 4.0 / std::log(static_cast<double>(chi));
        r.newton_log2 = 4.0 / std::log2(static_cast<double>(chi));
    }
    r.sandwich = r.rt_lower_bound_bits - 3.0 * r.stderr_ <= r.mean_entropy && r.mean_entropy <= r.mincut_bits + 1e-9;
    return r;
}

// ---------------------------------------------------- Weingarten identities

struct WeingartenCheckRow {
    int m = 0;
    int d = 0;
    bool valid = false;
    std::string reason;
    long long s1_residual = 0;      ///< sum_b d^{|b|} - (d-1+m)!/(d-1)!
    double s2_residual = 0.0;       ///< relative error of sum_b Wg_d(b)
    int s3_sign_violations = 0;     ///< classes with sign != (-1)^{m-|b|}
    double s3_ratio_residual = 0.0; ///< max |Wg| / (d^{|b|-2m} f(b)) - 1
    double s4_residual = 0.0;       ///< d^m sum_b |Wg_d(b)| - 1
};

inline WeingartenCheckRow weingarten_check_row(int m, int d) {
    WeingartenCheckRow r;
    r.m = m;
    r.d = d;
    if (m < 1 || m >= d) {
        r.reason = "m < d violated";
        return r;
    }
    if (m > kMaxCopies) {
        r.reason = "m above cap";
        return r;
    }
    const auto sums = fact_sums(m, d);
    const auto exact = rising_factorial(d, m);
    r.s1_residual = static_cast<long long>(sums.sum_gram) - static_cast<long long>(exact);
    const double target = 1.0 / static_cast<double>(exact);
    r.s2_residual = std::abs(sums.sum_wg_signed - target) / target;
    const WeingartenTable wg(m, d);
    for (const auto& [type, value] : wg.values()) {
        const int cycles = type.cycle_count();
        const double sign = ((m - cycles) % 2 == 0) ? 1.0 : -1.0;
        if (value * sign <= 0.0) ++r.s3_sign_violations;
        const double lead = std::pow(static_cast<double>(d), cycles - 2 * m) * catalan_factor(type);
        r.s3_ratio_residual = std::max(r.s3_ratio_residual, std::abs(std::abs(value) / lead - 1.0));
    }
    r.s4_residual = std::pow(static_cast<double>(d), m) * sums.sum_wg_abs - 1.0;
    r.valid = true;
    return r;
}

inline std::vector<WeingartenCheckRow> weingarten_check(const std::vector<int>& ms, const std::vector<int>& ds) {
    std::vector<WeingartenCheckRow> rows;
    for (int m : ms)
        for (int d : ds) rows.push_back(weingarten_check_row(m, d));
    return rows;
}

// -------------------------------------------------------------------- CSV

/// Round-trippable float formatting.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv(std::ostream& os, const std::vector<WeingartenCheckRow>& rows) {
    os << "m,d,status,s1_residual,s2_residual,s3_sign_violations,s3_ratio_residual,s4_residual\n";
    for (const auto& r : rows) {
        os << r.m << ',' << r.d << ',';
        if (!r.valid) {
            os << "rejected: " << r.reason << ",,,,,\n";
            continue;
        }
        os << "ok," << r.s1_residual << ',' << fmt17(r.s2_residual) << ',' << r.s3_sign_violations << ','
           << fmt17(r.s3_ratio_residual) << ',' << fmt17(r.s4_residual) << '\n';
    }
}

inline void write_csv(std::ostream& os, const std::vector<DistanceRecord>& rows) {
    os << "chi,nu,L,N,m,distance,method,samples,stderr\n";
    for (const auto& r : rows) {
        os << r.chi << ',' << r.nu << ',' << r.L << ',' << fmt17(r.N) << ',' << r.m << ',' << fmt17(r.distance) << ','
           << r.method << ',';
        if (r.method == "sampled") {
            os << r.samples << ',' << fmt17(r.stderr_);
        } else {
            os << ',';
        }
        os << '\n';
    }
}

inline void write_csv(std::ostream& os, const std::vector<AreaLawRow>& rows) {
    os << "cut,mean_entropy,stderr,page_mean,page_stderr\n";
    for (const auto& r : rows) {
        os << r.cut << ',' << fmt17(r.mean) << ',' << fmt17(r.stderr_) << ',';
        if (r.has_page) {
            os << fmt17(r.page_mean) << ',' << fmt17(r.page_stderr);
        } else {
            os << ',';
        }
        os << '\n';
    }
}

inline std::string join_ids(const std::vector<int>& ids, char sep = ' ') {
    std::ostringstream os;
    for (std::size_t k = 0; k < ids.size(); ++k) os << (k ? std::string(1, sep) : "") << ids[k];
    return os.str();
}

inline void write_csv(std::ostream& os, const RTReport& r) {
    os << "region,mincut_bits,mincut_edges,rt_lower_bound_bits,mean_entropy_bits,stderr,samples,chi,newton_4_over_ln_chi,"
          "newton_4_over_log2_chi,sandwich\n";
    os << join_ids(r.region) << ',' << r.mincut_bits << ',' << r.mincut_edges << ',' << fmt17(r.rt_lower_bound_bits) << ','
       << fmt17(r.mean_entropy) << ',' << fmt17(r.stderr_) << ',' << r.samples << ',' << r.chi << ','
       << fmt17(r.newton_ln) << ',' << fmt17(r.newton_log2) << ',' << (r.sandwich ? "pass" : "fail") << '\n';
}

}  // namespace pseudoent

#endif  // PSEUDOENT_EXPERIMENTS_HPP
