#ifndef PSEUDOENT_STATESIM_HPP
#define PSEUDOENT_STATESIM_HPP

// Dense statevectors of tensor-network states and their entanglement.

#include "pseudoent/ensembles.hpp"
#include "pseudoent/seed.hpp"
#include "pseudoent/tngraph.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudoent {

inline constexpr std::uint64_t kMaxStateDim = std::uint64_t{1} << 24;

struct StateVector {
    Eigen::VectorXcd amplitudes;
    std::vector<int> outputs;  ///< output ids, most significant first
    std::vector<int> dims;     ///< local dimension of each output

    std::uint64_t dim() const { return static_cast<std::uint64_t>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }
    int position(int output_id) const {
        for (std::size_t k = 0; k < outputs.size(); ++k)
            if (outputs[k] == output_id) return static_cast<int>(k);
        throw std::invalid_argument("state has no output " + std::to_string(output_id));
    }
};

namespace detail {

/// Transposes a mixed-radix tensor: axis k of the result is axis order[k] of `v`.
inline Eigen::VectorXcd permute_axes(const Eigen::VectorXcd& v, const std::vector<int>& dims,
                                     const std::vector<int>& order) {
    const int n = static_cast<int>(dims.size());
    bool trivial = true;
    for (int k = 0; k < n; ++k) trivial = trivial && order[k] == k;
    if (trivial) return v;
    std::vector<std::uint64_t> in_stride(n), out_stride(n);
    std::uint64_t s = 1;
    for (int k = n - 1; k >= 0; --k) {
        in_stride[k] = s;
        s *= static_cast<std::uint64_t>(dims[k]);
    }
    s = 1;
    for (int k = n - 1; k >= 0; --k) {
        out_stride[k] = s;
        s *= static_cast<std::uint64_t>(dims[order[k]]);
    }
    // Stride in the input of each output axis.
    std::vector<std::uint64_t> src_stride(n);
    std::vector<int> odims(n);
    for (int k = 0; k < n; ++k) {
        src_stride[k] = in_stride[order[k]];
        odims[k] = dims[order[k]];
    }
    Eigen::VectorXcd out(v.size());
    std::vector<int> digit(n, 0);
    std::uint64_t src = 0;
    const auto total = static_cast<std::uint64_t>(v.size());
    for (std::uint64_t y = 0; y < total; ++y) {
        out(static_cast<Eigen::Index>(y)) = v(static_cast<Eigen::Index>(src));
        for (int k = n - 1; k >= 0; --k) {
            if (++digit[k] < odims[k]) {
                src += src_stride[k];
                break;
            }
            digit[k] = 0;
            src -= src_stride[k] * static_cast<std::uint64_t>(odims[k] - 1);
        }
    }
    return out;
}

/// Register of live wires (edge indices) during circuit evaluation.
struct LiveRegister {
    std::vector<int> wires;
    std::vector<int> dims;
    Eigen::VectorXcd amp = Eigen::VectorXcd::Ones(1);

    std::uint64_t dim() const { return static_cast<std::uint64_t>(amp.size()); }

    void append(const Eigen::VectorXcd& local, const std::vector<int>& new_wires, const std::vector<int>& new_dims) {
        std::uint64_t total = dim() * static_cast<std::uint64_t>(local.size());
        if (total > kMaxStateDim) throw std::length_error("build_state: state dimension exceeds 2^24");
        Eigen::VectorXcd next(static_cast<Eigen::Index>(total));
        const auto ls = local.size();
        for (Eigen::Index i = 0; i < amp.size(); ++i) next.segment(i * ls, ls) = amp(i) * local;
        amp = std::move(next);
        wires.insert(wires.end(), new_wires.begin(), new_wires.end());
        dims.insert(dims.end(), new_dims.begin(), new_dims.end());
    }

    /// Moves `front` (in that order) to the most significant positions.
    void bring_to_front(const std::vector<int>& front) {
        std::vector<int> order;
        std::vector<char> used(wires.size(), 0);
        for (int w : front) {
            const auto it = std::find(wires.begin(), wires.end(), w);
            if (it == wires.end()) throw std::logic_error("build_state: wire is not live");
            const int k = static_cast<int>(it - wires.begin());
            order.push_back(k);
            used[k] = 1;
        }
        for (std::size_t k = 0; k < wires.size(); ++k)
            if (!used[k]) order.push_back(static_cast<int>(k));
        amp = permute_axes(amp, dims, order);
        std::vector<int> nw, nd;
        for (int k : order) {
            nw.push_back(wires[k]);
            nd.push_back(dims[k]);
        }
        wires = std::move(nw);
        dims = std::move(nd);
    }
};

}  // namespace detail

using GateProvider = std::function<SampledGate(int unitary_id, int dim)>;

/// Applies the gates supplied by `gates` in topological order.
inline StateVector build_state(const TensorNetworkGraph& g, const GateProvider& gates) {
    const auto report = validate(g);
    if (!report.ok()) throw std::invalid_argument("build_state: invalid graph\n" + report.str());
    double logD = 0.0;
    for (int o : g.outputs()) logD += std::log2(static_cast<double>(g.output_dim(o)));
    if (logD > 24.0 + 1e-9) throw std::length_error("build_state: output dimension exceeds 2^24");

    detail::LiveRegister reg;
    std::vector<char> introduced(g.vertices().size(), 0);
    auto introduce = [&](int input_id) {
        const int p = g.position(input_id);
        if (introduced[p]) return;
        introduced[p] = 1;
        const auto& outs = g.out_edges(input_id);
        if (g.kind(input_id) == VertexKind::InputProduct) {
            const int chi = g.edge(outs[0]).chi;
            Eigen::VectorXcd z = Eigen::VectorXcd::Zero(chi);
            z(0) = 1.0;
            reg.append(z, {outs[0]}, {chi});
        } else {
            const int chi = g.edge(outs[0]).chi;
            Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(chi) * chi);
            for (int j = 0; j < chi; ++j) bell(static_cast<Eigen::Index>(j) * chi + j) = 1.0 / std::sqrt(chi);
            reg.append(bell, {outs[0], outs[1]}, {chi, chi});
        }
    };

    for (int u : topological_order(g)) {
        const auto& ins = g.in_edges(u);
        for (int e : ins) {
            const int src = g.edge(e).src;
            if (g.kind(src) != VertexKind::Unitary) introduce(src);
        }
        reg.bring_to_front(ins);
        const auto d = static_cast<Eigen::Index>(g.gate_dim(u));
        const auto rest = static_cast<Eigen::Index>(reg.dim()) / d;
        RowMatrixXcd block = Eigen::Map<RowMatrixXcd>(reg.amp.data(), d, rest);
        const SampledGate gate = gates(u, static_cast<int>(d));
        if (gate.dim() != d) throw std::invalid_argument("build_state: gate has wrong dimension");
        gate.apply_rows(block);
        reg.amp = Eigen::Map<Eigen::VectorXcd>(block.data(), block.size());
        const auto& outs = g.out_edges(u);
        std::vector<int> nw(outs.begin(), outs.end()), nd;
        for (int e : outs) nd.push_back(g.edge(e).chi);
        nw.insert(nw.end(), reg.wires.begin() + static_cast<std::ptrdiff_t>(ins.size()), reg.wires.end());
        nd.insert(nd.end(), reg.dims.begin() + static_cast<std::ptrdiff_t>(ins.size()), reg.dims.end());
        reg.wires = std::move(nw);
        reg.dims = std::move(nd);
    }
    for (const auto& v : g.vertices())
        if (v.kind == VertexKind::InputProduct || v.kind == VertexKind::InputBell) introduce(v.id);

    StateVector st;
    st.outputs = g.outputs();
    std::vector<int> front;
    for (int o : st.outputs) {
        front.push_back(g.in_edges(o)[0]);
        st.dims.push_back(g.output_dim(o));
    }
    reg.bring_to_front(front);
    st.amplitudes = std::move(reg.amp);
    return st;
}

/// One state drawn from `spec`; gate u uses seed node `node.child(u)`.
inline StateVector build_state(const TensorNetworkGraph& g, const EnsembleSpec& spec, const SeedTree& node) {
    spec.check();
    return build_state(g, [&](int u, int dim) { return sample_gate(dim, spec, node.child(static_cast<std::uint64_t>(u))); });
}

/// Eigenvalues of the reduced density matrix on the outputs in A.
inline Eigen::VectorXd reduced_spectrum(const StateVector& st, const std::vector<int>& A) {
    const int n = static_cast<int>(st.outputs.size());
    std::vector<int> order;
    std::vector<char> inA(n, 0);
    for (int id : A) {
        const int k = st.position(id);
        if (inA[k]) throw std::invalid_argument("region lists an output twice");
        inA[k] = 1;
        order.push_back(k);
    }
    std::uint64_t dA = 1;
    for (int k : order) dA *= static_cast<std::uint64_t>(st.dims[k]);
    for (int k = 0; k < n; ++k)
        if (!inA[k]) order.push_back(k);
    const std::uint64_t dB = st.dim() / dA;
    if (dA == 1 || dB == 1) {
        Eigen::VectorXd one(1);
        one(0) = st.amplitudes.squaredNorm();
        return one;
    }
    const Eigen::VectorXcd v = detail::permute_axes(st.amplitudes, st.dims, order);
    Eigen::Map<const RowMatrixXcd> M(v.data(), static_cast<Eigen::Index>(dA), static_cast<Eigen::Index>(dB));
    Eigen::MatrixXcd rho;
    if (dA <= dB) {
        rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dA), static_cast<Eigen::Index>(dA));
        rho.selfadjointView<Eigen::Lower>().rankUpdate(M);
    } else {
        rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dB), static_cast<Eigen::Index>(dB));
        rho.selfadjointView<Eigen::Lower>().rankUpdate(M.adjoint());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

enum class EntropyKind { VonNeumann, Renyi2 };

/// Squared singular values below this are treated as zero.
inline constexpr double kSpectrumFloor = 1e-24;

inline double entropy_from_spectrum(const Eigen::VectorXd& lambda, EntropyKind kind) {
    if (kind == EntropyKind::Renyi2) {
        double p = 0.0;
        for (double l : lambda)
            if (l > kSpectrumFloor) p += l * l;
        return -std::log2(p);
    }
    double s = 0.0;
    for (double l : lambda)
        if (l > kSpectrumFloor) s -= l * std::log2(l);
    return std::max(s, 0.0);
}

/// Entropy of the outputs in A, in bits.
inline double entropy(const StateVector& st, const std::vector<int>& A, EntropyKind kind = EntropyKind::VonNeumann) {
    if (A.empty()) return 0.0;
    return entropy_from_spectrum(reduced_spectrum(st, A), kind);
}

inline double purity(const StateVector& st, const std::vector<int>& A) {
    if (A.empty()) return 1.0;
    double p = 0.0;
    for (double l : reduced_spectrum(st, A))
        if (l > kSpectrumFloor) p += l * l;
    return p;
}

struct ProfilePoint {
    int first = 0;  ///< 1-based position of the first output in the cut
    int last = 0;   ///< 1-based position of the last output in the cut
    double mean = 0.0;
    double stderr_ = 0.0;

    int size() const { return last - first + 1; }
};

struct EntropyProfile {
    std::string family;
    std::vector<ProfilePoint> points;
};

enum class CutFamily { Prefix, Segment };

/// Running mean and standard error.
struct SampleStats {
    std::size_t n = 0;
    double sum = 0.0;
    double sumsq = 0.0;

    void add(double x) {
        ++n;
        sum += x;
        sumsq += x * x;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double stderr_() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

/// Cuts as 1-based (first, last) output positions. Prefixes run over
/// 1..L-1; segments are every contiguous block touching neither end.
inline std::vector<std::pair<int, int>> cut_family(int L, CutFamily family) {
    std::vector<std::pair<int, int>> cuts;
    if (family == CutFamily::Prefix) {
        for (int l = 1; l < L; ++l) cuts.emplace_back(1, l);
    } else {
        for (int a = 2; a < L; ++a)
            for (int b = a; b < L; ++b) cuts.emplace_back(a, b);
    }
    return cuts;
}

/// Mean entropy per cut over `samples` states; sample s uses node.child(s).
inline EntropyProfile entropy_profile(const TensorNetworkGraph& g, const EnsembleSpec& spec, const SeedTree& node,
                                      CutFamily family, int samples, EntropyKind kind = EntropyKind::VonNeumann) {
    if (samples < 1) throw std::invalid_argument("entropy_profile: samples must be positive");
    const auto outs = g.outputs();
    const auto cuts = cut_family(static_cast<int>(outs.size()), family);
    std::vector<SampleStats> stats(cuts.size());
    for (int s = 0; s < samples; ++s) {
        const auto st = build_state(g, spec, node.child(static_cast<std::uint64_t>(s)));
        for (std::size_t c = 0; c < cuts.size(); ++c) {
            std::vector<int> A(outs.begin() + (cuts[c].first - 1), outs.begin() + cuts[c].second);
            stats[c].add(entropy(st, A, kind));
        }
    }
    EntropyProfile p{family == CutFamily::Prefix ? "prefix" : "segment", {}};
    for (std::size_t c = 0; c < cuts.size(); ++c)
        p.points.push_back({cuts[c].first, cuts[c].second, stats[c].mean(), stats[c].stderr_()});
    return p;
}

/// Haar-random pure state on `dim` amplitudes (normalized complex Gaussian).
inline Eigen::VectorXcd haar_random_state(std::uint64_t dim, const SeedTree& node) {
    auto gen = node.engine();
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {normal(gen), normal(gen)};
    return v / v.norm();
}

/// Mean entropy of global Haar states on n qubits for prefix cuts of the
/// given sizes.
inline EntropyProfile page_reference(int n_qubits, const std::vector<int>& cut_sizes, int samples, const SeedTree& node) {
    if (n_qubits < 1 || n_qubits > 14) throw std::invalid_argument("page_reference: n must be in [1, 14]");
    if (samples < 1) throw std::invalid_argument("page_reference: samples must be positive");
    for (int k : cut_sizes)
        if (k < 0 || k > n_qubits) throw std::invalid_argument("page_reference: cut size out of range");
    std::vector<SampleStats> stats(cut_sizes.size());
    StateVector st;
    for (int q = 1; q <= n_qubits; ++q) {
        st.outputs.push_back(q);
        st.dims.push_back(2);
    }
    for (int s = 0; s < samples; ++s) {
        st.amplitudes = haar_random_state(std::uint64_t{1} << n_qubits, node.child(static_cast<std::uint64_t>(s)));
        for (std::size_t c = 0; c < cut_sizes.size(); ++c) {
            std::vector<int> A(static_cast<std::size_t>(cut_sizes[c]));
            std::iota(A.begin(), A.end(), 1);
            stats[c].add(entropy(st, A));
        }
    }
    EntropyProfile p{"page", {}};
    for (std::size_t c = 0; c < cut_sizes.size(); ++c) p.points.push_back({1, cut_sizes[c], stats[c].mean(), stats[c].stderr_()});
    return p;
}

}  // namespace pseudoent

#endif  // PSEUDOENT_STATESIM_HPP
