// pseudoent-cli: experiment drivers with CSV output.
//
// Exit codes: 0 success, 1 assertion failure, 2 configuration error.

#include "pseudoent/pseudoent.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace pseudoent;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string graph_file;
    std::string staircase;
    std::string hyperbolic;
    std::string copies;
    int samples = 1000;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> key;
    std::string region;
    std::string ensemble = "haar";
    std::string out;
    std::string nus;
    std::string dims;
    std::string dump;
};

std::vector<int> int_list(const std::string& s, const char* what) {
    std::vector<int> r;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t used = 0;
            r.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad integer '") + tok + "' in " + what);
        }
    }
    if (r.empty()) throw ConfigError(std::string("empty list for ") + what);
    return r;
}

TensorNetworkGraph load_graph(const Config& c) {
    const int given = !c.graph_file.empty() + !c.staircase.empty() + !c.hyperbolic.empty();
    if (given != 1) throw ConfigError("give exactly one of --graph, --staircase, --hyperbolic");
    if (!c.graph_file.empty()) {
        std::ifstream in(c.graph_file);
        if (!in) throw ConfigError("cannot open graph file " + c.graph_file);
        return parse_graph(in);
    }
    if (!c.staircase.empty()) {
        const auto v = int_list(c.staircase, "--staircase");
        if (v.size() != 2) throw ConfigError("--staircase expects L,NU");
        return build_staircase(v[0], v[1]);
    }
    const auto v = int_list(c.hyperbolic, "--hyperbolic");
    if (v.size() != 2) throw ConfigError("--hyperbolic expects LAYERS,CHI");
    return build_hyperbolic_64(v[0], v[1]);
}

std::pair<int, int> staircase_params(const Config& c) {
    if (c.staircase.empty()) throw ConfigError("this subcommand needs --staircase L,NU");
    const auto v = int_list(c.staircase, "--staircase");
    if (v.size() != 2) throw ConfigError("--staircase expects L,NU");
    return {v[0], v[1]};
}

int single_copies(const Config& c) {
    const auto v = int_list(c.copies.empty() ? "2" : c.copies, "--copies");
    if (v.size() != 1) throw ConfigError("--copies expects one value here");
    return v[0];
}

std::uint64_t require_seed(const Config& c) {
    if (!c.seed) throw ConfigError("--seed is required for sampled runs");
    return *c.seed;
}

EnsembleSpec ensemble(const Config& c) { return parse_ensemble(c.ensemble, c.key); }

std::vector<int> region(const Config& c) {
    if (c.region.empty()) throw ConfigError("--region is required");
    return parse_region(c.region);
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

int run_weingarten(const Config& c) {
    const auto ms = int_list(c.copies.empty() ? "2,3,4" : c.copies, "--copies");
    std::vector<int> ds;
    if (c.dims.empty()) {
        for (int d = 2; d <= 16; ++d) ds.push_back(d);
        for (int d : {32, 64}) ds.push_back(d);
    } else {
        ds = int_list(c.dims, "--dims");
    }
    const auto rows = weingarten_check(ms, ds);
    Output out(c.out);
    write_csv(out.stream(), rows);
    for (const auto& r : rows)
        if (r.valid && (r.s1_residual != 0 || r.s2_residual > 1e-10 || r.s3_sign_violations > 0)) return 1;
    return 0;
}

int run_moment_distance(const Config& c) {
    const auto [L, nu] = staircase_params(c);
    const auto nus = c.nus.empty() ? std::vector<int>{nu} : int_list(c.nus, "--nus");
    const auto rows = lemma2_sweep(L, nus, single_copies(c));
    Output out(c.out);
    write_csv(out.stream(), rows);
    for (const auto& r : rows)
        if (!(r.distance >= 0.0)) return 1;
    return 0;
}

int run_pfc_distance(const Config& c) {
    const auto [L, nu] = staircase_params(c);
    const int m = single_copies(c);
    if (c.samples < 1) throw ConfigError("--samples must be positive");
    auto spec = c.ensemble == "haar" ? EnsembleSpec::pfc() : ensemble(c);
    const auto r = lemma1_check(L, nu, m, c.samples, SeedTree(require_seed(c)), spec);
    Output out(c.out);
    write_csv(out.stream(), std::vector<DistanceRecord>{r});
    if (m == 2 && r.distance >= 5.0 * r.stderr_) return 1;
    return 0;
}

int run_area_law(const Config& c) {
    const auto [L, nu] = staircase_params(c);
    if (c.samples < 1) throw ConfigError("--samples must be positive");
    const auto rows = area_law_profile(L, nu, ensemble(c), c.samples, SeedTree(require_seed(c)));
    Output out(c.out);
    write_csv(out.stream(), rows);
    for (const auto& r : rows)
        if (r.mean > nu + 1e-9) return 1;
    return 0;
}

int run_rt_verify(const Config& c) {
    const auto g = load_graph(c);
    if (c.samples < 1) throw ConfigError("--samples must be positive");
    const auto r = rt_verify(g, region(c), ensemble(c), c.samples, SeedTree(require_seed(c)));
    Output out(c.out);
    write_csv(out.stream(), r);
    return r.sandwich ? 0 : 1;
}

int run_partition_oracle(const Config& c) {
    const auto g = load_graph(c);
    const int m = single_copies(c);
    const auto twirl = ensemble_moment_exact(g, m);
    const auto part = moment_from_partition(from_tn_graph(g, m));
    const double diff = (twirl.matrix - part.matrix).cwiseAbs().maxCoeff();
    Output out(c.out);
    auto& os = out.stream();
    os << "m,dim,max_abs_diff,trace_twirl,trace_partition,hermiticity_error";
    std::optional<double> pur;
    if (!c.region.empty() && m == 2) {
        pur = purity_partition(g, region(c));
        os << ",purity_partition";
    }
    os << '\n'
       << m << ',' << twirl.layout.total_dim() << ',' << fmt17(diff) << ',' << fmt17(twirl.trace().real()) << ','
       << fmt17(part.trace().real()) << ',' << fmt17(part.hermiticity_error());
    if (pur) os << ',' << fmt17(*pur);
    os << '\n';
    return diff < 1e-8 ? 0 : 1;
}

int run_graph_validate(const Config& c) {
    const auto g = load_graph(c);
    const auto rep = validate(g);
    Output out(c.out);
    auto& os = out.stream();
    const auto shape = system_shape(g);
    os << "valid,unitaries,outputs,N,violations\n"
       << (rep.ok() ? "yes" : "no") << ',' << shape.n_U << ',' << shape.L << ',' << fmt17(shape.N) << ','
       << rep.violations.size() << '\n';
    if (!rep.ok()) {
        os << "vertex,message\n";
        for (const auto& v : rep.violations) os << v.vertex << ',' << v.message << '\n';
    }
    if (!c.dump.empty()) {
        std::ofstream f(c.dump);
        if (!f) throw ConfigError("cannot write " + c.dump);
        write_graph(f, g);
    }
    return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudoentangled tensor-network experiments"};
    app.require_subcommand(1);
    Config cfg;

    auto add_graph = [&](CLI::App* s) {
        s->add_option("--graph", cfg.graph_file, "Graph file (vertex/edge lines)");
        s->add_option("--staircase", cfg.staircase, "Staircase builder: L,NU");
        s->add_option("--hyperbolic", cfg.hyperbolic, "{6,4} patch builder: LAYERS,CHI");
    };
    auto add_sampling = [&](CLI::App* s) {
        s->add_option("--samples", cfg.samples, "Number of sampled states");
        s->add_option("--seed", cfg.seed, "Master seed (required)");
        s->add_option("--ensemble", cfg.ensemble, "haar | clifford | pfc | pfc:keyed");
        s->add_option("--key", cfg.key, "Key for pfc:keyed");
    };
    auto add_out = [&](CLI::App* s) { s->add_option("--out", cfg.out, "CSV output file (default stdout)"); };

    auto* wc = app.add_subcommand("weingarten-check",
                                  "Weingarten identity residuals.\n"
                                  "CSV: m,d,status,s1_residual,s2_residual,s3_sign_violations,s3_ratio_residual,s4_residual");
    wc->add_option("--copies", cfg.copies, "Comma-separated m values (default 2,3,4)");
    wc->add_option("--dims", cfg.dims, "Comma-separated d values (default 2..16,32,64)");
    add_out(wc);

    auto* md = app.add_subcommand("moment-distance",
                                  "Exact Haar-gate staircase moment vs global Haar moment.\n"
                                  "CSV: chi,nu,L,N,m,distance,method,samples,stderr");
    md->add_option("--staircase", cfg.staircase, "L,NU")->required();
    md->add_option("--nus", cfg.nus, "Comma-separated NU sweep (overrides NU)");
    md->add_option("--copies", cfg.copies, "Copy count m");
    add_out(md);

    auto* pd = app.add_subcommand("pfc-distance",
                                  "Sampled PFC-gate moment vs exact Haar-gate moment.\n"
                                  "CSV: chi,nu,L,N,m,distance,method,samples,stderr");
    pd->add_option("--staircase", cfg.staircase, "L,NU")->required();
    pd->add_option("--copies", cfg.copies, "Copy count m");
    add_sampling(pd);
    add_out(pd);

    auto* al = app.add_subcommand("area-law",
                                  "Prefix-cut entropy profile of a staircase state.\n"
                                  "CSV: cut,mean_entropy,stderr,page_mean,page_stderr");
    al->add_option("--staircase", cfg.staircase, "L,NU")->required();
    add_sampling(al);
    add_out(al);

    auto* rt = app.add_subcommand("rt-verify",
                                  "Min-cut, purity bound and sampled entropy of a region.\n"
                                  "CSV: region,mincut_bits,mincut_edges,rt_lower_bound_bits,mean_entropy_bits,stderr,"
                                  "samples,chi,newton_4_over_ln_chi,newton_4_over_log2_chi,sandwich");
    add_graph(rt);
    rt->add_option("--region", cfg.region, "Comma-separated output ids")->required();
    add_sampling(rt);
    add_out(rt);

    auto* po = app.add_subcommand("partition-oracle",
                                  "Spin-model partition sum vs sequential twirl.\n"
                                  "CSV: m,dim,max_abs_diff,trace_twirl,trace_partition,hermiticity_error[,purity_partition]");
    add_graph(po);
    po->add_option("--copies", cfg.copies, "Copy count m");
    po->add_option("--region", cfg.region, "Region for the purity partition function (m = 2)");
    add_out(po);

    auto* gv = app.add_subcommand("graph-validate",
                                  "Validate a graph.\nCSV: valid,unitaries,outputs,N,violations");
    add_graph(gv);
    gv->add_option("--dump", cfg.dump, "Write the graph in text form");
    add_out(gv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (wc->parsed()) return run_weingarten(cfg);
        if (md->parsed()) return run_moment_distance(cfg);
        if (pd->parsed()) return run_pfc_distance(cfg);
        if (al->parsed()) return run_area_law(cfg);
        if (rt->parsed()) return run_rt_verify(cfg);
        if (po->parsed()) return run_partition_oracle(cfg);
        if (gv->parsed()) return run_graph_validate(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
