#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncdrank/ncdrank.hpp"

namespace ncdrank::cli {

enum ExitCode : int { kOk = 0, kCriterionFails = 1, kInputError = 2, kNotConverged = 3 };

enum class OutputFormat { Tsv, Json };

struct CliConfig {
    std::string command;
    std::string graph_path;
    std::string blocks_path;
    double eta = 0.85;
    double mu = 0.15;
    double teleport = 0.0;
    double tol = 1e-9;
    std::size_t max_iter = 1000;
    DanglingPolicy dangling = DanglingPolicy::OwnBlock;
    std::optional<std::size_t> top;
    OutputFormat format = OutputFormat::Tsv;
    bool strict = true;
    /// Damping of the PageRank baseline used by `compare`.
    double alpha = 0.85;
};

/// Rejects weights that do not sum to 1 within 1e-9, then rescales them so
/// the library sees an exact convex combination. Zero weights stay zero.
inline void normalize_weights(CliConfig& c) {
    const double sum = c.eta + c.mu + c.teleport;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("--eta + --mu + --teleport must equal 1 (got " + std::to_string(sum) + ")");
    c.eta /= sum;
    c.mu /= sum;
    c.teleport /= sum;
}

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Same 12-significant-digit value as a JSON number.
inline double json_number(double v) { return std::stod(format_number(v)); }

namespace detail {

struct Problem {
    Graph graph;
    Decomposition decomp;
    HyperlinkOperator hyperlink;
    ProximityFactors factors;
};

inline Problem load(const CliConfig& c) {
    if (c.graph_path.empty()) throw ConfigError("--graph is required");
    if (c.blocks_path.empty()) throw ConfigError("--blocks is required");
    std::ifstream gin(c.graph_path);
    if (!gin) throw ConfigError("cannot open graph file '" + c.graph_path + "'");
    Graph g = parse_edge_list(gin);
    std::ifstream bin(c.blocks_path);
    if (!bin) throw ConfigError("cannot open blocks file '" + c.blocks_path + "'");
    Decomposition d = parse_blocks(bin, g);
    HyperlinkOperator h = build_hyperlink(g, c.dangling, &d);
    ProximityFactors f = build_factors(d, g);
    return Problem{std::move(g), std::move(d), std::move(h), std::move(f)};
}

inline RankParams params_of(const CliConfig& c) {
    RankParams p;
    p.eta = c.eta;
    p.mu = c.mu;
    p.teleport = c.teleport;
    p.tol = c.tol;
    p.max_iter = c.max_iter;
    p.strict = c.strict;
    return p;
}

inline std::string components_text(const std::vector<std::vector<std::size_t>>& comps, const Decomposition& d) {
    std::string s;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i) s += ',';
        s += '[';
        for (std::size_t j = 0; j < comps[i].size(); ++j) {
            if (j) s += ',';
            s += d.block_label(static_cast<block_id>(comps[i][j]));
        }
        s += ']';
    }
    return s;
}

inline nlohmann::ordered_json components_json(const std::vector<std::vector<std::size_t>>& comps,
                                              const Decomposition& d) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& comp : comps) {
        auto inner = nlohmann::ordered_json::array();
        for (const auto k : comp) inner.push_back(d.block_label(static_cast<block_id>(k)));
        arr.push_back(std::move(inner));
    }
    return arr;
}

inline void write_dense(std::ostream& out, const std::string& name, const DenseMatrix& m) {
    out << name << '\t' << m.rows() << 'x' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << '\t';
            out << format_number(m(i, j));
        }
        out << '\n';
    }
}

inline nlohmann::ordered_json dense_json(const DenseMatrix& m) {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(json_number(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Runs `body`, mapping library errors onto the exit-code contract.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ReducibleError& e) {
        err << "error: " << e.what() << '\n';
        return kCriterionFails;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
}

}  // namespace detail

/// Prints the teleportation-free admission report. Exit 0 when the
/// indicator matrix is irreducible, 1 when it is not, 2 on input errors.
inline int cmd_check(const CliConfig& c, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto pb = detail::load(c);
        const CheckReport r = teleportation_free_check(indicator(pb.factors));
        const char* verdict = r.primitive_guarantee ? "admissible" : "not admissible";
        if (c.format == OutputFormat::Json) {
            nlohmann::ordered_json j;
            j["blocks"] = pb.decomp.block_count();
            j["scc_count"] = r.scc_count;
            j["irreducible"] = r.irreducible;
            j["primitive_guarantee"] = r.primitive_guarantee;
            j["verdict"] = verdict;
            j["components"] = detail::components_json(r.blocking_components, pb.decomp);
            out << j.dump(2) << '\n';
        } else {
            out << "blocks\t" << pb.decomp.block_count() << '\n';
            out << "scc_count\t" << r.scc_count << '\n';
            out << "irreducible\t" << (r.irreducible ? "true" : "false") << '\n';
            out << "primitive_guarantee\t" << (r.primitive_guarantee ? "true" : "false") << '\n';
            out << "verdict\t" << verdict << '\n';
            if (!r.irreducible)
                out << "components\t" << detail::components_text(r.blocking_components, pb.decomp) << '\n';
        }
        return r.irreducible ? kOk : kCriterionFails;
    });
}

/// Ranks nodes with P = eta*H + mu*M + teleport*E. TSV lines are
/// "label<TAB>score", descending score then ascending label.
inline int cmd_rank(const CliConfig& c, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto pb = detail::load(c);
        const RankParams p = detail::params_of(c);
        if (implied_row_sum_error(pb.hyperlink, pb.factors, p) > 1e-12)
            throw DomainError("internal: implied transition matrix is not row-stochastic");
        const CheckReport check = teleportation_free_check(indicator(pb.factors));
        const RankResult r = rank(pb.hyperlink, pb.factors, p);

        auto order = ranking_order(r.scores, pb.graph.labels());
        if (c.top && *c.top < order.size()) order.resize(*c.top);

        if (c.format == OutputFormat::Json) {
            nlohmann::ordered_json j;
            auto& scores = j["scores"] = nlohmann::ordered_json::object();
            for (const node_id u : order) scores[pb.graph.label(u)] = json_number(r.scores[u]);
            auto& meta = j["meta"];
            meta["iterations"] = r.iterations;
            meta["residual"] = json_number(r.residual);
            meta["converged"] = r.converged;
            meta["eta"] = json_number(c.eta);
            meta["mu"] = json_number(c.mu);
            meta["teleport"] = json_number(c.teleport);
            meta["teleportation_free_admissible"] = check.irreducible;
            out << j.dump(2) << '\n';
        } else {
            for (const node_id u : order) out << pb.graph.label(u) << '\t' << format_number(r.scores[u]) << '\n';
        }
        if (!r.converged) {
            err << "warning: no convergence after " << r.iterations << " iterations (residual "
                << format_number(r.residual) << ")\n";
            return kNotConverged;
        }
        return kOk;
    });
}

/// Compares the configured model against a PageRank baseline (damping
/// --alpha, uniform teleportation) on the same hyperlink operator.
inline int cmd_compare(const CliConfig& c, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto pb = detail::load(c);
        const RankResult model = rank(pb.hyperlink, pb.factors, detail::params_of(c));
        const RankResult baseline = pagerank(pb.hyperlink, c.alpha, c.tol, c.max_iter);
        const std::size_t k = c.top.value_or(pb.graph.size());
        const ComparisonReport rep = compare(model, baseline, pb.graph.labels(), k);
        if (rep.clipped)
            err << "warning: top " << k << " exceeds node count " << pb.graph.size() << "; using " << rep.k << '\n';

        if (c.format == OutputFormat::Json) {
            nlohmann::ordered_json j;
            j["l1"] = json_number(rep.l1);
            j["overlap"] = json_number(rep.overlap);
            j["k"] = rep.k;
            j["clipped"] = rep.clipped;
            auto labels_of = [&](const std::vector<node_id>& ids) {
                auto a = nlohmann::ordered_json::array();
                for (const node_id u : ids) a.push_back(pb.graph.label(u));
                return a;
            };
            j["top_model"] = labels_of(rep.top_a);
            j["top_pagerank"] = labels_of(rep.top_b);
            j["converged"] = model.converged && baseline.converged;
            out << j.dump(2) << '\n';
        } else {
            out << "l1\t" << format_number(rep.l1) << '\n';
            out << "overlap\t" << format_number(rep.overlap) << '\n';
            out << "k\t" << rep.k << '\n';
            out << "position\tmodel\tpagerank\n";
            for (std::size_t i = 0; i < rep.k; ++i)
                out << i + 1 << '\t' << pb.graph.label(rep.top_a[i]) << '\t' << pb.graph.label(rep.top_b[i]) << '\n';
        }
        if (!model.converged || !baseline.converged) {
            err << "warning: a ranking did not converge\n";
            return kNotConverged;
        }
        return kOk;
    });
}

/// Dense dump of H, M, R, A and W for small graphs.
inline int cmd_materialize(const CliConfig& c, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto pb = detail::load(c);
        const DenseMatrix m = materialize_m(pb.factors);
        const DenseMatrix h = pb.hyperlink.to_dense();
        const DenseMatrix r = pb.factors.R.to_dense();
        const DenseMatrix a = pb.factors.A.to_dense();
        const DenseMatrix w = indicator(pb.factors).dense();
        if (c.format == OutputFormat::Json) {
            nlohmann::ordered_json j;
            j["nodes"] = pb.graph.labels();
            j["blocks"] = pb.decomp.block_labels();
            j["H"] = detail::dense_json(h);
            j["M"] = detail::dense_json(m);
            j["R"] = detail::dense_json(r);
            j["A"] = detail::dense_json(a);
            j["W"] = detail::dense_json(w);
            out << j.dump(2) << '\n';
        } else {
            detail::write_dense(out, "H", h);
            out << '\n';
            detail::write_dense(out, "M", m);
            out << '\n';
            detail::write_dense(out, "R", r);
            out << '\n';
            detail::write_dense(out, "A", a);
            out << '\n';
            detail::write_dense(out, "W", w);
        }
        return kOk;
    });
}

inline int run(const CliConfig& c, std::ostream& out, std::ostream& err) {
    if (c.command == "check") return cmd_check(c, out, err);
    if (c.command == "rank") return cmd_rank(c, out, err);
    if (c.command == "compare") return cmd_compare(c, out, err);
    if (c.command == "materialize") return cmd_materialize(c, out, err);
    err << "error: unknown command '" << c.command << "'\n";
    return kInputError;
}

/// Parses argv into `config`. Returns an exit code when the program should
/// stop (help requested or bad flags), std::nullopt otherwise.
inline std::optional<int> parse_args(int argc, const char* const* argv, CliConfig& config, std::ostream& out,
                                     std::ostream& err) {
    CLI::App app{"Block-aware link ranking with a teleportation-free mode", "ncdrank"};
    app.add_option("command", config.command, "check | rank | compare | materialize")
        ->required()
        ->check(CLI::IsMember({"check", "rank", "compare", "materialize"}));
    app.add_option("--graph", config.graph_path, "edge list file (src dst per line)");
    app.add_option("--blocks", config.blocks_path, "block membership file (node block per line)");
    app.add_option("--eta", config.eta, "weight of the hyperlink matrix H");
    app.add_option("--mu", config.mu, "weight of the inter-level proximity matrix M");
    app.add_option("--teleport", config.teleport, "weight of the uniform teleportation matrix E");
    app.add_option("--tol", config.tol, "L1 tolerance between successive iterates");
    app.add_option("--max-iter", config.max_iter, "iteration cap");
    app.add_option("--alpha", config.alpha, "damping of the PageRank baseline (compare)");
    std::string dangling = "block";
    app.add_option("--dangling", dangling, "dangling-node fix")->check(CLI::IsMember({"block", "uniform"}));
    std::size_t top = 0;
    app.add_option("--top", top, "print only the first N entries")->check(CLI::PositiveNumber);
    std::string format = "tsv";
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"tsv", "json"}));
    bool no_strict = false;
    app.add_flag("--no-strict", no_strict, "rank even when teleportation-free mode is not admissible");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    config.dangling = dangling == "uniform" ? DanglingPolicy::UniformAll : DanglingPolicy::OwnBlock;
    if (top > 0) config.top = top;
    config.format = format == "json" ? OutputFormat::Json : OutputFormat::Tsv;
    config.strict = !no_strict;
    try {
        normalize_weights(config);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return std::nullopt;
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliConfig config;
    if (const auto stop = parse_args(argc, argv, config, out, err)) return *stop;
    return run(config, out, err);
}

}  // namespace ncdrank::cli
