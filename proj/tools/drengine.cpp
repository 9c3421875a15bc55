#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dr/errors.hpp"
#include "dr/graphs.hpp"
#include "dr/parallel.hpp"
#include "dr/pixton.hpp"
#include "dr/qexpr.hpp"
#include "dr/selftest.hpp"
#include "dr/weightsum.hpp"

namespace {

std::vector<long> parse_A(const std::string& s) {
    std::vector<long> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stol(item));
    return out;
}

dr::StableGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dr::DomainError("cannot open graph file: " + path);
    nlohmann::json j;
    in >> j;
    return dr::StableGraph::from_json(j);
}

void emit(const nlohmann::json& doc, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw dr::DomainError("cannot open output file: " + out_path);
        out << doc.dump(2) << "\n";
    }
}

dr::RamVector make_A(const std::vector<long>& entries, long k, int g, int n) {
    return dr::RamVector::make(entries, k, g, n);
}

// ambient-coordinate representative: k = (a_1 + ... + a_n) / (2g-2+n)
dr::TautExpression to_ambient(const dr::TautExpression& expr) {
    long d = 2L * expr.g() - 2 + expr.n();
    dr::MultiPoly ksub;
    for (int i = 1; i <= expr.n(); ++i)
        ksub = ksub + dr::MultiPoly::var("a_" + std::to_string(i));
    ksub = ksub * dr::Rat(1, d);
    dr::TautExpression out(expr.g(), expr.n());
    for (const auto& [key, term] : expr.terms())
        out.add(term.stratum, term.coeff.substitute_or_keep({{"k", ksub}}));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact double ramification cycle engine"};
    app.require_subcommand(1);

    int g = 0, n = 0, threads = 0, max_degree = -1;
    long k = 0, r = 0, window_start = -1;
    std::string A_str, Q_str = "1", graph_path, method = "fit", out_path;
    bool quick = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--threads", threads, "worker thread count");
        cmd->add_option("--out", out_path, "output path (default stdout)");
    };

    auto* cmd_graphs = app.add_subcommand("graphs", "enumerate stable graphs");
    cmd_graphs->add_option("--g", g)->required();
    cmd_graphs->add_option("--n", n)->required();
    add_common(cmd_graphs);

    auto* cmd_sum = app.add_subcommand("sum", "weighting sum S_{A,r}(Q)");
    cmd_sum->add_option("--graph", graph_path)->required();
    cmd_sum->add_option("--A", A_str)->required();
    cmd_sum->add_option("--k", k);
    cmd_sum->add_option("--r", r)->required();
    cmd_sum->add_option("--Q", Q_str);
    add_common(cmd_sum);

    auto* cmd_ct = app.add_subcommand("ct", "constant term S_{A,0}(Q)");
    cmd_ct->add_option("--graph", graph_path)->required();
    cmd_ct->add_option("--A", A_str)->required();
    cmd_ct->add_option("--k", k);
    cmd_ct->add_option("--Q", Q_str);
    cmd_ct->add_option("--window-start", window_start);
    cmd_ct->add_option("--max-degree", max_degree);
    add_common(cmd_ct);

    auto* cmd_spoly = app.add_subcommand("spoly", "S_{A,0}(Q) as a polynomial in A");
    cmd_spoly->add_option("--graph", graph_path)->required();
    cmd_spoly->add_option("--Q", Q_str);
    add_common(cmd_spoly);

    auto* cmd_dr = app.add_subcommand("dr", "DR_g(A) as decorated strata");
    cmd_dr->add_option("--g", g)->required();
    cmd_dr->add_option("--n", n)->required();
    cmd_dr->add_option("--A", A_str)->required();
    cmd_dr->add_option("--k", k);
    add_common(cmd_dr);

    auto* cmd_drpoly = app.add_subcommand("drpoly", "DR_g as a polynomial family");
    cmd_drpoly->add_option("--g", g)->required();
    cmd_drpoly->add_option("--n", n)->required();
    cmd_drpoly->add_option("--method", method)->check(CLI::IsMember({"fit", "recursion"}));
    add_common(cmd_drpoly);

    auto* cmd_selftest = app.add_subcommand("selftest", "run the acceptance suite");
    cmd_selftest->add_flag("--quick", quick, "reduced suite (< 60 s)");
    add_common(cmd_selftest);

    CLI11_PARSE(app, argc, argv);

    try {
        if (threads > 0) dr::set_thread_count(threads);

        if (cmd_graphs->parsed()) {
            auto graphs = dr::enumerate_stable_graphs(g, n);
            nlohmann::json doc;
            doc["g"] = g;
            doc["n"] = n;
            doc["count"] = graphs.size();
            doc["graphs"] = nlohmann::json::array();
            for (const auto& gamma : graphs) {
                nlohmann::json item;
                item["graph"] = gamma.to_json();
                item["canonical"] = dr::canonical_form(gamma).hex();
                item["automorphisms"] = dr::automorphism_count(gamma);
                doc["graphs"].push_back(std::move(item));
            }
            emit(doc, out_path);
        } else if (cmd_sum->parsed()) {
            auto gamma = load_graph(graph_path);
            auto A = make_A(parse_A(A_str), k, gamma.genus, gamma.n());
            auto Q = dr::parse_poly(Q_str);
            emit(dr::sum_S_result(gamma, A, r, Q).to_json(), out_path);
        } else if (cmd_ct->parsed()) {
            auto gamma = load_graph(graph_path);
            auto A = make_A(parse_A(A_str), k, gamma.genus, gamma.n());
            auto Q = dr::parse_poly(Q_str);
            dr::ConstantTermOptions opts;
            if (window_start >= 0) opts.window_start = window_start;
            if (max_degree >= 0) opts.degree_hint = max_degree;
            auto ct = dr::constant_term_S(gamma, A, Q, opts);
            nlohmann::json doc;
            doc["value"] = dr::rat_to_json(ct.value);
            doc["r_polynomial"] = ct.r_polynomial.to_json();
            doc["certificate"] = ct.certificate.to_json();
            emit(doc, out_path);
        } else if (cmd_spoly->parsed()) {
            auto gamma = load_graph(graph_path);
            auto Q = dr::parse_poly(Q_str);
            auto P = dr::build_S_polynomial(gamma, Q);
            nlohmann::json doc;
            doc["polynomial"] = P.to_json();
            doc["note"] = "representative on the lattice {sum a_i = 0}; non-unique";
            emit(doc, out_path);
        } else if (cmd_dr->parsed()) {
            auto A = make_A(parse_A(A_str), k, g, n);
            emit(dr::dr_cycle(g, n, A).to_json(), out_path);
        } else if (cmd_drpoly->parsed()) {
            auto expr = dr::dr_polynomial(
                g, n, method == "fit" ? dr::DrMethod::Fit : dr::DrMethod::Recursion);
            nlohmann::json doc = expr.to_json();
            doc["lattice_vars"] = dr::dr_chart_vars(g, n);
            doc["ambient"] = to_ambient(expr).to_json();
            doc["note"] =
                "coefficients in lattice coordinates (k, a_2..a_n) with "
                "a_1 = (2g-2+n)k - sum_{i>=2} a_i; the ambient form is a "
                "representative on the sublattice (2g-2+n) | sum a_i";
            emit(doc, out_path);
        } else if (cmd_selftest->parsed()) {
            auto results = dr::run_acceptance(quick, &std::cout);
            nlohmann::json doc = nlohmann::json::array();
            for (const auto& res : results)
                doc.push_back({{"criterion", res.id},
                               {"name", res.name},
                               {"passed", res.passed},
                               {"seconds", res.seconds},
                               {"detail", res.detail}});
            if (!out_path.empty()) emit(doc, out_path);
            return dr::all_passed(results) ? 0 : 3;
        }
        return 0;
    } catch (const dr::CertificationError& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 3;
    } catch (const dr::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
