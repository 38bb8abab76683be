#ifndef ACSAN_CLI_HPP
#define ACSAN_CLI_HPP

// Command-line front end. Exit codes: 0 reachable / valid, 1 unreachable /
// violations, 2 input error, 3 internal limit hit.

#include "acsan/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

namespace acsan {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int negative = 1;
inline constexpr int input_error = 2;
inline constexpr int limit = 3;
} // namespace exit_code

namespace cli {

struct CommonOptions {
    std::string file;
    std::string format = "text";
    std::size_t max_iters = 10000;
};

inline void print_diagnostics(std::ostream& err, const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds) err << d.str() << '\n';
}

inline std::optional<Scenario> load(const std::string& file, std::ostream& err,
                                    std::vector<Diagnostic>* diags_out = nullptr) {
    ScenarioSource src;
    if (file == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        src = ScenarioSource{os.str(), "<stdin>"};
    } else {
        try {
            src = ScenarioSource::from_file(file);
        } catch (const Error& e) {
            err << file << ": error [E-IO] " << e.what() << '\n';
            return std::nullopt;
        }
    }
    auto result = parse_scenario(src);
    if (diags_out) *diags_out = result.diagnostics;
    else print_diagnostics(err, result.diagnostics);
    return std::move(result.scenario);
}

/// Replaces the scenario's query; false (with a diagnostic) on error.
inline bool override_query(Scenario& sc, const std::string& text, std::ostream& err) {
    auto q = parse_query(text, sc.vocab);
    if (auto* d = std::get_if<Diagnostic>(&q)) {
        err << d->str() << '\n';
        return false;
    }
    sc.query = std::get<Query>(std::move(q));
    return true;
}

inline Verdict run_check(const Scenario& sc, const std::string& mode, const AnalysisOptions& opts) {
    return mode == "interleaving" ? analyze_interleaving(sc, opts) : analyze_partial_order(sc, opts);
}

inline std::size_t default_max_iters() {
    if (const char* env = std::getenv("ACSAN_MAX_ITERS")) {
        try {
            std::size_t pos = 0;
            unsigned long long v = std::stoull(env, &pos);
            if (pos == std::string_view(env).size() && v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
        throw Error(std::string("ACSAN_MAX_ITERS must be a positive integer, got '") + env + "'");
    }
    return 10000;
}

inline void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

} // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Reachability analysis for distributed access-control scenarios", "acsan"};
    app.require_subcommand(1);

    cli::CommonOptions common;
    try {
        common.max_iters = cli::default_max_iters();
    } catch (const Error& e) {
        err << "error [E-ENV] " << e.what() << '\n';
        return exit_code::input_error;
    }

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", common.file, "scenario file ('-' for stdin)")->required();
        sub->add_option("--format", common.format, "output format")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--max-iters", common.max_iters, "fixpoint pass budget")->check(CLI::PositiveNumber);
    };

    std::string mode = "partial-order";
    std::string query_text;
    std::string compat = "strict";
    std::size_t jobs = 1;
    bool exhaustive = false;

    auto* check = app.add_subcommand("check", "decide reachability of the query");
    add_common(check);
    check->add_option("--mode", mode)->check(CLI::IsMember({"interleaving", "partial-order"}));
    check->add_option("--query", query_text, "override the scenario's query");
    check->add_option("--compat", compat)->check(CLI::IsMember({"strict", "exhaustive", "skip"}));
    check->add_option("--jobs", jobs, "worker threads for interleaving")->check(CLI::PositiveNumber);
    check->add_flag("--exhaustive", exhaustive, "interleaving: explore every sequence, even after a witness");

    std::string compat_mode = "canonical";
    auto* validate = app.add_subcommand("validate", "report C1, C2, COMP1 and COMP2");
    add_common(validate);
    validate->add_option("--compat", compat_mode)->check(CLI::IsMember({"canonical", "exhaustive"}));

    bool count = false, list = false;
    std::size_t cap = default_enumeration_cap;
    auto* extensions = app.add_subcommand("extensions", "enumerate linear extensions of the causality relation");
    add_common(extensions);
    auto* count_flag = extensions->add_flag("--count", count);
    auto* list_flag = extensions->add_flag("--list", list);
    count_flag->excludes(list_flag);
    extensions->add_option("--cap", cap, "refuse orders with more events");

    auto* explain = app.add_subcommand("explain", "derivation of the query and of each witness guard");
    add_common(explain);
    explain->add_option("--mode", mode)->check(CLI::IsMember({"interleaving", "partial-order"}));
    explain->add_option("--query", query_text, "override the scenario's query");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "error [E-USAGE] " << e.what() << '\n';
        return exit_code::input_error;
    }

    bool as_json = common.format == "json";
    AnalysisOptions opts;
    opts.max_iters = common.max_iters;
    opts.jobs = jobs;
    opts.exhaustive = exhaustive;

    try {
        if (validate->parsed()) {
            std::vector<Diagnostic> diags;
            auto sc = cli::load(common.file, err, &diags);
            std::vector<Diagnostic> c_diags, other;
            for (const auto& d : diags) (d.code == "E-C1" || d.code == "E-C2" ? c_diags : other).push_back(d);
            cli::print_diagnostics(err, diags);
            if (!other.empty() || (!sc && c_diags.empty())) return exit_code::input_error;
            if (!sc) {
                // Well-formed apart from C1/C2: report them as violations.
                bool c1 = std::none_of(c_diags.begin(), c_diags.end(), [](auto& d) { return d.code == "E-C1"; });
                json c2v = json::array();
                for (const auto& d : c_diags)
                    if (d.code == "E-C2") c2v.push_back(d.message);
                if (as_json) {
                    cli::emit(out, json{{"scenario", common.file},
                                        {"c1", {{"pass", c1}}},
                                        {"c2", {{"pass", c2v.empty()}, {"violations", c2v}}},
                                        {"comp1", nullptr},
                                        {"comp2", nullptr},
                                        {"result", "fail"}});
                } else {
                    out << "C1: " << (c1 ? "pass" : "fail") << "\nC2: " << (c2v.empty() ? "pass" : "fail") << '\n';
                    for (const auto& m : c2v) out << "  " << m.get<std::string>() << '\n';
                    out << "COMP1: not checked\nCOMP2: not checked\n";
                }
                return exit_code::negative;
            }
            auto report =
                check_compat(*sc, compat_mode == "exhaustive" ? CompatMode::exhaustive : CompatMode::canonical, opts);
            if (as_json) {
                json j{{"scenario", sc->name}, {"c1", {{"pass", true}}}, {"c2", {{"pass", true}, {"violations", json::array()}}}};
                j.update(to_json(*sc, report));
                j["result"] = report.pass() ? "pass" : "fail";
                cli::emit(out, j);
            } else {
                out << sc->name << "\nC1: pass\nC2: pass\n" << render_compat(*sc, report);
            }
            return report.pass() ? exit_code::ok : exit_code::negative;
        }

        auto sc = cli::load(common.file, err);
        if (!sc) return exit_code::input_error;

        if (extensions->parsed()) {
            Relation order = sc->causality.relation();
            if (order.size() > cap) throw TooLarge("scenario has " + std::to_string(order.size()) +
                                                   " events, above the enumeration cap of " + std::to_string(cap));
            if (!list) {
                auto n = count_linear_extensions(order, cap);
                if (as_json) cli::emit(out, json{{"scenario", sc->name}, {"count", n}});
                else out << n << '\n';
                return exit_code::ok;
            }
            json all = json::array();
            for_each_linear_extension(order, [&](const std::vector<std::size_t>& seq) {
                auto names = sc->causality.names(seq);
                if (as_json) {
                    all.push_back(names);
                } else {
                    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? " " : "") << names[i];
                    out << '\n';
                }
                return true;
            });
            if (as_json) cli::emit(out, json{{"scenario", sc->name}, {"count", all.size()}, {"extensions", all}});
            return exit_code::ok;
        }

        if (!query_text.empty() && !cli::override_query(*sc, query_text, err)) return exit_code::input_error;
        if (!sc->query) {
            err << common.file << ": error [E-QUERY] scenario declares no query\n";
            return exit_code::input_error;
        }

        if (check->parsed() && mode == "partial-order" && compat != "skip") {
            auto report =
                check_compat(*sc, compat == "exhaustive" ? CompatMode::exhaustive : CompatMode::canonical, opts);
            if (!report.pass()) {
                err << common.file << ": error [E-COMPAT] causality relation fails the compatibility conditions\n"
                    << render_compat(*sc, report);
                return exit_code::negative;
            }
        }

        Verdict v = cli::run_check(*sc, mode, opts);

        if (check->parsed()) {
            if (as_json) cli::emit(out, to_json(*sc, v));
            else out << render_verdict(*sc, v);
            return v.reachable() ? exit_code::ok : exit_code::negative;
        }

        // explain
        if (!v.reachable()) {
            if (as_json) cli::emit(out, to_json(*sc, v));
            else out << render_verdict(*sc, v) << "nothing to explain\n";
            return exit_code::negative;
        }
        PolicyContext ctx = make_context(*sc, opts);
        auto guards = explain_guards(*sc, v, ctx);
        if (as_json) {
            json j = to_json(*sc, v);
            json g = json::array();
            for (const auto& gd : guards)
                g.push_back(json{{"event", sc->events()[gd.event].name}, {"step", gd.step}, {"derivation", to_json(gd.tree)}});
            j["query"] = sc->query->str();
            j["guards"] = g;
            cli::emit(out, j);
        } else {
            out << render_verdict(*sc, v) << '\n';
            for (const auto& d : v.derivations) out << render_tree(d) << '\n' << render_steps(d) << '\n';
            for (const auto& gd : guards) {
                out << "guard of " << sc->events()[gd.event].name << " (step " << gd.step << "):\n"
                    << render_tree(gd.tree);
            }
        }
        return exit_code::ok;
    } catch (const BudgetExceeded& e) {
        err << "error [E-BUDGET] " << e.what() << '\n';
        return exit_code::limit;
    } catch (const TooLarge& e) {
        err << "error [E-TOOLARGE] " << e.what() << '\n';
        return exit_code::limit;
    } catch (const CompatViolation& e) {
        err << "error [E-COMPAT] " << e.what() << '\n';
        return exit_code::negative;
    } catch (const DisabledEvent& e) {
        err << "error [E-DISABLED] " << e.what() << '\n';
        return exit_code::input_error;
    } catch (const Error& e) {
        err << "error [E-INPUT] " << e.what() << '\n';
        return exit_code::input_error;
    }
}

} // namespace acsan

#endif
