#include "cli.hpp"

#include "selfish_lb/analysis.hpp"
#include "selfish_lb/experiments.hpp"
#include "selfish_lb/lemma_checks.hpp"
#include "selfish_lb/oracle.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace slb::cli {

namespace {

// Accepts plain integers and powers written as "2^k".
Load parse_count(const std::string& s) {
    const auto caret = s.find('^');
    if (caret == std::string::npos) return std::stoll(s);
    const Load base = std::stoll(s.substr(0, caret));
    const int exp = std::stoi(s.substr(caret + 1));
    Int128 v = 1;
    for (int i = 0; i < exp; ++i) v = checked_mul(v, base);
    if (v > kMaxLoad) throw OverflowError(s + " exceeds 2^50");
    return static_cast<Load>(v);
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& s, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<T>(parse(item)));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
}

struct SimulateArgs {
    std::string config_path;
    std::string protocol;
    std::optional<std::size_t> n;
    std::optional<std::string> m;
    std::string init;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> max_rounds;
    std::optional<double> epsilon;
    bool record_phi = false;
    std::string out_path;
    std::string trace_path;
    std::string summary_path;
    std::string format = "csv";
    unsigned threads = 1;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
    ExperimentConfig cfg;
    if (!a.config_path.empty()) {
        std::ifstream f(a.config_path);
        if (!f) throw std::invalid_argument("cannot read config " + a.config_path);
        apply_config_json(nlohmann::json::parse(f), cfg);
    }
    if (!a.protocol.empty()) cfg.protocol = parse_variant(a.protocol);
    if (a.n) cfg.n = *a.n;
    if (a.m) cfg.m = parse_count(*a.m);
    if (!a.init.empty()) parse_init(a.init, cfg);
    if (cfg.init == InitKind::Custom) {
        if (!a.n) cfg.n = cfg.custom_loads.size();
        if (!a.m) {
            cfg.m = 0;
            for (Load v : cfg.custom_loads) cfg.m += v;
        }
    }
    if (a.trials) cfg.trials = *a.trials;
    if (a.seed) cfg.master_seed = *a.seed;
    if (a.max_rounds) cfg.max_rounds = *a.max_rounds;
    if (a.epsilon) {
        cfg.epsilon = *a.epsilon;
        cfg.record.eps_nash_time = true;
    }
    if (a.record_phi) cfg.record.potential_trace = true;
    cfg.validate();

    const auto result = run_experiment(cfg, a.threads);
    if (a.format == "json") {
        write_text(a.out_path, result_to_json(cfg, result, true).dump(2) + "\n", out);
    } else {
        write_text(a.out_path, trials_csv(result.records), out);
    }
    if (!a.summary_path.empty()) write_text(a.summary_path, result_to_json(cfg, result, false).dump(2) + "\n", out);
    if (cfg.record.potential_trace && !a.trace_path.empty()) write_text(a.trace_path, trace_csv(result.records), out);
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator and verifier for selfish load-balancing migration protocols", "slb"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run seeded trials and emit per-trial results");
    simulate->add_option("--config", sim.config_path, "JSON config; flags override its values");
    simulate->add_option("--protocol", sim.protocol, "neutral | strict")->check(CLI::IsMember({"neutral", "strict"}));
    simulate->add_option("--n", sim.n, "number of resources");
    simulate->add_option("--m", sim.m, "number of tasks (integer or 2^k)");
    simulate->add_option("--init", sim.init, "all-on-one | two-zero-ones | custom=<comma list>");
    simulate->add_option("--trials", sim.trials, "number of independent trials");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--max-rounds", sim.max_rounds, "round cap per trial (default 10^6)");
    simulate->add_option("--epsilon", sim.epsilon, "record first eps-Nash round (gap <= eps*m/n)");
    simulate->add_flag("--record-phi", sim.record_phi, "record the potential trace");
    simulate->add_option("--out", sim.out_path, "output path (default stdout)");
    simulate->add_option("--trace-out", sim.trace_path, "trace CSV path (with --record-phi)");
    simulate->add_option("--summary-out", sim.summary_path, "summary JSON path");
    simulate->add_option("--format", sim.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    simulate->add_option("--threads", sim.threads, "worker threads (0 = all cores)");

    auto* verify = app.add_subcommand("verify-lemmas", "exhaustive exact checks of the potential-function lemmas");

    std::size_t oracle_m = 0, oracle_n = 0;
    std::string oracle_protocol = "strict", oracle_start, oracle_out;
    std::uint64_t budget = kDefaultEnumerationBudget;
    auto* oracle = app.add_subcommand("oracle", "exact lumped chain and expected hitting times");
    oracle->add_option("--m", oracle_m, "number of tasks")->required();
    oracle->add_option("--n", oracle_n, "number of resources")->required();
    oracle->add_option("--protocol", oracle_protocol, "neutral | strict")->check(CLI::IsMember({"neutral", "strict"}));
    oracle->add_option("--start", oracle_start, "comma list; print only this state's hitting time");
    oracle->add_option("--budget", budget, "enumeration budget on n^m");
    oracle->add_option("--out", oracle_out, "output path (default stdout)");

    std::string sc_protocol = "strict", sc_m_list, sc_out;
    std::size_t sc_n = 4;
    double sc_eps = 0.1;
    std::uint64_t sc_trials = 200, sc_seed = 1, sc_max_rounds = kDefaultMaxRounds;
    unsigned sc_threads = 1;
    auto* scaling = app.add_subcommand("scaling", "mean time to eps-Nash from (m,0,...,0) over a list of m");
    scaling->add_option("--protocol", sc_protocol)->check(CLI::IsMember({"neutral", "strict"}));
    scaling->add_option("--n", sc_n, "number of resources");
    scaling->add_option("--m-list", sc_m_list, "comma list of task counts (2^k allowed)")->required();
    scaling->add_option("--epsilon", sc_eps, "eps (default 0.1)");
    scaling->add_option("--trials", sc_trials);
    scaling->add_option("--seed", sc_seed);
    scaling->add_option("--max-rounds", sc_max_rounds);
    scaling->add_option("--threads", sc_threads);
    scaling->add_option("--out", sc_out);

    std::string ns_protocol = "neutral", ns_n_list, ns_out;
    std::uint64_t ns_trials = 500, ns_seed = 1, ns_max_rounds = kDefaultMaxRounds;
    unsigned ns_threads = 1;
    auto* slowness = app.add_subcommand("neutral-slowness", "median time to Nash from (n,0,...,0) with m = n");
    slowness->add_option("--protocol", ns_protocol)->check(CLI::IsMember({"neutral", "strict"}));
    slowness->add_option("--n-list", ns_n_list, "comma list of n")->required();
    slowness->add_option("--trials", ns_trials);
    slowness->add_option("--seed", ns_seed);
    slowness->add_option("--max-rounds", ns_max_rounds);
    slowness->add_option("--threads", ns_threads);
    slowness->add_option("--out", ns_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (*simulate) return run_simulate(sim, out);
        if (*verify) {
            bool all = true;
            for (const auto& c : verify_lemmas()) {
                out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.cases << " cases)";
                if (!c.passed) out << " first counterexample " << c.detail;
                out << "\n";
                all = all && c.passed;
            }
            return all ? 0 : 1;
        }
        if (*oracle) {
            const auto chain = build_chain(oracle_m, oracle_n, parse_variant(oracle_protocol), budget);
            if (!oracle_start.empty()) {
                const Assignment start(parse_list<Load>(oracle_start, [](const std::string& s) { return std::stoll(s); }));
                write_text(oracle_out, rational_string(expected_hitting_time(chain, start)) + "\n", out);
            } else {
                write_text(oracle_out, chain_to_json(chain).dump(2) + "\n", out);
            }
            return 0;
        }
        if (*scaling) {
            const auto ms = parse_list<Load>(sc_m_list, parse_count);
            const auto rows =
                scaling_curve(parse_variant(sc_protocol), sc_n, ms, sc_eps, sc_trials, sc_seed, sc_threads, sc_max_rounds);
            write_text(sc_out, scaling_csv(rows), out);
            return 0;
        }
        if (*slowness) {
            const auto ns = parse_list<std::size_t>(ns_n_list, [](const std::string& s) { return std::stoull(s); });
            const auto rows =
                neutral_slowness_curve(parse_variant(ns_protocol), ns, ns_trials, ns_seed, ns_max_rounds, ns_threads);
            write_text(ns_out, slowness_csv(rows), out);
            return 0;
        }
    } catch (const OverflowError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const BudgetError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        err << "error: value out of range: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace slb::cli
