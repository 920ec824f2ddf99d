#include "selfish_lb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace slb {

void ExperimentConfig::validate() const {
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (m < 0) throw std::invalid_argument("m must be non-negative");
    if (trials == 0) throw std::invalid_argument("trials must be at least 1");
    if (max_rounds == 0) throw std::invalid_argument("max_rounds must be at least 1");
    if (epsilon && !(*epsilon > 0.0 && *epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
    if (record.eps_nash_time && !epsilon) throw std::invalid_argument("eps-Nash recording requires an epsilon");
    if (!record.nash_time && !record.eps_nash_time && !record.potential_trace)
        throw std::invalid_argument("nothing to record");
    if (init == InitKind::TwoZeroOnes) {
        if (n < 2) throw std::invalid_argument("two-zero-ones start needs n >= 2");
        if (m != static_cast<Load>(n)) throw std::invalid_argument("two-zero-ones start requires m == n");
    }
    if (init == InitKind::Custom) {
        if (custom_loads.size() != n) throw std::invalid_argument("custom loads must have exactly n entries");
    }
    if (m > kMaxLoad) throw OverflowError("m exceeds 2^50");
    // n * Phi <= n * m^2 for every reachable state
    checked_mul(checked_mul(static_cast<Int128>(m), static_cast<Int128>(m)), static_cast<Int128>(n));
    const Assignment x = initial_state();
    if (x.m() != m) throw std::invalid_argument("initial loads do not sum to m");
}

Assignment ExperimentConfig::initial_state() const {
    switch (init) {
    case InitKind::AllOnOne: return Assignment::all_on_one(m, n);
    case InitKind::TwoZeroOnes: return Assignment::two_zero_ones(n);
    case InitKind::Custom: return Assignment(custom_loads);
    }
    throw std::logic_error("unreachable init kind");
}

std::string init_to_string(const ExperimentConfig& cfg) {
    switch (cfg.init) {
    case InitKind::AllOnOne: return "all-on-one";
    case InitKind::TwoZeroOnes: return "two-zero-ones";
    case InitKind::Custom: {
        std::string s = "custom=";
        for (std::size_t i = 0; i < cfg.custom_loads.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(cfg.custom_loads[i]);
        }
        return s;
    }
    }
    return "";
}

void parse_init(std::string_view spec, ExperimentConfig& cfg) {
    if (spec == "all-on-one") {
        cfg.init = InitKind::AllOnOne;
        return;
    }
    if (spec == "two-zero-ones") {
        cfg.init = InitKind::TwoZeroOnes;
        return;
    }
    constexpr std::string_view prefix = "custom=";
    if (spec.substr(0, prefix.size()) != prefix)
        throw std::invalid_argument("unknown init '" + std::string(spec) + "'");
    std::vector<Load> loads;
    std::stringstream ss{std::string(spec.substr(prefix.size()))};
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || v < 0)
            throw std::invalid_argument("bad custom load '" + item + "'");
        loads.push_back(v);
    }
    if (loads.empty()) throw std::invalid_argument("custom init needs at least one load");
    cfg.init = InitKind::Custom;
    cfg.custom_loads = std::move(loads);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["protocol"] = std::string(to_string(cfg.protocol));
    j["n"] = cfg.n;
    j["m"] = cfg.m;
    j["init"] = init_to_string(cfg);
    j["trials"] = cfg.trials;
    j["seed"] = cfg.master_seed;
    j["max_rounds"] = cfg.max_rounds;
    j["epsilon"] = cfg.epsilon ? nlohmann::json(*cfg.epsilon) : nlohmann::json(nullptr);
    j["record"] = {{"potential_trace", cfg.record.potential_trace},
                   {"eps_nash_time", cfg.record.eps_nash_time},
                   {"nash_time", cfg.record.nash_time}};
    return j;
}

void apply_config_json(const nlohmann::json& j, ExperimentConfig& cfg) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    if (j.contains("protocol")) cfg.protocol = parse_variant(j.at("protocol").get<std::string>());
    if (j.contains("n")) cfg.n = j.at("n").get<std::size_t>();
    if (j.contains("m")) cfg.m = j.at("m").get<Load>();
    if (j.contains("init")) {
        const auto& v = j.at("init");
        if (v.is_array()) {
            cfg.init = InitKind::Custom;
            cfg.custom_loads = v.get<std::vector<Load>>();
        } else {
            parse_init(v.get<std::string>(), cfg);
        }
    }
    if (j.contains("trials")) cfg.trials = j.at("trials").get<std::uint64_t>();
    if (j.contains("seed")) cfg.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("max_rounds")) cfg.max_rounds = j.at("max_rounds").get<std::uint64_t>();
    if (j.contains("epsilon")) {
        if (j.at("epsilon").is_null()) {
            cfg.epsilon.reset();
        } else {
            cfg.epsilon = j.at("epsilon").get<double>();
            cfg.record.eps_nash_time = true;
        }
    }
    if (j.contains("record")) {
        const auto& r = j.at("record");
        cfg.record.potential_trace = r.value("potential_trace", cfg.record.potential_trace);
        cfg.record.eps_nash_time = r.value("eps_nash_time", cfg.record.eps_nash_time);
        cfg.record.nash_time = r.value("nash_time", cfg.record.nash_time);
    }
}

namespace {

Int128 n_phi_of(std::span<const Load> x, Load m) {
    Int128 sum_sq = 0;
    for (Load v : x) sum_sq += static_cast<Int128>(v) * v;
    return static_cast<Int128>(x.size()) * sum_sq - static_cast<Int128>(m) * m;
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, std::uint64_t trial_id) {
    TrialRecord rec;
    rec.trial_id = trial_id;
    std::vector<Load> cur;
    {
        const Assignment x0 = cfg.initial_state();
        cur.assign(x0.loads().begin(), x0.loads().end());
    }
    std::vector<Load> next;
    const Load m = cfg.m;
    const auto n = static_cast<long double>(cfg.n);
    const long double eps_m = cfg.epsilon ? static_cast<long double>(*cfg.epsilon) * static_cast<long double>(m) : 0;
    const bool want_nash = cfg.record.nash_time;
    const bool want_eps = cfg.record.eps_nash_time;

    std::uint64_t round = 0;
    bool hit_nash = false;
    for (;;) {
        const auto [lo, hi] = std::minmax_element(cur.begin(), cur.end());
        const Load gap = *hi - *lo;
        if (cfg.record.potential_trace) rec.phi_trace.push_back({round, n_phi_of(cur, m), *hi, *lo});
        if (!hit_nash && gap <= 1) {
            hit_nash = true;
            if (want_nash) rec.t_nash = round;
        }
        if (want_eps && !rec.t_eps_nash && static_cast<long double>(gap) * n <= eps_m) rec.t_eps_nash = round;

        const bool done = (want_nash ? hit_nash : true) && (want_eps ? rec.t_eps_nash.has_value() : true) &&
                          (want_nash || want_eps || hit_nash);
        if (done || round == cfg.max_rounds) break;
        RngStream rng(cfg.master_seed, trial_id, round);
        step_loads(cur, cfg.protocol, rng, next);
        cur.swap(next);
        ++round;
    }
    rec.rounds_executed = round;
    rec.censored = want_nash && !hit_nash;
    return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    cfg.validate();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    ExperimentResult result;
    result.records.resize(cfg.trials);
    std::atomic<std::uint64_t> next_trial{0};
    auto worker = [&] {
        for (std::uint64_t t; (t = next_trial.fetch_add(1)) < cfg.trials;) result.records[t] = run_trial(cfg, t);
    };
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, cfg.trials));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    result.summary = summarize_records(result.records, cfg.n);
    if (cfg.record.eps_nash_time) {
        std::vector<std::optional<std::uint64_t>> eps;
        std::uint64_t unreached = 0;
        for (const auto& r : result.records) {
            eps.push_back(r.t_eps_nash);
            if (!r.t_eps_nash) ++unreached;
        }
        result.eps_summary = summarize(eps, unreached);
    }
    return result;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + (v[hi] - v[lo]) * frac;
}

SummaryStats summarize(const std::vector<std::optional<std::uint64_t>>& times, std::uint64_t censored_count) {
    SummaryStats s;
    s.censored_count = censored_count;
    std::vector<double> v;
    for (const auto& t : times)
        if (t) v.push_back(static_cast<double>(*t));
    s.count = v.size();
    if (v.empty()) {
        s.mean = s.median = s.p10 = s.p90 = std::nan("");
        return s;
    }
    double sum = 0.0;
    for (double t : v) sum += t;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double t : v) ss += (t - s.mean) * (t - s.mean);
        s.std_err = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    s.median = quantile(v, 0.5);
    s.p10 = quantile(v, 0.1);
    s.p90 = quantile(std::move(v), 0.9);
    return s;
}

SummaryStats summarize_records(const std::vector<TrialRecord>& records, std::size_t n) {
    std::vector<std::optional<std::uint64_t>> times;
    std::uint64_t censored = 0;
    std::size_t horizon = 0;
    for (const auto& r : records) {
        times.push_back(r.t_nash);
        if (r.censored) ++censored;
        horizon = std::max(horizon, r.phi_trace.size());
    }
    SummaryStats s = summarize(times, censored);
    if (horizon > 0) {
        s.tail_threshold = 720.0 * static_cast<double>(n);
        const Int128 threshold_n_phi = static_cast<Int128>(720) * static_cast<Int128>(n) * static_cast<Int128>(n);
        s.phi_tail_fractions.assign(horizon, 0.0);
        for (std::size_t t = 0; t < horizon; ++t) {
            std::uint64_t above = 0;
            for (const auto& r : records) {
                if (r.phi_trace.empty()) continue;
                const auto& row = t < r.phi_trace.size() ? r.phi_trace[t] : r.phi_trace.back();
                if (row.n_phi > threshold_n_phi) ++above;
            }
            s.phi_tail_fractions[t] = static_cast<double>(above) / static_cast<double>(records.size());
        }
    }
    return s;
}

std::uint64_t tau_for(const PotentialValue& phi0) {
    const long double phi = static_cast<long double>(phi0.n_phi) / static_cast<long double>(phi0.n);
    if (phi <= 2.0L) return 0;
    const long double lglg = std::log2(std::log2(phi));
    return static_cast<std::uint64_t>(std::ceil(lglg));
}

double tail_fraction_at_tau(const std::vector<TrialRecord>& records, std::size_t n, const PotentialValue& phi0,
                            ProtocolVariant variant) {
    if (records.empty()) throw std::invalid_argument("no trial records");
    const std::uint64_t tau = tau_for(phi0);
    const Int128 threshold_n_phi = static_cast<Int128>(720) * static_cast<Int128>(n) * static_cast<Int128>(n);
    std::uint64_t above = 0;
    for (const auto& r : records) {
        if (r.phi_trace.empty()) throw std::invalid_argument("trial " + std::to_string(r.trial_id) + " has no potential trace");
        const TraceRow* row = nullptr;
        if (tau < r.phi_trace.size()) {
            row = &r.phi_trace[tau];
        } else {
            const auto& last = r.phi_trace.back();
            const bool frozen = variant == ProtocolVariant::NeutralDisallowed && last.max_load - last.min_load <= 1;
            if (!frozen)
                throw std::invalid_argument("trace of trial " + std::to_string(r.trial_id) + " ends before round " +
                                            std::to_string(tau));
            row = &last;
        }
        if (row->n_phi > threshold_n_phi) ++above;
    }
    return static_cast<double>(above) / static_cast<double>(records.size());
}

std::vector<ScalingRow> scaling_curve(ProtocolVariant protocol, std::size_t n, const std::vector<Load>& m_list,
                                      double eps, std::uint64_t trials, std::uint64_t seed, unsigned threads,
                                      std::uint64_t max_rounds) {
    std::vector<ScalingRow> rows;
    for (Load m : m_list) {
        ExperimentConfig cfg;
        cfg.protocol = protocol;
        cfg.n = n;
        cfg.m = m;
        cfg.init = InitKind::AllOnOne;
        cfg.trials = trials;
        cfg.master_seed = seed;
        cfg.max_rounds = max_rounds;
        cfg.epsilon = eps;
        cfg.record = {false, true, false};
        if (m == 0) {
            // (0, ..., 0) is balanced; eps * m / n = 0 and gap 0 passes trivially
            rows.push_back({m, 0.0, 0.0, 0});
            continue;
        }
        const auto res = run_experiment(cfg, threads);
        rows.push_back({m, res.eps_summary->mean, res.eps_summary->std_err, res.eps_summary->censored_count});
    }
    return rows;
}

std::vector<SlownessRow> neutral_slowness_curve(ProtocolVariant protocol, const std::vector<std::size_t>& n_list,
                                                std::uint64_t trials, std::uint64_t seed, std::uint64_t max_rounds,
                                                unsigned threads) {
    std::vector<SlownessRow> rows;
    for (std::size_t n : n_list) {
        ExperimentConfig cfg;
        cfg.protocol = protocol;
        cfg.n = n;
        cfg.m = static_cast<Load>(n);
        cfg.init = InitKind::AllOnOne;
        cfg.trials = trials;
        cfg.master_seed = seed;
        cfg.max_rounds = max_rounds;
        const auto res = run_experiment(cfg, threads);
        std::vector<double> t;
        for (const auto& r : res.records)
            t.push_back(r.t_nash ? static_cast<double>(*r.t_nash) : static_cast<double>(max_rounds));
        rows.push_back({n, quantile(std::move(t), 0.5), res.summary.censored_count});
    }
    return rows;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs at least two paired points");
    const double k = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trials_csv(const std::vector<TrialRecord>& records) {
    std::string out = "trial_id,t_nash,t_eps_nash,rounds_executed,censored\n";
    for (const auto& r : records) {
        out += std::to_string(r.trial_id);
        out += ',';
        if (r.t_nash) out += std::to_string(*r.t_nash);
        out += ',';
        if (r.t_eps_nash) out += std::to_string(*r.t_eps_nash);
        out += ',';
        out += std::to_string(r.rounds_executed);
        out += r.censored ? ",1\n" : ",0\n";
    }
    return out;
}

std::string trace_csv(const std::vector<TrialRecord>& records) {
    std::string out = "trial_id,round,n_phi,max_load,min_load\n";
    for (const auto& r : records) {
        for (const auto& row : r.phi_trace) {
            out += std::to_string(r.trial_id) + ',' + std::to_string(row.round) + ',' + to_string(row.n_phi) + ',' +
                   std::to_string(row.max_load) + ',' + std::to_string(row.min_load) + '\n';
        }
    }
    return out;
}

std::vector<TrialRecord> parse_trials_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "trial_id,t_nash,t_eps_nash,rounds_executed,censored")
        throw std::invalid_argument("unexpected trial CSV header");
    std::vector<TrialRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 5) throw std::invalid_argument("malformed trial CSV row: " + line);
        TrialRecord r;
        r.trial_id = std::stoull(f[0]);
        if (!f[1].empty()) r.t_nash = std::stoull(f[1]);
        if (!f[2].empty()) r.t_eps_nash = std::stoull(f[2]);
        r.rounds_executed = std::stoull(f[3]);
        r.censored = f[4] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

nlohmann::json summary_to_json(const SummaryStats& s) {
    auto real = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
    nlohmann::json j;
    j["count"] = s.count;
    j["mean"] = real(s.mean);
    j["median"] = real(s.median);
    j["quantiles"] = {{"p10", real(s.p10)}, {"p90", real(s.p90)}};
    j["std_err"] = real(s.std_err);
    j["censored_count"] = s.censored_count;
    if (!s.phi_tail_fractions.empty()) {
        j["tail_threshold"] = s.tail_threshold;
        j["phi_tail_fractions"] = s.phi_tail_fractions;
    }
    return j;
}

nlohmann::json result_to_json(const ExperimentConfig& cfg, const ExperimentResult& r, bool include_records) {
    nlohmann::json j;
    j["config"] = config_to_json(cfg);
    const PotentialValue phi0 = potential(cfg.initial_state());
    j["initial_potential"] = rational_string(phi0.exact());
    j["summary"] = summary_to_json(r.summary);
    if (r.eps_summary) j["eps_summary"] = summary_to_json(*r.eps_summary);
    if (include_records) {
        auto recs = nlohmann::json::array();
        for (const auto& rec : r.records) {
            nlohmann::json o;
            o["trial_id"] = rec.trial_id;
            o["t_nash"] = rec.t_nash ? nlohmann::json(*rec.t_nash) : nlohmann::json(nullptr);
            o["t_eps_nash"] = rec.t_eps_nash ? nlohmann::json(*rec.t_eps_nash) : nlohmann::json(nullptr);
            o["rounds_executed"] = rec.rounds_executed;
            o["censored"] = rec.censored;
            recs.push_back(o);
        }
        j["records"] = recs;
    }
    return j;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
    std::string out = "m,mean_t_eps_nash,std_err,censored_count\n";
    for (const auto& r : rows)
        out += std::to_string(r.m) + ',' + format_real(r.mean_t_eps_nash) + ',' + format_real(r.std_err) + ',' +
               std::to_string(r.censored_count) + '\n';
    return out;
}

std::string slowness_csv(const std::vector<SlownessRow>& rows) {
    std::string out = "n,median_t_nash,censored_count\n";
    for (const auto& r : rows)
        out += std::to_string(r.n) + ',' + format_real(r.median_t_nash) + ',' + std::to_string(r.censored_count) + '\n';
    return out;
}

}  // namespace slb
