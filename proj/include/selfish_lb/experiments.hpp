#pragma once

#include "selfish_lb/core.hpp"
#include "selfish_lb/numeric.hpp"
#include "selfish_lb/protocol.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace slb {

enum class InitKind : std::uint8_t { AllOnOne, TwoZeroOnes, Custom };

struct RecordFlags {
    bool potential_trace = false;
    bool eps_nash_time = false;
    bool nash_time = true;
};

inline constexpr std::uint64_t kDefaultMaxRounds = 1'000'000;

struct ExperimentConfig {
    ProtocolVariant protocol = ProtocolVariant::NeutralDisallowed;
    std::size_t n = 2;
    Load m = 2;
    InitKind init = InitKind::AllOnOne;
    std::vector<Load> custom_loads;
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 1;
    std::uint64_t max_rounds = kDefaultMaxRounds;
    std::optional<double> epsilon;
    RecordFlags record;

    /// Throws std::invalid_argument describing the first violated constraint,
    /// OverflowError when the start state leaves the exact-arithmetic envelope.
    void validate() const;
    Assignment initial_state() const;
};

std::string init_to_string(const ExperimentConfig& cfg);
/// "all-on-one", "two-zero-ones" or "custom=<comma list>"; sets init and custom_loads.
void parse_init(std::string_view spec, ExperimentConfig& cfg);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Keys mirror ExperimentConfig; missing keys keep the values already in `cfg`.
void apply_config_json(const nlohmann::json& j, ExperimentConfig& cfg);

struct TraceRow {
    std::uint64_t round = 0;
    Int128 n_phi = 0;
    Load max_load = 0;
    Load min_load = 0;
};

struct TrialRecord {
    std::uint64_t trial_id = 0;
    std::optional<std::uint64_t> t_nash;      // empty: censored or not recorded
    std::optional<std::uint64_t> t_eps_nash;  // empty: not reached or not recorded
    std::uint64_t rounds_executed = 0;
    bool censored = false;
    std::vector<TraceRow> phi_trace;
};

struct SummaryStats {
    std::uint64_t count = 0;  // uncensored trials with a recorded time
    double mean = 0.0;
    double median = 0.0;
    double p10 = 0.0;
    double p90 = 0.0;
    double std_err = 0.0;
    std::uint64_t censored_count = 0;
    /// Fraction of trials with Phi(X(t)) > tail_threshold, t = 0, 1, ...; only
    /// present when traces were recorded. Trials that stopped early keep
    /// their final potential.
    std::vector<double> phi_tail_fractions;
    double tail_threshold = 0.0;
};

/// Sample quantile with linear interpolation between order statistics.
double quantile(std::vector<double> sorted_values, double q);

/// Statistics of a set of hitting times. `tail_threshold_n` enables the
/// per-round tail fractions at threshold 720 * n.
SummaryStats summarize(const std::vector<std::optional<std::uint64_t>>& times, std::uint64_t censored_count);
SummaryStats summarize_records(const std::vector<TrialRecord>& records, std::size_t n);

struct ExperimentResult {
    std::vector<TrialRecord> records;
    SummaryStats summary;                    // over t_nash
    std::optional<SummaryStats> eps_summary;  // over t_eps_nash, when recorded
};

/// Runs one trial; round r draws from RngStream(master_seed, trial_id, r).
/// The trial stops once every requested hitting time is observed, or at max_rounds.
TrialRecord run_trial(const ExperimentConfig& cfg, std::uint64_t trial_id);

/// Runs cfg.trials trials on `threads` workers (0 = hardware concurrency).
/// Records are returned in trial-id order, independent of scheduling.
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

/// ceil(lg lg phi0), and 0 when lg lg phi0 <= 0.
std::uint64_t tau_for(const PotentialValue& phi0);

/// Fraction of trials with Phi(X(tau)) > 720 n, tau = tau_for(phi0). Trials
/// that stopped at a Nash state before tau use their final potential, which
/// is exact under the strict protocol. Throws std::invalid_argument when a
/// record has no trace covering tau.
double tail_fraction_at_tau(const std::vector<TrialRecord>& records, std::size_t n, const PotentialValue& phi0,
                            ProtocolVariant variant = ProtocolVariant::NeutralDisallowed);

struct ScalingRow {
    Load m = 0;
    double mean_t_eps_nash = 0.0;
    double std_err = 0.0;
    std::uint64_t censored_count = 0;
};

/// Mean time to eps-Nash from (m, 0, ..., 0) for each m.
std::vector<ScalingRow> scaling_curve(ProtocolVariant protocol, std::size_t n, const std::vector<Load>& m_list,
                                      double eps, std::uint64_t trials, std::uint64_t seed, unsigned threads = 1,
                                      std::uint64_t max_rounds = kDefaultMaxRounds);

struct SlownessRow {
    std::size_t n = 0;
    double median_t_nash = 0.0;  // censored trials count as max_rounds
    std::uint64_t censored_count = 0;
};

/// Median first time at Nash from (n, 0, ..., 0) with m = n.
std::vector<SlownessRow> neutral_slowness_curve(ProtocolVariant protocol, const std::vector<std::size_t>& n_list,
                                                std::uint64_t trials, std::uint64_t seed,
                                                std::uint64_t max_rounds = kDefaultMaxRounds, unsigned threads = 1);

/// Least-squares fit y = a + b x, with coefficient of determination.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// --- serialization -------------------------------------------------------

/// trial_id,t_nash,t_eps_nash,rounds_executed,censored
std::string trials_csv(const std::vector<TrialRecord>& records);
/// trial_id,round,n_phi,max_load,min_load
std::string trace_csv(const std::vector<TrialRecord>& records);
/// Parses trials_csv output (traces are not part of it).
std::vector<TrialRecord> parse_trials_csv(const std::string& text);

nlohmann::json summary_to_json(const SummaryStats& s);
nlohmann::json result_to_json(const ExperimentConfig& cfg, const ExperimentResult& r, bool include_records);

std::string scaling_csv(const std::vector<ScalingRow>& rows);
std::string slowness_csv(const std::vector<SlownessRow>& rows);

/// Fixed-format decimal rendering used in every CSV artifact.
std::string format_real(double v);

}  // namespace slb
