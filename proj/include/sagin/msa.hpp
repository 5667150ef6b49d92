#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sagin/rng.hpp"
#include "sagin/valuation.hpp"

namespace sagin {

enum class SplitRule { EqualSurplus, RandomSurplus };

struct MsaConfig {
    // Values <= 0 mean "resolve per pair": epsilon = 1e-2 * mean positive
    // entry of the pair's value matrix, delta = epsilon / 2, stall_window =
    // n_down * n_up * (50 + ceil(2 * max_entry / delta)), max_iters = 20 *
    // stall_window.
    double epsilon = 0.0;
    double delta = 0.0;
    long max_iters_per_pair = 0;
    long stall_window = 0;
    int sweep_repeats = 3;
    SplitRule split_rule = SplitRule::EqualSurplus;
    std::uint64_t seed = 0;
    bool record_trace = true;
};

struct ResolvedMsaParams {
    double epsilon = 0.0;
    double delta = 0.0;
    long stall_window = 0;
    long max_iters = 0;
};

ResolvedMsaParams resolve_msa_params(const MsaConfig& cfg, const RateMatrix& values);

// Learning state of one pair game. downstream[i] is agent i's demanded
// rate share; upstream[j][i] is upstream j's demanded share for its copy
// dedicated to downstream i. Index-aligned with the pair's RateMatrix.
struct AspirationState {
    std::vector<double> downstream;
    std::vector<std::vector<double>> upstream;
};

enum class PairEvent : std::uint8_t { Match, EvictMatch, Decrement, NoOp };

const char* to_string(PairEvent e);

// One record per encounter; `iteration` is global across pairs in sweep
// order, `total_value` is the valuation of the matching after the event.
struct TraceRecord {
    long iteration;
    int pair;
    PairEvent event;
    double total_value;
};
using RunTrace = std::vector<TraceRecord>;

void write_trace_csv(const RunTrace& trace, const std::string& path,
                     const std::string& header_comment = "");

enum class StopReason { AllMatched, QuotasSaturated, Stalled, IterationCap };

const char* to_string(StopReason r);

struct EncounterOutcome {
    PairEvent event = PairEvent::NoOp;
    int evicted_downstream_id = -1;  // set on EvictMatch
};

struct BlockingPair {
    int downstream_id;
    int upstream_id;
};

struct StabilityReport {
    bool stable = true;
    std::vector<BlockingPair> blocking_pairs;          // agreeable cross pairs
    std::vector<int> mismatched_downstream_ids;        // matched pairs not attaining value
    std::string to_text() const;
};

// Aspirations drawn as downstream[i] ~ U[0, max_j rates(i,j)] and
// upstream[j][i] ~ U[0, rates(i,j)]. Deterministic under seed.
AspirationState init_aspirations(const RateMatrix& rates, std::uint64_t seed);

// rates(i,j) >= downstream_asp[i] + upstream_asp[j][i] + 2*epsilon,
// boundary included.
bool is_agreeable(int downstream_id, int upstream_id, const AspirationState& state,
                  const RateMatrix& rates, double epsilon);

// One activation of the cross pair (i, j) on pair `pair_index` of `m`:
// match when agreeable and j has room (evicting j's lowest-value partner if
// the newcomer strictly beats it), otherwise decrement (i only when single;
// j's i-th copy always). Meeting the current partner is a no-op. Never
// produces an inconsistent matching.
EncounterOutcome encounter(int downstream_id, int upstream_id, int pair_index,
                           Matching& m, AspirationState& state, const RateMatrix& rates,
                           const std::vector<int>& upstream_quotas, const MsaConfig& cfg,
                           rng::Engine& eng);

struct PairRunResult {
    AspirationState state;
    RunTrace trace;
    StopReason reason = StopReason::Stalled;
    bool converged = true;
    long iterations = 0;
    double pair_value_sum = 0.0;  // sum of matched entries of the value matrix
    ResolvedMsaParams params;
};

// Random-encounter dynamic on one adjacent pair. Existing pair edges are
// kept as the starting point (their aspirations re-anchored onto `values`).
// Stops once the state is absorbing (no agreeable pair can ever form again,
// even after full aspiration decay) or at the iteration cap, in which case
// `converged` is false. Edges of other pairs are untouched.
PairRunResult run_pair(int pair_index, Matching& m, const RateMatrix& values,
                       const std::vector<int>& upstream_quotas, const MsaConfig& cfg,
                       std::uint64_t seed);

struct MsaResult {
    Matching matching{0};
    RunTrace trace;
    double total_value = 0.0;
    bool converged = true;
    long iterations = 0;
    int sweeps_run = 0;
};

// Bottom-up sweeps over all adjacent pairs: pair k's value matrix is
// rebuilt from the lower layers' current matching before each run. Sweeps
// repeat until the total changes by less than epsilon or sweep_repeats is
// reached; pairs whose value matrix is unchanged and whose state is still
// absorbing are skipped.
MsaResult run_msa(const Market& market, const MsaConfig& cfg);
MsaResult run_msa(const Scenario& s, const MsaConfig& cfg);

// Certifies (1) every matched pair attains its value exactly and (2) no
// cross pair with spare capacity or a profitable eviction is agreeable at
// the current aspiration levels. Returns all violators.
StabilityReport check_epsilon_stability(int pair_index, const Matching& m,
                                        const AspirationState& state, const RateMatrix& rates,
                                        const std::vector<int>& upstream_quotas, double epsilon);

}  // namespace sagin
