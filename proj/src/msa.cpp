#include "sagin/msa.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sagin {

namespace {

// Largest value `comp` with part + comp == total in floating point, so the
// matched-pair bookkeeping downstream + upstream == value holds bit-exactly.
double exact_complement(double total, double part) {
    double comp = total - part;
    if (comp < 0.0) comp = 0.0;
    for (int it = 0; it < 8; ++it) {
        const double s = part + comp;
        if (s == total) break;
        comp -= s - total;
        if (comp < 0.0) {
            comp = 0.0;
            break;
        }
    }
    return comp;
}

struct PairSlots {
    std::vector<int> partner;  // downstream index -> upstream index, -1 single
    std::vector<int> load;     // upstream index -> current partner count
};

PairSlots build_slots(const Matching& m, int pair_index, const RateMatrix& values) {
    PairSlots s;
    s.partner.assign(values.num_down(), -1);
    s.load.assign(values.num_up(), 0);
    for (const auto& [di, uj] : m.edges[pair_index]) {
        const std::size_t i = values.down_index(di);
        const std::size_t j = values.up_index(uj);
        s.partner[i] = static_cast<int>(j);
        ++s.load[j];
    }
    return s;
}

// The random dynamic on one pair. Mutates the pair's edges of `matching`
// in step with the index-level slot state, so callers can evaluate the
// multi-layer total mid-run.
struct PairDyn {
    const RateMatrix& v;
    const std::vector<int>& quotas;
    AspirationState& asp;
    Matching& matching;
    int pair_index;
    double eps;
    double delta;
    SplitRule split;
    PairSlots slots;
    double matched_sum = 0.0;  // sum of matched value-matrix entries

    PairDyn(const RateMatrix& values, const std::vector<int>& q, AspirationState& state, Matching& m,
            int k, double eps_, double delta_, SplitRule split_)
        : v(values), quotas(q), asp(state), matching(m), pair_index(k), eps(eps_), delta(delta_),
          split(split_), slots(build_slots(m, k, values)) {
        for (std::size_t i = 0; i < slots.partner.size(); ++i)
            if (slots.partner[i] >= 0) matched_sum += v.at(i, slots.partner[i]);
    }

    std::size_t nd() const { return v.num_down(); }
    std::size_t nu() const { return v.num_up(); }

    bool agreeable(std::size_t i, std::size_t j) const {
        return v.at(i, j) >= asp.downstream[i] + asp.upstream[j][i] + 2.0 * eps;
    }

    // Lowest-value partner of a full upstream j (ties: lowest index = lowest
    // generated id order).
    std::size_t weakest_partner(std::size_t j) const {
        std::size_t best = SIZE_MAX;
        double best_v = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < nd(); ++x) {
            if (slots.partner[x] != static_cast<int>(j)) continue;
            if (v.at(x, j) < best_v) {
                best_v = v.at(x, j);
                best = x;
            }
        }
        return best;
    }

    void detach(std::size_t i) {
        const int j = slots.partner[i];
        if (j < 0) return;
        slots.partner[i] = -1;
        --slots.load[j];
        matched_sum -= v.at(i, j);
        matching.edges[pair_index].erase(v.downstream_ids[i]);
    }

    void attach(std::size_t i, std::size_t j) {
        slots.partner[i] = static_cast<int>(j);
        ++slots.load[j];
        matched_sum += v.at(i, j);
        matching.edges[pair_index][v.downstream_ids[i]] = v.upstream_ids[j];
    }

    EncounterOutcome step(std::size_t i, std::size_t j, rng::Engine& eng) {
        if (slots.partner[i] == static_cast<int>(j)) return {PairEvent::NoOp, -1};
        if (agreeable(i, j)) {
            bool room = slots.load[j] < quotas[j];
            int evicted = -1;
            if (!room) {
                const std::size_t worst = weakest_partner(j);
                if (worst != SIZE_MAX && v.at(i, j) > v.at(worst, j)) {
                    evicted = v.downstream_ids[worst];
                    detach(worst);  // evicted agent keeps its aspirations
                    room = true;
                }
            }
            if (room) {
                detach(i);
                const double value = v.at(i, j);
                const double surplus = value - asp.downstream[i] - asp.upstream[j][i];
                double share_i = surplus / 2.0;
                if (split == SplitRule::RandomSurplus)
                    share_i = eps + rng::uniform_double(eng) * (surplus - 2.0 * eps);
                asp.downstream[i] += share_i;
                asp.upstream[j][i] = exact_complement(value, asp.downstream[i]);
                attach(i, j);
                return {evicted >= 0 ? PairEvent::EvictMatch : PairEvent::Match, evicted};
            }
        }
        // Disagreement: singles lower their own level; j always lowers its
        // i-th copy. Matched pairs are never touched, so their bookkeeping
        // stays exact.
        if (slots.partner[i] < 0) asp.downstream[i] = std::max(0.0, asp.downstream[i] - delta);
        asp.upstream[j][i] = std::max(0.0, asp.upstream[j][i] - delta);
        return {PairEvent::Decrement, -1};
    }

    bool all_matched() const {
        for (int p : slots.partner)
            if (p < 0) return false;
        return true;
    }

    bool quotas_full() const {
        for (std::size_t j = 0; j < nu(); ++j)
            if (slots.load[j] < quotas[j]) return false;
        return true;
    }

    // Absorbing-state test: no cross pair could become agreeable even after
    // every unmatched aspiration decays to its floor of 0. Matched agents'
    // levels never decrease, so once true this stays true and no further
    // match can ever be accepted.
    bool robust_stable() const {
        std::vector<double> evict_bar(nu(), -1.0);  // value to strictly beat; -1 = spare room
        for (std::size_t j = 0; j < nu(); ++j) {
            if (slots.load[j] >= quotas[j]) {
                const std::size_t w = weakest_partner(j);
                evict_bar[j] = (w == SIZE_MAX) ? std::numeric_limits<double>::infinity() : v.at(w, j);
            }
        }
        for (std::size_t i = 0; i < nd(); ++i) {
            const double floor = slots.partner[i] >= 0 ? asp.downstream[i] : 0.0;
            for (std::size_t j = 0; j < nu(); ++j) {
                if (slots.partner[i] == static_cast<int>(j)) continue;
                const double vij = v.at(i, j);
                const bool reachable = evict_bar[j] < 0.0 || vij > evict_bar[j];
                if (reachable && vij >= floor + 2.0 * eps) return false;
            }
        }
        return true;
    }
};

void anchor_matched(AspirationState& state, const Matching& m, int pair_index,
                    const RateMatrix& values) {
    for (const auto& [di, uj] : m.edges[pair_index]) {
        const std::size_t i = values.down_index(di);
        const std::size_t j = values.up_index(uj);
        const double value = values.at(i, j);
        const double old_sum = state.downstream[i] + state.upstream[j][i];
        state.downstream[i] = old_sum > 0.0 ? value * (state.downstream[i] / old_sum) : value / 2.0;
        state.upstream[j][i] = exact_complement(value, state.downstream[i]);
    }
}

// Shared driver behind run_pair and run_msa. `total_after_change` reports
// the value to log after accepted events (pair-local sum by default).
PairRunResult run_pair_dynamic(int pair_index, Matching& m, const RateMatrix& values,
                               const std::vector<int>& quotas, const MsaConfig& cfg,
                               const ResolvedMsaParams& params, AspirationState state,
                               rng::Engine& eng, RunTrace* trace, long* global_iter,
                               const std::function<double()>& total_after_change) {
    PairDyn dyn(values, quotas, state, m, pair_index, params.epsilon, params.delta, cfg.split_rule);

    PairRunResult res;
    res.params = params;
    const bool recording = cfg.record_trace && trace;
    long quiet = 0;
    bool robust = dyn.robust_stable();
    double cached_total =
        recording ? (total_after_change ? total_after_change() : dyn.matched_sum) : 0.0;

    while (!robust) {
        if (res.iterations >= params.max_iters) {
            res.converged = false;
            res.reason = StopReason::IterationCap;
            break;
        }
        ++res.iterations;
        const std::size_t i = rng::uniform_index(eng, dyn.nd());
        const std::size_t j = rng::uniform_index(eng, dyn.nu());
        const EncounterOutcome out = dyn.step(i, j, eng);
        const bool accepted = out.event == PairEvent::Match || out.event == PairEvent::EvictMatch;
        if (accepted) {
            quiet = 0;
            robust = dyn.robust_stable();
            if (recording) cached_total = total_after_change ? total_after_change() : dyn.matched_sum;
        } else if (++quiet >= params.stall_window) {
            // Decrements cannot flip the absorbing test, so this re-check is
            // redundant; kept as a cheap safety net on long quiet stretches.
            quiet = 0;
            robust = dyn.robust_stable();
        }
        if (recording) {
            const long it = global_iter ? (*global_iter)++ : static_cast<long>(trace->size());
            trace->push_back({it, pair_index, out.event, cached_total});
        }
    }
    if (res.converged) {
        if (dyn.all_matched()) res.reason = StopReason::AllMatched;
        else if (dyn.quotas_full()) res.reason = StopReason::QuotasSaturated;
        else res.reason = StopReason::Stalled;
    }
    res.pair_value_sum = dyn.matched_sum;
    res.state = std::move(state);
    return res;
}

bool pair_is_absorbing(const Matching& m, int pair_index, AspirationState& state,
                       const RateMatrix& values, const std::vector<int>& quotas,
                       const ResolvedMsaParams& params, const MsaConfig& cfg) {
    Matching copy = m;
    PairDyn dyn(values, quotas, state, copy, pair_index, params.epsilon, params.delta,
                cfg.split_rule);
    return dyn.robust_stable();
}

}  // namespace

ResolvedMsaParams resolve_msa_params(const MsaConfig& cfg, const RateMatrix& values) {
    ResolvedMsaParams p;
    p.epsilon = cfg.epsilon > 0.0 ? cfg.epsilon : 1e-2 * values.mean_positive_entry();
    if (p.epsilon <= 0.0) p.epsilon = 1.0;  // all-zero matrix: nothing can ever match
    p.delta = cfg.delta > 0.0 ? cfg.delta : p.epsilon / 2.0;
    if (!(p.delta > 0.0 && p.delta < p.epsilon))
        throw std::invalid_argument("msa config: need 0 < delta < epsilon");
    const long cells = static_cast<long>(values.num_down() * values.num_up());
    if (cfg.stall_window > 0) {
        p.stall_window = cfg.stall_window;
    } else {
        // Long enough for any aspiration pair to decay from max to 0 between
        // checks; termination itself comes from the absorbing-state test.
        const double decay_steps = std::ceil(2.0 * values.max_entry() / p.delta);
        p.stall_window = cells * (50 + static_cast<long>(decay_steps));
    }
    p.max_iters = cfg.max_iters_per_pair > 0 ? cfg.max_iters_per_pair : 20 * p.stall_window;
    p.max_iters = std::max<long>(p.max_iters, 1);
    return p;
}

AspirationState init_aspirations(const RateMatrix& rates, std::uint64_t seed) {
    rng::Engine eng(seed);
    AspirationState st;
    st.downstream.resize(rates.num_down());
    for (std::size_t i = 0; i < rates.num_down(); ++i) {
        double row_max = 0.0;
        for (std::size_t j = 0; j < rates.num_up(); ++j) row_max = std::max(row_max, rates.at(i, j));
        st.downstream[i] = rng::uniform_range(eng, 0.0, row_max);
    }
    st.upstream.assign(rates.num_up(), std::vector<double>(rates.num_down(), 0.0));
    for (std::size_t j = 0; j < rates.num_up(); ++j)
        for (std::size_t i = 0; i < rates.num_down(); ++i)
            st.upstream[j][i] = rng::uniform_range(eng, 0.0, rates.at(i, j));
    return st;
}

bool is_agreeable(int downstream_id, int upstream_id, const AspirationState& state,
                  const RateMatrix& rates, double epsilon) {
    const std::size_t i = rates.down_index(downstream_id);
    const std::size_t j = rates.up_index(upstream_id);
    return rates.at(i, j) >= state.downstream[i] + state.upstream[j][i] + 2.0 * epsilon;
}

EncounterOutcome encounter(int downstream_id, int upstream_id, int pair_index, Matching& m,
                           AspirationState& state, const RateMatrix& rates,
                           const std::vector<int>& upstream_quotas, const MsaConfig& cfg,
                           rng::Engine& eng) {
    const ResolvedMsaParams params = resolve_msa_params(cfg, rates);
    PairDyn dyn(rates, upstream_quotas, state, m, pair_index, params.epsilon, params.delta,
                cfg.split_rule);
    return dyn.step(rates.down_index(downstream_id), rates.up_index(upstream_id), eng);
}

PairRunResult run_pair(int pair_index, Matching& m, const RateMatrix& values,
                       const std::vector<int>& upstream_quotas, const MsaConfig& cfg,
                       std::uint64_t seed) {
    const ResolvedMsaParams params = resolve_msa_params(cfg, values);
    AspirationState state = init_aspirations(values, rng::derive_seed(seed, 0));
    anchor_matched(state, m, pair_index, values);
    rng::Engine eng(rng::derive_seed(seed, 1));
    RunTrace trace;
    PairRunResult res = run_pair_dynamic(pair_index, m, values, upstream_quotas, cfg, params,
                                         std::move(state), eng, &trace, nullptr, {});
    res.trace = std::move(trace);
    return res;
}

MsaResult run_msa(const Market& market, const MsaConfig& cfg) {
    const int P = market.num_pairs();
    if (P < 1) throw std::invalid_argument("run_msa: market has no adjacent pairs");
    MsaResult res;
    res.matching = Matching(P);

    std::vector<AspirationState> states(P);
    std::vector<bool> has_state(P, false);
    std::vector<RateMatrix> last_values(P);
    std::vector<double> pair_eps(P, 0.0);
    long global_iter = 0;
    double prev_total = std::numeric_limits<double>::quiet_NaN();
    const int sweeps = std::max(1, cfg.sweep_repeats);

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        res.sweeps_run = sweep + 1;
        for (int k = 0; k < P; ++k) {
            RateMatrix eff = effective_value_matrix(market, k, res.matching);
            const ResolvedMsaParams params = resolve_msa_params(cfg, eff);
            pair_eps[k] = params.epsilon;
            if (has_state[k] && eff.rates == last_values[k].rates &&
                pair_is_absorbing(res.matching, k, states[k], eff,
                                  market.pairs[k].upstream_quotas, params, cfg)) {
                continue;  // unchanged game, still absorbed: re-running is a no-op
            }
            AspirationState state =
                has_state[k] ? std::move(states[k])
                             : init_aspirations(eff, rng::derive_seed(cfg.seed, 0x100 + k));
            anchor_matched(state, res.matching, k, eff);
            rng::Engine eng(rng::derive_seed(cfg.seed, 0x1000 + std::uint64_t(sweep) * P + k));
            auto total_cb = [&]() { return total_value(res.matching, market); };
            PairRunResult pr =
                run_pair_dynamic(k, res.matching, eff, market.pairs[k].upstream_quotas, cfg, params,
                                 std::move(state), eng, &res.trace, &global_iter, total_cb);
            states[k] = std::move(pr.state);
            has_state[k] = true;
            last_values[k] = std::move(eff);
            res.iterations += pr.iterations;
            if (!pr.converged) res.converged = false;
        }
        const double total = total_value(res.matching, market);
        const double tol = *std::max_element(pair_eps.begin(), pair_eps.end());
        if (sweep > 0 && std::abs(total - prev_total) < tol) {
            prev_total = total;
            break;
        }
        prev_total = total;
    }
    res.total_value = prev_total;
    return res;
}

MsaResult run_msa(const Scenario& s, const MsaConfig& cfg) {
    return run_msa(market_from_scenario(s), cfg);
}

StabilityReport check_epsilon_stability(int pair_index, const Matching& m,
                                        const AspirationState& state, const RateMatrix& rates,
                                        const std::vector<int>& upstream_quotas, double epsilon) {
    StabilityReport rep;
    const PairSlots slots = build_slots(m, pair_index, rates);

    for (const auto& [di, uj] : m.edges[pair_index]) {
        const std::size_t i = rates.down_index(di);
        const std::size_t j = rates.up_index(uj);
        const double value = rates.at(i, j);
        const double residual = state.downstream[i] + state.upstream[j][i] - value;
        if (std::abs(residual) > 1e-9 + 1e-12 * std::abs(value))
            rep.mismatched_downstream_ids.push_back(di);
    }

    std::vector<double> evict_bar(rates.num_up(), -1.0);
    for (std::size_t j = 0; j < rates.num_up(); ++j) {
        if (slots.load[j] >= upstream_quotas[j]) {
            double wv = std::numeric_limits<double>::infinity();
            for (std::size_t x = 0; x < rates.num_down(); ++x)
                if (slots.partner[x] == static_cast<int>(j)) wv = std::min(wv, rates.at(x, j));
            evict_bar[j] = wv;
        }
    }
    for (std::size_t i = 0; i < rates.num_down(); ++i) {
        for (std::size_t j = 0; j < rates.num_up(); ++j) {
            if (slots.partner[i] == static_cast<int>(j)) continue;
            const double vij = rates.at(i, j);
            const bool reachable = evict_bar[j] < 0.0 || vij > evict_bar[j];
            if (!reachable) continue;
            if (vij >= state.downstream[i] + state.upstream[j][i] + 2.0 * epsilon)
                rep.blocking_pairs.push_back({rates.downstream_ids[i], rates.upstream_ids[j]});
        }
    }
    rep.stable = rep.blocking_pairs.empty() && rep.mismatched_downstream_ids.empty();
    return rep;
}

std::string StabilityReport::to_text() const {
    std::ostringstream os;
    if (stable) {
        os << "stable: no blocking pairs\n";
        return os.str();
    }
    for (int id : mismatched_downstream_ids)
        os << "matched downstream " << id << " does not attain its pair value\n";
    for (const BlockingPair& b : blocking_pairs)
        os << "blocking pair: downstream " << b.downstream_id << " <-> upstream " << b.upstream_id
           << "\n";
    return os.str();
}

const char* to_string(PairEvent e) {
    switch (e) {
        case PairEvent::Match: return "match";
        case PairEvent::EvictMatch: return "evict-match";
        case PairEvent::Decrement: return "decrement";
        case PairEvent::NoOp: return "no-op";
    }
    return "?";
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::AllMatched: return "all-matched";
        case StopReason::QuotasSaturated: return "quotas-saturated";
        case StopReason::Stalled: return "stalled-stable";
        case StopReason::IterationCap: return "iteration-cap";
    }
    return "?";
}

void write_trace_csv(const RunTrace& trace, const std::string& path,
                     const std::string& header_comment) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    if (!header_comment.empty()) out << header_comment;
    out << "iter,pair,event,total_value_bps\n";
    out.precision(17);
    for (const TraceRecord& r : trace)
        out << r.iteration << "," << r.pair << "," << to_string(r.event) << "," << r.total_value
            << "\n";
}

}  // namespace sagin
