#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlab/mpoly.hpp"
#include "qlab/qpcp.hpp"
#include "qlab/retrieve.hpp"
#include "qlab/serialize.hpp"

namespace qlab {

/// Seeded experiment description. The seed fully determines every sampled
/// run: re-running an identical config yields byte-identical reports.
struct ExperimentConfig {
    std::string kind; // "retrieval" | "qldt" | "qpcp"

    unsigned a = 4;
    std::optional<uint32_t> modulus;
    unsigned d = 2;
    uint32_t h_size = 4;
    std::optional<unsigned> r; // default: d * (h_size - 1)

    uint64_t seed = 1;
    uint64_t trials = 10000;
    std::string mode = "both"; // "exact" | "sampled" | "both"
    unsigned workers = 2;

    // retrieval
    std::vector<std::string> adversaries; // empty: the whole suite
    std::vector<uint32_t> data;           // empty: seeded random table
    std::vector<uint32_t> w;              // empty: seeded random point

    // qldt
    unsigned corrupt_lines = 0;
    double state_noise = 0.0;

    // qpcp
    std::string instance;             // path, "gap-unsat-2", or "planted:<m>,<k>"
    std::vector<uint32_t> assignment; // empty: planted / all-zeros
    bool decode = false;

    std::string output;     // optional JSON output path
    std::string csv_output; // optional CSV output path

    unsigned degree_bound() const { return r ? *r : d * (h_size - 1); }
};

ExperimentConfig experiment_config_from_json(const Json& j);
Json experiment_config_to_json(const ExperimentConfig& c);

struct TrialReport {
    Json json;
    std::string csv;
    bool pass = true;
};

/// Dispatches to the retrieval / low-degree-test / one-query-verifier
/// experiments and renders JSON plus CSV.
TrialReport run_experiment(const ExperimentConfig& config);

LdeParams params_from_config(const ExperimentConfig& c);

/// Truth-table advice demo: encode 2^nu bits as a data table, build the
/// advice state, retrieve the queried bit through the single-point protocol,
/// and accept iff the concluded value is 1 (0 and Err reject).
struct AdviceDemoResult {
    Verdict verdict;
    bool accept = false;
};

AdviceDemoResult demo_advice(const LdeParams& params, const std::vector<uint8_t>& truth_table,
                             uint64_t query_index, const MerlinStrategy& strategy, unsigned r,
                             Rng& rng);

/// Sampled runs distributed over worker substreams (seed, worker-index);
/// counts merge deterministically by worker index.
VerdictDistribution sample_r1_parallel(const QuantumState& state, const Point& w,
                                       const MerlinStrategy& strategy, unsigned r, uint64_t trials,
                                       uint64_t seed, unsigned workers);

AcceptanceReport sample_qldt_parallel(const QuantumState& state, const LineOracle& oracle,
                                      uint64_t trials, uint64_t seed, unsigned workers);

struct QpcpSampleReport {
    uint64_t accepts = 0;
    uint64_t trials = 0;
    bool one_query_each_run = true;
    std::map<std::string, uint64_t> failure_stages;
};

QpcpSampleReport sample_qpcp_parallel(const GapInstance& instance, const QuantumState& state,
                                      const ProofBlocks& blocks, const LdeParams& params,
                                      unsigned r, uint64_t trials, uint64_t seed,
                                      unsigned workers);

} // namespace qlab
