#include "qlab/experiment.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "qlab/errors.hpp"
#include "qlab/ldt.hpp"
#include "qlab/util.hpp"

namespace qlab {

ExperimentConfig experiment_config_from_json(const Json& j) {
    ExperimentConfig c;
    c.kind = j.at("kind").get<std::string>();
    c.a = j.value("a", c.a);
    if (j.contains("modulus")) c.modulus = j.at("modulus").get<uint32_t>();
    c.d = j.value("d", c.d);
    c.h_size = j.value("h_size", c.h_size);
    if (j.contains("r")) c.r = j.at("r").get<unsigned>();
    c.seed = j.value("seed", c.seed);
    c.trials = j.value("trials", c.trials);
    c.mode = j.value("mode", c.mode);
    c.workers = j.value("workers", c.workers);
    if (j.contains("adversaries"))
        c.adversaries = j.at("adversaries").get<std::vector<std::string>>();
    if (j.contains("data")) c.data = j.at("data").get<std::vector<uint32_t>>();
    if (j.contains("w")) c.w = j.at("w").get<std::vector<uint32_t>>();
    c.corrupt_lines = j.value("corrupt_lines", c.corrupt_lines);
    c.state_noise = j.value("state_noise", c.state_noise);
    c.instance = j.value("instance", c.instance);
    if (j.contains("assignment")) c.assignment = j.at("assignment").get<std::vector<uint32_t>>();
    c.decode = j.value("decode", c.decode);
    c.output = j.value("output", c.output);
    c.csv_output = j.value("csv_output", c.csv_output);
    return c;
}

Json experiment_config_to_json(const ExperimentConfig& c) {
    Json j{{"kind", c.kind},       {"a", c.a},
           {"d", c.d},             {"h_size", c.h_size},
           {"r", c.degree_bound()}, {"seed", c.seed},
           {"trials", c.trials},   {"mode", c.mode},
           {"workers", c.workers}};
    if (c.modulus) j["modulus"] = *c.modulus;
    if (!c.adversaries.empty()) j["adversaries"] = c.adversaries;
    if (!c.data.empty()) j["data"] = c.data;
    if (!c.w.empty()) j["w"] = c.w;
    if (c.corrupt_lines != 0) j["corrupt_lines"] = c.corrupt_lines;
    if (c.state_noise != 0.0) j["state_noise"] = c.state_noise;
    if (!c.instance.empty()) j["instance"] = c.instance;
    if (!c.assignment.empty()) j["assignment"] = c.assignment;
    if (c.decode) j["decode"] = c.decode;
    return j;
}

LdeParams params_from_config(const ExperimentConfig& c) {
    Field field = c.modulus ? Field(c.a, *c.modulus) : Field(c.a);
    return LdeParams(std::move(field), c.d, c.h_size);
}

// ---- parallel samplers -------------------------------------------------------

namespace {

std::vector<uint64_t> split_trials(uint64_t trials, unsigned workers) {
    if (workers == 0) workers = 1;
    std::vector<uint64_t> chunks(workers, trials / workers);
    for (uint64_t i = 0; i < trials % workers; ++i) ++chunks[i];
    return chunks;
}

} // namespace

VerdictDistribution sample_r1_parallel(const QuantumState& state, const Point& w,
                                       const MerlinStrategy& strategy, unsigned r, uint64_t trials,
                                       uint64_t seed, unsigned workers) {
    const auto chunks = split_trials(trials, workers);
    std::vector<VerdictDistribution> partial(chunks.size());
    std::vector<std::thread> pool;
    for (size_t i = 0; i < chunks.size(); ++i) {
        pool.emplace_back([&, i] {
            Rng rng = Rng::substream(seed, i);
            for (uint64_t t = 0; t < chunks[i]; ++t)
                partial[i].add(run_r1(state, w, strategy, r, rng));
        });
    }
    for (auto& th : pool) th.join();
    VerdictDistribution merged;
    for (const auto& p : partial)
        for (const auto& [v, n] : p.counts) merged.add(v, n);
    return merged;
}

AcceptanceReport sample_qldt_parallel(const QuantumState& state, const LineOracle& oracle,
                                      uint64_t trials, uint64_t seed, unsigned workers) {
    const auto chunks = split_trials(trials, workers);
    std::vector<uint64_t> accepts(chunks.size(), 0);
    std::vector<std::thread> pool;
    for (size_t i = 0; i < chunks.size(); ++i) {
        pool.emplace_back([&, i] {
            Rng rng = Rng::substream(seed, i);
            for (uint64_t t = 0; t < chunks[i]; ++t)
                if (qldt_run_once(state, oracle, rng)) ++accepts[i];
        });
    }
    for (auto& th : pool) th.join();
    uint64_t total = 0;
    for (uint64_t a : accepts) total += a;
    const double p = trials == 0 ? 0.0 : static_cast<double>(total) / trials;
    const double se = trials == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / trials);
    return AcceptanceReport{p, "monte_carlo", trials, se};
}

QpcpSampleReport sample_qpcp_parallel(const GapInstance& instance, const QuantumState& state,
                                      const ProofBlocks& blocks, const LdeParams& params,
                                      unsigned r, uint64_t trials, uint64_t seed,
                                      unsigned workers) {
    const auto chunks = split_trials(trials, workers);
    std::vector<QpcpSampleReport> partial(chunks.size());
    std::vector<std::thread> pool;
    for (size_t i = 0; i < chunks.size(); ++i) {
        pool.emplace_back([&, i] {
            // Per-worker clone so the instrumented read counter stays
            // race-free and per-run deltas are meaningful.
            ProofBlocks local = blocks;
            local.reset_reads();
            Rng rng = Rng::substream(seed, i);
            auto& rep = partial[i];
            rep.trials = chunks[i];
            for (uint64_t t = 0; t < chunks[i]; ++t) {
                const VerdictReport v = verify_once(instance, state, local, params, r, rng);
                if (v.blocks_read != 1) rep.one_query_each_run = false;
                if (v.accept) {
                    ++rep.accepts;
                } else {
                    ++rep.failure_stages[v.stage_name()];
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    QpcpSampleReport merged;
    for (const auto& p : partial) {
        merged.accepts += p.accepts;
        merged.trials += p.trials;
        merged.one_query_each_run = merged.one_query_each_run && p.one_query_each_run;
        for (const auto& [k, n] : p.failure_stages) merged.failure_stages[k] += n;
    }
    return merged;
}

// ---- advice demo ---------------------------------------------------------------

AdviceDemoResult demo_advice(const LdeParams& params, const std::vector<uint8_t>& truth_table,
                             uint64_t query_index, const MerlinStrategy& strategy, unsigned r,
                             Rng& rng) {
    if (truth_table.empty() || (truth_table.size() & (truth_table.size() - 1)) != 0)
        throw std::invalid_argument("demo_advice: truth table length must be a power of two");
    if (truth_table.size() > params.domain_size())
        throw std::invalid_argument("demo_advice: truth table larger than |H|^d");
    if (query_index >= truth_table.size())
        throw std::invalid_argument("demo_advice: query index out of range");

    std::vector<uint32_t> raw(params.domain_size(), 0);
    for (size_t i = 0; i < truth_table.size(); ++i) raw[i] = truth_table[i] ? 1 : 0;
    const DataTable data = data_table_from_values(params, raw);
    const QuantumState advice = build_qlde_state(params, data);
    const Point w = params.pi_inverse(query_index);

    AdviceDemoResult out{run_r1(advice, w, strategy, r, rng), false};
    out.accept = out.verdict == Verdict::value(params.field.one());
    return out;
}

// ---- experiments ---------------------------------------------------------------

namespace {

constexpr double kSigmaGate = 4.0;

bool sampled_matches_exact(uint64_t count, uint64_t trials, double p_exact) {
    if (trials == 0) return true;
    const double expected = p_exact * static_cast<double>(trials);
    if (p_exact <= 0.0) return count == 0;
    if (p_exact >= 1.0) return count == trials;
    const double sigma = std::sqrt(static_cast<double>(trials) * p_exact * (1.0 - p_exact));
    return std::abs(static_cast<double>(count) - expected) <= kSigmaGate * sigma + 0.5;
}

std::vector<uint32_t> seeded_table(const LdeParams& params, Rng& rng) {
    std::vector<uint32_t> raw(params.domain_size());
    for (auto& v : raw) v = static_cast<uint32_t>(rng.below(params.field.order()));
    return raw;
}

Point seeded_point(const LdeParams& params, Rng& rng) {
    Point w(params.d, params.field.zero());
    for (auto& c : w) c = params.field.elem(static_cast<uint32_t>(rng.below(params.field.order())));
    return w;
}

TrialReport run_retrieval(const ExperimentConfig& c) {
    const LdeParams params = params_from_config(c);
    const unsigned r = c.degree_bound();
    Rng rng(c.seed);

    const std::vector<uint32_t> raw = c.data.empty() ? seeded_table(params, rng) : c.data;
    const DataTable data = data_table_from_values(params, raw);
    const MultiPoly lde = interpolate_lde(params, data);
    Point w;
    if (c.w.empty()) {
        w = seeded_point(params, rng);
    } else {
        for (uint32_t v : c.w) w.push_back(params.field.elem(v));
    }
    const FieldElem correct = lde.evaluate(w);
    const QuantumState state = build_qlde_state(params, data);

    auto suite = adversary_suite(lde, r, rng);
    if (!c.adversaries.empty()) {
        std::vector<std::shared_ptr<MerlinStrategy>> filtered;
        for (const auto& s : suite)
            for (const auto& name : c.adversaries)
                if (s->name() == name) filtered.push_back(s);
        suite = std::move(filtered);
    }

    const bool want_exact = c.mode != "sampled";
    const bool want_sampled = c.mode != "exact";

    bool pass = true;
    Json strategies = Json::array();
    std::ostringstream csv;
    csv << "strategy,verdict,exact_count,exact_prob,sampled_count,sampled_prob\n";

    for (const auto& strategy : suite) {
        Json entry{{"name", strategy->name()}};
        VerdictDistribution exact;
        if (want_exact) {
            exact = exact_r1_distribution(data, params, w, *strategy, r);
            entry["exact"] = verdict_distribution_to_json(exact);
            uint64_t wrong = 0;
            for (const auto& [v, n] : exact.counts)
                if (v.kind == Verdict::Kind::Value && v.a != correct.value) wrong += n;
            entry["wrong_prob_exact"] =
                static_cast<double>(wrong) / static_cast<double>(exact.total);
            if (strategy->name() == "honest" &&
                exact.count(Verdict::value(correct)) != exact.total)
                pass = false;
        }
        VerdictDistribution sampled;
        if (want_sampled) {
            sampled = sample_r1_parallel(state, w, *strategy, r, c.trials, c.seed, c.workers);
            entry["sampled"] = verdict_distribution_to_json(sampled);
        }
        if (want_exact && want_sampled) {
            bool within = true;
            std::set<Verdict> keys;
            for (const auto& [v, n] : exact.counts) {
                (void)n;
                keys.insert(v);
            }
            for (const auto& [v, n] : sampled.counts) {
                (void)n;
                keys.insert(v);
            }
            for (const auto& v : keys)
                if (!sampled_matches_exact(sampled.count(v), sampled.total, exact.prob(v)))
                    within = false;
            entry["sampled_within_4sigma"] = within;
            pass = pass && within;
        }
        for (const auto& [v, n] : exact.counts)
            csv << strategy->name() << "," << v.to_string() << "," << n << "," << exact.prob(v)
                << "," << sampled.count(v) << "," << sampled.prob(v) << "\n";
        strategies.push_back(std::move(entry));
    }

    Json out{{"kind", "retrieval"},
             {"config", experiment_config_to_json(c)},
             {"w", point_to_json(w)},
             {"correct_value", correct.value},
             {"strategies", std::move(strategies)},
             {"pass", pass}};
    return TrialReport{std::move(out), csv.str(), pass};
}

TrialReport run_qldt(const ExperimentConfig& c) {
    const LdeParams params = params_from_config(c);
    const unsigned r = c.degree_bound();
    Rng rng(c.seed);

    const std::vector<uint32_t> raw = c.data.empty() ? seeded_table(params, rng) : c.data;
    const DataTable data = data_table_from_values(params, raw);
    const MultiPoly lde = interpolate_lde(params, data);
    const QuantumState state =
        perturbed_qlde_state(params, data, c.state_noise, /*complex_phase=*/true, rng);
    const auto oracle = corrupted_oracle(lde, r, c.corrupt_lines, rng);

    const bool want_exact = c.mode != "sampled";
    const bool want_sampled = c.mode != "exact";
    bool pass = true;

    double gamma_exact = 0.0;
    AcceptanceReport sampled{};
    AgreementBoundCheck bound{};
    if (want_exact) {
        gamma_exact = qldt_accept_exact(state, *oracle).gamma;
        bound = agreement_lower_bound_check(state, *oracle);
        if (!bound.holds) pass = false;
    }
    if (want_sampled)
        sampled = sample_qldt_parallel(state, *oracle, c.trials, c.seed, c.workers);
    if (want_exact && want_sampled) {
        const uint64_t accepts =
            static_cast<uint64_t>(std::llround(sampled.gamma * static_cast<double>(c.trials)));
        if (!sampled_matches_exact(accepts, c.trials, gamma_exact)) pass = false;
    }

    Json out{{"kind", "qldt"},
             {"config", experiment_config_to_json(c)},
             {"gamma_exact", gamma_exact},
             {"gamma_sampled", sampled.gamma},
             {"stderr", sampled.stderr_est},
             {"agr_fG", bound.agr_fg},
             {"bound_rhs", bound.rhs},
             {"bound_vacuous", bound.vacuous},
             {"holds", bound.holds},
             {"pass", pass}};
    std::ostringstream csv;
    csv << "gamma_exact,gamma_sampled,stderr,agr_fG,bound_rhs,holds\n";
    csv << gamma_exact << "," << sampled.gamma << "," << sampled.stderr_est << "," << bound.agr_fg
        << "," << bound.rhs << "," << bound.holds << "\n";
    return TrialReport{std::move(out), csv.str(), pass};
}

GapInstance load_instance(const ExperimentConfig& c, Rng& rng, std::vector<uint32_t>* planted) {
    if (c.instance == "gap-unsat-2") return gap_unsat_two_predicate();
    if (c.instance.rfind("planted:", 0) == 0) {
        const std::string spec = c.instance.substr(8);
        const auto comma = spec.find(',');
        const uint32_t m = static_cast<uint32_t>(std::stoul(spec.substr(0, comma)));
        const uint32_t k = static_cast<uint32_t>(std::stoul(spec.substr(comma + 1)));
        return random_planted_instance(m, 1, 2, k, rng, planted);
    }
    return gap_instance_from_json(load_json_file(c.instance));
}

TrialReport run_qpcp(const ExperimentConfig& c) {
    const LdeParams params = params_from_config(c);
    const unsigned r = c.degree_bound();
    Rng rng(c.seed);

    std::vector<uint32_t> planted;
    const GapInstance instance = load_instance(c, rng, &planted);
    std::vector<uint32_t> assignment = c.assignment;
    if (assignment.empty())
        assignment = planted.empty() ? std::vector<uint32_t>(instance.m, 0) : planted;

    const CorrectProof proof = format_proof(instance, assignment, params, r);
    const double satisfied = instance.satisfied_fraction(assignment);

    const bool want_exact = c.mode != "sampled";
    const bool want_sampled = c.mode != "exact";
    bool pass = true;

    double gamma_exact = 0.0;
    if (want_exact) {
        gamma_exact = accept_prob_exact(instance, proof.state, proof.blocks, params, r);
        if (satisfied == 1.0 && std::abs(gamma_exact - 1.0) > 1e-12) pass = false;
    }
    QpcpSampleReport sampled;
    if (want_sampled) {
        sampled = sample_qpcp_parallel(instance, proof.state, proof.blocks, params, r, c.trials,
                                       c.seed, c.workers);
        if (!sampled.one_query_each_run) pass = false;
        if (want_exact &&
            !sampled_matches_exact(sampled.accepts, sampled.trials, gamma_exact))
            pass = false;
    }

    Json out{{"kind", "qpcp"},
             {"config", experiment_config_to_json(c)},
             {"instance", gap_instance_to_json(instance)},
             {"assignment", assignment},
             {"satisfied_fraction", satisfied},
             {"gamma_exact", gamma_exact},
             {"pass", true}};
    if (want_sampled) {
        out["sampled"] = Json{{"trials", sampled.trials},
                              {"accepts", sampled.accepts},
                              {"accept_rate", sampled.trials == 0
                                                  ? 0.0
                                                  : static_cast<double>(sampled.accepts) /
                                                        sampled.trials},
                              {"one_query_each_run", sampled.one_query_each_run},
                              {"failure_stages", sampled.failure_stages}};
    }
    if (c.decode) {
        const DecodeReport dec = decode_and_score(proof.blocks, instance, params, r,
                                                  want_exact ? std::optional<double>(gamma_exact)
                                                             : std::nullopt);
        out["decode"] = Json{{"assignment", dec.assignment},
                             {"satisfied_fraction", dec.satisfied_fraction},
                             {"best_agr", dec.best_agr}};
        if (dec.gamma4_over_100) out["decode"]["gamma4_over_100"] = *dec.gamma4_over_100;
        if (dec.satisfied_fraction != satisfied) pass = false;
    }
    out["pass"] = pass;

    std::ostringstream csv;
    csv << "satisfied_fraction,gamma_exact,sampled_accept_rate,trials\n";
    csv << satisfied << "," << gamma_exact << ","
        << (sampled.trials ? static_cast<double>(sampled.accepts) / sampled.trials : 0.0) << ","
        << sampled.trials << "\n";
    return TrialReport{std::move(out), csv.str(), pass};
}

} // namespace

TrialReport run_experiment(const ExperimentConfig& config) {
    if (config.kind == "retrieval") return run_retrieval(config);
    if (config.kind == "qldt") return run_qldt(config);
    if (config.kind == "qpcp") return run_qpcp(config);
    throw std::invalid_argument("run_experiment: unknown kind '" + config.kind + "'");
}

} // namespace qlab
