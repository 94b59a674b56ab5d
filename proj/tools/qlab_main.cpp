#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qlab/experiment.hpp"
#include "qlab/ldt.hpp"
#include "qlab/qpcp.hpp"
#include "qlab/serialize.hpp"

namespace {

using namespace qlab;

struct DomainOpts {
    unsigned a = 4;
    std::optional<uint32_t> modulus;
    unsigned d = 2;
    uint32_t h = 4;
    std::optional<unsigned> r;
    uint64_t seed = 1;

    void attach(CLI::App* app) {
        app->add_option("--a", a, "field extension degree (|F| = 2^a)");
        app->add_option("--modulus", modulus, "modulus polynomial bits (default per degree)");
        app->add_option("--d", d, "number of variables");
        app->add_option("--h-size", h, "|H|, the data subset size");
        app->add_option("--r", r, "degree bound (default d*(h-1))");
        app->add_option("--seed", seed, "rng seed");
    }

    LdeParams params() const {
        Field f = modulus ? Field(a, *modulus) : Field(a);
        return LdeParams(std::move(f), d, h);
    }
    unsigned degree_bound() const { return r ? *r : d * (h - 1); }
};

void emit(const Json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_json_file(out_path, j);
    }
}

DataTable load_table(const LdeParams& params, const std::string& data_path,
                     const std::vector<uint32_t>& inline_values, uint64_t seed) {
    if (!data_path.empty()) {
        auto [p, t] = data_table_from_json(load_json_file(data_path));
        if (p.field != params.field || p.d != params.d || p.h_size != params.h_size)
            throw std::invalid_argument("data table header disagrees with the domain options");
        return t;
    }
    if (!inline_values.empty()) return data_table_from_values(params, inline_values);
    std::vector<uint32_t> raw(params.domain_size());
    Rng rng(splitmix64(seed));
    for (auto& v : raw) v = static_cast<uint32_t>(rng.below(params.field.order()));
    return data_table_from_values(params, raw);
}

Point parse_point(const LdeParams& params, const std::vector<uint32_t>& coords) {
    if (coords.size() != params.d) throw std::invalid_argument("point needs d coordinates");
    Point p;
    for (uint32_t c : coords) p.push_back(params.field.elem(c));
    return p;
}

std::shared_ptr<MerlinStrategy> pick_strategy(const MultiPoly& lde, unsigned r, uint64_t seed,
                                              const std::string& name) {
    Rng rng(splitmix64(seed ^ 0xabcdef));
    for (auto& s : adversary_suite(lde, r, rng))
        if (s->name() == name) return s;
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

int cmd_experiment(const std::string& config_path) {
    const ExperimentConfig config = experiment_config_from_json(load_json_file(config_path));
    const TrialReport report = run_experiment(config);
    if (!config.output.empty()) write_json_file(config.output, report.json);
    if (!config.csv_output.empty()) {
        std::ofstream out(config.csv_output);
        out << report.csv;
    }
    if (config.output.empty()) std::cout << report.json.dump(2) << "\n";
    return report.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale simulator for quantum low-degree-extension retrieval, "
                 "the quantum low-degree test, and the one-query verifier"};
    app.require_subcommand(1);

    // encode
    auto* encode = app.add_subcommand("encode", "build the quantum encoding of a data table");
    DomainOpts enc_dom;
    enc_dom.attach(encode);
    std::string enc_data, enc_out;
    std::vector<uint32_t> enc_values;
    encode->add_option("--data", enc_data, "data table JSON file");
    encode->add_option("--values", enc_values, "inline data values");
    encode->add_option("--out", enc_out, "output file (stdout default)");

    // retrieve / retrieve-exact
    auto* retrieve = app.add_subcommand("retrieve", "sampled single-point retrieval");
    auto* retrieve_exact =
        app.add_subcommand("retrieve-exact", "exact single-point retrieval distribution");
    DomainOpts ret_dom, rex_dom;
    ret_dom.attach(retrieve);
    rex_dom.attach(retrieve_exact);
    std::string ret_data, rex_data, ret_strategy = "honest", rex_strategy = "honest";
    std::vector<uint32_t> ret_values, rex_values, ret_w, rex_w;
    uint64_t ret_trials = 10000;
    unsigned ret_workers = 2;
    std::string ret_out, rex_out;
    retrieve->add_option("--data", ret_data, "data table JSON file");
    retrieve->add_option("--values", ret_values, "inline data values");
    retrieve->add_option("--w", ret_w, "marked point coordinates")->expected(-1);
    retrieve->add_option("--strategy", ret_strategy, "merlin strategy name");
    retrieve->add_option("--trials", ret_trials, "number of runs");
    retrieve->add_option("--workers", ret_workers, "worker substreams");
    retrieve->add_option("--out", ret_out, "output file");
    retrieve_exact->add_option("--data", rex_data, "data table JSON file");
    retrieve_exact->add_option("--values", rex_values, "inline data values");
    retrieve_exact->add_option("--w", rex_w, "marked point coordinates")->expected(-1);
    retrieve_exact->add_option("--strategy", rex_strategy, "merlin strategy name");
    retrieve_exact->add_option("--out", rex_out, "output file");

    // qldt / qldt-exact
    auto* qldt = app.add_subcommand("qldt", "sampled quantum low-degree test");
    auto* qldt_exact = app.add_subcommand("qldt-exact", "exact acceptance probability");
    DomainOpts ql_dom, qx_dom;
    ql_dom.attach(qldt);
    qx_dom.attach(qldt_exact);
    std::string ql_data, qx_data, ql_out, qx_out, ql_state, qx_state;
    std::vector<uint32_t> ql_values, qx_values;
    unsigned ql_corrupt = 0, qx_corrupt = 0;
    double ql_noise = 0.0, qx_noise = 0.0;
    uint64_t ql_trials = 10000;
    unsigned ql_workers = 2;
    qldt->add_option("--data", ql_data, "data table JSON file");
    qldt->add_option("--values", ql_values, "inline data values");
    qldt->add_option("--state", ql_state, "explicit state JSON (overrides data)");
    qldt->add_option("--corrupt-lines", ql_corrupt, "corrupted oracle lines");
    qldt->add_option("--state-noise", ql_noise, "amplitude perturbation level");
    qldt->add_option("--trials", ql_trials, "number of runs");
    qldt->add_option("--workers", ql_workers, "worker substreams");
    qldt->add_option("--out", ql_out, "output file");
    qldt_exact->add_option("--data", qx_data, "data table JSON file");
    qldt_exact->add_option("--values", qx_values, "inline data values");
    qldt_exact->add_option("--state", qx_state, "explicit state JSON (overrides data)");
    qldt_exact->add_option("--corrupt-lines", qx_corrupt, "corrupted oracle lines");
    qldt_exact->add_option("--state-noise", qx_noise, "amplitude perturbation level");
    qldt_exact->add_option("--out", qx_out, "output file");

    // qpcp family
    auto* qpcp = app.add_subcommand("qpcp", "one-query verifier for GAP instances");
    qpcp->require_subcommand(1);
    auto* prove = qpcp->add_subcommand("prove", "build the proof for an assignment");
    auto* verify = qpcp->add_subcommand("verify", "sampled verification runs");
    auto* exact = qpcp->add_subcommand("exact", "exact acceptance probability");
    auto* decode = qpcp->add_subcommand("decode", "decode an assignment from the blocks");
    DomainOpts qp_dom, qv_dom, qe_dom, qd_dom;
    qp_dom.d = qv_dom.d = qe_dom.d = qd_dom.d = 3;
    qp_dom.h = qv_dom.h = qe_dom.h = qd_dom.h = 2;
    qp_dom.attach(prove);
    qv_dom.attach(verify);
    qe_dom.attach(exact);
    qd_dom.attach(decode);
    std::string qp_instance, qv_instance, qe_instance, qd_instance;
    std::vector<uint32_t> qp_assignment;
    std::string qp_state_out = "state.json", qp_blocks_out = "blocks.json";
    std::string qv_state, qv_blocks, qe_state, qe_blocks, qd_blocks;
    uint64_t qv_trials = 10000;
    unsigned qv_workers = 2;
    std::string qv_out, qe_out, qd_out;
    bool qp_force = false;
    std::optional<double> qd_gamma;
    prove->add_option("--instance", qp_instance, "instance JSON or 'gap-unsat-2'")->required();
    prove->add_option("--assignment", qp_assignment, "assignment values")->expected(-1);
    prove->add_flag("--format-only", qp_force,
                    "format the proof even if the assignment is not satisfying");
    prove->add_option("--out-state", qp_state_out, "state output file");
    prove->add_option("--out-blocks", qp_blocks_out, "blocks output file");
    verify->add_option("--instance", qv_instance, "instance JSON or 'gap-unsat-2'")->required();
    verify->add_option("--state", qv_state, "state JSON")->required();
    verify->add_option("--blocks", qv_blocks, "blocks JSON")->required();
    verify->add_option("--trials", qv_trials, "number of runs");
    verify->add_option("--workers", qv_workers, "worker substreams");
    verify->add_option("--out", qv_out, "output file");
    exact->add_option("--instance", qe_instance, "instance JSON or 'gap-unsat-2'")->required();
    exact->add_option("--state", qe_state, "state JSON")->required();
    exact->add_option("--blocks", qe_blocks, "blocks JSON")->required();
    exact->add_option("--out", qe_out, "output file");
    decode->add_option("--instance", qd_instance, "instance JSON or 'gap-unsat-2'")->required();
    decode->add_option("--blocks", qd_blocks, "blocks JSON")->required();
    decode->add_option("--gamma", qd_gamma, "acceptance probability for the bound report");
    decode->add_option("--out", qd_out, "output file");

    // demo-advice
    auto* demo = app.add_subcommand("demo-advice", "encode a truth table as advice and retrieve");
    DomainOpts demo_dom;
    demo_dom.attach(demo);
    std::string demo_table, demo_query, demo_strategy = "honest", demo_out;
    demo->add_option("--table", demo_table, "truth table bits, e.g. 0110")->required();
    demo->add_option("--query", demo_query, "query bit string")->required();
    demo->add_option("--strategy", demo_strategy, "merlin strategy name");
    demo->add_option("--out", demo_out, "output file");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a config-driven experiment");
    std::string exp_config;
    experiment->add_option("--config", exp_config, "experiment config JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        auto load_instance_arg = [](const std::string& arg) {
            if (arg == "gap-unsat-2") return gap_unsat_two_predicate();
            return gap_instance_from_json(load_json_file(arg));
        };

        if (*encode) {
            const LdeParams params = enc_dom.params();
            const DataTable table = load_table(params, enc_data, enc_values, enc_dom.seed);
            emit(state_to_json(build_qlde_state(params, table)), enc_out);
        } else if (*retrieve) {
            const LdeParams params = ret_dom.params();
            const unsigned r = ret_dom.degree_bound();
            const DataTable table = load_table(params, ret_data, ret_values, ret_dom.seed);
            const MultiPoly lde = interpolate_lde(params, table);
            const Point w = parse_point(params, ret_w);
            const auto strategy = pick_strategy(lde, r, ret_dom.seed, ret_strategy);
            const QuantumState state = build_qlde_state(params, table);
            const auto dist =
                sample_r1_parallel(state, w, *strategy, r, ret_trials, ret_dom.seed, ret_workers);
            emit(Json{{"strategy", ret_strategy},
                      {"w", point_to_json(w)},
                      {"distribution", verdict_distribution_to_json(dist)}},
                 ret_out);
        } else if (*retrieve_exact) {
            const LdeParams params = rex_dom.params();
            const unsigned r = rex_dom.degree_bound();
            const DataTable table = load_table(params, rex_data, rex_values, rex_dom.seed);
            const MultiPoly lde = interpolate_lde(params, table);
            const Point w = parse_point(params, rex_w);
            const auto strategy = pick_strategy(lde, r, rex_dom.seed, rex_strategy);
            const auto dist = exact_r1_distribution(table, params, w, *strategy, r);
            emit(Json{{"strategy", rex_strategy},
                      {"w", point_to_json(w)},
                      {"distribution", verdict_distribution_to_json(dist)}},
                 rex_out);
        } else if (*qldt || *qldt_exact) {
            const bool sampled = static_cast<bool>(*qldt);
            DomainOpts& dom = sampled ? ql_dom : qx_dom;
            const LdeParams params = dom.params();
            const unsigned r = dom.degree_bound();
            Rng rng(dom.seed);
            const DataTable table = load_table(params, sampled ? ql_data : qx_data,
                                               sampled ? ql_values : qx_values, dom.seed);
            const MultiPoly lde = interpolate_lde(params, table);
            const std::string state_path = sampled ? ql_state : qx_state;
            const QuantumState state =
                state_path.empty()
                    ? perturbed_qlde_state(params, table, sampled ? ql_noise : qx_noise, true, rng)
                    : state_from_json(load_json_file(state_path));
            const auto oracle =
                corrupted_oracle(lde, r, sampled ? ql_corrupt : qx_corrupt, rng);
            if (sampled) {
                const auto rep =
                    sample_qldt_parallel(state, *oracle, ql_trials, ql_dom.seed, ql_workers);
                emit(acceptance_report_to_json(rep), ql_out);
            } else {
                const auto rep = qldt_accept_exact(state, *oracle);
                const auto bound = agreement_lower_bound_check(state, *oracle);
                emit(Json{{"gamma_exact", rep.gamma},
                          {"agr_fG", bound.agr_fg},
                          {"bound_rhs", bound.rhs},
                          {"bound_vacuous", bound.vacuous},
                          {"holds", bound.holds}},
                     qx_out);
            }
        } else if (*qpcp) {
            if (*prove) {
                const LdeParams params = qp_dom.params();
                const GapInstance instance = load_instance_arg(qp_instance);
                std::vector<uint32_t> assignment = qp_assignment;
                if (assignment.empty()) assignment.assign(instance.m, 0);
                const CorrectProof proof =
                    qp_force ? format_proof(instance, assignment, params, qp_dom.degree_bound())
                             : build_correct_proof(instance, assignment, params,
                                                   qp_dom.degree_bound());
                write_json_file(qp_state_out, state_to_json(proof.state));
                write_json_file(qp_blocks_out, proof_blocks_to_json(proof.blocks, params.field));
                std::cout << "wrote " << qp_state_out << " and " << qp_blocks_out << " ("
                          << proof.blocks.all().size() << " blocks)\n";
            } else if (*verify) {
                const LdeParams params = qv_dom.params();
                const GapInstance instance = load_instance_arg(qv_instance);
                const QuantumState state = state_from_json(load_json_file(qv_state));
                const ProofBlocks blocks =
                    proof_blocks_from_json(params.field, load_json_file(qv_blocks));
                const auto rep = sample_qpcp_parallel(instance, state, blocks, params,
                                                      qv_dom.degree_bound(), qv_trials,
                                                      qv_dom.seed, qv_workers);
                emit(Json{{"trials", rep.trials},
                          {"accepts", rep.accepts},
                          {"accept_rate",
                           rep.trials ? static_cast<double>(rep.accepts) / rep.trials : 0.0},
                          {"one_query_each_run", rep.one_query_each_run},
                          {"failure_stages", rep.failure_stages}},
                     qv_out);
            } else if (*exact) {
                const LdeParams params = qe_dom.params();
                const GapInstance instance = load_instance_arg(qe_instance);
                const QuantumState state = state_from_json(load_json_file(qe_state));
                const ProofBlocks blocks =
                    proof_blocks_from_json(params.field, load_json_file(qe_blocks));
                const double gamma =
                    accept_prob_exact(instance, state, blocks, params, qe_dom.degree_bound());
                emit(Json{{"gamma_exact", gamma}}, qe_out);
            } else if (*decode) {
                const LdeParams params = qd_dom.params();
                const GapInstance instance = load_instance_arg(qd_instance);
                const ProofBlocks blocks =
                    proof_blocks_from_json(params.field, load_json_file(qd_blocks));
                const DecodeReport rep = decode_and_score(blocks, instance, params,
                                                          qd_dom.degree_bound(), qd_gamma);
                Json j{{"assignment", rep.assignment},
                       {"satisfied_fraction", rep.satisfied_fraction},
                       {"best_agr", rep.best_agr}};
                if (rep.gamma) j["gamma"] = *rep.gamma;
                if (rep.gamma4_over_100) j["gamma4_over_100"] = *rep.gamma4_over_100;
                emit(j, qd_out);
            }
        } else if (*demo) {
            const LdeParams params = demo_dom.params();
            const unsigned r = demo_dom.degree_bound();
            std::vector<uint8_t> bits;
            for (char c : demo_table) {
                if (c != '0' && c != '1') throw std::invalid_argument("table must be 0/1 bits");
                bits.push_back(c == '1');
            }
            uint64_t query = 0;
            for (char c : demo_query) {
                if (c != '0' && c != '1') throw std::invalid_argument("query must be 0/1 bits");
                query = query * 2 + (c == '1');
            }
            std::vector<uint32_t> raw(params.domain_size(), 0);
            for (size_t i = 0; i < bits.size(); ++i) raw[i] = bits[i];
            const MultiPoly lde = interpolate_lde(params, data_table_from_values(params, raw));
            const auto strategy = pick_strategy(lde, r, demo_dom.seed, demo_strategy);
            Rng rng(demo_dom.seed);
            const auto res = demo_advice(params, bits, query, *strategy, r, rng);
            emit(Json{{"query", demo_query},
                      {"verdict", res.verdict.to_string()},
                      {"accept", res.accept}},
                 demo_out);
        } else if (*experiment) {
            return cmd_experiment(exp_config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
