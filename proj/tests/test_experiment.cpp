#include <doctest.h>

#include "oracles.hpp"
#include "qlab/experiment.hpp"

using namespace qlab;

TEST_CASE("advice demo: parity table with an honest prover") {
    // 16 bits over H^2 with |H| = 4, GF(16): table[i] = parity of i's bits.
    const LdeParams params(Field(4), 2, 4);
    const unsigned r = params.default_degree_bound();
    std::vector<uint8_t> table(16);
    std::vector<uint32_t> raw(16);
    for (uint32_t i = 0; i < 16; ++i) {
        table[i] = static_cast<uint8_t>(__builtin_popcount(i) & 1);
        raw[i] = table[i];
    }
    const MultiPoly lde = interpolate_lde(params, data_table_from_values(params, raw));
    const auto honest = honest_strategy(lde);

    Rng rng(1);
    for (uint32_t query = 0; query < 16; ++query) {
        const auto res = demo_advice(params, table, query, *honest, r, rng);
        CHECK(res.accept == (table[query] == 1));
    }

    // all-zeros table always rejects
    const std::vector<uint8_t> zeros(16, 0);
    const MultiPoly zlde =
        interpolate_lde(params, data_table_from_values(params, std::vector<uint32_t>(16, 0)));
    const auto zhonest = honest_strategy(zlde);
    for (uint32_t query = 0; query < 16; ++query)
        CHECK(!demo_advice(params, zeros, query, *zhonest, r, rng).accept);

    CHECK_THROWS_AS(demo_advice(params, std::vector<uint8_t>(32, 0), 0, *honest, r, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(demo_advice(params, std::vector<uint8_t>(3, 0), 0, *honest, r, rng),
                    std::invalid_argument);
}

TEST_CASE("advice demo: cheating on a zero entry is caught") {
    // On a 0-entry, the exact probability that a suite cheat extracts an
    // accept is bounded by the dense-cheat rate N*r/|F|^d.
    const LdeParams params(Field(4), 2, 4);
    const unsigned r = params.default_degree_bound();
    std::vector<uint32_t> raw(16, 0);
    raw[3] = 1;
    const DataTable data = data_table_from_values(params, raw);
    const MultiPoly lde = interpolate_lde(params, data);
    Rng rng(2);
    const auto suite = adversary_suite(lde, r, rng);
    const Point w = params.pi_inverse(0); // a 0-entry
    const double dense_bound =
        static_cast<double>(num_directions(params.field, 2) * r) / 256.0;
    for (const auto& strategy : suite) {
        const auto dist = exact_r1_distribution(data, params, w, *strategy, r);
        const double accept = dist.prob(Verdict::value(params.field.one()));
        CHECK(accept <= dense_bound + 1e-12);
    }
}

TEST_CASE("retrieval experiment: honest completeness and reproducibility") {
    ExperimentConfig c;
    c.kind = "retrieval";
    c.a = 2;
    c.d = 2;
    c.h_size = 2;
    c.seed = 42;
    c.trials = 2000;
    c.workers = 3;
    c.adversaries = {"honest"};

    const TrialReport rep1 = run_experiment(c);
    CHECK(rep1.pass);
    const auto& strat = rep1.json.at("strategies").at(0);
    CHECK(strat.at("wrong_prob_exact").get<double>() == 0.0);
    CHECK(strat.at("exact").at("counts").size() == 1); // only the correct value

    // byte-identical on re-run
    const TrialReport rep2 = run_experiment(c);
    CHECK(rep1.json.dump() == rep2.json.dump());
    CHECK(rep1.csv == rep2.csv);

    // a different seed moves the sampled counts
    ExperimentConfig c2 = c;
    c2.seed = 43;
    const TrialReport rep3 = run_experiment(c2);
    CHECK(rep3.json.dump() != rep1.json.dump());
}

TEST_CASE("retrieval experiment: full adversary suite with sampled gates") {
    ExperimentConfig c;
    c.kind = "retrieval";
    c.a = 2;
    c.d = 2;
    c.h_size = 2;
    c.seed = 77;
    c.trials = 3000;
    c.workers = 2;

    const TrialReport rep = run_experiment(c);
    CHECK(rep.pass); // every strategy's sampled counts sit within 4 sigma
    CHECK(rep.json.at("strategies").size() == 6);
    for (const auto& s : rep.json.at("strategies")) {
        CHECK(s.at("sampled_within_4sigma").get<bool>());
        // the dense-cheat ceiling holds for each strategy
        CHECK(s.at("wrong_prob_exact").get<double>() <= 10.0 / 16 + 1e-12);
    }
    CHECK(!rep.csv.empty());
}

TEST_CASE("qldt experiment: sampled gamma within four sigma of exact") {
    ExperimentConfig c;
    c.kind = "qldt";
    c.a = 2;
    c.d = 2;
    c.h_size = 2;
    c.seed = 7;
    c.trials = 5000;
    c.workers = 2;
    c.corrupt_lines = 3;
    c.state_noise = 0.3;

    const TrialReport rep = run_experiment(c);
    CHECK(rep.pass);
    const double exact = rep.json.at("gamma_exact").get<double>();
    const double sampled = rep.json.at("gamma_sampled").get<double>();
    const double sd = std::sqrt(exact * (1 - exact) / 5000);
    CHECK(std::abs(sampled - exact) <= 4 * sd + 1e-3);
    CHECK(rep.json.at("holds").get<bool>());
}

TEST_CASE("qpcp experiment: correct proof accepts everywhere") {
    ExperimentConfig c;
    c.kind = "qpcp";
    c.a = 2;
    c.d = 3;
    c.h_size = 2;
    c.seed = 9;
    c.trials = 500;
    c.workers = 2;
    c.instance = "planted:4,3";
    c.decode = false;

    const TrialReport rep = run_experiment(c);
    CHECK(rep.pass);
    CHECK(rep.json.at("gamma_exact").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.json.at("sampled").at("accepts").get<uint64_t>() == 500);
    CHECK(rep.json.at("sampled").at("one_query_each_run").get<bool>());
}

TEST_CASE("config json round-trip") {
    Json j{{"kind", "retrieval"}, {"a", 2},       {"d", 2},          {"h_size", 2},
           {"seed", 5},           {"trials", 10}, {"mode", "exact"}, {"adversaries", {"honest"}}};
    const ExperimentConfig c = experiment_config_from_json(j);
    CHECK(c.kind == "retrieval");
    CHECK(c.trials == 10);
    const Json back = experiment_config_to_json(c);
    const ExperimentConfig c2 = experiment_config_from_json(back);
    CHECK(experiment_config_to_json(c2) == back);
}

TEST_CASE("worker substreams merge deterministically") {
    const LdeParams params(Field(2), 2, 2);
    const DataTable data = data_table_from_values(params, {0, 1, 2, 3});
    const MultiPoly lde = interpolate_lde(params, data);
    const QuantumState state = build_qlde_state(params, data);
    const auto honest = honest_strategy(lde);
    const Point w = params.pi_inverse(2);

    const auto d1 = sample_r1_parallel(state, w, *honest, 2, 999, 77, 4);
    const auto d2 = sample_r1_parallel(state, w, *honest, 2, 999, 77, 4);
    CHECK(d1.counts == d2.counts);
    CHECK(d1.total == 999);
}
