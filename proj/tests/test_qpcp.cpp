#include <doctest.h>

#include "oracles.hpp"
#include "qlab/errors.hpp"
#include "qlab/qpcp.hpp"

using namespace qlab;

namespace {

LdeParams desk_params(unsigned a) { return LdeParams(Field(a), 3, 2); }

GapInstance one_predicate_differ() {
    GapInstance x;
    x.m = 2;
    x.s = 1;
    x.q = 2;
    GapPredicate differ;
    differ.vars = {0, 1};
    differ.sat = {{0, 1}, {1, 0}};
    x.predicates = {differ};
    return x;
}

GapInstance arity_one_instance() {
    // Two unary predicates: Y0 = 1 and Y1 = 0.
    GapInstance x;
    x.m = 2;
    x.s = 1;
    x.q = 1;
    GapPredicate p0;
    p0.vars = {0};
    p0.sat = {{1}};
    GapPredicate p1;
    p1.vars = {1};
    p1.sat = {{0}};
    x.predicates = {p0, p1};
    return x;
}

} // namespace

TEST_CASE("instance validation") {
    GapInstance x = gap_unsat_two_predicate();
    x.validate();
    CHECK(x.satisfied_fraction(std::vector<uint32_t>{0, 0}) == doctest::Approx(0.5));
    CHECK(x.satisfied_fraction(std::vector<uint32_t>{0, 1}) == doctest::Approx(0.5));

    GapInstance empty_sat = x;
    empty_sat.predicates[0].sat.clear();
    CHECK_THROWS_AS(empty_sat.validate(), std::invalid_argument);

    GapInstance wide = x;
    wide.predicates[0].vars = {0, 1, 2};
    wide.m = 3;
    CHECK_THROWS_AS(wide.validate(), std::invalid_argument);
}

TEST_CASE("variable embedding and padding") {
    const LdeParams params = desk_params(2);
    const GapInstance pair_instance = gap_unsat_two_predicate();
    const EmbeddedInstance emb = embed_variables(pair_instance, params);
    // two distinct points span affine dimension 1 = q-1: no padding
    CHECK(emb.tau[0].size() == 2);
    CHECK(emb.tau_hat[0].size() == 2);
    CHECK(emb.tau_span[0].rank() == 1);
    CHECK(emb.tau[0][0] == params.pi_inverse(0));
    CHECK(emb.tau[0][1] == params.pi_inverse(1));

    // single-variable predicates with q = 2 get one padding point
    GapInstance unary;
    unary.m = 1;
    unary.s = 1;
    unary.q = 2;
    GapPredicate p;
    p.vars = {0};
    p.sat = {{1}};
    unary.predicates = {p};
    const EmbeddedInstance emb2 = embed_variables(unary, params);
    CHECK(emb2.tau[0].size() == 1);
    CHECK(emb2.tau_hat[0].size() == 2);
    CHECK(emb2.tau_span[0].rank() == 1);
    // padded set contains the original
    CHECK(emb2.tau_hat[0][0] == emb2.tau[0][0]);

    // preconditions
    const LdeParams small(Field(2), 2, 2);
    CHECK_THROWS_AS(embed_variables(pair_instance, small), std::invalid_argument); // d < q+1
    GapInstance big = pair_instance;
    big.m = 100;
    big.predicates[0].vars = {0, 99};
    big.predicates[1].vars = {0, 1};
    CHECK_THROWS_AS(embed_variables(big, params), std::invalid_argument); // m > |H|^d
}

TEST_CASE("correct proofs: structure and block counts") {
    const LdeParams params = desk_params(2);
    const unsigned r = params.default_degree_bound(); // 3

    // q = 2 at d = 3: the only 3-dimensional subspace is F^3 itself.
    const GapInstance inst = one_predicate_differ();
    const CorrectProof proof = build_correct_proof(inst, {0, 1}, params, r);
    CHECK(proof.blocks.all().size() == 1);
    CHECK(proof.state.qlde_form());

    // q = 1 at d = 3 over GF(4): 21 planes through each variable point.
    const GapInstance inst1 = arity_one_instance();
    const CorrectProof proof1 = build_correct_proof(inst1, {1, 0}, params, r);
    const EmbeddedInstance emb = embed_variables(inst1, params);
    uint64_t expected = 0;
    for (uint32_t j = 0; j < inst1.k(); ++j)
        expected += all_superspaces(emb.tau_span[j], inst1.q + 1).size();
    CHECK(expected == 42); // 21 per unary predicate
    CHECK(proof1.blocks.all().size() == expected);

    // refusal on non-satisfying assignments
    CHECK_THROWS_AS(build_correct_proof(inst, {0, 0}, params, r), std::invalid_argument);
    // the formatting entry point accepts them
    CHECK(format_proof(inst, {0, 0}, params, r).blocks.all().size() == 1);
}

TEST_CASE("blocks induce the assignment values") {
    const LdeParams params = desk_params(2);
    const unsigned r = params.default_degree_bound();
    const GapInstance inst = one_predicate_differ();
    const std::vector<uint32_t> assignment{1, 0};
    const CorrectProof proof = build_correct_proof(inst, assignment, params, r);
    const EmbeddedInstance emb = embed_variables(inst, params);

    for (const auto& [key, block] : proof.blocks.all()) {
        CHECK(block.total_degree() <= r);
        // reconstruct the canonical subspace from the stored key
        const auto supers = all_superspaces(emb.tau_span[key.first], inst.q + 1);
        for (const auto& s : supers) {
            if (subspace_key(s) != key.second) continue;
            for (size_t i = 0; i < emb.tau[key.first].size(); ++i) {
                const auto coords = coords_in_subspace(s, emb.tau[key.first][i]);
                REQUIRE(coords.has_value());
                const uint32_t var = inst.predicates[key.first].vars[i];
                CHECK(block.evaluate(*coords).value == assignment[var]);
            }
        }
    }
}

TEST_CASE("verification accepts correct proofs and reads one block per run") {
    const LdeParams params = desk_params(2);
    const unsigned r = params.default_degree_bound();
    const GapInstance inst = one_predicate_differ();
    const CorrectProof proof = build_correct_proof(inst, {1, 0}, params, r);

    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
        const VerdictReport rep = verify_once(inst, proof.state, proof.blocks, params, r, rng);
        CHECK(rep.accept);
        CHECK(rep.blocks_read == 1);
        CHECK(rep.stage_name() == "none");
    }
    CHECK(proof.blocks.reads() == 100);
}

TEST_CASE("all-zero blocks fail the predicate stage") {
    const LdeParams params = desk_params(2);
    const unsigned r = params.default_degree_bound();
    const GapInstance inst = one_predicate_differ(); // zeros do not satisfy Y0 != Y1
    CorrectProof proof = build_correct_proof(inst, {1, 0}, params, r);
    for (auto& [key, block] : proof.blocks.mutable_all()) {
        (void)key;
        block = MultiPoly(params.field, inst.q + 1); // constant zero
    }
    Rng rng(22);
    for (int i = 0; i < 50; ++i) {
        const VerdictReport rep = verify_once(inst, proof.state, proof.blocks, params, r, rng);
        CHECK(!rep.accept);
        CHECK(rep.stage_name() == "block_predicate");
    }
    CHECK(accept_prob_exact(inst, proof.state, proof.blocks, params, r) == doctest::Approx(0.0));
}

TEST_CASE("a y-shifted state fails the projection stage") {
    const LdeParams params = desk_params(2);
    const unsigned r = params.default_degree_bound();
    const GapInstance inst = one_predicate_differ();
    const CorrectProof proof = build_correct_proof(inst, {1, 0}, params, r);

    QuantumState shifted(params.field, params.d);
    const uint32_t q = params.field.order();
    for (const auto& [k, a] : proof.state.amplitudes())
        shifted.set_amplitude_key((k / q) * q + ((k % q) ^ 1u), a);

    Rng rng(23);
    for (int i = 0; i < 50; ++i) {
        const VerdictReport rep = verify_once(inst, shifted, proof.blocks, params, r, rng);
        CHECK(!rep.accept);
        CHECK(rep.stage_name() == "projection");
    }
    CHECK(accept_prob_exact(inst, shifted, proof.blocks, params, r) == doctest::Approx(0.0));
}

TEST_CASE("missing blocks reject at the degree stage") {
    const LdeParams params = desk_params(2);
    const unsigned r = params.default_degree_bound();
    const GapInstance inst = one_predicate_differ();
    CorrectProof proof = build_correct_proof(inst, {1, 0}, params, r);
    proof.blocks.mutable_all().clear();
    Rng rng(24);
    const VerdictReport rep = verify_once(inst, proof.state, proof.blocks, params, r, rng);
    CHECK(!rep.accept);
    CHECK(rep.stage_name() == "block_degree");
    CHECK(rep.blocks_read == 1);
}

TEST_CASE("exact acceptance is 1 on correct proofs, for both arities") {
    const LdeParams params = desk_params(2);
    const unsigned r = params.default_degree_bound();

    const GapInstance inst = one_predicate_differ();
    const CorrectProof proof = build_correct_proof(inst, {1, 0}, params, r);
    CHECK(accept_prob_exact(inst, proof.state, proof.blocks, params, r) ==
          doctest::Approx(1.0).epsilon(1e-12));

    const GapInstance inst1 = arity_one_instance();
    const CorrectProof proof1 = build_correct_proof(inst1, {1, 0}, params, r);
    CHECK(accept_prob_exact(inst1, proof1.state, proof1.blocks, params, r) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sampled verification matches the exact probability") {
    const LdeParams params = desk_params(2);
    const unsigned r = params.default_degree_bound();
    const GapInstance inst = gap_unsat_two_predicate();
    const CorrectProof proof = format_proof(inst, {0, 0}, params, r);
    const double gamma = accept_prob_exact(inst, proof.state, proof.blocks, params, r);
    CHECK(gamma == doctest::Approx(0.5).epsilon(1e-12));

    Rng rng(31);
    uint64_t accepts = 0;
    const uint64_t trials = 20000;
    for (uint64_t i = 0; i < trials; ++i) {
        const auto rep = verify_once(inst, proof.state, proof.blocks, params, r, rng);
        CHECK(rep.blocks_read == 1);
        if (rep.accept) ++accepts;
    }
    CHECK(oracles::binomial_within(accepts, trials, gamma));
}

TEST_CASE("gap-unsat proofs accept with probability exactly one half") {
    const LdeParams params = desk_params(2);
    const unsigned r = params.default_degree_bound();
    const GapInstance inst = gap_unsat_two_predicate();
    for (uint32_t a0 : {0u, 1u})
        for (uint32_t a1 : {0u, 1u}) {
            const CorrectProof proof = format_proof(inst, {a0, a1}, params, r);
            const double gamma = accept_prob_exact(inst, proof.state, proof.blocks, params, r);
            CHECK(gamma == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(gamma < 1.0);
        }
}

TEST_CASE("acceptance of a formatted proof equals its satisfied fraction") {
    // A block passes its checks iff the generating assignment satisfies the
    // predicate, and then projects perfectly, so gamma collapses to the
    // satisfied fraction. Strictly below 1 whenever a predicate is missed.
    const LdeParams params = desk_params(2);
    const unsigned r = params.default_degree_bound();
    Rng rng(50);
    std::vector<uint32_t> planted;
    const GapInstance inst = random_planted_instance(4, 1, 2, 4, rng, &planted);

    for (int rep = 0; rep < 4; ++rep) {
        std::vector<uint32_t> assignment = planted;
        for (int flips = 0; flips < rep; ++flips)
            assignment[rng.below(assignment.size())] ^= 1u;
        const CorrectProof proof = format_proof(inst, assignment, params, r);
        const double fraction = inst.satisfied_fraction(assignment);
        const double gamma = accept_prob_exact(inst, proof.state, proof.blocks, params, r);
        CHECK(gamma == doctest::Approx(fraction).epsilon(1e-12));
        if (fraction < 1.0) CHECK(gamma < 1.0);
    }
}

TEST_CASE("odd-cycle instance accepts with probability exactly 2/3") {
    // Three difference constraints on a 3-cycle: the best assignment misses
    // one predicate, and the formatted proof's acceptance is the correctly
    // rounded 2/3.
    GapInstance tri;
    tri.m = 3;
    tri.s = 1;
    tri.q = 2;
    GapPredicate d01, d12, d02;
    d01.vars = {0, 1};
    d12.vars = {1, 2};
    d02.vars = {0, 2};
    d01.sat = d12.sat = d02.sat = {{0, 1}, {1, 0}};
    tri.predicates = {d01, d12, d02};

    const LdeParams params = desk_params(4);
    const CorrectProof proof = format_proof(tri, {0, 1, 0}, params, 3);
    const double gamma = accept_prob_exact(tri, proof.state, proof.blocks, params, 3);
    CHECK(gamma == 2.0 / 3.0); // bitwise: one division at the end
}

TEST_CASE("decoding recovers the generating assignment") {
    // GF(2) keeps the brute-force budget tiny: 2^8 multilinear candidates.
    const LdeParams params = desk_params(1);
    const unsigned r = params.default_degree_bound();

    const GapInstance inst = one_predicate_differ();
    const CorrectProof proof = build_correct_proof(inst, {1, 0}, params, r);
    const double gamma = accept_prob_exact(inst, proof.state, proof.blocks, params, r);
    CHECK(gamma == doctest::Approx(1.0).epsilon(1e-9));
    const DecodeReport rep = decode_and_score(proof.blocks, inst, params, r, gamma);
    CHECK(rep.assignment == std::vector<uint32_t>{1, 0});
    CHECK(rep.satisfied_fraction == doctest::Approx(1.0));
    CHECK(rep.best_agr == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(rep.bound_holds.has_value());
    CHECK(*rep.bound_holds);

    // gap-unsat: satisfied fraction equals the generating assignment's
    const GapInstance unsat = gap_unsat_two_predicate();
    for (uint32_t a0 : {0u, 1u})
        for (uint32_t a1 : {0u, 1u}) {
            const CorrectProof p = format_proof(unsat, {a0, a1}, params, r);
            const DecodeReport d = decode_and_score(p.blocks, unsat, params, r);
            CHECK(d.satisfied_fraction == doctest::Approx(0.5));
            CHECK(d.assignment == std::vector<uint32_t>{a0, a1});
        }

    // the brute-force budget guards the big field
    const LdeParams params16 = desk_params(4);
    const GapInstance inst16 = one_predicate_differ();
    const CorrectProof proof16 = build_correct_proof(inst16, {1, 0}, params16, 3);
    CHECK_THROWS_AS(decode_and_score(proof16.blocks, inst16, params16, 3), ResourceError);
}

TEST_CASE("line-count ratios behind the soundness claim") {
    const Field f(2);
    const LdeParams params(f, 3, 2);

    // arity-1 analog: tau is a single point, S ranges over planes
    const std::vector<Point> tau_point{params.pi_inverse(0)};
    const LineRatioReport rep = claim_ratio_check(f, 3, tau_point, 1);
    CHECK(rep.total_lines == 336);
    CHECK(rep.superspaces == 21);
    CHECK(rep.lprime_over_l == doctest::Approx(1.0 - 1.0 / 16));
    CHECK(rep.min_ls_ratio == doctest::Approx(0.75));
    CHECK(rep.lprime_over_l > 1.0 - 1.0 / 4);  // claim: > 1 - 1/|F|
    CHECK(rep.min_ls_ratio > 1.0 - 2.0 / 4);   // claim: > 1 - 2/|F|

    // arity-2 at d = q+1: S is all of F^3; the per-S ratio still clears the
    // claimed margin even though the generic-dimension hypothesis is tight
    const std::vector<Point> tau_line{params.pi_inverse(0), params.pi_inverse(1)};
    const LineRatioReport rep2 = claim_ratio_check(f, 3, tau_line, 2);
    CHECK(rep2.superspaces == 1);
    CHECK(rep2.lprime_over_l == doctest::Approx(240.0 / 336.0));
    CHECK(rep2.min_ls_ratio == doctest::Approx(240.0 / 336.0));
    CHECK(rep2.min_ls_ratio > 1.0 - 2.0 / 4);
}

TEST_CASE("verifier acceptance matches enumeration over all of its randomness") {
    // Independent oracle at GF(2), d=3: walk every invertible relabeling,
    // every prefix outcome, and every predicate choice; read the stored block,
    // apply its checks, restrict it to the induced line, and average the
    // projection probabilities directly.
    const LdeParams params(Field(1), 3, 2);
    const Field& f = params.field;
    const unsigned r = params.default_degree_bound();
    const GapInstance inst = gap_unsat_two_predicate();
    const CorrectProof proof = format_proof(inst, {1, 0}, params, r);
    const EmbeddedInstance emb = embed_variables(inst, params);

    double total = 0.0;
    uint64_t invertible = 0;
    for (uint32_t idx = 0; idx < 512; ++idx) { // all 3x3 matrices over GF(2)
        std::vector<FieldElem> m;
        uint32_t rest = idx;
        for (int i = 0; i < 9; ++i) {
            m.push_back(f.elem(rest & 1));
            rest >>= 1;
        }
        const LinearMap e(f, 3, std::move(m));
        if (!e.is_invertible()) continue;
        ++invertible;
        for (uint32_t b = 0; b < 4; ++b) {
            const auto [u, v] =
                solve_line_from_prefix(e, {f.elem(b >> 1), f.elem(b & 1)});
            const Line line = line_through(u, v);
            for (uint32_t j = 0; j < inst.k(); ++j) {
                const AffineSubspace s0 = smallest_affine_containing(line, emb.tau_hat[j]);
                const AffineSubspace s = s0.rank() == 3
                                             ? canonical_subspace(s0)
                                             : canonical_subspace(all_superspaces(s0, 3).front());
                const MultiPoly* block = proof.blocks.peek(j, subspace_key(s));
                REQUIRE(block != nullptr);
                if (block->total_degree() > r) continue;
                // predicate check on the induced variable values
                std::vector<uint32_t> tuple;
                for (const auto& p : emb.tau[j])
                    tuple.push_back(block->evaluate(*coords_in_subspace(s, p)).value);
                if (!inst.predicates[j].satisfied_by(tuple)) continue;
                // block restricted to the line, in the (u, v) parameterization
                std::complex<double> ip(0.0, 0.0);
                const double e1_amp = 1.0 / std::sqrt(2.0);
                for (uint32_t t = 0; t < 2; ++t) {
                    const Point z = line.at(f.elem(t));
                    const FieldElem g = block->evaluate(*coords_in_subspace(s, z));
                    ip += e1_amp * proof.state.amplitude(z, g);
                }
                total += std::norm(ip) / inst.k();
            }
        }
    }
    CHECK(invertible == 168); // |GL(3, GF(2))|
    const double direct = total / static_cast<double>(invertible);
    const double closed = accept_prob_exact(inst, proof.state, proof.blocks, params, r);
    CHECK(direct == doctest::Approx(closed).epsilon(1e-12));
    CHECK(direct == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("planted instances are satisfiable and round the prover") {
    Rng rng(40);
    std::vector<uint32_t> planted;
    const GapInstance inst = random_planted_instance(4, 1, 2, 3, rng, &planted);
    inst.validate();
    CHECK(inst.satisfied_fraction(planted) == doctest::Approx(1.0));
    const LdeParams params = desk_params(2);
    const CorrectProof proof = build_correct_proof(inst, planted, params, 3);
    CHECK(accept_prob_exact(inst, proof.state, proof.blocks, params, 3) ==
          doctest::Approx(1.0).epsilon(1e-12));
}
