#include "qlab/qpcp.hpp"

#include <algorithm>
#include <set>

#include "qlab/errors.hpp"
#include "qlab/util.hpp"

namespace qlab {

bool GapPredicate::satisfied_by(std::span<const uint32_t> tuple) const {
    if (tuple.size() != vars.size()) return false;
    for (const auto& row : sat)
        if (std::equal(row.begin(), row.end(), tuple.begin(), tuple.end())) return true;
    return false;
}

void GapInstance::validate() const {
    if (predicates.empty()) throw std::invalid_argument("GapInstance: no predicates");
    const uint32_t vals = 1u << s;
    for (const auto& p : predicates) {
        if (p.vars.empty() || p.vars.size() > q)
            throw std::invalid_argument("GapInstance: predicate arity out of range");
        if (!std::is_sorted(p.vars.begin(), p.vars.end()) ||
            std::adjacent_find(p.vars.begin(), p.vars.end()) != p.vars.end())
            throw std::invalid_argument("GapInstance: variable sets must be sorted and distinct");
        for (uint32_t v : p.vars)
            if (v >= m) throw std::invalid_argument("GapInstance: variable index out of range");
        // Two predicates may share a variable set; blocks are keyed by the
        // predicate index, so no collision arises.
        if (p.sat.empty())
            throw std::invalid_argument("GapInstance: predicate with no satisfying assignment");
        for (const auto& row : p.sat) {
            if (row.size() != p.vars.size())
                throw std::invalid_argument("GapInstance: satisfying tuple arity mismatch");
            for (uint32_t v : row)
                if (v >= vals) throw std::invalid_argument("GapInstance: tuple value out of range");
        }
    }
}

double GapInstance::satisfied_fraction(std::span<const uint32_t> assignment) const {
    if (assignment.size() != m) throw std::invalid_argument("GapInstance: assignment size");
    uint32_t hits = 0;
    std::vector<uint32_t> tuple;
    for (const auto& p : predicates) {
        tuple.clear();
        for (uint32_t v : p.vars) tuple.push_back(assignment[v]);
        if (p.satisfied_by(tuple)) ++hits;
    }
    return static_cast<double>(hits) / k();
}

EmbeddedInstance embed_variables(const GapInstance& instance, const LdeParams& params) {
    instance.validate();
    if (instance.m > params.domain_size())
        throw std::invalid_argument("embed_variables: more variables than |H|^d");
    if (params.d < instance.q + 1)
        throw std::invalid_argument("embed_variables: need d >= q+1");
    if ((1ull << instance.s) > params.field.order())
        throw std::invalid_argument("embed_variables: variable values do not embed into F");

    EmbeddedInstance out;
    for (const auto& pred : instance.predicates) {
        std::vector<Point> tau;
        for (uint32_t i : pred.vars) tau.push_back(params.pi_inverse(i));
        std::vector<Point> tau_hat = tau;

        const unsigned target = instance.q - 1;
        auto span_dim = [&] { return affine_span(tau_hat).rank(); };
        unsigned dim = span_dim();
        for (uint64_t idx = 0; idx < params.domain_size() && dim < target; ++idx) {
            Point cand = params.pi_inverse(idx);
            if (std::find(tau_hat.begin(), tau_hat.end(), cand) != tau_hat.end()) continue;
            tau_hat.push_back(cand);
            const unsigned nd = span_dim();
            if (nd > dim) {
                dim = nd;
            } else {
                tau_hat.pop_back();
            }
        }
        if (dim != target)
            throw std::invalid_argument("embed_variables: cannot pad tau to dimension q-1");
        out.tau.push_back(std::move(tau));
        out.tau_span.push_back(affine_span(tau_hat));
        out.tau_hat.push_back(std::move(tau_hat));
    }
    return out;
}

void ProofBlocks::put(uint32_t j, const AffineSubspace& s, MultiPoly block) {
    blocks_.insert_or_assign(Key{j, subspace_key(s)}, std::move(block));
}

const MultiPoly* ProofBlocks::read(uint32_t j, const std::vector<uint64_t>& skey) const {
    ++reads_;
    return peek(j, skey);
}

const MultiPoly* ProofBlocks::peek(uint32_t j, const std::vector<uint64_t>& skey) const {
    auto it = blocks_.find(Key{j, skey});
    return it == blocks_.end() ? nullptr : &it->second;
}

CorrectProof format_proof(const GapInstance& instance, const std::vector<uint32_t>& assignment,
                          const LdeParams& params, unsigned r) {
    const EmbeddedInstance embedded = embed_variables(instance, params);
    if (assignment.size() != instance.m)
        throw std::invalid_argument("format_proof: assignment size mismatch");
    for (uint32_t v : assignment)
        if (v >= (1u << instance.s))
            throw std::invalid_argument("format_proof: assignment value out of range");

    // Dummy variables pad the table to |H|^d.
    std::vector<uint32_t> table(params.domain_size(), 0);
    std::copy(assignment.begin(), assignment.end(), table.begin());
    const DataTable data = data_table_from_values(params, table);
    const MultiPoly lde = interpolate_lde(params, data);

    CorrectProof proof{build_qlde_state(params, data), {}};
    for (uint32_t j = 0; j < instance.k(); ++j) {
        for (const auto& s : all_superspaces(embedded.tau_span[j], instance.q + 1))
            proof.blocks.put(j, s, restrict_to_subspace(lde, s));
    }
    (void)r;
    return proof;
}

CorrectProof build_correct_proof(const GapInstance& instance,
                                 const std::vector<uint32_t>& assignment, const LdeParams& params,
                                 unsigned r) {
    if (assignment.size() != instance.m)
        throw std::invalid_argument("build_correct_proof: assignment size mismatch");
    if (instance.satisfied_fraction(assignment) < 1.0)
        throw std::invalid_argument(
            "build_correct_proof: assignment does not satisfy every predicate");
    return format_proof(instance, assignment, params, r);
}

std::string VerdictReport::stage_name() const {
    switch (failure_stage) {
    case Stage::None:
        return "none";
    case Stage::BlockDegree:
        return "block_degree";
    case Stage::BlockPredicate:
        return "block_predicate";
    case Stage::Projection:
        return "projection";
    }
    return "none";
}

namespace {

// Cached well-formedness verdict of a block along with the values it induces
// at the predicate's variable points.
struct BlockCheck {
    bool present = false;
    bool degree_ok = false;
    bool predicate_ok = false;
    const MultiPoly* block = nullptr;

    bool pass() const { return present && degree_ok && predicate_ok; }
};

BlockCheck check_block(const GapInstance& instance, const EmbeddedInstance& embedded,
                       const MultiPoly* block, uint32_t j, const AffineSubspace& s_canonical,
                       unsigned r) {
    BlockCheck out;
    if (block == nullptr) return out;
    out.present = true;
    out.block = block;
    out.degree_ok = block->total_degree() <= r;
    if (!out.degree_ok) return out;

    const uint32_t vals = 1u << instance.s;
    std::vector<uint32_t> tuple;
    tuple.reserve(embedded.tau[j].size());
    for (const auto& p : embedded.tau[j]) {
        const auto coords = coords_in_subspace(s_canonical, p);
        if (!coords) return out; // tau point outside S: malformed keying
        const FieldElem v = block->evaluate(*coords);
        if (v.value >= vals) {
            out.predicate_ok = false;
            return out;
        }
        tuple.push_back(v.value);
    }
    out.predicate_ok = instance.predicates[j].satisfied_by(tuple);
    return out;
}

// Restriction of a block (a polynomial in the canonical parameters of S) to a
// line given by two of its points, parameterized with p0 at t=0, p1 at t=1.
// Computed by evaluation and interpolation, so the result is the reduced
// (per-variable degree < |F|) representative of the restriction.
UniPoly restrict_block_to_line(const MultiPoly& block, const AffineSubspace& s_canonical,
                               const Point& p0, const Point& p1) {
    const auto c0 = coords_in_subspace(s_canonical, p0);
    const auto c1 = coords_in_subspace(s_canonical, p1);
    if (!c0 || !c1) throw std::logic_error("qpcp: line escapes its subspace");
    const Point dir = sub_points(*c1, *c0);
    if (is_zero_point(dir)) throw std::logic_error("qpcp: degenerate line in subspace");
    const Field& field = block.field();
    const uint32_t q = field.order();
    std::vector<FieldElem> values(q, field.zero());
    Point at(c0->size(), field.zero());
    for (uint32_t t = 0; t < q; ++t) {
        const FieldElem te = field.elem(t);
        for (size_t i = 0; i < at.size(); ++i) at[i] = (*c0)[i] + dir[i] * te;
        values[t] = block.evaluate(at);
    }
    return *fit_univariate(field, values, q - 1);
}

} // namespace

VerdictReport verify_once(const GapInstance& instance, const QuantumState& state,
                          const ProofBlocks& blocks, const LdeParams& params, unsigned r,
                          Rng& rng) {
    const EmbeddedInstance embedded = embed_variables(instance, params);
    state.check_normalized();
    const uint64_t reads_before = blocks.reads();

    // Step I.
    const LinearMap e = random_invertible_map(params.field, params.d, rng);
    const QuantumState transformed = apply_linear_permutation(state, e);
    const PrefixOutcome outcome = measure_prefix(transformed, e, rng);

    // One block, addressed by the random predicate and the induced subspace.
    const uint32_t j = static_cast<uint32_t>(rng.below(instance.k()));
    const AffineSubspace s0 = smallest_affine_containing(outcome.line, embedded.tau_hat[j]);
    const AffineSubspace s = s0.rank() == instance.q + 1
                                 ? canonical_subspace(s0)
                                 : canonical_subspace(random_extension_to_dim(s0, instance.q + 1, rng));

    const MultiPoly* block = blocks.read(j, subspace_key(s));
    VerdictReport report;
    report.blocks_read = blocks.reads() - reads_before;

    const BlockCheck check = check_block(instance, embedded, block, j, s, r);
    if (!check.present || !check.degree_ok) {
        report.failure_stage = VerdictReport::Stage::BlockDegree;
        return report;
    }
    if (!check.predicate_ok) {
        report.failure_stage = VerdictReport::Stage::BlockPredicate;
        return report;
    }

    // Step II against the block's restriction to the measured line, in the
    // measured (u, v) parameterization.
    const UniPoly g = restrict_block_to_line(*check.block, s, outcome.u, outcome.v);
    const LineState e1 = build_line_state(g);
    if (rng.bernoulli(projection_prob(outcome.collapsed, e1))) {
        report.accept = true;
    } else {
        report.failure_stage = VerdictReport::Stage::Projection;
    }
    return report;
}

namespace {

class BlockLineOracle final : public LineOracle {
public:
    BlockLineOracle(GapInstance instance, const ProofBlocks& blocks, LdeParams params, unsigned r)
        : instance_(std::move(instance)), blocks_(blocks), params_(std::move(params)), r_(r),
          embedded_(embed_variables(instance_, params_)) {}

    unsigned degree_bound() const override { return r_; }

    std::vector<OracleEntry> distribution(const Line& canonical) const override {
        const uint32_t k = instance_.k();
        std::vector<OracleEntry> out;
        for (uint32_t j = 0; j < k; ++j) {
            const AffineSubspace s0 = smallest_affine_containing(canonical, embedded_.tau_hat[j]);
            std::vector<AffineSubspace> extensions;
            if (s0.rank() == instance_.q + 1) {
                extensions.push_back(canonical_subspace(s0));
            } else {
                extensions = all_superspaces(s0, instance_.q + 1);
            }
            const uint64_t den = static_cast<uint64_t>(k) * extensions.size();
            for (const auto& s : extensions) {
                const auto& check = cached_check(j, s);
                if (!check.pass()) {
                    out.push_back(OracleEntry::exact(std::nullopt, 1, den));
                } else {
                    out.push_back(OracleEntry::exact(
                        restrict_block_to_line(*check.block, s, canonical.base,
                                               add_points(canonical.base, canonical.dir)),
                        1, den));
                }
            }
        }
        return out;
    }

private:
    const BlockCheck& cached_check(uint32_t j, const AffineSubspace& s) const {
        const auto key = std::make_pair(j, subspace_key(s));
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            const MultiPoly* block = blocks_.peek(j, key.second);
            it = cache_.emplace(key, check_block(instance_, embedded_, block, j, s, r_)).first;
        }
        return it->second;
    }

    GapInstance instance_;
    const ProofBlocks& blocks_;
    LdeParams params_;
    unsigned r_;
    EmbeddedInstance embedded_;
    mutable std::map<std::pair<uint32_t, std::vector<uint64_t>>, BlockCheck> cache_;
};

} // namespace

std::shared_ptr<LineOracle> block_line_oracle(const GapInstance& instance,
                                              const ProofBlocks& blocks, const LdeParams& params,
                                              unsigned r) {
    return std::make_shared<BlockLineOracle>(instance, blocks, params, r);
}

double accept_prob_exact(const GapInstance& instance, const QuantumState& state,
                         const ProofBlocks& blocks, const LdeParams& params, unsigned r) {
    const auto oracle = block_line_oracle(instance, blocks, params, r);
    return qldt_accept_exact(state, *oracle).gamma;
}

DecodeReport decode_and_score(const ProofBlocks& blocks, const GapInstance& instance,
                              const LdeParams& params, unsigned r, std::optional<double> gamma,
                              uint64_t budget) {
    const auto oracle = block_line_oracle(instance, blocks, params, r);
    const BestHResult best = brute_force_best_h(params.field, params.d, *oracle, r, budget);

    DecodeReport report;
    report.best_agr = best.agr;
    const uint32_t vals = 1u << instance.s;
    report.assignment.reserve(instance.m);
    for (uint32_t i = 0; i < instance.m; ++i) {
        const FieldElem v = best.h.evaluate(params.pi_inverse(i));
        report.assignment.push_back(v.value);
    }
    uint32_t hits = 0;
    std::vector<uint32_t> tuple;
    for (const auto& pred : instance.predicates) {
        tuple.clear();
        bool in_range = true;
        for (uint32_t var : pred.vars) {
            if (report.assignment[var] >= vals) in_range = false;
            tuple.push_back(report.assignment[var]);
        }
        if (in_range && pred.satisfied_by(tuple)) ++hits;
    }
    report.satisfied_fraction = static_cast<double>(hits) / instance.k();
    if (gamma) {
        report.gamma = gamma;
        const double g = *gamma;
        report.gamma4_over_100 = g * g * g * g / 100.0;
        report.bound_holds = report.satisfied_fraction >= *report.gamma4_over_100 - 1e-12;
    }
    return report;
}

LineRatioReport claim_ratio_check(const Field& field, unsigned d,
                                  const std::vector<Point>& tau_hat, unsigned arity_q) {
    const auto lines = all_lines(field, d);
    LineRatioReport report;
    report.total_lines = lines.size();

    const AffineSubspace span = affine_span(tau_hat);
    const auto supers = all_superspaces(span, arity_q + 1);
    report.superspaces = supers.size();

    std::map<std::vector<uint64_t>, std::pair<uint64_t, uint64_t>> per_s; // key -> (L_S, L'_S)
    for (const auto& s : supers) per_s.emplace(subspace_key(s), std::make_pair(0ull, 0ull));

    uint64_t lprime = 0;
    for (const auto& line : lines) {
        const AffineSubspace s0 = smallest_affine_containing(line, tau_hat);
        const bool exact_dim = s0.rank() == arity_q + 1;
        if (exact_dim) {
            ++lprime;
            ++per_s.at(subspace_key(s0)).second;
        }
        const Point second = add_points(line.base, line.dir);
        for (const auto& s : supers)
            if (s.contains(line.base) && s.contains(second)) ++per_s.at(subspace_key(s)).first;
    }
    report.lprime_over_l = static_cast<double>(lprime) / lines.size();
    report.min_ls_ratio = 1.0;
    for (const auto& [key, counts] : per_s) {
        (void)key;
        if (counts.first == 0) continue;
        report.min_ls_ratio = std::min(report.min_ls_ratio,
                                       static_cast<double>(counts.second) / counts.first);
    }
    return report;
}

GapInstance gap_unsat_two_predicate() {
    GapInstance x;
    x.m = 2;
    x.s = 1;
    x.q = 2;
    x.eps = 0.5;
    GapPredicate equal;
    equal.vars = {0, 1};
    equal.sat = {{0, 0}, {1, 1}};
    GapPredicate differ;
    differ.vars = {0, 1};
    differ.sat = {{0, 1}, {1, 0}};
    x.predicates = {std::move(equal), std::move(differ)};
    return x;
}

GapInstance random_planted_instance(uint32_t m, uint32_t s, uint32_t q, uint32_t k, Rng& rng,
                                    std::vector<uint32_t>* planted_out) {
    if (m == 0 || k == 0) throw std::invalid_argument("random_planted_instance: empty instance");
    const uint32_t arity = std::min(q, m);
    const uint32_t vals = 1u << s;

    std::vector<uint32_t> planted(m);
    for (auto& v : planted) v = static_cast<uint32_t>(rng.below(vals));

    GapInstance x;
    x.m = m;
    x.s = s;
    x.q = q;
    x.eps = 0.5;

    // Distinct variable sets of size `arity` must exist for every predicate.
    uint64_t distinct_sets = 1;
    for (uint32_t i = 0; i < arity; ++i) distinct_sets = distinct_sets * (m - i) / (i + 1);
    if (k > distinct_sets)
        throw std::invalid_argument("random_planted_instance: more predicates than variable sets");

    std::set<std::vector<uint32_t>> used;
    while (x.predicates.size() < k) {
        std::vector<uint32_t> vars;
        while (vars.size() < arity) {
            const uint32_t v = static_cast<uint32_t>(rng.below(m));
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
        }
        std::sort(vars.begin(), vars.end());
        if (!used.insert(vars).second) continue;
        GapPredicate pred;
        pred.vars = vars;
        std::vector<uint32_t> planted_tuple;
        for (uint32_t v : vars) planted_tuple.push_back(planted[v]);
        // Every tuple is satisfying with probability 1/2; the planted one
        // always is.
        const uint64_t tuples = upow(vals, arity);
        for (uint64_t t = 0; t < tuples; ++t) {
            std::vector<uint32_t> tuple(arity);
            uint64_t rest = t;
            for (uint32_t i = arity; i-- > 0;) {
                tuple[i] = static_cast<uint32_t>(rest % vals);
                rest /= vals;
            }
            if (tuple == planted_tuple || rng.bernoulli(0.5)) pred.sat.push_back(std::move(tuple));
        }
        x.predicates.push_back(std::move(pred));
    }
    if (planted_out) *planted_out = std::move(planted);
    x.validate();
    return x;
}

} // namespace qlab
