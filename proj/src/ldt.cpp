#include "qlab/ldt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qlab/errors.hpp"
#include "qlab/util.hpp"

namespace qlab {

std::optional<UniPoly> LineOracle::draw(const Line& canonical, Rng& rng) const {
    const auto entries = distribution(canonical);
    if (entries.empty()) throw std::logic_error("LineOracle: empty distribution");
    const double target = rng.unit();
    double acc = 0.0;
    for (const auto& e : entries) {
        acc += e.prob;
        if (target < acc) return e.poly;
    }
    return entries.back().poly;
}

namespace {

class HonestLineOracle final : public LineOracle {
public:
    HonestLineOracle(MultiPoly f, unsigned r) : f_(std::move(f)), r_(r) {}
    unsigned degree_bound() const override { return r_; }
    std::vector<OracleEntry> distribution(const Line& canonical) const override {
        return {OracleEntry{restrict_to_line(f_, canonical), 1.0}};
    }

private:
    MultiPoly f_;
    unsigned r_;
};

} // namespace

std::shared_ptr<LineOracle> honest_line_oracle(MultiPoly f, unsigned r) {
    return std::make_shared<HonestLineOracle>(std::move(f), r);
}

MapLineOracle::MapLineOracle(MultiPoly base, unsigned r) : base_(std::move(base)), r_(r) {}

std::vector<OracleEntry> MapLineOracle::distribution(const Line& canonical) const {
    auto it = overrides_.find(line_key(canonical));
    if (it != overrides_.end()) return {OracleEntry{it->second, 1.0}};
    return {OracleEntry{restrict_to_line(base_, canonical), 1.0}};
}

void MapLineOracle::override_line(const Line& canonical, const std::vector<FieldElem>& values) {
    const Field& field = base_.field();
    auto g = fit_univariate(field, values, field.order() - 1);
    overrides_.insert_or_assign(line_key(canonical), std::move(*g));
}

void MapLineOracle::corrupt_point(const Line& canonical, FieldElem t, FieldElem new_value) {
    const Field& field = base_.field();
    const auto entries = distribution(canonical);
    const UniPoly& g = *entries.front().poly;
    std::vector<FieldElem> values;
    values.reserve(field.order());
    for (uint32_t s = 0; s < field.order(); ++s) values.push_back(g.evaluate(field.elem(s)));
    values[t.value] = new_value;
    override_line(canonical, values);
}

MixtureLineOracle::MixtureLineOracle(
    std::vector<std::pair<std::shared_ptr<LineOracle>, double>> parts)
    : parts_(std::move(parts)) {
    double total = 0.0;
    for (const auto& [o, p] : parts_) {
        (void)o;
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("MixtureLineOracle: probabilities must sum to 1");
}

unsigned MixtureLineOracle::degree_bound() const {
    unsigned r = 0;
    for (const auto& [o, p] : parts_) {
        (void)p;
        r = std::max(r, o->degree_bound());
    }
    return r;
}

std::vector<OracleEntry> MixtureLineOracle::distribution(const Line& canonical) const {
    std::vector<OracleEntry> out;
    for (const auto& [o, p] : parts_) {
        for (auto e : o->distribution(canonical))
            out.push_back(OracleEntry::inexact(std::move(e.poly), e.prob * p));
    }
    return out;
}

std::optional<UniPoly> MixtureLineOracle::draw(const Line& canonical, Rng& rng) const {
    const double target = rng.unit();
    double acc = 0.0;
    for (const auto& [o, p] : parts_) {
        acc += p;
        if (target < acc) return o->draw(canonical, rng);
    }
    return parts_.back().first->draw(canonical, rng);
}

// ---- agreement --------------------------------------------------------------

std::vector<uint32_t> evaluation_table(const MultiPoly& p) {
    const uint64_t n = upow(p.field().order(), p.nvars());
    if (n > kEnumerationLimit) throw ResourceError("evaluation_table: domain too large");
    std::vector<uint32_t> out(n);
    for (uint64_t i = 0; i < n; ++i)
        out[i] = p.evaluate(point_from_index(p.field(), p.nvars(), i)).value;
    return out;
}

double agr_functions(const Field& field, unsigned d, std::span<const uint32_t> f,
                     std::span<const uint32_t> f2) {
    const uint64_t n = upow(field.order(), d);
    if (f.size() != n || f2.size() != n)
        throw std::invalid_argument("agr_functions: table size mismatch");
    uint64_t agree = 0;
    for (uint64_t i = 0; i < n; ++i) agree += (f[i] == f2[i]) ? 1 : 0;
    return static_cast<double>(agree) / static_cast<double>(n);
}

double agr_with_oracle(const Field& field, unsigned d, std::span<const uint32_t> f,
                       const LineOracle& oracle) {
    const uint64_t n = upow(field.order(), d);
    if (f.size() != n) throw std::invalid_argument("agr_with_oracle: table size mismatch");
    const auto lines = all_lines(field, d);
    const uint32_t q = field.order();
    double acc = 0.0;
    for (const auto& line : lines) {
        std::vector<uint64_t> pidx(q);
        for (uint32_t t = 0; t < q; ++t) pidx[t] = point_index(line.at(field.elem(t)));
        double line_agr = 0.0;
        for (const auto& entry : oracle.distribution(line)) {
            if (!entry.poly) continue; // malformed: agrees nowhere
            uint64_t agree = 0;
            for (uint32_t t = 0; t < q; ++t)
                if (entry.poly->evaluate(field.elem(t)).value == f[pidx[t]]) ++agree;
            line_agr += entry.prob * static_cast<double>(agree) / q;
        }
        acc += line_agr;
    }
    return acc / static_cast<double>(lines.size());
}

InducedProbFunction induced_f(const QuantumState& state) {
    const Field& field = state.field();
    const uint32_t q = field.order();
    const uint64_t n = upow(q, state.dim_d());
    if (n > kEnumerationLimit) throw ResourceError("induced_f: domain too large");
    InducedProbFunction f{field, state.dim_d(), std::vector<std::vector<double>>(n)};
    for (uint64_t i = 0; i < n; ++i) f.dist[i].assign(q, 0.0);
    std::vector<double> mass(n, 0.0);
    for (const auto& [k, a] : state.amplitudes()) {
        const double m = std::norm(a);
        mass[k / q] += m;
        f.dist[k / q][k % q] += m;
    }
    for (uint64_t i = 0; i < n; ++i) {
        if (mass[i] == 0.0) {
            f.dist[i].assign(q, 1.0 / q); // zero-mass fiber: uniform by convention
        } else {
            for (auto& p : f.dist[i]) p /= mass[i];
        }
    }
    return f;
}

double agr_with_oracle(const InducedProbFunction& f, const LineOracle& oracle) {
    const Field& field = f.field;
    const uint32_t q = field.order();
    const auto lines = all_lines(field, f.d);
    double acc = 0.0;
    for (const auto& line : lines) {
        std::vector<uint64_t> pidx(q);
        for (uint32_t t = 0; t < q; ++t) pidx[t] = point_index(line.at(field.elem(t)));
        double line_agr = 0.0;
        for (const auto& entry : oracle.distribution(line)) {
            if (!entry.poly) continue;
            double agree = 0.0;
            for (uint32_t t = 0; t < q; ++t)
                agree += f.dist[pidx[t]][entry.poly->evaluate(field.elem(t)).value];
            line_agr += entry.prob * agree / q;
        }
        acc += line_agr;
    }
    return acc / static_cast<double>(lines.size());
}

// ---- the test ----------------------------------------------------------------

namespace {

// s = sigma + lambda * t maps the measured (u, v) parameterization onto the
// canonical one.
std::pair<FieldElem, FieldElem> reparam_to_canonical(const Line& canonical, const Line& measured) {
    unsigned pivot = 0;
    while (canonical.dir[pivot].is_zero()) ++pivot;
    const FieldElem lambda = measured.dir[pivot]; // canonical dir has 1 there
    const FieldElem sigma = sub_points(measured.base, canonical.base)[pivot];
    return {sigma, lambda};
}

} // namespace

bool qldt_run_once(const QuantumState& state, const LineOracle& oracle, Rng& rng) {
    state.check_normalized();
    const LinearMap e = random_invertible_map(state.field(), state.dim_d(), rng);
    const QuantumState transformed = apply_linear_permutation(state, e);
    const PrefixOutcome outcome = measure_prefix(transformed, e, rng);

    const Line canon = canonical_line(outcome.line);
    const auto g_canon = oracle.draw(canon, rng);
    if (!g_canon) return false; // malformed assignment read: reject

    const auto [sigma, lambda] = reparam_to_canonical(canon, outcome.line);
    const UniPoly g = g_canon->compose_affine(sigma, lambda);
    const LineState e1 = build_line_state(g);
    return rng.bernoulli(projection_prob(outcome.collapsed, e1));
}

AcceptanceReport qldt_accept_exact(const QuantumState& state, const LineOracle& oracle) {
    state.check_normalized();
    const Field& field = state.field();
    const uint32_t q = field.order();
    const unsigned d = state.dim_d();
    const auto lines = all_lines(field, d);
    const double n_dirs = static_cast<double>(num_directions(field, d));

    // Exact-weight entries are bucketed by denominator across all lines and
    // divided once, so rational acceptance probabilities come out correctly
    // rounded instead of accumulating per-line division error.
    std::map<uint64_t, double> buckets;
    double loose = 0.0;
    for (const auto& line : lines) {
        std::vector<Point> pts = line_points(line);
        for (const auto& entry : oracle.distribution(line)) {
            if (!entry.poly) continue; // rejects outright
            std::complex<double> sum(0.0, 0.0);
            for (uint32_t t = 0; t < q; ++t)
                sum += state.amplitude(pts[t], entry.poly->evaluate(field.elem(t)));
            const double v = std::norm(sum);
            if (entry.den != 0) {
                buckets[entry.den] += static_cast<double>(entry.num) * v;
            } else {
                loose += entry.prob * v;
            }
        }
    }
    double gamma = loose;
    for (const auto& [den, acc] : buckets) gamma += acc / static_cast<double>(den);
    gamma /= q * n_dirs;
    return AcceptanceReport{gamma, "exact", 0, 0.0};
}

AcceptanceReport qldt_sample(const QuantumState& state, const LineOracle& oracle, uint64_t trials,
                             Rng& rng) {
    uint64_t accepts = 0;
    for (uint64_t i = 0; i < trials; ++i)
        if (qldt_run_once(state, oracle, rng)) ++accepts;
    const double p = trials == 0 ? 0.0 : static_cast<double>(accepts) / trials;
    const double se = trials == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / trials);
    return AcceptanceReport{p, "monte_carlo", trials, se};
}

AgreementBoundCheck agreement_lower_bound_check(const QuantumState& state,
                                                const LineOracle& oracle) {
    AgreementBoundCheck out;
    out.gamma = qldt_accept_exact(state, oracle).gamma;
    out.agr_fg = agr_with_oracle(induced_f(state), oracle);
    const double inv_q = 1.0 / state.field().order();
    out.vacuous = out.gamma < inv_q;
    const double delta = out.gamma - inv_q;
    out.rhs = delta * delta;
    out.holds = out.vacuous || out.agr_fg >= out.rhs - 1e-9;
    return out;
}

// ---- brute force -------------------------------------------------------------

BestHResult brute_force_best_h(const Field& field, unsigned d, const LineOracle& oracle,
                               unsigned r, uint64_t budget) {
    const uint32_t q = field.order();
    const uint64_t npoints = upow(q, d);
    if (npoints > kEnumerationLimit) throw ResourceError("brute_force_best_h: domain too large");

    // Reduced monomials of total degree <= r, in exponent-lex order.
    std::vector<std::vector<uint16_t>> monomials;
    std::vector<uint16_t> exps(d, 0);
    const unsigned cap = std::min<unsigned>(r, q - 1);
    std::function<void(unsigned, unsigned)> gen = [&](unsigned var, unsigned used) {
        if (var == d) {
            monomials.push_back(exps);
            return;
        }
        for (unsigned e = 0; e + used <= r && e <= cap; ++e) {
            exps[var] = static_cast<uint16_t>(e);
            gen(var + 1, used + e);
        }
        exps[var] = 0;
    };
    gen(0, 0);

    const uint64_t total = upow(q, static_cast<unsigned>(monomials.size()));
    if (total > budget)
        throw ResourceError("brute_force_best_h: candidate space exceeds budget");

    // Monomial evaluation tables over all points.
    std::vector<std::vector<uint32_t>> mono_eval(monomials.size());
    for (size_t m = 0; m < monomials.size(); ++m) {
        MultiPoly mono(field, d);
        mono.add_term(monomials[m], field.one());
        mono_eval[m] = evaluation_table(mono);
    }

    // Oracle values per line, flattened; reject entries marked with q.
    const auto lines = all_lines(field, d);
    struct LineData {
        std::vector<uint64_t> pidx;
        std::vector<std::pair<double, std::vector<uint32_t>>> entries;
    };
    std::vector<LineData> line_data;
    line_data.reserve(lines.size());
    for (const auto& line : lines) {
        LineData ld;
        ld.pidx.resize(q);
        for (uint32_t t = 0; t < q; ++t) ld.pidx[t] = point_index(line.at(field.elem(t)));
        for (const auto& entry : oracle.distribution(line)) {
            std::vector<uint32_t> vals(q, q); // q = never matches
            if (entry.poly)
                for (uint32_t t = 0; t < q; ++t)
                    vals[t] = entry.poly->evaluate(field.elem(t)).value;
            ld.entries.emplace_back(entry.prob, std::move(vals));
        }
        line_data.push_back(std::move(ld));
    }

    std::vector<uint32_t> h_vals(npoints);
    std::vector<uint32_t> digits(monomials.size(), 0); // coefficient of each monomial
    double best_agr = -1.0;
    std::vector<uint32_t> best_digits;

    for (uint64_t cand = 0; cand < total; ++cand) {
        // Coefficient vector in lexicographic order: first monomial most
        // significant.
        uint64_t rest = cand;
        for (size_t m = monomials.size(); m-- > 0;) {
            digits[m] = static_cast<uint32_t>(rest % q);
            rest /= q;
        }
        std::fill(h_vals.begin(), h_vals.end(), 0);
        for (size_t m = 0; m < monomials.size(); ++m) {
            if (digits[m] == 0) continue;
            const FieldElem c = field.elem(digits[m]);
            const auto& tbl = mono_eval[m];
            for (uint64_t i = 0; i < npoints; ++i)
                h_vals[i] ^= (field.elem(tbl[i]) * c).value;
        }
        double acc = 0.0;
        for (const auto& ld : line_data) {
            double line_agr = 0.0;
            for (const auto& [prob, vals] : ld.entries) {
                unsigned agree = 0;
                for (uint32_t t = 0; t < q; ++t)
                    if (vals[t] == h_vals[ld.pidx[t]]) ++agree;
                line_agr += prob * static_cast<double>(agree) / q;
            }
            acc += line_agr;
        }
        acc /= static_cast<double>(line_data.size());
        if (acc > best_agr + 1e-12) {
            best_agr = acc;
            best_digits = digits;
        }
    }

    MultiPoly h(field, d);
    for (size_t m = 0; m < monomials.size(); ++m)
        if (best_digits[m] != 0) h.add_term(monomials[m], field.elem(best_digits[m]));
    return BestHResult{std::move(h), best_agr, total};
}

// ---- instance generators -------------------------------------------------------

QuantumState perturbed_qlde_state(const LdeParams& params, const DataTable& data, double noise,
                                  bool complex_phase, Rng& rng) {
    QuantumState state = build_qlde_state(params, data);
    if (noise <= 0.0) return state;
    QuantumState out(params.field, params.d);
    const uint32_t q = params.field.order();
    const uint64_t npoints = upow(q, params.d);
    for (uint64_t i = 0; i < npoints; ++i) {
        const Point z = point_from_index(params.field, params.d, i);
        for (uint32_t y = 0; y < q; ++y) {
            std::complex<double> a = state.amplitude(z, params.field.elem(y));
            // Sparse perturbation: each basis vector gets noise with
            // probability `noise`.
            if (rng.unit() < noise) {
                const double re = (rng.unit() - 0.5) * noise;
                const double im = complex_phase ? (rng.unit() - 0.5) * noise : 0.0;
                a += std::complex<double>(re, im);
            }
            if (a != std::complex<double>(0.0, 0.0)) out.set_amplitude(z, params.field.elem(y), a);
        }
    }
    return out.normalized();
}

std::shared_ptr<MapLineOracle> corrupted_oracle(const MultiPoly& f, unsigned r,
                                                unsigned corrupt_lines, Rng& rng) {
    auto oracle = std::make_shared<MapLineOracle>(f, r);
    const Field& field = f.field();
    const auto lines = all_lines(field, f.nvars());
    for (unsigned i = 0; i < corrupt_lines; ++i) {
        const Line& line = lines[rng.below(lines.size())];
        const FieldElem t = field.elem(static_cast<uint32_t>(rng.below(field.order())));
        const FieldElem v = field.elem(static_cast<uint32_t>(rng.below(field.order())));
        oracle->corrupt_point(line, t, v);
    }
    return oracle;
}

} // namespace qlab
