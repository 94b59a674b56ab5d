#include "qlab/retrieve.hpp"

#include <algorithm>

#include "qlab/errors.hpp"
#include "qlab/util.hpp"

namespace qlab {

std::string Verdict::to_string() const {
    switch (kind) {
    case Kind::Err:
        return "Err";
    case Kind::Value:
        return "val:" + std::to_string(a);
    case Kind::Pair:
        return "pair:" + std::to_string(a) + "," + std::to_string(b);
    }
    return "Err";
}

double VerdictDistribution::prob(const Verdict& v) const {
    if (total == 0) return 0.0;
    return static_cast<double>(count(v)) / static_cast<double>(total);
}

uint64_t VerdictDistribution::count(const Verdict& v) const {
    auto it = counts.find(v);
    return it == counts.end() ? 0 : it->second;
}

namespace {

// Parameter tuple of p in a subspace whose dirs are in reduced row echelon
// form; assumes p lies in the subspace.
std::vector<FieldElem> rref_coords(const AffineSubspace& canonical_set, const Point& p) {
    const Point off = sub_points(p, canonical_set.base());
    std::vector<FieldElem> t;
    t.reserve(canonical_set.num_params());
    for (const auto& dir : canonical_set.dirs()) {
        unsigned c = 0;
        while (dir[c].is_zero()) ++c;
        t.push_back(off[c]);
    }
    return t;
}

uint64_t param_tuple_index(const std::vector<FieldElem>& t, uint32_t q) {
    uint64_t idx = 0;
    for (const auto& c : t) idx = idx * q + c.value;
    return idx;
}

// Degree <= pts.size()-1 interpolation through (x_i, y_i) with distinct x_i.
UniPoly lagrange_through(const Field& field, const std::vector<std::pair<FieldElem, FieldElem>>& pts) {
    std::vector<FieldElem> acc(pts.size(), field.zero());
    for (size_t i = 0; i < pts.size(); ++i) {
        std::vector<FieldElem> poly{field.one()};
        FieldElem denom = field.one();
        for (size_t j = 0; j < pts.size(); ++j) {
            if (j == i) continue;
            std::vector<FieldElem> next(poly.size() + 1, field.zero());
            for (size_t k = 0; k < poly.size(); ++k) {
                next[k + 1] = next[k + 1] + poly[k];
                next[k] = next[k] + poly[k] * pts[j].first;
            }
            poly = std::move(next);
            denom = denom * (pts[i].first + pts[j].first);
        }
        const FieldElem scale = pts[i].second * denom.inverse();
        for (size_t k = 0; k < poly.size(); ++k) acc[k] = acc[k] + poly[k] * scale;
    }
    return UniPoly(field, std::move(acc));
}

// Cache of strategy answers per canonical queried set, valid for one fixed
// tuple of marked points.
using AnswerCache = std::map<std::vector<uint64_t>, std::pair<AffineSubspace, std::vector<FieldElem>>>;

const std::pair<AffineSubspace, std::vector<FieldElem>>& query_answer(
    const MerlinStrategy& strategy, const std::vector<Point>& marked, const AffineSubspace& canon,
    AnswerCache& cache) {
    auto key = subspace_key(canon);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto ans = strategy.answer(SubspaceQuery{marked, canon});
        it = cache.emplace(std::move(key), std::make_pair(canon, std::move(ans))).first;
    }
    return it->second;
}

// Values of Merlin's answer along Alice's parameterization of the line.
std::vector<FieldElem> answer_on_line(const MerlinStrategy& strategy, const Point& w,
                                      const Line& alice_line, AnswerCache& cache) {
    const AffineSubspace canon =
        canonical_subspace(AffineSubspace::from_basis(alice_line.base, {alice_line.dir}));
    const auto& [set, ans] = query_answer(strategy, {w}, canon, cache);
    const uint32_t q = elem_order(w[0]);
    std::vector<FieldElem> values(q, FieldElem{0, w[0].impl});
    for (uint32_t t = 0; t < q; ++t) {
        const Point p = alice_line.at(FieldElem{t, w[0].impl});
        values[t] = ans[param_tuple_index(rref_coords(set, p), q)];
    }
    return values;
}

Verdict r1_outcome_verdict(const Field& field, const Point& w, const Point& z, FieldElem yz,
                           const MerlinStrategy& strategy, unsigned r, AnswerCache& cache) {
    if (z == w) return Verdict::value(yz); // Alice measured the value at w herself
    const Line line = line_through(w, z);
    const auto values = answer_on_line(strategy, w, line, cache);
    const auto g = fit_univariate(field, values, r);
    if (!g) return Verdict::err();
    if (g->evaluate(field.one()) != yz) return Verdict::err();
    return Verdict::value(g->evaluate(field.zero()));
}

Verdict r2_outcome_verdict(const Field& field, const Point& w, const Point& w2, const Point& z,
                           FieldElem yz, const MerlinStrategy& strategy, unsigned r,
                           AnswerCache& plane_cache, AnswerCache& r1_cache_w,
                           AnswerCache& r1_cache_w2) {
    // Coincidence conventions: the measured value stands in for the marked
    // point it hit; the other value is retrieved by the single-point protocol
    // on the same measurement outcome.
    if (z == w) {
        const Verdict other = r1_outcome_verdict(field, w2, z, yz, strategy, r, r1_cache_w2);
        if (other.kind != Verdict::Kind::Value) return Verdict::err();
        return Verdict::pair(yz, field.elem(other.a));
    }
    if (z == w2) {
        const Verdict other = r1_outcome_verdict(field, w, z, yz, strategy, r, r1_cache_w);
        if (other.kind != Verdict::Kind::Value) return Verdict::err();
        return Verdict::pair(field.elem(other.a), yz);
    }

    const AffineSubspace plane = plane_through(w, w2, z);
    const AffineSubspace canon = canonical_subspace(plane);
    const auto& [set, ans] = query_answer(strategy, {w, w2}, canon, plane_cache);

    const uint32_t q = field.order();
    std::vector<FieldElem> values(static_cast<size_t>(q) * q, field.zero());
    std::vector<FieldElem> params(2, field.zero());
    for (uint32_t t1 = 0; t1 < q; ++t1) {
        params[0] = field.elem(t1);
        for (uint32_t t2 = 0; t2 < q; ++t2) {
            params[1] = field.elem(t2);
            const Point p = plane.point_at(params);
            values[static_cast<size_t>(t1) * q + t2] = ans[param_tuple_index(rref_coords(set, p), q)];
        }
    }
    const auto g = fit_bivariate(field, values, r);
    if (!g) return Verdict::err();
    Point z_param{field.one(), field.zero()};
    if (g->evaluate(z_param) != yz) return Verdict::err();
    Point w_param{field.zero(), field.zero()};
    Point w2_param{field.zero(), field.one()};
    return Verdict::pair(g->evaluate(w_param), g->evaluate(w2_param));
}

} // namespace

Verdict run_r1(const QuantumState& state, const Point& w, const MerlinStrategy& strategy,
               unsigned r, Rng& rng) {
    state.check_normalized();
    AnswerCache cache;
    const auto [z, y] = measure_all(state, rng);
    return r1_outcome_verdict(state.field(), w, z, y, strategy, r, cache);
}

Verdict run_r2(const QuantumState& state, const Point& w, const Point& w2,
               const MerlinStrategy& strategy, unsigned r, Rng& rng) {
    if (w == w2) throw std::invalid_argument("run_r2: marked points must differ");
    state.check_normalized();
    AnswerCache plane_cache, c1, c2;
    const auto [z, y] = measure_all(state, rng);
    return r2_outcome_verdict(state.field(), w, w2, z, y, strategy, r, plane_cache, c1, c2);
}

VerdictDistribution exact_r1_distribution(const DataTable& data, const LdeParams& params,
                                          const Point& w, const MerlinStrategy& strategy,
                                          unsigned r) {
    const Field& field = params.field;
    const uint64_t npoints = upow(field.order(), params.d);
    if (npoints > kEnumerationLimit)
        throw ResourceError("exact_r1_distribution: domain too large");
    const MultiPoly lde = interpolate_lde(params, data);

    VerdictDistribution dist;
    AnswerCache cache;
    for (uint64_t idx = 0; idx < npoints; ++idx) {
        const Point z = point_from_index(field, params.d, idx);
        const FieldElem yz = lde.evaluate(z);
        dist.add(r1_outcome_verdict(field, w, z, yz, strategy, r, cache));
    }
    return dist;
}

VerdictDistribution exact_r2_distribution(const DataTable& data, const LdeParams& params,
                                          const Point& w, const Point& w2,
                                          const MerlinStrategy& strategy, unsigned r) {
    if (w == w2) throw std::invalid_argument("exact_r2_distribution: marked points must differ");
    const Field& field = params.field;
    const uint64_t npoints = upow(field.order(), params.d);
    if (npoints > kEnumerationLimit)
        throw ResourceError("exact_r2_distribution: domain too large");
    const MultiPoly lde = interpolate_lde(params, data);

    VerdictDistribution dist;
    AnswerCache plane_cache, c1, c2;
    for (uint64_t idx = 0; idx < npoints; ++idx) {
        const Point z = point_from_index(field, params.d, idx);
        const FieldElem yz = lde.evaluate(z);
        dist.add(r2_outcome_verdict(field, w, w2, z, yz, strategy, r, plane_cache, c1, c2));
    }
    return dist;
}

// ---- strategies ------------------------------------------------------------

namespace {

std::vector<Point> set_points_by_param(const AffineSubspace& set, uint32_t q) {
    const uint64_t n = upow(q, set.num_params());
    std::vector<Point> pts;
    pts.reserve(n);
    std::vector<FieldElem> params(set.num_params(), set.base().empty() ? FieldElem{} : FieldElem{0, set.base()[0].impl});
    for (uint64_t idx = 0; idx < n; ++idx) {
        uint64_t rest = idx;
        for (unsigned k = set.num_params(); k-- > 0;) {
            params[k] = FieldElem{static_cast<uint32_t>(rest % q), set.base()[0].impl};
            rest /= q;
        }
        pts.push_back(set.point_at(params));
    }
    return pts;
}

class HonestStrategy final : public MerlinStrategy {
public:
    explicit HonestStrategy(MultiPoly lde) : lde_(std::move(lde)) {}
    std::string name() const override { return "honest"; }
    std::vector<FieldElem> answer(const SubspaceQuery& query) const override {
        const uint32_t q = lde_.field().order();
        std::vector<FieldElem> out;
        for (const auto& p : set_points_by_param(query.set, q)) out.push_back(lde_.evaluate(p));
        return out;
    }

private:
    MultiPoly lde_;
};

class ConstantShiftStrategy final : public MerlinStrategy {
public:
    ConstantShiftStrategy(MultiPoly lde, FieldElem c) : lde_(std::move(lde)), c_(c) {}
    std::string name() const override { return "constant-shift"; }
    std::vector<FieldElem> answer(const SubspaceQuery& query) const override {
        const uint32_t q = lde_.field().order();
        std::vector<FieldElem> out;
        for (const auto& p : set_points_by_param(query.set, q)) out.push_back(lde_.evaluate(p) + c_);
        return out;
    }

private:
    MultiPoly lde_;
    FieldElem c_;
};

// Shared scaffolding for the two anchored line cheats: build a degree <= r
// polynomial in the canonical line parameter through chosen constraints, then
// answer with its evaluations. Plane queries fall back to the honest table
// with a single flipped point (which fails the bivariate degree check except
// on tiny fields).
class AnchoredLineStrategy : public MerlinStrategy {
public:
    AnchoredLineStrategy(MultiPoly lde, unsigned r) : lde_(std::move(lde)), r_(r) {}

    std::vector<FieldElem> answer(const SubspaceQuery& query) const override {
        const Field& field = lde_.field();
        const uint32_t q = field.order();
        if (query.set.num_params() != 1 || query.marked.empty())
            return fallback_plane_answer(query);

        const Point& w = query.marked.front();
        if (!query.set.contains(w)) return honest_values(query);
        const FieldElem sw = rref_coords_of(query.set, w);

        // Parameters other than s_w, in enumeration order.
        std::vector<FieldElem> others;
        for (uint32_t s = 0; s < q; ++s)
            if (s != sw.value) others.push_back(field.elem(s));

        const auto constraints = build_constraints(query.set, w, sw, others);
        const UniPoly g = lagrange_through(field, constraints);

        std::vector<FieldElem> out;
        out.reserve(q);
        for (uint32_t s = 0; s < q; ++s) out.push_back(g.evaluate(field.elem(s)));
        return out;
    }

protected:
    virtual std::vector<std::pair<FieldElem, FieldElem>> build_constraints(
        const AffineSubspace& set, const Point& w, FieldElem sw,
        const std::vector<FieldElem>& others) const = 0;

    FieldElem lde_at_param(const AffineSubspace& set, FieldElem s) const {
        std::vector<FieldElem> params{s};
        return lde_.evaluate(set.point_at(params));
    }

    std::vector<FieldElem> honest_values(const SubspaceQuery& query) const {
        const uint32_t q = lde_.field().order();
        std::vector<FieldElem> out;
        for (const auto& p : set_points_by_param(query.set, q)) out.push_back(lde_.evaluate(p));
        return out;
    }

    std::vector<FieldElem> fallback_plane_answer(const SubspaceQuery& query) const {
        auto out = honest_values(query);
        if (!query.marked.empty() && query.set.contains(query.marked.front())) {
            const uint32_t q = lde_.field().order();
            const auto t = rref_coords_vec(query.set, query.marked.front());
            out[param_tuple_index(t, q)] = out[param_tuple_index(t, q)] + lde_.field().one();
        }
        return out;
    }

    static FieldElem rref_coords_of(const AffineSubspace& set, const Point& p) {
        return rref_coords_vec(set, p).front();
    }
    static std::vector<FieldElem> rref_coords_vec(const AffineSubspace& set, const Point& p) {
        return rref_coords(set, p);
    }

    MultiPoly lde_;
    unsigned r_;
};

// Correct value at the marked point, honest on the first r-1 other
// parameters, flipped on the next one: concludes the right value or Err.
class PointAnchoredStrategy final : public AnchoredLineStrategy {
public:
    using AnchoredLineStrategy::AnchoredLineStrategy;
    std::string name() const override { return "point-anchored"; }

protected:
    std::vector<std::pair<FieldElem, FieldElem>> build_constraints(
        const AffineSubspace& set, const Point& w, FieldElem sw,
        const std::vector<FieldElem>& others) const override {
        const Field& field = lde_.field();
        std::vector<std::pair<FieldElem, FieldElem>> cs;
        cs.emplace_back(sw, lde_.evaluate(w));
        const size_t honest_count = std::min<size_t>(r_ == 0 ? 0 : r_ - 1, others.size());
        size_t i = 0;
        for (; i < honest_count; ++i) cs.emplace_back(others[i], lde_at_param(set, others[i]));
        if (i < others.size())
            cs.emplace_back(others[i], lde_at_param(set, others[i]) + field.one());
        return cs;
    }
};

// Flipped value at the marked point, honest on the first r other parameters:
// the degree-r interpolation agrees with the restriction on exactly those r
// points, the densest cheat the degree check admits.
class TargetedWFlipStrategy final : public AnchoredLineStrategy {
public:
    using AnchoredLineStrategy::AnchoredLineStrategy;
    std::string name() const override { return "targeted-w-flip"; }

protected:
    std::vector<std::pair<FieldElem, FieldElem>> build_constraints(
        const AffineSubspace& set, const Point& w, FieldElem sw,
        const std::vector<FieldElem>& others) const override {
        const Field& field = lde_.field();
        std::vector<std::pair<FieldElem, FieldElem>> cs;
        cs.emplace_back(sw, lde_.evaluate(w) + field.one());
        const size_t honest_count = std::min<size_t>(r_, others.size());
        for (size_t i = 0; i < honest_count; ++i)
            cs.emplace_back(others[i], lde_at_param(set, others[i]));
        return cs;
    }
};

uint64_t mix_key(uint64_t seed, const std::vector<uint64_t>& key) {
    uint64_t h = seed;
    for (uint64_t k : key) h = splitmix64(h ^ splitmix64(k + 0x9E3779B97F4A7C15ull));
    return h;
}

class RandomLowDegreeStrategy final : public MerlinStrategy {
public:
    RandomLowDegreeStrategy(Field field, unsigned r, uint64_t seed)
        : field_(std::move(field)), r_(r), seed_(seed) {}
    std::string name() const override { return "random-low-degree"; }

    std::vector<FieldElem> answer(const SubspaceQuery& query) const override {
        const uint32_t q = field_.order();
        Rng rng(mix_key(seed_, subspace_key(query.set)));
        const unsigned m = query.set.num_params();
        // Random polynomial in the m canonical parameters, total degree <= r.
        MultiPoly g(field_, m);
        std::vector<uint16_t> exps(m, 0);
        std::function<void(unsigned, unsigned)> fill = [&](unsigned var, unsigned used) {
            if (var == m) {
                g.add_term(exps, field_.elem(static_cast<uint32_t>(rng.below(q))));
                return;
            }
            const unsigned cap = std::min<unsigned>(r_ - used, q - 1);
            for (unsigned e = 0; e <= cap; ++e) {
                exps[var] = static_cast<uint16_t>(e);
                fill(var + 1, used + e);
            }
            exps[var] = 0;
        };
        fill(0, 0);

        const uint64_t n = upow(q, m);
        std::vector<FieldElem> out;
        out.reserve(n);
        std::vector<FieldElem> params(m, field_.zero());
        for (uint64_t idx = 0; idx < n; ++idx) {
            uint64_t rest = idx;
            for (unsigned k = m; k-- > 0;) {
                params[k] = field_.elem(static_cast<uint32_t>(rest % q));
                rest /= q;
            }
            out.push_back(g.evaluate(params));
        }
        return out;
    }

private:
    Field field_;
    unsigned r_;
    uint64_t seed_;
};

class RandomGarbageStrategy final : public MerlinStrategy {
public:
    RandomGarbageStrategy(Field field, uint64_t seed) : field_(std::move(field)), seed_(seed) {}
    std::string name() const override { return "random-garbage"; }

    std::vector<FieldElem> answer(const SubspaceQuery& query) const override {
        const uint32_t q = field_.order();
        Rng rng(mix_key(seed_, subspace_key(query.set)));
        const uint64_t n = upow(q, query.set.num_params());
        std::vector<FieldElem> out;
        out.reserve(n);
        for (uint64_t i = 0; i < n; ++i)
            out.push_back(field_.elem(static_cast<uint32_t>(rng.below(q))));
        return out;
    }

private:
    Field field_;
    uint64_t seed_;
};

} // namespace

std::shared_ptr<MerlinStrategy> honest_strategy(MultiPoly lde) {
    return std::make_shared<HonestStrategy>(std::move(lde));
}

std::vector<std::shared_ptr<MerlinStrategy>> adversary_suite(const MultiPoly& lde, unsigned r,
                                                             Rng& rng) {
    const Field field = lde.field();
    std::vector<std::shared_ptr<MerlinStrategy>> suite;
    suite.push_back(std::make_shared<HonestStrategy>(lde));
    suite.push_back(std::make_shared<ConstantShiftStrategy>(lde, field.one()));
    suite.push_back(std::make_shared<PointAnchoredStrategy>(lde, r));
    suite.push_back(std::make_shared<RandomLowDegreeStrategy>(field, r, rng.next()));
    suite.push_back(std::make_shared<RandomGarbageStrategy>(field, rng.next()));
    suite.push_back(std::make_shared<TargetedWFlipStrategy>(lde, r));
    return suite;
}

} // namespace qlab
