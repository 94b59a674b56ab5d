#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qlab/geom.hpp"
#include "qlab/gf.hpp"
#include "qlab/mpoly.hpp"
#include "qlab/qsim.hpp"
#include "qlab/rng.hpp"

namespace qlab {

/// Query sent to Merlin: the marked point(s) and a canonical description of
/// the queried point set (a line for single-point retrieval, a plane for
/// two-point retrieval). The measured point z is never part of the query.
struct SubspaceQuery {
    std::vector<Point> marked;
    AffineSubspace set; // canonical form
};

/// Deterministic Merlin: identical queries yield identical answers, and the
/// answer is a value assignment on the queried point set, indexed by the
/// canonical parameter tuple in lexicographic order.
class MerlinStrategy {
public:
    virtual ~MerlinStrategy() = default;
    virtual std::string name() const = 0;
    virtual std::vector<FieldElem> answer(const SubspaceQuery& query) const = 0;
};

/// Merlin who answers every query with the restriction of the given
/// polynomial to the queried set.
std::shared_ptr<MerlinStrategy> honest_strategy(MultiPoly lde);

/// Alice's conclusion: a retrieved value, a retrieved pair, or Err.
struct Verdict {
    enum class Kind : uint8_t { Err = 0, Value = 1, Pair = 2 };
    Kind kind = Kind::Err;
    uint32_t a = 0;
    uint32_t b = 0;

    static Verdict err() { return Verdict{}; }
    static Verdict value(FieldElem v) { return Verdict{Kind::Value, v.value, 0}; }
    static Verdict pair(FieldElem x, FieldElem y) { return Verdict{Kind::Pair, x.value, y.value}; }

    auto operator<=>(const Verdict&) const = default;
    std::string to_string() const;
};

/// Exact verdict distribution as integer outcome counts over a uniform
/// measurement domain of `total` outcomes.
struct VerdictDistribution {
    std::map<Verdict, uint64_t> counts;
    uint64_t total = 0;

    void add(const Verdict& v, uint64_t n = 1) {
        counts[v] += n;
        total += n;
    }
    double prob(const Verdict& v) const;
    uint64_t count(const Verdict& v) const;
};

/// Single-point retrieval: measure, send the line through w and z, fit
/// Merlin's answer under degree bound r, check it against the measured value,
/// conclude the value at w. All failures are Err verdicts. When the measured
/// z equals w, Alice already holds the value and concludes it directly.
Verdict run_r1(const QuantumState& state, const Point& w, const MerlinStrategy& strategy,
               unsigned r, Rng& rng);

/// Two-point retrieval over the plane through w, w2 and the measured z, with
/// a bivariate fit of total degree at most r. When z coincides with one of
/// the marked points, that value is taken from the measurement and the other
/// is retrieved by the single-point protocol on the same outcome.
Verdict run_r2(const QuantumState& state, const Point& w, const Point& w2,
               const MerlinStrategy& strategy, unsigned r, Rng& rng);

/// Exact verdict distribution of run_r1 on the correct encoding of `data`:
/// enumerates all |F|^d measurement outcomes, each of weight |F|^-d.
VerdictDistribution exact_r1_distribution(const DataTable& data, const LdeParams& params,
                                          const Point& w, const MerlinStrategy& strategy,
                                          unsigned r);

/// Exact analog for the two-point protocol.
VerdictDistribution exact_r2_distribution(const DataTable& data, const LdeParams& params,
                                          const Point& w, const Point& w2,
                                          const MerlinStrategy& strategy, unsigned r);

/// Named cheating strategies used by the soundness experiments:
/// honest, constant-shift, point-anchored, random-low-degree, random-garbage,
/// targeted-w-flip.
std::vector<std::shared_ptr<MerlinStrategy>> adversary_suite(const MultiPoly& lde, unsigned r,
                                                             Rng& rng);

} // namespace qlab
