#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlab/geom.hpp"
#include "qlab/gf.hpp"
#include "qlab/mpoly.hpp"
#include "qlab/qsim.hpp"
#include "qlab/rng.hpp"

namespace qlab {

/// One weighted option of a (possibly randomized) line assignment. The
/// polynomial is given in the canonical parameterization of the line. A
/// nullopt polynomial marks a malformed entry: it never agrees with anything
/// and the test rejects outright when it is drawn (this is how failed proof
/// blocks surface in the one-query verifier).
///
/// When den != 0 the weight is exactly num/den; the exact acceptance formula
/// groups entries by denominator and divides once per group, so weights like
/// 1/3 do not leak rounding error into quantities that are exact rationals.
struct OracleEntry {
    std::optional<UniPoly> poly;
    double prob = 1.0;
    uint64_t num = 1;
    uint64_t den = 1;

    static OracleEntry exact(std::optional<UniPoly> p, uint64_t n, uint64_t d) {
        return OracleEntry{std::move(p), static_cast<double>(n) / static_cast<double>(d), n, d};
    }
    static OracleEntry inexact(std::optional<UniPoly> p, double prob) {
        return OracleEntry{std::move(p), prob, 0, 0};
    }
};

/// G = {g_l}: an assignment of a polynomial (or a distribution over
/// polynomials) to every line of F^d, keyed by canonical lines.
class LineOracle {
public:
    virtual ~LineOracle() = default;

    virtual unsigned degree_bound() const = 0;

    /// Exact support of g_l for the given canonical line; probabilities sum
    /// to 1.
    virtual std::vector<OracleEntry> distribution(const Line& canonical) const = 0;

    /// One evaluation of the random variable g_l; the default samples from
    /// distribution().
    virtual std::optional<UniPoly> draw(const Line& canonical, Rng& rng) const;
};

/// The honest oracle: g_l is the restriction of f to every line.
std::shared_ptr<LineOracle> honest_line_oracle(MultiPoly f, unsigned r);

/// Deterministic oracle backed by the restriction of a base polynomial, with
/// explicit per-line overrides. Overrides are arbitrary value tables, so a
/// corrupted line may exceed the nominal degree bound; the acceptance and
/// agreement formulas do not require the bound.
class MapLineOracle final : public LineOracle {
public:
    MapLineOracle(MultiPoly base, unsigned r);

    unsigned degree_bound() const override { return r_; }
    std::vector<OracleEntry> distribution(const Line& canonical) const override;

    /// Replaces g_l for the line with the polynomial interpolating `values`
    /// (indexed by the canonical parameter).
    void override_line(const Line& canonical, const std::vector<FieldElem>& values);
    /// Changes the value of g_l at a single canonical parameter.
    void corrupt_point(const Line& canonical, FieldElem t, FieldElem new_value);

private:
    MultiPoly base_;
    unsigned r_;
    std::map<std::pair<uint64_t, uint64_t>, UniPoly> overrides_;
};

/// Mixture of oracles with the given probabilities (used to exercise the
/// randomized-oracle paths exactly).
class MixtureLineOracle final : public LineOracle {
public:
    MixtureLineOracle(std::vector<std::pair<std::shared_ptr<LineOracle>, double>> parts);
    unsigned degree_bound() const override;
    std::vector<OracleEntry> distribution(const Line& canonical) const override;
    std::optional<UniPoly> draw(const Line& canonical, Rng& rng) const override;

private:
    std::vector<std::pair<std::shared_ptr<LineOracle>, double>> parts_;
};

/// Evaluation table of a polynomial over all |F|^nvars points, indexed by
/// point_index.
std::vector<uint32_t> evaluation_table(const MultiPoly& p);

/// Agr[f, f'] = Prob_{z in F^d}[f(z) = f'(z)], tables indexed by point_index.
double agr_functions(const Field& field, unsigned d, std::span<const uint32_t> f,
                     std::span<const uint32_t> f2);

/// Agr[f, G] = Exp_{l in L} Exp_{g_l} Prob_{z in l}[f(z) = g_l(z)].
double agr_with_oracle(const Field& field, unsigned d, std::span<const uint32_t> f,
                       const LineOracle& oracle);

/// The probabilistic function induced by a state:
/// Prob[f(z) = y] = |phi_{z,y}|^2 / phi_z^2, uniform where phi_z = 0.
struct InducedProbFunction {
    Field field;
    unsigned d;
    std::vector<std::vector<double>> dist; // [point_index][y]
};

InducedProbFunction induced_f(const QuantumState& state);

/// Agr[f, G] for the induced probabilistic f.
double agr_with_oracle(const InducedProbFunction& f, const LineOracle& oracle);

/// One run of the quantum low-degree test: Step I (random invertible
/// relabeling, prefix measurement) and Step II (projection onto the line
/// state of the oracle's answer). Returns accept/reject.
bool qldt_run_once(const QuantumState& state, const LineOracle& oracle, Rng& rng);

struct AcceptanceReport {
    double gamma = 0.0;
    std::string method; // "exact" or "monte_carlo"
    uint64_t trials = 0;
    double stderr_est = 0.0;
};

/// gamma = (|F| N)^{-1} * sum_l E_{g_l}[ |sum_{z in l} phi_{z, g_l(z)}|^2 ],
/// the exact acceptance probability. Valid for complex amplitudes.
AcceptanceReport qldt_accept_exact(const QuantumState& state, const LineOracle& oracle);

/// Monte-Carlo estimate over independent runs.
AcceptanceReport qldt_sample(const QuantumState& state, const LineOracle& oracle, uint64_t trials,
                             Rng& rng);

struct AgreementBoundCheck {
    double gamma = 0.0;
    double agr_fg = 0.0;
    double rhs = 0.0;   // (gamma - 1/|F|)^2
    bool vacuous = false; // gamma < 1/|F|: inequality direction not asserted
    bool holds = false;
};

/// Checks Agr[f_induced, G] >= (gamma - 1/|F|)^2 with both sides exact.
AgreementBoundCheck agreement_lower_bound_check(const QuantumState& state,
                                                const LineOracle& oracle);

struct BestHResult {
    MultiPoly h;
    double agr = 0.0;
    uint64_t candidates = 0;
};

/// Exhaustively maximizes Agr[h, G] over every polynomial h in d variables of
/// total degree <= r (reduced representations, per-variable degree < |F|).
/// Ties break toward the coefficient-lexicographically first candidate.
/// Throws ResourceError when the candidate space exceeds `budget`.
BestHResult brute_force_best_h(const Field& field, unsigned d, const LineOracle& oracle,
                               unsigned r, uint64_t budget = 1ull << 22);

/// Seeded generators for corrupted instances (soundness experiments).
QuantumState perturbed_qlde_state(const LdeParams& params, const DataTable& data, double noise,
                                  bool complex_phase, Rng& rng);
std::shared_ptr<MapLineOracle> corrupted_oracle(const MultiPoly& f, unsigned r,
                                                unsigned corrupt_lines, Rng& rng);

} // namespace qlab
