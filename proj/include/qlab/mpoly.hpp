#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "qlab/geom.hpp"
#include "qlab/gf.hpp"
#include "qlab/rng.hpp"

namespace qlab {

/// Parameters of a low-degree-extension domain: H^d sits inside F^d, with
/// H the first h_size field elements and pi the row-major lexicographic
/// bijection between H^d and [h_size^d] (first coordinate most significant).
struct LdeParams {
    Field field;
    unsigned d;
    uint32_t h_size;

    LdeParams(Field f, unsigned d_, uint32_t h);

    uint64_t domain_size() const; // h_size^d
    std::vector<FieldElem> h_elements() const { return field.subset_h(h_size); }

    uint64_t pi(const Point& z) const;
    Point pi_inverse(uint64_t index) const;

    /// The exact total degree bound of any LDE over this domain: d*(h_size-1).
    unsigned default_degree_bound() const { return d * (h_size - 1); }
};

/// Data table A : H^d -> F, indexed by pi.
struct DataTable {
    std::vector<FieldElem> values;
};

DataTable data_table_from_values(const LdeParams& params, const std::vector<uint32_t>& raw);

/// Univariate polynomial, coefficients low degree first, trailing zeros
/// trimmed.
class UniPoly {
public:
    explicit UniPoly(Field field) : field_(std::move(field)) {}
    UniPoly(Field field, std::vector<FieldElem> coeffs);

    const Field& field() const { return field_; }
    const std::vector<FieldElem>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    FieldElem coeff(unsigned k) const;

    FieldElem evaluate(FieldElem t) const;
    /// p(offset + scale*t) — affine substitution, degree preserved.
    UniPoly compose_affine(FieldElem offset, FieldElem scale) const;

    bool operator==(const UniPoly& o) const;
    bool operator!=(const UniPoly& o) const { return !(*this == o); }

private:
    Field field_;
    std::vector<FieldElem> coeffs_;
};

/// Sparse multivariate polynomial over F: exponent vectors mapped to nonzero
/// coefficients.
class MultiPoly {
public:
    MultiPoly(Field field, unsigned nvars) : field_(std::move(field)), nvars_(nvars) {}
    static MultiPoly constant(const Field& field, unsigned nvars, FieldElem c);
    static MultiPoly variable(const Field& field, unsigned nvars, unsigned index);

    const Field& field() const { return field_; }
    unsigned nvars() const { return nvars_; }
    const std::map<std::vector<uint16_t>, FieldElem>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// Accumulates c * z^exps; zero coefficients are never stored.
    void add_term(std::vector<uint16_t> exps, FieldElem c);

    FieldElem evaluate(std::span<const FieldElem> z) const;
    FieldElem evaluate(const Point& z) const { return evaluate(std::span<const FieldElem>(z)); }

    unsigned total_degree() const; // 0 for the zero polynomial
    unsigned degree_in(unsigned var) const;

    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly scaled(FieldElem c) const;

    bool operator==(const MultiPoly& o) const;
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    /// Conversion for single-variable polynomials.
    UniPoly to_univariate() const;
    static MultiPoly from_univariate(const UniPoly& p);

private:
    Field field_;
    unsigned nvars_;
    std::map<std::vector<uint16_t>, FieldElem> terms_;
};

/// The unique extension of the data table to F^d with degree <= h_size-1 in
/// each variable, built from tensor products of univariate Lagrange bases
/// over H.
MultiPoly interpolate_lde(const LdeParams& params, const DataTable& data);

/// q(t) = p(base + sum_k t_k * dir_k) over the subspace's parameterization
/// variables (dependent generators allowed). Total degree never increases.
MultiPoly restrict_to_subspace(const MultiPoly& p, const AffineSubspace& s);

/// Restriction of p to the line {base + dir*t}, as a polynomial in t.
UniPoly restrict_to_line(const MultiPoly& p, const Line& l);

/// Interpolates values (indexed by the encoding of t, all of F) and returns
/// the polynomial iff its degree is at most max_degree; nullopt signals a
/// degree failure.
std::optional<UniPoly> fit_univariate(const Field& field, std::span<const FieldElem> values,
                                      unsigned max_degree);

/// Bivariate analog over all of F^2; values indexed by t1*|F| + t2. Returns
/// the polynomial iff its total degree is at most max_total_degree.
std::optional<MultiPoly> fit_bivariate(const Field& field, std::span<const FieldElem> values,
                                       unsigned max_total_degree);

/// Randomized identity check: samples `trials` points; distinct polynomials
/// of total degree <= r escape detection per trial with probability <= r/|F|.
/// Requires r < |F|.
bool poly_equal_schwartz_zippel(const MultiPoly& p, const MultiPoly& q, unsigned trials, Rng& rng);

} // namespace qlab
