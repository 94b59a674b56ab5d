#include "qlab/mpoly.hpp"

#include <algorithm>
#include <functional>

#include "qlab/errors.hpp"
#include "qlab/util.hpp"

namespace qlab {

// ---- LdeParams -------------------------------------------------------------

LdeParams::LdeParams(Field f, unsigned d_, uint32_t h) : field(std::move(f)), d(d_), h_size(h) {
    if (d == 0) throw std::invalid_argument("LdeParams: d must be positive");
    if (h_size == 0 || h_size > field.order())
        throw std::invalid_argument("LdeParams: h_size out of range");
    upow(h_size, d); // throws if the domain does not fit machine range
}

uint64_t LdeParams::domain_size() const { return upow(h_size, d); }

uint64_t LdeParams::pi(const Point& z) const {
    if (z.size() != d) throw std::invalid_argument("LdeParams::pi: dimension mismatch");
    uint64_t idx = 0;
    for (const auto& c : z) {
        if (c.value >= h_size) throw std::invalid_argument("LdeParams::pi: point outside H^d");
        idx = idx * h_size + c.value;
    }
    return idx;
}

Point LdeParams::pi_inverse(uint64_t index) const {
    Point p(d, field.zero());
    for (unsigned i = d; i-- > 0;) {
        p[i] = field.elem(static_cast<uint32_t>(index % h_size));
        index /= h_size;
    }
    if (index != 0) throw std::invalid_argument("LdeParams::pi_inverse: index out of range");
    return p;
}

DataTable data_table_from_values(const LdeParams& params, const std::vector<uint32_t>& raw) {
    if (raw.size() != params.domain_size())
        throw std::invalid_argument("DataTable: length does not match h_size^d");
    DataTable t;
    t.values.reserve(raw.size());
    for (uint32_t v : raw) t.values.push_back(params.field.elem(v));
    return t;
}

// ---- UniPoly ----------------------------------------------------------------

UniPoly::UniPoly(Field field, std::vector<FieldElem> coeffs)
    : field_(std::move(field)), coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

FieldElem UniPoly::coeff(unsigned k) const {
    if (k < coeffs_.size()) return coeffs_[k];
    return field_.zero();
}

FieldElem UniPoly::evaluate(FieldElem t) const {
    FieldElem acc = field_.zero();
    for (size_t k = coeffs_.size(); k-- > 0;) acc = acc * t + coeffs_[k];
    return acc;
}

UniPoly UniPoly::compose_affine(FieldElem offset, FieldElem scale) const {
    // Horner over the linear argument: acc(t) <- acc(t)*(offset + scale*t) + c_k.
    std::vector<FieldElem> acc;
    for (size_t k = coeffs_.size(); k-- > 0;) {
        std::vector<FieldElem> next(acc.size() + 1, field_.zero());
        for (size_t i = 0; i < acc.size(); ++i) {
            next[i] = next[i] + acc[i] * offset;
            next[i + 1] = next[i + 1] + acc[i] * scale;
        }
        if (next.empty()) next.push_back(field_.zero());
        next[0] = next[0] + coeffs_[k];
        acc = std::move(next);
    }
    return UniPoly(field_, std::move(acc));
}

bool UniPoly::operator==(const UniPoly& o) const {
    if (field_ != o.field_ || coeffs_.size() != o.coeffs_.size()) return false;
    for (size_t i = 0; i < coeffs_.size(); ++i)
        if (coeffs_[i] != o.coeffs_[i]) return false;
    return true;
}

// ---- MultiPoly ---------------------------------------------------------------

MultiPoly MultiPoly::constant(const Field& field, unsigned nvars, FieldElem c) {
    MultiPoly p(field, nvars);
    p.add_term(std::vector<uint16_t>(nvars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(const Field& field, unsigned nvars, unsigned index) {
    if (index >= nvars) throw std::invalid_argument("MultiPoly::variable: index out of range");
    MultiPoly p(field, nvars);
    std::vector<uint16_t> e(nvars, 0);
    e[index] = 1;
    p.add_term(std::move(e), field.one());
    return p;
}

void MultiPoly::add_term(std::vector<uint16_t> exps, FieldElem c) {
    if (exps.size() != nvars_) throw std::invalid_argument("MultiPoly: exponent arity mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(exps);
    if (it == terms_.end()) {
        terms_.emplace(std::move(exps), c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

FieldElem MultiPoly::evaluate(std::span<const FieldElem> z) const {
    if (z.size() != nvars_) throw std::invalid_argument("MultiPoly::evaluate: dimension mismatch");
    // Power tables per variable up to the degree actually used.
    std::vector<std::vector<FieldElem>> pows(nvars_);
    for (unsigned i = 0; i < nvars_; ++i) {
        const unsigned top = degree_in(i);
        pows[i].reserve(top + 1);
        pows[i].push_back(field_.one());
        for (unsigned k = 1; k <= top; ++k) pows[i].push_back(pows[i].back() * z[i]);
    }
    FieldElem acc = field_.zero();
    for (const auto& [e, c] : terms_) {
        FieldElem term = c;
        for (unsigned i = 0; i < nvars_; ++i)
            if (e[i] != 0) term = term * pows[i][e[i]];
        acc = acc + term;
    }
    return acc;
}

unsigned MultiPoly::total_degree() const {
    unsigned best = 0;
    for (const auto& [e, c] : terms_) {
        (void)c;
        unsigned s = 0;
        for (uint16_t x : e) s += x;
        best = std::max(best, s);
    }
    return best;
}

unsigned MultiPoly::degree_in(unsigned var) const {
    if (var >= nvars_) throw std::invalid_argument("MultiPoly::degree_in: index out of range");
    unsigned best = 0;
    for (const auto& [e, c] : terms_) {
        (void)c;
        best = std::max<unsigned>(best, e[var]);
    }
    return best;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    if (field_ != o.field_ || nvars_ != o.nvars_)
        throw std::invalid_argument("MultiPoly: mixed operands");
    MultiPoly out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    if (field_ != o.field_ || nvars_ != o.nvars_)
        throw std::invalid_argument("MultiPoly: mixed operands");
    MultiPoly out(field_, nvars_);
    for (const auto& [e1, c1] : terms_) {
        for (const auto& [e2, c2] : o.terms_) {
            std::vector<uint16_t> e(nvars_);
            for (unsigned i = 0; i < nvars_; ++i) e[i] = static_cast<uint16_t>(e1[i] + e2[i]);
            out.add_term(std::move(e), c1 * c2);
        }
    }
    return out;
}

MultiPoly MultiPoly::scaled(FieldElem c) const {
    MultiPoly out(field_, nvars_);
    for (const auto& [e, x] : terms_) out.add_term(e, x * c);
    return out;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
    if (field_ != o.field_ || nvars_ != o.nvars_ || terms_.size() != o.terms_.size()) return false;
    auto it = terms_.begin();
    auto jt = o.terms_.begin();
    for (; it != terms_.end(); ++it, ++jt)
        if (it->first != jt->first || it->second != jt->second) return false;
    return true;
}

UniPoly MultiPoly::to_univariate() const {
    if (nvars_ != 1) throw std::invalid_argument("MultiPoly: not univariate");
    std::vector<FieldElem> coeffs(total_degree() + 1, field_.zero());
    for (const auto& [e, c] : terms_) coeffs[e[0]] = c;
    return UniPoly(field_, std::move(coeffs));
}

MultiPoly MultiPoly::from_univariate(const UniPoly& p) {
    MultiPoly out(p.field(), 1);
    const auto& cs = p.coeffs();
    for (size_t k = 0; k < cs.size(); ++k) out.add_term({static_cast<uint16_t>(k)}, cs[k]);
    return out;
}

// ---- interpolation and restriction ------------------------------------------

namespace {

// Lagrange basis over the subset H: basis[j] is 1 at H[j], 0 at other points
// of H, degree |H|-1. Coefficients low degree first.
std::vector<std::vector<FieldElem>> lagrange_basis_over(const std::vector<FieldElem>& h) {
    std::vector<std::vector<FieldElem>> basis(h.size());
    for (size_t j = 0; j < h.size(); ++j) {
        const FieldElem one{1, h[j].impl};
        const FieldElem zero{0, h[j].impl};
        std::vector<FieldElem> poly{one};
        FieldElem denom = one;
        for (size_t i = 0; i < h.size(); ++i) {
            if (i == j) continue;
            std::vector<FieldElem> next(poly.size() + 1, zero);
            for (size_t k = 0; k < poly.size(); ++k) {
                next[k + 1] = next[k + 1] + poly[k];
                next[k] = next[k] + poly[k] * h[i]; // char 2: -h == h
            }
            poly = std::move(next);
            denom = denom * (h[j] + h[i]);
        }
        const FieldElem scale = denom.inverse();
        for (auto& c : poly) c = c * scale;
        basis[j] = std::move(poly);
    }
    return basis;
}

} // namespace

MultiPoly interpolate_lde(const LdeParams& params, const DataTable& data) {
    if (data.values.size() != params.domain_size())
        throw std::invalid_argument("interpolate_lde: data length mismatch");
    const auto h = params.h_elements();
    const auto basis = lagrange_basis_over(h);
    const unsigned d = params.d;

    MultiPoly out(params.field, d);
    for (uint64_t index = 0; index < data.values.size(); ++index) {
        const FieldElem a = data.values[index];
        if (a.is_zero()) continue;
        // Digits of the index give the H-coordinates (first most significant).
        std::vector<uint32_t> digit(d);
        uint64_t rest = index;
        for (unsigned i = d; i-- > 0;) {
            digit[i] = static_cast<uint32_t>(rest % params.h_size);
            rest /= params.h_size;
        }
        // Expand the tensor product of the univariate bases.
        std::vector<uint16_t> exps(d, 0);
        std::function<void(unsigned, FieldElem)> expand = [&](unsigned var, FieldElem coeff) {
            if (var == d) {
                out.add_term(exps, coeff * a);
                return;
            }
            const auto& b = basis[digit[var]];
            for (size_t k = 0; k < b.size(); ++k) {
                if (b[k].is_zero()) continue;
                exps[var] = static_cast<uint16_t>(k);
                expand(var + 1, coeff * b[k]);
            }
            exps[var] = 0;
        };
        expand(0, params.field.one());
    }
    return out;
}

MultiPoly restrict_to_subspace(const MultiPoly& p, const AffineSubspace& s) {
    const unsigned d = p.nvars();
    if (s.ambient_dim() != d)
        throw std::invalid_argument("restrict_to_subspace: ambient dimension mismatch");
    const unsigned m = s.num_params();
    const Field& field = p.field();

    // Linear substitution polynomials, one per ambient coordinate.
    std::vector<MultiPoly> subst;
    subst.reserve(d);
    for (unsigned i = 0; i < d; ++i) {
        MultiPoly li = MultiPoly::constant(field, m, s.base()[i]);
        for (unsigned k = 0; k < m; ++k) {
            MultiPoly term = MultiPoly::variable(field, m, k).scaled(s.dirs()[k][i]);
            li = li + term;
        }
        subst.push_back(std::move(li));
    }

    // Powers of each substitution polynomial, built on demand.
    std::vector<std::vector<MultiPoly>> pows(d);
    auto power_of = [&](unsigned i, unsigned e) -> const MultiPoly& {
        auto& cache = pows[i];
        if (cache.empty()) cache.push_back(MultiPoly::constant(field, m, field.one()));
        while (cache.size() <= e) cache.push_back(cache.back() * subst[i]);
        return cache[e];
    };

    MultiPoly out(field, m);
    for (const auto& [e, c] : p.terms()) {
        MultiPoly term = MultiPoly::constant(field, m, c);
        for (unsigned i = 0; i < d; ++i)
            if (e[i] != 0) term = term * power_of(i, e[i]);
        out = out + term;
    }
    return out;
}

UniPoly restrict_to_line(const MultiPoly& p, const Line& l) {
    return restrict_to_subspace(p, AffineSubspace::from_basis(l.base, {l.dir})).to_univariate();
}

std::optional<UniPoly> fit_univariate(const Field& field, std::span<const FieldElem> values,
                                      unsigned max_degree) {
    const uint32_t q = field.order();
    if (values.size() != q)
        throw std::invalid_argument("fit_univariate: need a value for every field element");
    const auto& basis = field.lagrange_basis();
    std::vector<uint32_t> acc(q, 0);
    for (uint32_t t = 0; t < q; ++t) {
        const FieldElem v = values[t];
        if (v.is_zero()) continue;
        const auto& b = basis[t];
        for (size_t k = 0; k < b.size(); ++k) {
            if (b[k] == 0) continue;
            acc[k] ^= (field.elem(b[k]) * v).value;
        }
    }
    std::vector<FieldElem> coeffs;
    coeffs.reserve(q);
    for (uint32_t k = 0; k < q; ++k) coeffs.push_back(field.elem(acc[k]));
    UniPoly g(field, std::move(coeffs));
    if (g.degree() > static_cast<int>(max_degree)) return std::nullopt;
    return g;
}

std::optional<MultiPoly> fit_bivariate(const Field& field, std::span<const FieldElem> values,
                                       unsigned max_total_degree) {
    const uint32_t q = field.order();
    if (values.size() != static_cast<size_t>(q) * q)
        throw std::invalid_argument("fit_bivariate: need a value for every point of F^2");

    // Interpolate each row in t2, then each coefficient column in t1.
    std::vector<std::vector<FieldElem>> row_coeffs(q);
    for (uint32_t t1 = 0; t1 < q; ++t1) {
        auto row = fit_univariate(field, values.subspan(static_cast<size_t>(t1) * q, q), q - 1);
        std::vector<FieldElem> cs = row->coeffs();
        cs.resize(q, field.zero());
        row_coeffs[t1] = std::move(cs);
    }
    MultiPoly out(field, 2);
    std::vector<FieldElem> column(q, field.zero());
    for (uint32_t k2 = 0; k2 < q; ++k2) {
        for (uint32_t t1 = 0; t1 < q; ++t1) column[t1] = row_coeffs[t1][k2];
        auto col = fit_univariate(field, column, q - 1);
        const auto& cs = col->coeffs();
        for (size_t k1 = 0; k1 < cs.size(); ++k1)
            out.add_term({static_cast<uint16_t>(k1), static_cast<uint16_t>(k2)}, cs[k1]);
    }
    if (out.total_degree() > max_total_degree) return std::nullopt;
    return out;
}

bool poly_equal_schwartz_zippel(const MultiPoly& p, const MultiPoly& q, unsigned trials, Rng& rng) {
    if (p.field() != q.field() || p.nvars() != q.nvars())
        throw std::invalid_argument("poly_equal_schwartz_zippel: mixed operands");
    const unsigned r = std::max(p.total_degree(), q.total_degree());
    if (r >= p.field().order())
        throw std::invalid_argument("poly_equal_schwartz_zippel: degree bound must be below |F|");
    const uint32_t order = p.field().order();
    Point z(p.nvars(), p.field().zero());
    for (unsigned trial = 0; trial < trials; ++trial) {
        for (auto& c : z) c = p.field().elem(static_cast<uint32_t>(rng.below(order)));
        if (p.evaluate(z) != q.evaluate(z)) return false;
    }
    return true;
}

} // namespace qlab
