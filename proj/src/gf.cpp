#include "qlab/gf.hpp"

#include <array>
#include <mutex>

#include "qlab/errors.hpp"

namespace qlab {

namespace detail {

struct FieldImpl {
    unsigned a = 0;
    uint32_t modulus = 0; // bit a set, lower bits = tail coefficients
    uint32_t order = 0;

    // Dense tables for small fields; larger fields fall back to shift-reduce.
    std::vector<uint16_t> mul_table;
    std::vector<uint16_t> inv_table;

    // Lagrange basis over all of F, built on first use: lagrange[t] holds the
    // coefficients (low degree first) of the polynomial that is 1 at t and 0
    // at every other field element.
    mutable std::once_flag lagrange_once;
    mutable std::vector<std::vector<uint32_t>> lagrange;

    uint32_t mul_raw(uint32_t x, uint32_t y) const {
        uint32_t acc = 0;
        while (y != 0) {
            if (y & 1u) acc ^= x;
            y >>= 1;
            x <<= 1;
            if (x & order) x ^= modulus;
        }
        return acc;
    }

    uint32_t mul(uint32_t x, uint32_t y) const {
        if (!mul_table.empty()) return mul_table[(static_cast<size_t>(x) << a) | y];
        return mul_raw(x, y);
    }

    uint32_t pow(uint32_t x, uint64_t e) const {
        uint32_t r = 1, b = x;
        while (e != 0) {
            if (e & 1u) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }

    uint32_t inv(uint32_t x) const {
        if (x == 0) throw std::domain_error("gf: inverse of zero");
        if (!inv_table.empty()) return inv_table[x];
        return pow(x, order - 2); // x^(2^a - 2)
    }

    bool same_params(const FieldImpl& o) const { return a == o.a && modulus == o.modulus; }

    const std::vector<std::vector<uint32_t>>& lagrange_basis() const;
};

namespace {

unsigned gf2poly_degree(uint64_t p) {
    unsigned d = 0;
    while (p > 1) {
        p >>= 1;
        ++d;
    }
    return d;
}

uint64_t gf2poly_mod(uint64_t x, uint64_t m) {
    const unsigned dm = gf2poly_degree(m);
    while (x != 0 && gf2poly_degree(x) >= dm) {
        x ^= m << (gf2poly_degree(x) - dm);
    }
    return x;
}

// Exhaustive check: no factor of degree 1..a/2 divides the modulus.
bool gf2poly_irreducible(uint32_t modulus, unsigned a) {
    for (unsigned k = 1; 2 * k <= a; ++k) {
        for (uint64_t g = (1ull << k); g < (1ull << (k + 1)); ++g) {
            if (gf2poly_mod(modulus, g) == 0) return false;
        }
    }
    return true;
}

} // namespace

const std::vector<std::vector<uint32_t>>& FieldImpl::lagrange_basis() const {
    if (a > 10) throw ResourceError("gf: full-field interpolation beyond 2^10 elements");
    std::call_once(lagrange_once, [this] {
        const uint32_t q = order;
        lagrange.assign(q, {});
        for (uint32_t t = 0; t < q; ++t) {
            // Product over s != t of (x - s) / (t - s).
            std::vector<uint32_t> poly{1u};
            uint32_t denom = 1;
            for (uint32_t s = 0; s < q; ++s) {
                if (s == t) continue;
                std::vector<uint32_t> next(poly.size() + 1, 0u);
                for (size_t i = 0; i < poly.size(); ++i) {
                    next[i + 1] ^= poly[i];      // x * poly
                    next[i] ^= mul(poly[i], s);  // char 2: -s == s
                }
                poly = std::move(next);
                denom = mul(denom, t ^ s);
            }
            const uint32_t scale = inv(denom);
            for (auto& c : poly) c = mul(c, scale);
            lagrange[t] = std::move(poly);
        }
    });
    return lagrange;
}

} // namespace detail

uint32_t Field::default_modulus(unsigned degree) {
    // Bit encoding of an irreducible polynomial per extension degree.
    static constexpr std::array<uint32_t, 17> table = {
        0,       // unused
        0b11,    // x + 1
        0b111,   // x^2 + x + 1
        0b1011,  // x^3 + x + 1
        0b10011, // x^4 + x + 1
        0b100101,           // x^5 + x^2 + 1
        0b1000011,          // x^6 + x + 1
        0b10000011,         // x^7 + x + 1
        0b100011011,        // x^8 + x^4 + x^3 + x + 1
        0b1000010001,       // x^9 + x^4 + 1
        0b10000001001,      // x^10 + x^3 + 1
        0b100000000101,     // x^11 + x^2 + 1
        0b1000001010011,    // x^12 + x^6 + x^4 + x + 1
        0b10000000011011,   // x^13 + x^4 + x^3 + x + 1
        0b100010001000011,  // x^14 + x^10 + x^6 + x + 1
        0b1000000000000011, // x^15 + x + 1
        0b10001000000001011 // x^16 + x^12 + x^3 + x + 1
    };
    if (degree < 1 || degree > 16)
        throw std::invalid_argument("Field: extension degree must be in [1, 16]");
    return table[degree];
}

Field::Field(unsigned degree) : Field(degree, default_modulus(degree)) {}

Field::Field(unsigned degree, uint32_t modulus_bits) {
    if (degree < 1 || degree > 16)
        throw std::invalid_argument("Field: extension degree must be in [1, 16]");
    if (detail::gf2poly_degree(modulus_bits) != degree)
        throw std::invalid_argument("Field: modulus degree does not match extension degree");
    if (!detail::gf2poly_irreducible(modulus_bits, degree))
        throw std::invalid_argument("Field: modulus polynomial is reducible");

    auto impl = std::make_shared<detail::FieldImpl>();
    impl->a = degree;
    impl->modulus = modulus_bits;
    impl->order = 1u << degree;

    if (degree <= 8) {
        const uint32_t q = impl->order;
        impl->mul_table.assign(static_cast<size_t>(q) * q, 0);
        for (uint32_t x = 0; x < q; ++x)
            for (uint32_t y = 0; y < q; ++y)
                impl->mul_table[(static_cast<size_t>(x) << degree) | y] =
                    static_cast<uint16_t>(impl->mul_raw(x, y));
        impl->inv_table.assign(q, 0);
        for (uint32_t x = 1; x < q; ++x)
            for (uint32_t y = 1; y < q; ++y)
                if (impl->mul_table[(static_cast<size_t>(x) << degree) | y] == 1) {
                    impl->inv_table[x] = static_cast<uint16_t>(y);
                    break;
                }
    }
    impl_ = std::move(impl);
}

const std::vector<std::vector<uint32_t>>& Field::lagrange_basis() const {
    return impl_->lagrange_basis();
}

unsigned Field::degree() const { return impl_->a; }
uint32_t Field::modulus_bits() const { return impl_->modulus; }
uint32_t Field::order() const { return impl_->order; }

FieldElem Field::elem(uint32_t value) const {
    if (value >= impl_->order) throw std::invalid_argument("Field::elem: value out of range");
    return FieldElem{value, impl_.get()};
}

std::vector<FieldElem> Field::elements() const {
    std::vector<FieldElem> out;
    out.reserve(impl_->order);
    for (uint32_t v = 0; v < impl_->order; ++v) out.push_back(FieldElem{v, impl_.get()});
    return out;
}

std::vector<FieldElem> Field::subset_h(uint32_t h_size) const {
    if (h_size == 0 || h_size > impl_->order)
        throw std::invalid_argument("Field::subset_h: size out of range");
    std::vector<FieldElem> out;
    out.reserve(h_size);
    for (uint32_t v = 0; v < h_size; ++v) out.push_back(FieldElem{v, impl_.get()});
    return out;
}

bool Field::operator==(const Field& o) const {
    return impl_->a == o.impl_->a && impl_->modulus == o.impl_->modulus;
}

void check_same_field(FieldElem x, FieldElem y) {
    if (x.impl == nullptr || y.impl == nullptr)
        throw std::invalid_argument("gf: uninitialized element");
    if (x.impl != y.impl && !x.impl->same_params(*y.impl))
        throw std::invalid_argument("gf: elements from different fields");
}

FieldElem operator+(FieldElem x, FieldElem y) {
    check_same_field(x, y);
    return FieldElem{x.value ^ y.value, x.impl};
}

FieldElem operator*(FieldElem x, FieldElem y) {
    check_same_field(x, y);
    return FieldElem{x.impl->mul(x.value, y.value), x.impl};
}

FieldElem FieldElem::inverse() const {
    if (impl == nullptr) throw std::invalid_argument("gf: uninitialized element");
    return FieldElem{impl->inv(value), impl};
}

FieldElem FieldElem::pow(uint64_t e) const {
    if (impl == nullptr) throw std::invalid_argument("gf: uninitialized element");
    return FieldElem{impl->pow(value, e), impl};
}

bool operator==(FieldElem x, FieldElem y) {
    check_same_field(x, y);
    return x.value == y.value;
}

uint32_t elem_order(FieldElem x) {
    if (x.impl == nullptr) throw std::invalid_argument("gf: uninitialized element");
    return x.impl->order;
}

} // namespace qlab
