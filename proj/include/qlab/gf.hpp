#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace qlab {

namespace detail {
struct FieldImpl;
}

class Field;

/// Element of GF(2^a). The value encodes the coefficients of a polynomial of
/// degree < a over GF(2); bit i is the coefficient of x^i. Elements remember
/// their field so that cross-field arithmetic is rejected.
struct FieldElem {
    uint32_t value = 0;
    const detail::FieldImpl* impl = nullptr;

    bool is_zero() const { return value == 0; }

    friend FieldElem operator+(FieldElem x, FieldElem y);
    friend FieldElem operator-(FieldElem x, FieldElem y) { return x + y; }
    friend FieldElem operator*(FieldElem x, FieldElem y);
    FieldElem inverse() const;
    FieldElem pow(uint64_t e) const;

    friend bool operator==(FieldElem x, FieldElem y);
    friend bool operator!=(FieldElem x, FieldElem y) { return !(x == y); }
};

/// A point of F^d.
using Point = std::vector<FieldElem>;

/// GF(2^a) with an explicit irreducible modulus polynomial. Addition is
/// bitwise XOR; multiplication is carry-less product reduced by the modulus.
/// Construction verifies (exhaustively, a <= 16) that the modulus has degree
/// exactly a and is irreducible over GF(2).
class Field {
public:
    /// Field with the default modulus for the given extension degree.
    explicit Field(unsigned degree);
    /// Field with an explicit modulus; bit i of modulus_bits is the
    /// coefficient of x^i, and bit `degree` must be set.
    Field(unsigned degree, uint32_t modulus_bits);

    unsigned degree() const;
    uint32_t modulus_bits() const;
    uint32_t order() const;

    FieldElem elem(uint32_t value) const;
    FieldElem zero() const { return elem(0); }
    FieldElem one() const { return elem(1); }

    /// All 2^a elements in increasing integer order of their encodings.
    std::vector<FieldElem> elements() const;
    /// H = the first h_size elements of the enumeration order.
    std::vector<FieldElem> subset_h(uint32_t h_size) const;

    /// The default modulus used for the given degree, 1 <= degree <= 16.
    static uint32_t default_modulus(unsigned degree);

    /// Lagrange basis over all of F: entry t holds the coefficients (low
    /// degree first) of the polynomial that is 1 at t and 0 elsewhere.
    /// Built once per field on first use.
    const std::vector<std::vector<uint32_t>>& lagrange_basis() const;

    bool operator==(const Field& o) const;
    bool operator!=(const Field& o) const { return !(*this == o); }

    const detail::FieldImpl* impl() const { return impl_.get(); }

private:
    std::shared_ptr<const detail::FieldImpl> impl_;
};

/// Throws std::invalid_argument unless both elements live in the same field
/// (same degree and modulus).
void check_same_field(FieldElem x, FieldElem y);

/// Order of the field the element belongs to.
uint32_t elem_order(FieldElem x);

} // namespace qlab
