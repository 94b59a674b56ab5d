#include <doctest.h>

#include "oracles.hpp"
#include "qlab/gf.hpp"

using namespace qlab;

TEST_CASE("default moduli are accepted for every supported degree") {
    for (unsigned a = 1; a <= 16; ++a) {
        const Field f(a);
        CHECK(f.degree() == a);
        CHECK(f.order() == (1u << a));
        CHECK(f.modulus_bits() == Field::default_modulus(a));
    }
}

TEST_CASE("construction rejects bad moduli") {
    // x^3 + x^2 + x + 1 has the root 1.
    CHECK_THROWS_AS(Field(3, 0b1111), std::invalid_argument);
    // degree mismatch
    CHECK_THROWS_AS(Field(3, 0b10011), std::invalid_argument);
    CHECK_THROWS_AS(Field(0), std::invalid_argument);
    CHECK_THROWS_AS(Field(17), std::invalid_argument);
}

TEST_CASE("addition is xor with characteristic two") {
    const Field f(3);
    CHECK((f.elem(0b011) + f.elem(0b011)).value == 0b000);
    CHECK((f.elem(0b101) + f.elem(0b000)).value == 0b101);
    CHECK((f.elem(0b101) + f.elem(0b011)).value == 0b110);
    // every element is its own additive inverse
    for (const auto& x : f.elements()) CHECK((x + x).is_zero());
}

TEST_CASE("multiplication matches the schoolbook oracle") {
    // mod x^3 + x + 1: x * x^2 = x^3 = x + 1
    const Field f8(3, 0b1011);
    CHECK(oracles::gf_mul(0b010, 0b100, 0b1011, 3) == 0b011);
    CHECK((f8.elem(0b010) * f8.elem(0b100)).value == 0b011);

    for (unsigned a = 1; a <= 4; ++a) {
        const Field f(a);
        for (uint32_t x = 0; x < f.order(); ++x)
            for (uint32_t y = 0; y < f.order(); ++y)
                CHECK((f.elem(x) * f.elem(y)).value ==
                      oracles::gf_mul(x, y, f.modulus_bits(), a));
    }

    const Field f16(4);
    const FieldElem x = f16.elem(9);
    CHECK(x * f16.one() == x);
    CHECK((x * f16.zero()).is_zero());
}

TEST_CASE("inverses") {
    const Field f(3, 0b1011);
    CHECK(f.one().inverse() == f.one());
    CHECK(oracles::gf_inv(0b010, 0b1011, 3) == 0b101);
    CHECK(f.elem(0b010).inverse().value == 0b101);
    for (uint32_t v = 1; v < f.order(); ++v)
        CHECK(f.elem(v) * f.elem(v).inverse() == f.one());
    CHECK_THROWS_AS(f.zero().inverse(), std::domain_error);
}

TEST_CASE("mismatched fields are rejected") {
    const Field f8(3);
    const Field f16(4);
    CHECK_THROWS_AS(f8.elem(1) + f16.elem(1), std::invalid_argument);
    // same degree, different modulus: x^4+x+1 vs x^4+x^3+1
    const Field g16(4, 0b11001);
    CHECK_THROWS_AS(f16.elem(1) * g16.elem(1), std::invalid_argument);
    // same parameters, distinct Field objects interoperate
    const Field f16b(4);
    CHECK(f16.elem(5) + f16b.elem(5) == f16.zero());
}

TEST_CASE("enumeration order and H") {
    const Field f4(2);
    const auto elems = f4.elements();
    REQUIRE(elems.size() == 4);
    for (uint32_t v = 0; v < 4; ++v) CHECK(elems[v].value == v);
    CHECK(Field(3).elements().size() == 8);

    const Field f16(4);
    const auto h = f16.subset_h(4);
    REQUIRE(h.size() == 4);
    for (uint32_t v = 0; v < 4; ++v) CHECK(h[v].value == v);
    CHECK_THROWS_AS(f16.subset_h(17), std::invalid_argument);
}

TEST_CASE("ring axioms, exhaustively for small degrees") {
    for (unsigned a = 1; a <= 4; ++a) {
        const Field f(a);
        const auto elems = f.elements();
        for (const auto& x : elems)
            for (const auto& y : elems)
                for (const auto& z : elems) {
                    CHECK((x + y) + z == x + (y + z));
                    CHECK((x * y) * z == x * (y * z));
                    CHECK(x * (y + z) == x * y + x * z);
                }
    }
}

TEST_CASE("multiplicative group has order 2^a - 1") {
    for (unsigned a = 1; a <= 6; ++a) {
        const Field f(a);
        for (uint32_t v = 1; v < f.order(); ++v)
            CHECK(f.elem(v).pow(f.order() - 1) == f.one());
    }
}

TEST_CASE("full-field lagrange basis interpolates indicators") {
    const Field f(4);
    const auto& basis = f.lagrange_basis();
    REQUIRE(basis.size() == 16);
    for (uint32_t t = 0; t < 16; ++t) {
        for (uint32_t s = 0; s < 16; ++s) {
            FieldElem acc = f.zero();
            FieldElem pw = f.one();
            for (size_t k = 0; k < basis[t].size(); ++k) {
                acc = acc + f.elem(basis[t][k]) * pw;
                pw = pw * f.elem(s);
            }
            CHECK(acc.value == (s == t ? 1u : 0u));
        }
    }
}

TEST_CASE("element values out of range are rejected") {
    const Field f(2);
    CHECK_THROWS_AS(f.elem(4), std::invalid_argument);
}
