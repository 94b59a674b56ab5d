#include <doctest.h>

#include <array>

#include "oracles.hpp"
#include "qlab/mpoly.hpp"

using namespace qlab;

namespace {
Point pt(const Field& f, std::initializer_list<uint32_t> coords) {
    Point p;
    for (uint32_t c : coords) p.push_back(f.elem(c));
    return p;
}
} // namespace

TEST_CASE("pi is a bijection") {
    for (auto [a, d, h] : {std::tuple<unsigned, unsigned, uint32_t>{4, 2, 4},
                           std::tuple<unsigned, unsigned, uint32_t>{2, 3, 2}}) {
        const LdeParams params(Field(a), d, h);
        for (uint64_t i = 0; i < params.domain_size(); ++i)
            CHECK(params.pi(params.pi_inverse(i)) == i);
    }
    const LdeParams params(Field(2), 2, 2);
    CHECK_THROWS_AS(params.pi(pt(params.field, {3, 0})), std::invalid_argument);
    CHECK_THROWS_AS(params.pi_inverse(4), std::invalid_argument);
}

TEST_CASE("interpolate_lde reproduces the product table") {
    // H = {0,1} in GF(4), d = 2, A(h1,h2) = h1*h2 extends to z1*z2.
    const LdeParams params(Field(2), 2, 2);
    const Field& f = params.field;
    std::vector<uint32_t> raw(4);
    for (uint64_t i = 0; i < 4; ++i) {
        const Point h = params.pi_inverse(i);
        raw[i] = (h[0] * h[1]).value;
    }
    const DataTable data = data_table_from_values(params, raw);
    const MultiPoly lde = interpolate_lde(params, data);

    MultiPoly expected(f, 2);
    expected.add_term({1, 1}, f.one());
    CHECK(lde == expected);

    // direct Lagrange-evaluation oracle at all 16 points
    for (uint64_t i = 0; i < 16; ++i) {
        const Point z = point_from_index(f, 2, i);
        CHECK(lde.evaluate(z) == oracles::lde_eval(params, data, z));
    }
}

TEST_CASE("constant data extends to a constant") {
    const LdeParams params(Field(4), 2, 4);
    std::vector<uint32_t> raw(16, 5);
    const MultiPoly lde = interpolate_lde(params, data_table_from_values(params, raw));
    CHECK(lde == MultiPoly::constant(params.field, 2, params.field.elem(5)));
}

TEST_CASE("identity line through two points") {
    const LdeParams params(Field(2), 1, 2);
    const MultiPoly lde =
        interpolate_lde(params, data_table_from_values(params, {0, 1}));
    CHECK(lde == MultiPoly::variable(params.field, 1, 0));
}

TEST_CASE("interpolation contract on H^d and degree bounds") {
    const LdeParams params(Field(4), 2, 4);
    Rng rng(5);
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<uint32_t> raw(params.domain_size());
        for (auto& v : raw) v = static_cast<uint32_t>(rng.below(16));
        const DataTable data = data_table_from_values(params, raw);
        const MultiPoly lde = interpolate_lde(params, data);
        for (uint64_t i = 0; i < params.domain_size(); ++i)
            CHECK(lde.evaluate(params.pi_inverse(i)) == data.values[i]);
        CHECK(lde.degree_in(0) <= 3);
        CHECK(lde.degree_in(1) <= 3);
        CHECK(lde.total_degree() <= params.default_degree_bound());

        // oracle: direct Lagrange evaluation at a few outside points
        for (uint64_t i = 0; i < 8; ++i) {
            const Point z = point_from_index(params.field, 2, rng.below(256));
            CHECK(lde.evaluate(z) == oracles::lde_eval(params, data, z));
        }
    }
    CHECK_THROWS_AS(interpolate_lde(params, DataTable{}), std::invalid_argument);
}

TEST_CASE("the low degree extension is unique") {
    // d=2, |H|=2 over GF(4): enumerate all 256 multilinear polynomials and
    // count the ones agreeing with the data on H^2.
    const LdeParams params(Field(2), 2, 2);
    const Field& f = params.field;
    const DataTable data = data_table_from_values(params, {2, 0, 1, 3});
    const MultiPoly lde = interpolate_lde(params, data);

    const std::vector<std::vector<uint16_t>> monos{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    unsigned agreeing = 0;
    bool found_lde = false;
    for (uint32_t c = 0; c < 256; ++c) {
        MultiPoly p(f, 2);
        uint32_t rest = c;
        for (const auto& e : monos) {
            p.add_term(e, f.elem(rest % 4));
            rest /= 4;
        }
        bool ok = true;
        for (uint64_t i = 0; i < 4 && ok; ++i)
            ok = p.evaluate(params.pi_inverse(i)) == data.values[i];
        if (ok) {
            ++agreeing;
            if (p == lde) found_lde = true;
        }
    }
    CHECK(agreeing == 1);
    CHECK(found_lde);
}

TEST_CASE("the low degree extension is unique, |H| = 3") {
    // d=2, |H|=3 over GF(4): 4^9 candidate coefficient vectors over the
    // per-variable-degree-<=2 monomials, evaluated directly.
    const LdeParams params(Field(2), 2, 3);
    const Field& f = params.field;
    const DataTable data = data_table_from_values(params, {1, 0, 2, 3, 3, 0, 1, 2, 0});
    const MultiPoly lde = interpolate_lde(params, data);

    std::vector<std::vector<uint16_t>> monos;
    for (uint16_t e1 = 0; e1 <= 2; ++e1)
        for (uint16_t e2 = 0; e2 <= 2; ++e2) monos.push_back({e1, e2});

    // monomial values at the 9 domain points
    std::vector<std::array<uint32_t, 9>> mono_vals(monos.size());
    for (size_t m = 0; m < monos.size(); ++m)
        for (uint64_t i = 0; i < 9; ++i) {
            const Point h = params.pi_inverse(i);
            mono_vals[m][i] =
                (h[0].pow(monos[m][0]) * h[1].pow(monos[m][1])).value;
        }

    uint64_t agreeing = 0;
    for (uint64_t cand = 0; cand < (1ull << 18); ++cand) { // 4^9
        uint64_t rest = cand;
        uint32_t coeff[9];
        for (size_t m = 0; m < 9; ++m) {
            coeff[m] = static_cast<uint32_t>(rest & 3);
            rest >>= 2;
        }
        bool ok = true;
        for (uint64_t i = 0; i < 9 && ok; ++i) {
            uint32_t acc = 0;
            for (size_t m = 0; m < 9; ++m)
                if (coeff[m] != 0) acc ^= (f.elem(coeff[m]) * f.elem(mono_vals[m][i])).value;
            ok = acc == data.values[i].value;
        }
        if (!ok) continue;
        ++agreeing;
        // the unique survivor is the interpolated extension
        MultiPoly p(f, 2);
        for (size_t m = 0; m < 9; ++m) p.add_term(monos[m], f.elem(coeff[m]));
        CHECK(p == lde);
    }
    CHECK(agreeing == 1);
}

TEST_CASE("evaluate") {
    const Field f(2);
    const MultiPoly zero(f, 3);
    CHECK(zero.evaluate(pt(f, {1, 2, 3})).is_zero());
    MultiPoly p(f, 2);
    p.add_term({1, 1}, f.one());
    CHECK(p.evaluate(pt(f, {2, 3})) == f.elem(2) * f.elem(3));
    CHECK_THROWS_AS(p.evaluate(pt(f, {1})), std::invalid_argument);
}

TEST_CASE("restriction to subspaces") {
    const Field f(2);
    MultiPoly p(f, 2);
    p.add_term({1, 1}, f.one()); // z1*z2

    // line t -> (t, t)
    const auto diag = AffineSubspace::from_basis(pt(f, {0, 0}), {pt(f, {1, 1})});
    MultiPoly expected(f, 1);
    expected.add_term({2}, f.one());
    CHECK(restrict_to_subspace(p, diag) == expected);

    // constants restrict to themselves
    const MultiPoly c = MultiPoly::constant(f, 2, f.elem(3));
    CHECK(restrict_to_subspace(c, diag) == MultiPoly::constant(f, 1, f.elem(3)));

    // pointwise identity on every line, and degree never increases
    const LdeParams params(f, 2, 2);
    Rng rng(9);
    std::vector<uint32_t> raw(4);
    for (auto& v : raw) v = static_cast<uint32_t>(rng.below(4));
    const MultiPoly lde = interpolate_lde(params, data_table_from_values(params, raw));
    for (const auto& line : all_lines(f, 2)) {
        const UniPoly g = restrict_to_line(lde, line);
        CHECK(g.degree() <= static_cast<int>(lde.total_degree()));
        for (const auto& t : f.elements()) CHECK(g.evaluate(t) == lde.evaluate(line.at(t)));
    }
}

TEST_CASE("fit_univariate") {
    const Field f(2);
    // values of t^2
    std::vector<FieldElem> values;
    for (const auto& t : f.elements()) values.push_back(t * t);
    const auto g2 = fit_univariate(f, values, 2);
    REQUIRE(g2.has_value());
    CHECK(g2->degree() == 2);
    CHECK(g2->coeff(2) == f.one());
    CHECK(!fit_univariate(f, values, 1).has_value());

    // honest restriction accepted at the tight bound
    const LdeParams params(f, 2, 2);
    const MultiPoly lde =
        interpolate_lde(params, data_table_from_values(params, {1, 2, 3, 0}));
    const Line line = line_through(pt(f, {0, 1}), pt(f, {2, 3}));
    std::vector<FieldElem> vals;
    for (const auto& t : f.elements()) vals.push_back(lde.evaluate(line.at(t)));
    CHECK(fit_univariate(f, vals, params.default_degree_bound()).has_value());
}

TEST_CASE("fit_bivariate") {
    const Field f(2);
    Rng rng(4);
    MultiPoly p(f, 2);
    p.add_term({1, 1}, f.elem(2));
    p.add_term({0, 1}, f.elem(3));
    p.add_term({2, 0}, f.elem(1));
    std::vector<FieldElem> values(16, f.zero());
    for (uint32_t t1 = 0; t1 < 4; ++t1)
        for (uint32_t t2 = 0; t2 < 4; ++t2)
            values[t1 * 4 + t2] = p.evaluate(pt(f, {t1, t2}));
    const auto fit = fit_bivariate(f, values, 2);
    REQUIRE(fit.has_value());
    CHECK(*fit == p);
    CHECK(!fit_bivariate(f, values, 1).has_value());
}

TEST_CASE("compose_affine") {
    const Field f(4);
    Rng rng(8);
    std::vector<FieldElem> coeffs;
    for (int i = 0; i < 5; ++i) coeffs.push_back(f.elem(static_cast<uint32_t>(rng.below(16))));
    const UniPoly p(f, coeffs);
    const FieldElem offset = f.elem(7), scale = f.elem(11);
    const UniPoly q = p.compose_affine(offset, scale);
    CHECK(q.degree() <= p.degree());
    for (const auto& t : f.elements()) CHECK(q.evaluate(t) == p.evaluate(offset + scale * t));
}

TEST_CASE("schwartz-zippel identity testing") {
    const Field f(4);
    Rng rng(2);
    MultiPoly p(f, 2);
    p.add_term({1, 0}, f.one());
    CHECK(poly_equal_schwartz_zippel(p, p, 8, rng));

    MultiPoly q = p + MultiPoly::constant(f, 2, f.one());
    CHECK(!poly_equal_schwartz_zippel(p, q, 1, rng)); // differ everywhere

    // two distinct degree-1 polynomials agree on at most |F|^{d-1} points
    MultiPoly r1(f, 2);
    r1.add_term({1, 0}, f.elem(3));
    r1.add_term({0, 1}, f.elem(5));
    MultiPoly r2(f, 2);
    r2.add_term({1, 0}, f.elem(3));
    r2.add_term({0, 0}, f.elem(1));
    uint64_t agree = 0;
    for (uint64_t i = 0; i < 256; ++i) {
        const Point z = point_from_index(f, 2, i);
        if (r1.evaluate(z) == r2.evaluate(z)) ++agree;
    }
    CHECK(agree <= 16); // <= (r/|F|) * |F|^d with r = 1

    MultiPoly big(f, 1);
    big.add_term({16}, f.one());
    CHECK_THROWS_AS(poly_equal_schwartz_zippel(big, big, 1, rng), std::invalid_argument);
}

TEST_CASE("distinct bounded-degree polynomials agree on few points") {
    const Field f(3);
    Rng rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        const unsigned r = 3;
        std::vector<FieldElem> c1, c2;
        for (unsigned i = 0; i <= r; ++i) {
            c1.push_back(f.elem(static_cast<uint32_t>(rng.below(8))));
            c2.push_back(f.elem(static_cast<uint32_t>(rng.below(8))));
        }
        const UniPoly p1(f, c1), p2(f, c2);
        if (p1 == p2) continue;
        unsigned agree = 0;
        for (const auto& t : f.elements())
            if (p1.evaluate(t) == p2.evaluate(t)) ++agree;
        CHECK(agree <= r);
    }
}
