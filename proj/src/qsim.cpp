#include "qlab/qsim.hpp"

#include <cmath>

#include "qlab/errors.hpp"
#include "qlab/util.hpp"

namespace qlab {

QuantumState::QuantumState(Field field, unsigned d) : field_(std::move(field)), d_(d) {
    if (d_ == 0) throw std::invalid_argument("QuantumState: d must be positive");
    upow(field_.order(), d_ + 1);
}

uint64_t QuantumState::space_dim() const { return upow(field_.order(), d_ + 1); }

uint64_t QuantumState::key(const Point& z, FieldElem y) const {
    if (z.size() != d_) throw std::invalid_argument("QuantumState: dimension mismatch");
    return point_index(z) * field_.order() + y.value;
}

void QuantumState::set_amplitude(const Point& z, FieldElem y, std::complex<double> a) {
    set_amplitude_key(key(z, y), a);
}

void QuantumState::set_amplitude_key(uint64_t k, std::complex<double> a) {
    if (k >= space_dim()) throw std::invalid_argument("QuantumState: key out of range");
    if (a == std::complex<double>(0.0, 0.0)) {
        amps_.erase(k);
    } else {
        amps_[k] = a;
    }
}

std::complex<double> QuantumState::amplitude(const Point& z, FieldElem y) const {
    auto it = amps_.find(key(z, y));
    return it == amps_.end() ? std::complex<double>(0.0, 0.0) : it->second;
}

double QuantumState::total_mass() const {
    double m = 0.0;
    for (const auto& [k, a] : amps_) {
        (void)k;
        m += std::norm(a);
    }
    return m;
}

void QuantumState::check_normalized(double tol) const {
    if (std::abs(total_mass() - 1.0) > tol)
        throw std::invalid_argument("QuantumState: not normalized");
}

QuantumState QuantumState::normalized() const {
    const double m = total_mass();
    if (m == 0.0) throw std::invalid_argument("QuantumState: zero state");
    QuantumState out = *this;
    const double s = 1.0 / std::sqrt(m);
    for (auto& [k, a] : out.amps_) {
        (void)k;
        a *= s;
    }
    return out;
}

double QuantumState::point_mass(const Point& z) const {
    const uint64_t base = point_index(z) * field_.order();
    double m = 0.0;
    for (auto it = amps_.lower_bound(base); it != amps_.end() && it->first < base + field_.order();
         ++it)
        m += std::norm(it->second);
    return m;
}

double QuantumState::line_mass(const Line& l) const {
    double m = 0.0;
    for (const auto& p : line_points(l)) m += point_mass(p);
    return m;
}

QuantumState build_qlde_state(const LdeParams& params, const DataTable& data) {
    const MultiPoly lde = interpolate_lde(params, data);
    QuantumState state(params.field, params.d);
    const uint64_t npoints = upow(params.field.order(), params.d);
    if (npoints > kEnumerationLimit) throw ResourceError("build_qlde_state: domain too large");
    const double amp = 1.0 / std::sqrt(static_cast<double>(npoints));
    for (uint64_t idx = 0; idx < npoints; ++idx) {
        const Point z = point_from_index(params.field, params.d, idx);
        state.set_amplitude(z, lde.evaluate(z), amp);
    }
    state.set_qlde_form(true);
    return state;
}

std::pair<Point, FieldElem> measure_all(const QuantumState& state, Rng& rng) {
    const double total = state.total_mass();
    if (total <= 0.0) throw std::invalid_argument("measure_all: zero state");
    const double target = rng.unit() * total;
    double acc = 0.0;
    const uint32_t q = state.field().order();
    uint64_t last = 0;
    bool seen = false;
    for (const auto& [k, a] : state.amplitudes()) {
        acc += std::norm(a);
        last = k;
        seen = true;
        if (acc > target) break;
    }
    if (!seen) throw std::invalid_argument("measure_all: empty state");
    return {point_from_index(state.field(), state.dim_d(), last / q),
            state.field().elem(static_cast<uint32_t>(last % q))};
}

QuantumState apply_linear_permutation(const QuantumState& state, const LinearMap& e) {
    if (e.dim() != state.dim_d() || e.field() != state.field())
        throw std::invalid_argument("apply_linear_permutation: shape mismatch");
    if (!e.is_invertible())
        throw std::invalid_argument("apply_linear_permutation: map is singular");
    QuantumState out(state.field(), state.dim_d());
    const uint32_t q = state.field().order();
    for (const auto& [k, a] : state.amplitudes()) {
        const Point z = point_from_index(state.field(), state.dim_d(), k / q);
        const uint64_t nk = point_index(e.apply(z)) * q + (k % q);
        out.set_amplitude_key(nk, a);
    }
    return out;
}

double LineState::total_mass() const {
    double m = 0.0;
    for (const auto& a : amp) m += std::norm(a);
    return m;
}

PrefixOutcome measure_prefix(const QuantumState& transformed, const LinearMap& e, Rng& rng) {
    const uint32_t q = transformed.field().order();
    const unsigned d = transformed.dim_d();
    if (d < 2) throw std::invalid_argument("measure_prefix: need at least two point registers");

    // Key layout is big-endian, so a prefix b corresponds to the contiguous
    // key range [b * q^2, (b+1) * q^2).
    const uint64_t fiber_size = static_cast<uint64_t>(q) * q;
    std::map<uint64_t, double> fiber_mass;
    double total = 0.0;
    for (const auto& [k, a] : transformed.amplitudes()) {
        const double m = std::norm(a);
        fiber_mass[k / fiber_size] += m;
        total += m;
    }
    if (total <= 0.0) throw std::invalid_argument("measure_prefix: zero state");

    const double target = rng.unit() * total;
    double acc = 0.0;
    uint64_t chosen = fiber_mass.begin()->first;
    for (const auto& [prefix, m] : fiber_mass) {
        acc += m;
        chosen = prefix;
        if (acc > target) break;
    }
    const double mass = fiber_mass[chosen];

    // Decode the prefix into b_1..b_{d-1}.
    std::vector<FieldElem> b(d - 1, transformed.field().zero());
    uint64_t rest = chosen;
    for (unsigned i = d - 1; i-- > 0;) {
        b[i] = transformed.field().elem(static_cast<uint32_t>(rest % q));
        rest /= q;
    }

    LineState collapsed{transformed.field(), std::vector<std::complex<double>>(fiber_size)};
    const double scale = 1.0 / std::sqrt(mass);
    const uint64_t base = chosen * fiber_size;
    for (auto it = transformed.amplitudes().lower_bound(base);
         it != transformed.amplitudes().end() && it->first < base + fiber_size; ++it)
        collapsed.amp[it->first - base] = it->second * scale;

    auto [u, v] = solve_line_from_prefix(e, b);
    Line line = line_through(u, v);
    return PrefixOutcome{std::move(b), std::move(collapsed), std::move(u), std::move(v),
                         std::move(line), mass / total};
}

LineState build_line_state(const UniPoly& g) {
    const Field& field = g.field();
    const uint32_t q = field.order();
    LineState s{field, std::vector<std::complex<double>>(static_cast<size_t>(q) * q)};
    const double amp = 1.0 / std::sqrt(static_cast<double>(q));
    for (uint32_t t = 0; t < q; ++t)
        s.amp[static_cast<size_t>(t) * q + g.evaluate(field.elem(t)).value] = amp;
    return s;
}

double projection_prob(const LineState& phi, const LineState& e1) {
    if (phi.amp.size() != e1.amp.size())
        throw std::invalid_argument("projection_prob: shape mismatch");
    std::complex<double> ip(0.0, 0.0);
    for (size_t i = 0; i < phi.amp.size(); ++i) ip += std::conj(e1.amp[i]) * phi.amp[i];
    return std::norm(ip);
}

} // namespace qlab
