#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qlab/geom.hpp"
#include "qlab/gf.hpp"
#include "qlab/mpoly.hpp"
#include "qlab/rng.hpp"

namespace qlab {

/// State in H_{d+1} = C^{|F|^(d+1)}: an amplitude phi_{z,y} for every
/// (z in F^d, y in F). Stored sparsely; correct encodings have |F|^d nonzero
/// entries, adversarial states may fill the table densely.
class QuantumState {
public:
    QuantumState(Field field, unsigned d);

    const Field& field() const { return field_; }
    unsigned dim_d() const { return d_; }
    uint64_t space_dim() const; // |F|^(d+1)

    /// Key of a basis vector: point_index(z) * |F| + y.
    uint64_t key(const Point& z, FieldElem y) const;

    void set_amplitude(const Point& z, FieldElem y, std::complex<double> a);
    void set_amplitude_key(uint64_t key, std::complex<double> a);
    std::complex<double> amplitude(const Point& z, FieldElem y) const;

    const std::map<uint64_t, std::complex<double>>& amplitudes() const { return amps_; }

    /// Total probability mass (squared norm).
    double total_mass() const;
    /// Throws unless the total mass is 1 within the given tolerance.
    void check_normalized(double tol = 1e-9) const;
    QuantumState normalized() const;

    /// phi_z^2 = sum_y |phi_{z,y}|^2.
    double point_mass(const Point& z) const;
    /// phi_l^2 = sum_{z in l} phi_z^2.
    double line_mass(const Line& l) const;

    /// Marks states of quantum-low-degree-extension form (serialization hint).
    bool qlde_form() const { return qlde_form_; }
    void set_qlde_form(bool v) { qlde_form_ = v; }

private:
    Field field_;
    unsigned d_;
    std::map<uint64_t, std::complex<double>> amps_;
    bool qlde_form_ = false;
};

/// |Psi(a_1..a_{h^d})> = |F|^{-d/2} * sum_z |z>|A~(z)> where A~ is the LDE of
/// the table: exactly |F|^d equal amplitudes, one per point of F^d.
QuantumState build_qlde_state(const LdeParams& params, const DataTable& data);

/// Full measurement in the standard basis; outcome (z, y) has probability
/// |phi_{z,y}|^2.
std::pair<Point, FieldElem> measure_all(const QuantumState& state, Rng& rng);

/// Basis permutation |z>|y> -> |E(z)>|y> for invertible E. Amplitude values
/// are moved, never changed, so norm is preserved exactly.
QuantumState apply_linear_permutation(const QuantumState& state, const LinearMap& e);

/// Collapsed state on the last two registers, amplitudes indexed by
/// t * |F| + y.
struct LineState {
    Field field;
    std::vector<std::complex<double>> amp;

    double total_mass() const;
};

/// Result of measuring the first d-1 registers of U_E|Phi>: the observed
/// prefix b, the renormalized collapsed state, the induced line with its
/// (u, v) parameterization (u at t=0, v at t=1), and the outcome probability.
struct PrefixOutcome {
    std::vector<FieldElem> b;
    LineState collapsed;
    Point u;
    Point v;
    Line line;
    double probability;
};

/// Samples the prefix measurement on `transformed` (which the caller obtained
/// as U_E|Phi>); `e` is only used to derive the induced line from the result.
PrefixOutcome measure_prefix(const QuantumState& transformed, const LinearMap& e, Rng& rng);

/// |e1> = |F|^{-1/2} * sum_t |t>|g(t)>.
LineState build_line_state(const UniPoly& g);

/// |<e1|phi>|^2 — the acceptance probability of measuring phi in any
/// orthonormal basis extending e1, computed without building that basis.
double projection_prob(const LineState& phi, const LineState& e1);

} // namespace qlab
