#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qlab/gf.hpp"
#include "qlab/rng.hpp"

namespace qlab {

// ---- point helpers -------------------------------------------------------

/// Flat index of a point, first coordinate most significant. Doubles as the
/// lexicographic order used everywhere.
uint64_t point_index(const Point& p);
Point point_from_index(const Field& field, unsigned d, uint64_t index);

Point add_points(const Point& x, const Point& y);
inline Point sub_points(const Point& x, const Point& y) { return add_points(x, y); }
Point scale_point(const Point& x, FieldElem c);
bool is_zero_point(const Point& x);

/// Number of line directions in F^d: (|F|^d - 1) / (|F| - 1). Also the number
/// of lines through each point.
uint64_t num_directions(const Field& field, unsigned d);

// ---- lines ---------------------------------------------------------------

/// The line {base + dir*t : t in F}; dir is nonzero.
struct Line {
    Point base;
    Point dir;

    Point at(FieldElem t) const;
};

/// Line through w (t=0) and z (t=1). Throws if w == z.
Line line_through(const Point& w, const Point& z);

/// All |F| points of the line, indexed by the encoding of t.
std::vector<Point> line_points(const Line& l);

/// Canonical representative of the line's point set: dir rescaled so its
/// first nonzero coordinate is 1, base replaced by the lexicographically
/// smallest point on the line. Idempotent; equal point sets canonicalize
/// identically.
Line canonical_line(const Line& l);

/// Compact key of a canonical line, (index of base, index of dir).
std::pair<uint64_t, uint64_t> line_key(const Line& canonical);

/// Every line of F^d exactly once, in canonical form.
/// Count = num_directions * |F|^(d-1).
std::vector<Line> all_lines(const Field& field, unsigned d);

// ---- affine subspaces ----------------------------------------------------

/// Affine subspace given by a base point and a list of direction generators.
/// Subspaces built through from_basis (and all span-producing operations)
/// carry linearly independent directions; from_generators additionally admits
/// dependent generator lists, which arise when a "plane" through collinear
/// points keeps its bivariate parameterization.
class AffineSubspace {
public:
    static AffineSubspace from_basis(Point base, std::vector<Point> dirs);
    static AffineSubspace from_generators(Point base, std::vector<Point> gens);

    const Point& base() const { return base_; }
    const std::vector<Point>& dirs() const { return dirs_; }

    /// Number of parameterization variables (generator count).
    unsigned num_params() const { return static_cast<unsigned>(dirs_.size()); }
    /// Affine dimension of the point set.
    unsigned rank() const { return rank_; }
    bool is_degenerate() const { return rank_ < num_params(); }

    unsigned ambient_dim() const { return static_cast<unsigned>(base_.size()); }

    /// base + sum_k params[k] * dirs[k].
    Point point_at(std::span<const FieldElem> params) const;

    /// The distinct points of the subspace, sorted by point_index.
    std::vector<Point> points() const;

    bool contains(const Point& p) const;

private:
    AffineSubspace(Point base, std::vector<Point> dirs, unsigned rank);
    Point base_;
    std::vector<Point> dirs_;
    unsigned rank_;
};

/// Plane {w + (z-w)*t1 + (w2-w)*t2}. The three points must be pairwise
/// distinct; a collinear triple yields dependent generators and the bivariate
/// parameterization is kept.
AffineSubspace plane_through(const Point& w, const Point& w2, const Point& z);

/// Unique representative of the subspace's point set: directions in reduced
/// row echelon form, base reduced to zero at every pivot coordinate.
AffineSubspace canonical_subspace(const AffineSubspace& s);

/// Serialization key of canonical_subspace(s): rank, then dir indices, then
/// base index.
std::vector<uint64_t> subspace_key(const AffineSubspace& s);

/// Parameters t with s.point_at(t) == p, for subspaces with independent
/// dirs. nullopt if p is not in the subspace.
std::optional<std::vector<FieldElem>> coords_in_subspace(const AffineSubspace& s, const Point& p);

/// Affine span of a nonempty point set (base = first point).
AffineSubspace affine_span(const std::vector<Point>& pts);

/// Smallest affine subspace containing the line and every point of tau.
AffineSubspace smallest_affine_containing(const Line& l, const std::vector<Point>& tau);

/// Uniformly random affine subspace of dimension target_dim containing s,
/// by rejection sampling of independent extension directions.
AffineSubspace random_extension_to_dim(const AffineSubspace& s, unsigned target_dim, Rng& rng);

/// Every affine subspace of dimension target_dim containing s, canonical form.
std::vector<AffineSubspace> all_superspaces(const AffineSubspace& s, unsigned target_dim);

// ---- linear maps ---------------------------------------------------------

/// Linear map F^d -> F^d given by a d x d matrix (row-major).
class LinearMap {
public:
    LinearMap(Field field, unsigned d, std::vector<FieldElem> entries);
    static LinearMap identity(const Field& field, unsigned d);

    const Field& field() const { return field_; }
    unsigned dim() const { return d_; }
    FieldElem entry(unsigned row, unsigned col) const { return m_[row * d_ + col]; }

    Point apply(const Point& p) const;
    FieldElem det() const;
    bool is_invertible() const { return !det().is_zero(); }
    LinearMap inverse() const;

private:
    Field field_;
    unsigned d_;
    std::vector<FieldElem> m_;
};

/// Uniform over invertible d x d matrices, by rejection (draw uniform,
/// accept iff the determinant is nonzero).
LinearMap random_invertible_map(const Field& field, unsigned d, Rng& rng);

/// The solution set of E(z)_1..E(z)_{d-1} = b is a line; returns (u, v) with
/// E(u) = (b, 0) and E(v) = (b, 1), so the line is {u + (v-u)*t}.
std::pair<Point, Point> solve_line_from_prefix(const LinearMap& e, const std::vector<FieldElem>& b);

/// Rank of a list of vectors over F.
unsigned rank_of(std::vector<Point> rows);

} // namespace qlab
