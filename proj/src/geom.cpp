#include "qlab/geom.hpp"

#include <algorithm>
#include <functional>

#include "qlab/errors.hpp"
#include "qlab/util.hpp"

namespace qlab {

namespace {

// Reduced row echelon form over F; dependent rows are dropped.
std::vector<Point> rref(std::vector<Point> rows) {
    if (rows.empty()) return rows;
    const size_t width = rows[0].size();
    size_t r = 0;
    for (size_t col = 0; col < width && r < rows.size(); ++col) {
        size_t pivot = r;
        while (pivot < rows.size() && rows[pivot][col].is_zero()) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[r], rows[pivot]);
        const FieldElem scale = rows[r][col].inverse();
        for (auto& x : rows[r]) x = x * scale;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][col].is_zero()) continue;
            const FieldElem f = rows[i][col];
            for (size_t j = 0; j < width; ++j) rows[i][j] = rows[i][j] + f * rows[r][j];
        }
        ++r;
    }
    rows.resize(r);
    return rows;
}

unsigned pivot_column(const Point& row) {
    for (size_t j = 0; j < row.size(); ++j)
        if (!row[j].is_zero()) return static_cast<unsigned>(j);
    throw std::logic_error("geom: zero row has no pivot");
}

// All full-rank k x n matrices over F in reduced row echelon form, as rows of
// raw encodings. Enumerates pivot-column combinations, then free entries.
template <typename Emit>
void enumerate_rref(uint32_t q, unsigned k, unsigned n, const Emit& emit) {
    if (k == 0) {
        emit(std::vector<std::vector<uint32_t>>{});
        return;
    }
    std::vector<unsigned> pivots(k);
    std::function<void(unsigned, unsigned)> choose = [&](unsigned idx, unsigned start) {
        if (idx == k) {
            std::vector<std::pair<unsigned, unsigned>> free_pos; // (row, col)
            std::vector<char> is_pivot(n, 0);
            for (unsigned c : pivots) is_pivot[c] = 1;
            for (unsigned i = 0; i < k; ++i)
                for (unsigned c = pivots[i] + 1; c < n; ++c)
                    if (!is_pivot[c]) free_pos.emplace_back(i, c);

            std::vector<std::vector<uint32_t>> m(k, std::vector<uint32_t>(n, 0));
            for (unsigned i = 0; i < k; ++i) m[i][pivots[i]] = 1;

            std::vector<uint32_t> digits(free_pos.size(), 0);
            while (true) {
                for (size_t t = 0; t < free_pos.size(); ++t)
                    m[free_pos[t].first][free_pos[t].second] = digits[t];
                emit(m);
                size_t t = 0;
                while (t < digits.size() && ++digits[t] == q) digits[t++] = 0;
                if (t == digits.size()) break;
            }
            return;
        }
        for (unsigned c = start; c + (k - idx) <= n; ++c) {
            pivots[idx] = c;
            choose(idx + 1, c + 1);
        }
    };
    choose(0, 0);
}

} // namespace

// ---- point helpers -------------------------------------------------------

uint64_t point_index(const Point& p) {
    if (p.empty()) throw std::invalid_argument("geom: empty point");
    const uint64_t q = elem_order(p[0]);
    uint64_t idx = 0;
    for (const auto& c : p) idx = idx * q + c.value;
    return idx;
}

Point point_from_index(const Field& field, unsigned d, uint64_t index) {
    Point p(d, field.zero());
    const uint64_t q = field.order();
    for (unsigned i = d; i-- > 0;) {
        p[i] = field.elem(static_cast<uint32_t>(index % q));
        index /= q;
    }
    if (index != 0) throw std::invalid_argument("geom: point index out of range");
    return p;
}

Point add_points(const Point& x, const Point& y) {
    if (x.size() != y.size()) throw std::invalid_argument("geom: dimension mismatch");
    Point out(x.size(), FieldElem{});
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

Point scale_point(const Point& x, FieldElem c) {
    Point out(x.size(), FieldElem{});
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] * c;
    return out;
}

bool is_zero_point(const Point& x) {
    return std::all_of(x.begin(), x.end(), [](FieldElem c) { return c.is_zero(); });
}

uint64_t num_directions(const Field& field, unsigned d) {
    return (upow(field.order(), d) - 1) / (field.order() - 1);
}

// ---- lines ---------------------------------------------------------------

Point Line::at(FieldElem t) const { return add_points(base, scale_point(dir, t)); }

Line line_through(const Point& w, const Point& z) {
    if (w.size() != z.size()) throw std::invalid_argument("geom: dimension mismatch");
    const Point dir = sub_points(z, w);
    if (is_zero_point(dir)) throw std::invalid_argument("geom: degenerate line through equal points");
    return Line{w, dir};
}

std::vector<Point> line_points(const Line& l) {
    const uint32_t q = elem_order(l.base.at(0));
    std::vector<Point> pts;
    pts.reserve(q);
    for (uint32_t t = 0; t < q; ++t) pts.push_back(l.at(FieldElem{t, l.base[0].impl}));
    return pts;
}

Line canonical_line(const Line& l) {
    if (is_zero_point(l.dir)) throw std::invalid_argument("geom: line with zero direction");
    const unsigned k = pivot_column(l.dir);
    const Point dir = scale_point(l.dir, l.dir[k].inverse());
    Point best = l.base;
    uint64_t best_idx = point_index(best);
    const uint32_t q = elem_order(l.base[0]);
    for (uint32_t t = 1; t < q; ++t) {
        Point cand = add_points(l.base, scale_point(dir, FieldElem{t, l.base[0].impl}));
        const uint64_t idx = point_index(cand);
        if (idx < best_idx) {
            best_idx = idx;
            best = std::move(cand);
        }
    }
    return Line{best, dir};
}

std::pair<uint64_t, uint64_t> line_key(const Line& canonical) {
    return {point_index(canonical.base), point_index(canonical.dir)};
}

std::vector<Line> all_lines(const Field& field, unsigned d) {
    const uint64_t npoints = upow(field.order(), d);
    if (npoints > kEnumerationLimit) throw ResourceError("geom: too many points to enumerate lines");
    const uint32_t q = field.order();

    // Canonical directions: first nonzero coordinate equals 1.
    std::vector<Point> directions;
    for (unsigned pivot = 0; pivot < d; ++pivot) {
        const uint64_t tail = upow(q, d - pivot - 1);
        for (uint64_t suffix = 0; suffix < tail; ++suffix) {
            Point dir(d, field.zero());
            dir[pivot] = field.one();
            uint64_t s = suffix;
            for (unsigned i = d; i-- > pivot + 1;) {
                dir[i] = field.elem(static_cast<uint32_t>(s % q));
                s /= q;
            }
            directions.push_back(std::move(dir));
        }
    }

    std::vector<Line> lines;
    lines.reserve(directions.size() * (npoints / q));
    std::vector<char> visited(npoints);
    for (const auto& dir : directions) {
        std::fill(visited.begin(), visited.end(), 0);
        for (uint64_t pi = 0; pi < npoints; ++pi) {
            if (visited[pi]) continue;
            const Point base = point_from_index(field, d, pi);
            Line l{base, dir};
            for (uint32_t t = 0; t < q; ++t) visited[point_index(l.at(field.elem(t)))] = 1;
            lines.push_back(std::move(l));
        }
    }
    return lines;
}

// ---- affine subspaces ----------------------------------------------------

AffineSubspace::AffineSubspace(Point base, std::vector<Point> dirs, unsigned rank)
    : base_(std::move(base)), dirs_(std::move(dirs)), rank_(rank) {}

AffineSubspace AffineSubspace::from_basis(Point base, std::vector<Point> dirs) {
    const unsigned r = rank_of(dirs);
    if (r != dirs.size())
        throw std::invalid_argument("geom: subspace basis is linearly dependent");
    return AffineSubspace(std::move(base), std::move(dirs), r);
}

AffineSubspace AffineSubspace::from_generators(Point base, std::vector<Point> gens) {
    const unsigned r = rank_of(gens);
    return AffineSubspace(std::move(base), std::move(gens), r);
}

Point AffineSubspace::point_at(std::span<const FieldElem> params) const {
    if (params.size() != dirs_.size())
        throw std::invalid_argument("geom: parameter count mismatch");
    Point p = base_;
    for (size_t k = 0; k < dirs_.size(); ++k) p = add_points(p, scale_point(dirs_[k], params[k]));
    return p;
}

std::vector<Point> AffineSubspace::points() const {
    const auto basis = rref(dirs_);
    const uint32_t q = base_.empty() ? 0 : elem_order(base_[0]);
    const uint64_t count = upow(q, static_cast<unsigned>(basis.size()));
    if (count > kEnumerationLimit) throw ResourceError("geom: subspace too large to enumerate");
    std::vector<Point> pts;
    pts.reserve(count);
    for (uint64_t idx = 0; idx < count; ++idx) {
        Point p = base_;
        uint64_t s = idx;
        for (size_t k = basis.size(); k-- > 0;) {
            const uint32_t t = static_cast<uint32_t>(s % q);
            s /= q;
            if (t != 0) p = add_points(p, scale_point(basis[k], FieldElem{t, base_[0].impl}));
        }
        pts.push_back(std::move(p));
    }
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return point_index(a) < point_index(b); });
    return pts;
}

bool AffineSubspace::contains(const Point& p) const {
    auto rows = rref(dirs_);
    Point rem = sub_points(p, base_);
    for (const auto& row : rows) {
        const unsigned c = pivot_column(row);
        if (!rem[c].is_zero()) rem = add_points(rem, scale_point(row, rem[c]));
    }
    return is_zero_point(rem);
}

AffineSubspace plane_through(const Point& w, const Point& w2, const Point& z) {
    if (w == w2 || w == z || w2 == z)
        throw std::invalid_argument("geom: plane through coincident points");
    return AffineSubspace::from_generators(w, {sub_points(z, w), sub_points(w2, w)});
}

AffineSubspace canonical_subspace(const AffineSubspace& s) {
    auto rows = rref(s.dirs());
    Point base = s.base();
    for (const auto& row : rows) {
        const unsigned c = pivot_column(row);
        if (!base[c].is_zero()) base = add_points(base, scale_point(row, base[c]));
    }
    return AffineSubspace::from_basis(std::move(base), std::move(rows));
}

std::vector<uint64_t> subspace_key(const AffineSubspace& s) {
    const AffineSubspace c = canonical_subspace(s);
    std::vector<uint64_t> key;
    key.push_back(c.rank());
    for (const auto& dir : c.dirs()) key.push_back(point_index(dir));
    key.push_back(point_index(c.base()));
    return key;
}

std::optional<std::vector<FieldElem>> coords_in_subspace(const AffineSubspace& s, const Point& p) {
    if (s.is_degenerate())
        throw std::invalid_argument("geom: coordinates need independent directions");
    const unsigned d = s.ambient_dim();
    const unsigned k = s.num_params();
    // Solve sum_j t_j * dirs[j][i] = (p - base)[i] by elimination on the
    // (d x (k+1)) augmented system.
    std::vector<Point> rows(d);
    const Point rhs = sub_points(p, s.base());
    for (unsigned i = 0; i < d; ++i) {
        Point row(k + 1, FieldElem{});
        for (unsigned j = 0; j < k; ++j) row[j] = s.dirs()[j][i];
        row[k] = rhs[i];
        rows[i] = std::move(row);
    }
    auto reduced = rref(std::move(rows));
    std::vector<FieldElem> t(k, FieldElem{0, s.base()[0].impl});
    for (const auto& row : reduced) {
        const unsigned c = pivot_column(row);
        if (c == k) return std::nullopt; // inconsistent: 0 = nonzero
        t[c] = row[k];
        for (unsigned j = c + 1; j < k; ++j)
            if (!row[j].is_zero())
                throw std::logic_error("geom: unexpected free variable in full-rank solve");
    }
    return t;
}

AffineSubspace affine_span(const std::vector<Point>& pts) {
    if (pts.empty()) throw std::invalid_argument("geom: affine span of empty set");
    std::vector<Point> dirs;
    for (size_t i = 1; i < pts.size(); ++i) {
        const Point off = sub_points(pts[i], pts[0]);
        if (is_zero_point(off)) continue;
        std::vector<Point> trial = dirs;
        trial.push_back(off);
        if (rank_of(trial) > dirs.size()) dirs.push_back(off);
    }
    return AffineSubspace::from_basis(pts[0], std::move(dirs));
}

AffineSubspace smallest_affine_containing(const Line& l, const std::vector<Point>& tau) {
    if (tau.empty()) throw std::invalid_argument("geom: empty point set");
    std::vector<Point> dirs{l.dir};
    for (const auto& p : tau) {
        const Point off = sub_points(p, l.base);
        if (is_zero_point(off)) continue;
        std::vector<Point> trial = dirs;
        trial.push_back(off);
        if (rank_of(trial) > dirs.size()) dirs.push_back(off);
    }
    return AffineSubspace::from_basis(l.base, std::move(dirs));
}

AffineSubspace random_extension_to_dim(const AffineSubspace& s, unsigned target_dim, Rng& rng) {
    if (target_dim > s.ambient_dim())
        throw std::invalid_argument("geom: target dimension exceeds ambient space");
    if (target_dim < s.rank())
        throw std::invalid_argument("geom: target dimension below subspace dimension");
    if (target_dim == s.rank()) return s;

    const uint32_t q = elem_order(s.base()[0]);
    std::vector<Point> dirs = rref(s.dirs());
    while (dirs.size() < target_dim) {
        Point v(s.ambient_dim(), FieldElem{});
        for (auto& c : v) c = FieldElem{static_cast<uint32_t>(rng.below(q)), s.base()[0].impl};
        std::vector<Point> trial = dirs;
        trial.push_back(v);
        if (rank_of(trial) > dirs.size()) dirs.push_back(std::move(v));
    }
    return AffineSubspace::from_basis(s.base(), std::move(dirs));
}

std::vector<AffineSubspace> all_superspaces(const AffineSubspace& s, unsigned target_dim) {
    const unsigned d = s.ambient_dim();
    if (target_dim > d) throw std::invalid_argument("geom: target dimension exceeds ambient space");
    if (target_dim < s.rank())
        throw std::invalid_argument("geom: target dimension below subspace dimension");

    const AffineSubspace canon = canonical_subspace(s);
    if (target_dim == canon.rank()) return {canon};

    const std::vector<Point>& basis = canon.dirs();
    std::vector<char> is_pivot(d, 0);
    for (const auto& row : basis) is_pivot[pivot_column(row)] = 1;
    std::vector<unsigned> free_cols;
    for (unsigned c = 0; c < d; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    // Containing subspaces correspond to subspaces of the quotient by the
    // span of the basis. Quotient coordinates live on the non-pivot columns;
    // lifting a quotient vector places its entries there, which is a valid
    // coset representative since reduction by the RREF basis leaves vectors
    // supported on non-pivot columns untouched.
    const unsigned k = target_dim - canon.rank();
    const unsigned n = static_cast<unsigned>(free_cols.size());
    const auto* impl = canon.base()[0].impl;
    const uint32_t q = elem_order(canon.base()[0]);

    std::vector<AffineSubspace> out;
    enumerate_rref(q, k, n, [&](const std::vector<std::vector<uint32_t>>& qrows) {
        std::vector<Point> dirs = canon.dirs();
        for (const auto& qrow : qrows) {
            Point v(d, FieldElem{0, impl});
            for (unsigned t = 0; t < n; ++t) v[free_cols[t]] = FieldElem{qrow[t], impl};
            dirs.push_back(std::move(v));
        }
        out.push_back(canonical_subspace(AffineSubspace::from_basis(canon.base(), std::move(dirs))));
    });
    return out;
}

// ---- linear maps ---------------------------------------------------------

LinearMap::LinearMap(Field field, unsigned d, std::vector<FieldElem> entries)
    : field_(std::move(field)), d_(d), m_(std::move(entries)) {
    if (m_.size() != static_cast<size_t>(d_) * d_)
        throw std::invalid_argument("geom: matrix entry count mismatch");
}

LinearMap LinearMap::identity(const Field& field, unsigned d) {
    std::vector<FieldElem> m(static_cast<size_t>(d) * d, field.zero());
    for (unsigned i = 0; i < d; ++i) m[i * d + i] = field.one();
    return LinearMap(field, d, std::move(m));
}

Point LinearMap::apply(const Point& p) const {
    if (p.size() != d_) throw std::invalid_argument("geom: dimension mismatch");
    Point out(d_, field_.zero());
    for (unsigned i = 0; i < d_; ++i) {
        FieldElem acc = field_.zero();
        for (unsigned j = 0; j < d_; ++j) acc = acc + m_[i * d_ + j] * p[j];
        out[i] = acc;
    }
    return out;
}

FieldElem LinearMap::det() const {
    std::vector<FieldElem> m = m_;
    FieldElem det = field_.one();
    for (unsigned col = 0, row = 0; col < d_ && row < d_; ++col) {
        unsigned pivot = row;
        while (pivot < d_ && m[pivot * d_ + col].is_zero()) ++pivot;
        if (pivot == d_) return field_.zero();
        if (pivot != row)
            for (unsigned j = 0; j < d_; ++j) std::swap(m[row * d_ + j], m[pivot * d_ + j]);
        det = det * m[row * d_ + col];
        const FieldElem inv = m[row * d_ + col].inverse();
        for (unsigned i = row + 1; i < d_; ++i) {
            if (m[i * d_ + col].is_zero()) continue;
            const FieldElem f = m[i * d_ + col] * inv;
            for (unsigned j = col; j < d_; ++j)
                m[i * d_ + j] = m[i * d_ + j] + f * m[row * d_ + j];
        }
        ++row;
    }
    return det;
}

LinearMap LinearMap::inverse() const {
    // Gauss-Jordan on [M | I].
    const unsigned d = d_;
    std::vector<FieldElem> m = m_;
    std::vector<FieldElem> inv(static_cast<size_t>(d) * d, field_.zero());
    for (unsigned i = 0; i < d; ++i) inv[i * d + i] = field_.one();

    for (unsigned col = 0; col < d; ++col) {
        unsigned pivot = col;
        while (pivot < d && m[pivot * d + col].is_zero()) ++pivot;
        if (pivot == d) throw std::invalid_argument("geom: singular linear map");
        if (pivot != col)
            for (unsigned j = 0; j < d; ++j) {
                std::swap(m[col * d + j], m[pivot * d + j]);
                std::swap(inv[col * d + j], inv[pivot * d + j]);
            }
        const FieldElem scale = m[col * d + col].inverse();
        for (unsigned j = 0; j < d; ++j) {
            m[col * d + j] = m[col * d + j] * scale;
            inv[col * d + j] = inv[col * d + j] * scale;
        }
        for (unsigned i = 0; i < d; ++i) {
            if (i == col || m[i * d + col].is_zero()) continue;
            const FieldElem f = m[i * d + col];
            for (unsigned j = 0; j < d; ++j) {
                m[i * d + j] = m[i * d + j] + f * m[col * d + j];
                inv[i * d + j] = inv[i * d + j] + f * inv[col * d + j];
            }
        }
    }
    return LinearMap(field_, d, std::move(inv));
}

LinearMap random_invertible_map(const Field& field, unsigned d, Rng& rng) {
    while (true) {
        std::vector<FieldElem> m(static_cast<size_t>(d) * d, field.zero());
        for (auto& x : m) x = field.elem(static_cast<uint32_t>(rng.below(field.order())));
        LinearMap map(field, d, std::move(m));
        if (map.is_invertible()) return map;
    }
}

std::pair<Point, Point> solve_line_from_prefix(const LinearMap& e, const std::vector<FieldElem>& b) {
    const unsigned d = e.dim();
    if (b.size() + 1 != d) throw std::invalid_argument("geom: prefix must have d-1 entries");
    const LinearMap inv = e.inverse(); // throws on singular input
    Point target(b.begin(), b.end());
    target.push_back(e.field().zero());
    Point u = inv.apply(target);
    target[d - 1] = e.field().one();
    Point v = inv.apply(target);
    return {std::move(u), std::move(v)};
}

unsigned rank_of(std::vector<Point> rows) {
    return static_cast<unsigned>(rref(std::move(rows)).size());
}

} // namespace qlab
