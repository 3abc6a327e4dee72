#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "codes.hpp"
#include "rational.hpp"
#include "rng.hpp"

namespace agtensor {

/// Grid of field values indexed by (x, y) with x in [0, width) and
/// y in [0, height).  Throughout the library a *row* is the vector
/// (F(0,y), ..., F(width-1,y)) for fixed y, and a *column* fixes x.  Rows of
/// a tensor codeword lie in the row code (length = width); columns lie in
/// the column code (length = height).
class Grid {
public:
    Grid(const PrimeField& field, std::int64_t width, std::int64_t height)
        : field_(field), width_(width), height_(height),
          cells_(std::size_t(width) * std::size_t(height), 0) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("Grid: dimensions must be positive");
    }

    const PrimeField& field() const { return field_; }
    std::int64_t width() const { return width_; }
    std::int64_t height() const { return height_; }
    std::int64_t cell_count() const { return width_ * height_; }

    std::uint32_t get(std::int64_t x, std::int64_t y) const {
        check(x, y);
        return cells_[std::size_t(y) * std::size_t(width_) + std::size_t(x)];
    }
    void set(std::int64_t x, std::int64_t y, std::uint32_t value) {
        check(x, y);
        if (value >= field_.modulus())
            throw std::invalid_argument("Grid: value out of range");
        cells_[std::size_t(y) * std::size_t(width_) + std::size_t(x)] = value;
    }

    const std::uint32_t* row_ptr(std::int64_t y) const {
        return cells_.data() + std::size_t(y) * std::size_t(width_);
    }
    std::uint32_t* row_ptr(std::int64_t y) {
        return cells_.data() + std::size_t(y) * std::size_t(width_);
    }

    Vector row_copy(std::int64_t y) const {
        Vector v(field_, std::size_t(width_));
        const std::uint32_t* p = row_ptr(y);
        for (std::int64_t x = 0; x < width_; ++x) v.set(std::size_t(x), p[x]);
        return v;
    }

    Vector col_copy(std::int64_t x) const {
        Vector v(field_, std::size_t(height_));
        for (std::int64_t y = 0; y < height_; ++y) v.set(std::size_t(y), get(x, y));
        return v;
    }

    void set_row(std::int64_t y, const Vector& v) {
        if (std::int64_t(v.size()) != width_ || v.field() != field_)
            throw std::invalid_argument("Grid: row size or field mismatch");
        std::uint32_t* p = row_ptr(y);
        for (std::int64_t x = 0; x < width_; ++x) p[x] = v.get(std::size_t(x));
    }

    void set_col(std::int64_t x, const Vector& v) {
        if (std::int64_t(v.size()) != height_ || v.field() != field_)
            throw std::invalid_argument("Grid: column size or field mismatch");
        for (std::int64_t y = 0; y < height_; ++y)
            cells_[std::size_t(y) * std::size_t(width_) + std::size_t(x)] = v.get(std::size_t(y));
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.field_ == b.field_ && a.width_ == b.width_ && a.height_ == b.height_ &&
               a.cells_ == b.cells_;
    }
    friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

private:
    void check(std::int64_t x, std::int64_t y) const {
        if (x < 0 || x >= width_ || y < 0 || y >= height_)
            throw std::invalid_argument("Grid: cell index out of range");
    }

    PrimeField field_;
    std::int64_t width_, height_;
    std::vector<std::uint32_t> cells_;
};

/// Tensor product code: grids whose rows lie in `row_code` (length = grid
/// width) and whose columns lie in `col_code` (length = grid height).
struct TensorCode {
    LinearCode row_code;
    LinearCode col_code;

    TensorCode(LinearCode rows, LinearCode cols)
        : row_code(std::move(rows)), col_code(std::move(cols)) {
        if (row_code.field() != col_code.field())
            throw std::invalid_argument("TensorCode: field mismatch");
    }

    const PrimeField& field() const { return row_code.field(); }
    std::int64_t width() const { return std::int64_t(row_code.length()); }
    std::int64_t height() const { return std::int64_t(col_code.length()); }
};

/// Coefficient form of a tensor codeword: a (dim col_code) x (dim row_code)
/// matrix X, expanding to the grid G(x, y) = sum_{i,j} X[j][i] *
/// rowgen[i][x] * colgen[j][y].
struct CoefficientForm {
    Matrix coeffs;
};

/// Expands a coefficient matrix into the full grid.  Two-pass product with
/// per-cell accumulator reduction; this is one of the few hot paths at the
/// largest supported sizes.
inline Grid expand(const TensorCode& code, const CoefficientForm& form) {
    const Matrix& g1 = code.row_code.generator();  // k1 x width
    const Matrix& g2 = code.col_code.generator();  // k2 x height
    const std::size_t k1 = g1.rows(), k2 = g2.rows();
    if (form.coeffs.rows() != k2 || form.coeffs.cols() != k1 ||
        form.coeffs.field() != code.field())
        throw std::invalid_argument("expand: coefficient shape or field mismatch");
    const PrimeField& f = code.field();
    const std::int64_t w = code.width(), h = code.height();
    // partial[j][x] = sum_i X[j][i] * g1[i][x]
    Matrix partial = form.coeffs.multiplied_by(g1);  // k2 x width
    Grid out(f, w, h);
    for (std::int64_t y = 0; y < h; ++y) {
        std::uint32_t* dst = out.row_ptr(y);
        for (std::size_t j = 0; j < k2; ++j) {
            std::uint32_t gy = g2.get(j, std::size_t(y));
            if (gy == 0) continue;
            const std::uint32_t* src = partial.row_ptr(j);
            for (std::int64_t x = 0; x < w; ++x)
                dst[x] = f.add(dst[x], f.mul(gy, src[x]));
        }
    }
    return out;
}

/// Membership test: every row in the row code and every column in the column
/// code (the two conditions together characterize the tensor code).
inline bool tensor_contains(const TensorCode& code, const Grid& grid) {
    if (grid.width() != code.width() || grid.height() != code.height() ||
        grid.field() != code.field())
        throw std::invalid_argument("tensor_contains: shape or field mismatch");
    for (std::int64_t y = 0; y < grid.height(); ++y)
        if (!code.row_code.contains(grid.row_copy(y))) return false;
    for (std::int64_t x = 0; x < grid.width(); ++x)
        if (!code.col_code.contains(grid.col_copy(x))) return false;
    return true;
}

/// The tensor code flattened to a linear code of length width*height
/// (row-major by y).  Small-scale tool for exact dimension and distance
/// experiments.
inline LinearCode as_linear_code(const TensorCode& code) {
    const std::size_t k1 = code.row_code.dimension(), k2 = code.col_code.dimension();
    const std::int64_t w = code.width(), h = code.height();
    const PrimeField& f = code.field();
    Matrix rows(f, k1 * k2, std::size_t(w * h));
    std::size_t r = 0;
    for (std::size_t j = 0; j < k2; ++j)
        for (std::size_t i = 0; i < k1; ++i) {
            for (std::int64_t y = 0; y < h; ++y)
                for (std::int64_t x = 0; x < w; ++x)
                    rows.set(r, std::size_t(y * w + x),
                             f.mul(code.row_code.generator().get(i, std::size_t(x)),
                                   code.col_code.generator().get(j, std::size_t(y))));
            ++r;
        }
    return LinearCode(f, std::size_t(w * h), rows);
}

inline std::int64_t grid_disagreements(const Grid& a, const Grid& b) {
    if (a.width() != b.width() || a.height() != b.height() || a.field() != b.field())
        throw std::invalid_argument("grid_disagreements: shape or field mismatch");
    std::int64_t count = 0;
    for (std::int64_t y = 0; y < a.height(); ++y) {
        const std::uint32_t* pa = a.row_ptr(y);
        const std::uint32_t* pb = b.row_ptr(y);
        for (std::int64_t x = 0; x < a.width(); ++x) count += (pa[x] != pb[x]);
    }
    return count;
}

/// Normalized distance between two grids (disagreeing cells / all cells).
inline Rational grid_delta(const Grid& a, const Grid& b) {
    return Rational(grid_disagreements(a, b), a.cell_count());
}

struct ExhaustiveProjection {
    std::uint64_t budget = (1ull << 22);
};
struct ReferenceProjection {
    const Grid* reference;  // candidate nearest lines, certified by radius
};
using ProjectionMode = std::variant<ExhaustiveProjection, ReferenceProjection>;

struct LineProjection {
    Grid projected;
    std::int64_t total_distance;
};

/// Per-row nearest codeword in `row_code`; result rows all lie in the code.
/// In reference mode the caller supplies the candidate rows and each one is
/// certified unique-nearest via the code's distance bound.
inline LineProjection project_rows(const Grid& grid, const LinearCode& row_code,
                                   const ProjectionMode& mode) {
    if (std::int64_t(row_code.length()) != grid.width() || row_code.field() != grid.field())
        throw std::invalid_argument("project_rows: code length or field mismatch");
    Grid out(grid.field(), grid.width(), grid.height());
    std::int64_t total = 0;
    for (std::int64_t y = 0; y < grid.height(); ++y) {
        Vector row = grid.row_copy(y);
        NearestCodeword nearest =
            std::holds_alternative<ExhaustiveProjection>(mode)
                ? nearest_codeword_exhaustive(row_code, row,
                                              std::get<ExhaustiveProjection>(mode).budget)
                : nearest_codeword_reference(
                      row_code, row,
                      std::get<ReferenceProjection>(mode).reference->row_copy(y));
        out.set_row(y, nearest.codeword);
        total += nearest.distance;
    }
    return LineProjection{std::move(out), total};
}

inline LineProjection project_cols(const Grid& grid, const LinearCode& col_code,
                                   const ProjectionMode& mode) {
    if (std::int64_t(col_code.length()) != grid.height() || col_code.field() != grid.field())
        throw std::invalid_argument("project_cols: code length or field mismatch");
    Grid out(grid.field(), grid.width(), grid.height());
    std::int64_t total = 0;
    for (std::int64_t x = 0; x < grid.width(); ++x) {
        Vector col = grid.col_copy(x);
        NearestCodeword nearest =
            std::holds_alternative<ExhaustiveProjection>(mode)
                ? nearest_codeword_exhaustive(col_code, col,
                                              std::get<ExhaustiveProjection>(mode).budget)
                : nearest_codeword_reference(
                      col_code, col,
                      std::get<ReferenceProjection>(mode).reference->col_copy(x));
        out.set_col(x, nearest.codeword);
        total += nearest.distance;
    }
    return LineProjection{std::move(out), total};
}

/// Normalized distance from the grid to the nearest row-wise (respectively
/// column-wise) member of the code, i.e. to row_code tensor full-space.
inline Rational row_distance(const Grid& grid, const LinearCode& row_code,
                             const ProjectionMode& mode) {
    return Rational(project_rows(grid, row_code, mode).total_distance, grid.cell_count());
}

inline Rational col_distance(const Grid& grid, const LinearCode& col_code,
                             const ProjectionMode& mode) {
    return Rational(project_cols(grid, col_code, mode).total_distance, grid.cell_count());
}

/// Restriction of the tensor code to columns A (x positions, row-code
/// coordinates) and rows B (y positions, column-code coordinates).
inline TensorCode restrict_tensor(const TensorCode& code, const CoordinateSet& a,
                                  const CoordinateSet& b) {
    return TensorCode(restrict_code(code.row_code, a), restrict_code(code.col_code, b));
}

/// Whether the restricted tensor code equals the tensor of restrictions as a
/// set of |A| x |B| grids (span comparison after flattening).
inline bool restriction_commutes_with_tensor(const TensorCode& code, const CoordinateSet& a,
                                             const CoordinateSet& b) {
    LinearCode lhs = as_linear_code(restrict_tensor(code, a, b));
    // Restrictions of the full tensor code's basis grids to A x B.
    const std::size_t k1 = code.row_code.dimension(), k2 = code.col_code.dimension();
    const PrimeField& f = code.field();
    Matrix rows(f, k1 * k2, a.size() * b.size());
    std::size_t r = 0;
    for (std::size_t j = 0; j < k2; ++j)
        for (std::size_t i = 0; i < k1; ++i) {
            std::size_t c = 0;
            for (std::size_t yy = 0; yy < b.size(); ++yy)
                for (std::size_t xx = 0; xx < a.size(); ++xx) {
                    rows.set(r, c++,
                             f.mul(code.row_code.generator().get(i, std::size_t(a.at(xx))),
                                   code.col_code.generator().get(j, std::size_t(b.at(yy)))));
                }
            ++r;
        }
    LinearCode rhs(f, a.size() * b.size(), rows);
    return lhs == rhs;
}

/// Solves for a tensor codeword matching the given values on A x B.  Values
/// are a |A| x |B| grid (width |A|, height |B|).  The coefficient solution is
/// canonical (free variables zero); inconsistent values throw.
struct TensorExtension {
    CoefficientForm coeffs;
    Grid grid;
};

inline TensorExtension extend_from_restriction(const TensorCode& code, const CoordinateSet& a,
                                               const CoordinateSet& b, const Grid& values) {
    if (a.parent_length() != code.width() || b.parent_length() != code.height())
        throw std::invalid_argument("extend_from_restriction: coordinate set mismatch");
    if (values.width() != std::int64_t(a.size()) || values.height() != std::int64_t(b.size()) ||
        values.field() != code.field())
        throw std::invalid_argument("extend_from_restriction: value grid mismatch");
    const Matrix& g1 = code.row_code.generator();
    const Matrix& g2 = code.col_code.generator();
    const std::size_t k1 = g1.rows(), k2 = g2.rows();
    const PrimeField& f = code.field();
    // Unknown X[j][i] flattened as column j * k1 + i.
    Matrix system(f, a.size() * b.size(), k1 * k2);
    Vector rhs(f, a.size() * b.size());
    std::size_t eq = 0;
    for (std::size_t yy = 0; yy < b.size(); ++yy)
        for (std::size_t xx = 0; xx < a.size(); ++xx) {
            for (std::size_t j = 0; j < k2; ++j) {
                std::uint32_t gy = g2.get(j, std::size_t(b.at(yy)));
                if (gy == 0) continue;
                for (std::size_t i = 0; i < k1; ++i) {
                    std::uint32_t gx = g1.get(i, std::size_t(a.at(xx)));
                    if (gx == 0) continue;
                    system.set(eq, j * k1 + i, f.mul(gx, gy));
                }
            }
            rhs.set(eq, values.get(std::int64_t(xx), std::int64_t(yy)));
            ++eq;
        }
    std::optional<Vector> solution = solve(system, rhs);
    if (!solution)
        throw std::runtime_error(
            "extend_from_restriction: values are not a restricted tensor codeword");
    Matrix coeffs(f, k2, k1);
    for (std::size_t j = 0; j < k2; ++j)
        for (std::size_t i = 0; i < k1; ++i)
            coeffs.set(j, i, solution->get(j * k1 + i));
    CoefficientForm form{std::move(coeffs)};
    Grid grid = expand(code, form);
    return TensorExtension{std::move(form), std::move(grid)};
}

struct Cell {
    std::int64_t x;
    std::int64_t y;
    friend bool operator==(const Cell& a, const Cell& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(const Cell& a, const Cell& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    }
};

enum class CorruptionModel { UniformCells, RowBurst, ColBurst };

struct CorruptionResult {
    Grid grid;
    std::vector<Cell> cells;  // sorted by (x, y)
};

/// Changes exactly floor(eps * cells) cells to different field values.
/// Positions: uniform-cells draws distinct cells uniformly; row-burst fills
/// uniformly chosen rows left to right (last row partially); col-burst is the
/// transpose.  Deterministic in the seed.
inline CorruptionResult corrupt(const Grid& grid, const Rational& eps, CorruptionModel model,
                                std::uint64_t seed) {
    if (eps.sign() < 0 || eps > Rational(1))
        throw std::invalid_argument("corrupt: eps must be in [0, 1]");
    const std::int64_t total = grid.cell_count();
    const std::int64_t count =
        std::int64_t((__int128(eps.numerator()) * total) / eps.denominator());
    Grid out = grid;
    Rng rng(seed);
    std::vector<Cell> cells;
    cells.reserve(std::size_t(count));
    if (model == CorruptionModel::UniformCells) {
        std::vector<std::int64_t> ids = rng.sample_distinct(total, count);
        for (auto id : ids) cells.push_back({id % grid.width(), id / grid.width()});
    } else if (model == CorruptionModel::RowBurst) {
        std::int64_t full = count / grid.width(), rem = count % grid.width();
        std::vector<std::int64_t> rows =
            rng.sample_distinct(grid.height(), full + (rem > 0 ? 1 : 0));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::int64_t limit =
                (std::int64_t(i) == full) ? rem : grid.width();  // last picked row partial
            for (std::int64_t x = 0; x < limit; ++x) cells.push_back({x, rows[i]});
        }
    } else {
        std::int64_t full = count / grid.height(), rem = count % grid.height();
        std::vector<std::int64_t> colsv =
            rng.sample_distinct(grid.width(), full + (rem > 0 ? 1 : 0));
        for (std::size_t i = 0; i < colsv.size(); ++i) {
            std::int64_t limit = (std::int64_t(i) == full) ? rem : grid.height();
            for (std::int64_t y = 0; y < limit; ++y) cells.push_back({colsv[i], y});
        }
    }
    const std::uint64_t q = grid.field().modulus();
    for (const Cell& c : cells) {
        std::uint32_t old = out.get(c.x, c.y);
        std::uint32_t delta = std::uint32_t(rng.nonzero_below(q));
        out.set(c.x, c.y, grid.field().add(old, delta));
    }
    std::sort(cells.begin(), cells.end());
    return CorruptionResult{std::move(out), std::move(cells)};
}

}  // namespace agtensor
