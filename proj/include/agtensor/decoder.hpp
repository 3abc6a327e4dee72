#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ag_families.hpp"
#include "codes.hpp"
#include "constants.hpp"
#include "linalg.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace agtensor {

/// Certified mode throws as soon as an input pair cannot be handled with the
/// full guarantee: std::invalid_argument for malformed inputs,
/// std::runtime_error when the instance fails the published preconditions or
/// a search step comes up empty, and std::logic_error when a step that the
/// preconditions promise must succeed does not (which would be a bug, not an
/// instance property).  Best-effort mode records those failures in the result
/// and returns whatever was produced.
enum class DecodeMode { Certified, BestEffort };

inline std::string to_string(DecodeMode mode) {
    return mode == DecodeMode::Certified ? "certified" : "best-effort";
}

/// Byte-stable record of a decode run: parameters, per-stage summaries,
/// internal check verdicts and the final accounting.  No timestamps or
/// environment data, so identical runs serialize to identical bytes.
class DecoderTrace {
public:
    DecoderTrace() {
        root_["schema"] = "agtensor.trace.v1";
        root_["stages"] = nlohmann::ordered_json::array();
        root_["checks"] = nlohmann::ordered_json::array();
    }

    nlohmann::ordered_json& root() { return root_; }
    const nlohmann::ordered_json& root() const { return root_; }

    void add_stage(nlohmann::ordered_json stage) {
        root_["stages"].push_back(std::move(stage));
    }

    void add_check(const std::string& name, bool pass, const std::string& detail) {
        nlohmann::ordered_json c;
        c["name"] = name;
        c["pass"] = pass;
        c["detail"] = detail;
        root_["checks"].push_back(std::move(c));
    }

    std::string to_string() const { return root_.dump(2) + "\n"; }

private:
    nlohmann::ordered_json root_;
};

namespace detail {

/// Index lists are included in traces only at small sizes; at scale the
/// counts alone keep traces readable (and still byte-stable).
inline nlohmann::ordered_json index_summary(const std::vector<std::int64_t>& indices,
                                            std::int64_t parent) {
    nlohmann::ordered_json j;
    j["count"] = indices.size();
    if (parent <= 128) j["indices"] = indices;
    return j;
}

}  // namespace detail

/// Disagreement counts between the row word and the column word, per line and
/// in total.
struct DisagreementProfile {
    std::int64_t total = 0;
    std::vector<std::int64_t> row_counts;  // indexed by y
    std::vector<std::int64_t> col_counts;  // indexed by x
};

inline DisagreementProfile disagreement_profile(const Grid& rows_word, const Grid& cols_word) {
    if (rows_word.width() != cols_word.width() || rows_word.height() != cols_word.height() ||
        rows_word.field() != cols_word.field())
        throw std::invalid_argument("disagreement_profile: shape or field mismatch");
    DisagreementProfile p;
    p.row_counts.assign(std::size_t(rows_word.height()), 0);
    p.col_counts.assign(std::size_t(rows_word.width()), 0);
    for (std::int64_t y = 0; y < rows_word.height(); ++y) {
        const std::uint32_t* pa = rows_word.row_ptr(y);
        const std::uint32_t* pb = cols_word.row_ptr(y);
        for (std::int64_t x = 0; x < rows_word.width(); ++x) {
            if (pa[x] != pb[x]) {
                ++p.total;
                ++p.row_counts[std::size_t(y)];
                ++p.col_counts[std::size_t(x)];
            }
        }
    }
    return p;
}

/// Lines whose disagreement fraction stays at or below the prune threshold
/// survive; the rest are set aside for the remainder of the pipeline.
struct PruneOutcome {
    std::vector<std::int64_t> rows;  // surviving row indices, ascending
    std::vector<std::int64_t> cols;  // surviving column indices, ascending
    std::int64_t pruned_rows = 0;
    std::int64_t pruned_cols = 0;
};

inline PruneOutcome prune_lines(const DisagreementProfile& profile, const DecoderConstants& k) {
    PruneOutcome out;
    const std::int64_t width = std::int64_t(profile.col_counts.size());
    const std::int64_t height = std::int64_t(profile.row_counts.size());
    for (std::int64_t y = 0; y < height; ++y) {
        if (k.line_exceeds_prune_threshold(profile.row_counts[std::size_t(y)], width))
            ++out.pruned_rows;
        else
            out.rows.push_back(y);
    }
    for (std::int64_t x = 0; x < width; ++x) {
        if (k.line_exceeds_prune_threshold(profile.col_counts[std::size_t(x)], height))
            ++out.pruned_cols;
        else
            out.cols.push_back(x);
    }
    return out;
}

/// A window-sized square submatrix of surviving lines holding few
/// disagreements.
struct WindowOutcome {
    std::vector<std::int64_t> rows;  // ascending
    std::vector<std::int64_t> cols;  // ascending
    std::int64_t errors = 0;
    std::int64_t error_cap = 0;
    int attempts = 0;
    bool from_fallback = false;
    bool within_cap = false;
};

inline std::int64_t count_window_errors(const Grid& rows_word, const Grid& cols_word,
                                        const std::vector<std::int64_t>& rows,
                                        const std::vector<std::int64_t>& cols) {
    std::int64_t count = 0;
    for (std::int64_t y : rows) {
        const std::uint32_t* pa = rows_word.row_ptr(y);
        const std::uint32_t* pb = cols_word.row_ptr(y);
        for (std::int64_t x : cols) count += (pa[x] != pb[x]);
    }
    return count;
}

/// Seeded random search for a low-disagreement window among surviving lines,
/// with a deterministic greedy fallback (lines sorted by disagreement count,
/// ties by index).  `within_cap` reports whether the returned window meets
/// the error cap; the caller decides whether that is fatal.
inline WindowOutcome find_low_error_submatrix(const Grid& rows_word, const Grid& cols_word,
                                              const PruneOutcome& pruned,
                                              const DecoderConstants& k, std::uint64_t seed,
                                              int max_attempts = 64) {
    const std::int64_t window = k.window;
    if (std::int64_t(pruned.rows.size()) < window || std::int64_t(pruned.cols.size()) < window)
        throw std::runtime_error(
            "find_low_error_submatrix: fewer surviving lines than the window size");
    WindowOutcome out;
    out.error_cap = k.window_error_cap();
    Rng rng(seed);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<std::int64_t> ri = rng.sample_distinct(std::int64_t(pruned.rows.size()), window);
        std::vector<std::int64_t> ci = rng.sample_distinct(std::int64_t(pruned.cols.size()), window);
        std::vector<std::int64_t> rows, cols;
        rows.reserve(std::size_t(window));
        cols.reserve(std::size_t(window));
        for (std::int64_t i : ri) rows.push_back(pruned.rows[std::size_t(i)]);
        for (std::int64_t i : ci) cols.push_back(pruned.cols[std::size_t(i)]);
        std::int64_t errors = count_window_errors(rows_word, cols_word, rows, cols);
        if (errors <= out.error_cap) {
            out.rows = std::move(rows);
            out.cols = std::move(cols);
            out.errors = errors;
            out.attempts = attempt + 1;
            out.within_cap = true;
            return out;
        }
    }
    // Greedy fallback: surviving rows with the fewest disagreements inside
    // surviving columns, then columns with the fewest inside the chosen rows.
    std::vector<std::pair<std::int64_t, std::int64_t>> scored;  // (count, index)
    scored.reserve(pruned.rows.size());
    for (std::int64_t y : pruned.rows) {
        const std::uint32_t* pa = rows_word.row_ptr(y);
        const std::uint32_t* pb = cols_word.row_ptr(y);
        std::int64_t count = 0;
        for (std::int64_t x : pruned.cols) count += (pa[x] != pb[x]);
        scored.emplace_back(count, y);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<std::int64_t> rows;
    rows.reserve(std::size_t(window));
    for (std::int64_t i = 0; i < window; ++i) rows.push_back(scored[std::size_t(i)].second);
    std::sort(rows.begin(), rows.end());

    scored.clear();
    for (std::int64_t x : pruned.cols) {
        std::int64_t count = 0;
        for (std::int64_t y : rows) count += (rows_word.get(x, y) != cols_word.get(x, y));
        scored.emplace_back(count, x);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<std::int64_t> cols;
    cols.reserve(std::size_t(window));
    for (std::int64_t i = 0; i < window; ++i) cols.push_back(scored[std::size_t(i)].second);
    std::sort(cols.begin(), cols.end());

    out.errors = count_window_errors(rows_word, cols_word, rows, cols);
    out.rows = std::move(rows);
    out.cols = std::move(cols);
    out.attempts = max_attempts;
    out.from_fallback = true;
    out.within_cap = out.errors <= out.error_cap;
    return out;
}

/// A nonzero tensor codeword over the localizer-degree member that vanishes
/// on every cell of the window where the two words disagree.
struct LocalizerOutcome {
    CoefficientForm coeffs;
    Grid grid;
    std::int64_t solution_dimension = 0;  // dimension of the vanishing system's solution space
    std::int64_t constraint_cells = 0;
};

inline LocalizerOutcome find_error_localizer(const AGFamily& family, const DecoderConstants& k,
                                             const Grid& rows_word, const Grid& cols_word,
                                             const WindowOutcome& window) {
    const LinearCode& code = family.member(k.localizer_degree);
    const Matrix& gen = code.generator();
    const std::size_t kd = code.dimension();
    const PrimeField& f = family.field();
    std::vector<Cell> cells;
    for (std::int64_t y : window.rows) {
        const std::uint32_t* pa = rows_word.row_ptr(y);
        const std::uint32_t* pb = cols_word.row_ptr(y);
        for (std::int64_t x : window.cols)
            if (pa[x] != pb[x]) cells.push_back({x, y});
    }
    CoefficientForm form{Matrix(f, kd, kd)};
    std::int64_t solution_dim;
    if (cells.empty()) {
        // Unconstrained: the canonical pick is the product of the two first
        // basis rows (exactly what the kernel path returns with no rows).
        form.coeffs.set(0, 0, 1);
        solution_dim = std::int64_t(kd) * std::int64_t(kd);
    } else {
        Matrix system(f, cells.size(), kd * kd);
        for (std::size_t r = 0; r < cells.size(); ++r) {
            for (std::size_t j = 0; j < kd; ++j) {
                std::uint32_t gy = gen.get(j, std::size_t(cells[r].y));
                if (gy == 0) continue;
                for (std::size_t i = 0; i < kd; ++i) {
                    std::uint32_t gx = gen.get(i, std::size_t(cells[r].x));
                    if (gx == 0) continue;
                    system.set(r, j * kd + i, f.mul(gx, gy));
                }
            }
        }
        std::vector<Vector> basis = kernel(system);
        if (basis.empty())
            throw std::logic_error("find_error_localizer: vanishing system has only the zero solution");
        solution_dim = std::int64_t(basis.size());
        const Vector& v = basis.front();
        for (std::size_t j = 0; j < kd; ++j)
            for (std::size_t i = 0; i < kd; ++i)
                form.coeffs.set(j, i, v.get(j * kd + i));
    }
    Grid grid = expand(TensorCode(code, code), form);
    return LocalizerOutcome{std::move(form), std::move(grid), solution_dim,
                            std::int64_t(cells.size())};
}

/// Extends the cellwise product (localizer * row word) restricted to the
/// window into a full tensor codeword one localizer degree above the line
/// degree.  On the window the product equals (localizer * column word), so
/// the restriction has codeword rows and columns and the solve is consistent
/// whenever the localizer really vanishes on the window's disagreements.
inline TensorExtension extend_product(const AGFamily& family, const DecoderConstants& k,
                                      const Grid& localizer, const Grid& rows_word,
                                      const WindowOutcome& window) {
    const LinearCode& big = family.member(k.localizer_degree + k.degree);
    const PrimeField& f = family.field();
    Grid values(f, std::int64_t(window.cols.size()), std::int64_t(window.rows.size()));
    for (std::size_t yy = 0; yy < window.rows.size(); ++yy) {
        const std::int64_t y = window.rows[yy];
        for (std::size_t xx = 0; xx < window.cols.size(); ++xx) {
            const std::int64_t x = window.cols[xx];
            values.set(std::int64_t(xx), std::int64_t(yy),
                       f.mul(localizer.get(x, y), rows_word.get(x, y)));
        }
    }
    CoordinateSet a(family.length(), window.cols);
    CoordinateSet b(family.length(), window.rows);
    return extend_from_restriction(TensorCode(big, big), a, b, values);
}

/// Surviving lines split by their disagreement count against the window:
/// lines above the quarter threshold are bad, the rest good.
struct ClassifyOutcome {
    std::vector<std::int64_t> good_rows, good_cols;  // ascending
    std::vector<std::int64_t> bad_rows, bad_cols;    // ascending
};

inline ClassifyOutcome classify_lines(const Grid& rows_word, const Grid& cols_word,
                                      const PruneOutcome& pruned, const WindowOutcome& window,
                                      const DecoderConstants& k) {
    ClassifyOutcome out;
    const std::int64_t len = k.window;
    for (std::int64_t y : pruned.rows) {
        const std::uint32_t* pa = rows_word.row_ptr(y);
        const std::uint32_t* pb = cols_word.row_ptr(y);
        std::int64_t count = 0;
        for (std::int64_t x : window.cols) count += (pa[x] != pb[x]);
        (k.exceeds_quarter_threshold(count, len) ? out.bad_rows : out.good_rows).push_back(y);
    }
    for (std::int64_t x : pruned.cols) {
        std::int64_t count = 0;
        for (std::int64_t y : window.rows) count += (rows_word.get(x, y) != cols_word.get(x, y));
        (k.exceeds_quarter_threshold(count, len) ? out.bad_cols : out.good_cols).push_back(x);
    }
    return out;
}

/// Cellwise check that the extended product matches localizer * row word on
/// every good row and localizer * column word on every good column.
struct IdentityOutcome {
    std::int64_t row_mismatches = 0;
    std::int64_t col_mismatches = 0;
    bool ok() const { return row_mismatches == 0 && col_mismatches == 0; }
};

inline IdentityOutcome verify_product_identity(const Grid& localizer, const Grid& product,
                                               const Grid& rows_word, const Grid& cols_word,
                                               const ClassifyOutcome& classes) {
    const PrimeField& f = localizer.field();
    IdentityOutcome out;
    for (std::int64_t y : classes.good_rows) {
        const std::uint32_t* pe = localizer.row_ptr(y);
        const std::uint32_t* pr = rows_word.row_ptr(y);
        const std::uint32_t* pn = product.row_ptr(y);
        for (std::int64_t x = 0; x < localizer.width(); ++x)
            out.row_mismatches += (f.mul(pe[x], pr[x]) != pn[x]);
    }
    for (std::int64_t x : classes.good_cols) {
        for (std::int64_t y = 0; y < localizer.height(); ++y)
            out.col_mismatches += (f.mul(localizer.get(x, y), cols_word.get(x, y)) !=
                                   product.get(x, y));
    }
    return out;
}

/// Window-sized anchor drawn from good lines on which the localizer is
/// nonvanishing everywhere.  Deterministic recipe: probe the first good row
/// where the localizer is not identically zero, take the first window-many
/// good columns nonzero on the probe row, then the first window-many good
/// rows nonzero on all chosen columns.
struct AnchorOutcome {
    std::vector<std::int64_t> rows, cols;  // ascending
    std::int64_t probe_row = -1;
};

inline AnchorOutcome find_anchor_window(const Grid& localizer, const ClassifyOutcome& classes,
                                        const DecoderConstants& k) {
    const std::int64_t window = k.window;
    AnchorOutcome out;
    for (std::int64_t y : classes.good_rows) {
        const std::uint32_t* p = localizer.row_ptr(y);
        for (std::int64_t x = 0; x < localizer.width(); ++x) {
            if (p[x] != 0) {
                out.probe_row = y;
                break;
            }
        }
        if (out.probe_row >= 0) break;
    }
    if (out.probe_row < 0)
        throw std::runtime_error("find_anchor_window: localizer vanishes on every good row");
    for (std::int64_t x : classes.good_cols) {
        if (std::int64_t(out.cols.size()) == window) break;
        if (localizer.get(x, out.probe_row) != 0) out.cols.push_back(x);
    }
    if (std::int64_t(out.cols.size()) < window)
        throw std::runtime_error("find_anchor_window: not enough nonvanishing good columns");
    for (std::int64_t y : classes.good_rows) {
        if (std::int64_t(out.rows.size()) == window) break;
        bool all_nonzero = true;
        const std::uint32_t* p = localizer.row_ptr(y);
        for (std::int64_t x : out.cols) {
            if (p[x] == 0) {
                all_nonzero = false;
                break;
            }
        }
        if (all_nonzero) out.rows.push_back(y);
    }
    if (std::int64_t(out.rows.size()) < window)
        throw std::runtime_error("find_anchor_window: not enough nonvanishing good rows");
    return out;
}

/// Extends the row word restricted to the anchor into a full tensor codeword
/// at the line degree: the decoder's output candidate.
inline TensorExtension extract_codeword(const AGFamily& family, const DecoderConstants& k,
                                        const Grid& rows_word, const AnchorOutcome& anchor) {
    const LinearCode& code = family.member(k.degree);
    Grid values(family.field(), std::int64_t(anchor.cols.size()),
                std::int64_t(anchor.rows.size()));
    for (std::size_t yy = 0; yy < anchor.rows.size(); ++yy)
        for (std::size_t xx = 0; xx < anchor.cols.size(); ++xx)
            values.set(std::int64_t(xx), std::int64_t(yy),
                       rows_word.get(anchor.cols[xx], anchor.rows[yy]));
    CoordinateSet a(family.length(), anchor.cols);
    CoordinateSet b(family.length(), anchor.rows);
    return extend_from_restriction(TensorCode(code, code), a, b, values);
}

/// Lines (over the whole grid, pruned or not) whose disagreement count
/// against the anchor exceeds the quarter threshold.  Everything outside
/// these lines agrees with the candidate exactly.
struct ResidualOutcome {
    std::vector<std::int64_t> rows, cols;  // ascending
};

inline ResidualOutcome find_residual_lines(const Grid& rows_word, const Grid& cols_word,
                                           const AnchorOutcome& anchor,
                                           const DecoderConstants& k) {
    ResidualOutcome out;
    const std::int64_t len = k.window;
    for (std::int64_t y = 0; y < rows_word.height(); ++y) {
        const std::uint32_t* pa = rows_word.row_ptr(y);
        const std::uint32_t* pb = cols_word.row_ptr(y);
        std::int64_t count = 0;
        for (std::int64_t x : anchor.cols) count += (pa[x] != pb[x]);
        if (k.exceeds_quarter_threshold(count, len)) out.rows.push_back(y);
    }
    for (std::int64_t x = 0; x < rows_word.width(); ++x) {
        std::int64_t count = 0;
        for (std::int64_t y : anchor.rows) count += (rows_word.get(x, y) != cols_word.get(x, y));
        if (k.exceeds_quarter_threshold(count, len)) out.cols.push_back(x);
    }
    return out;
}

/// Per-cell agreement classes between the candidate and the two input words.
struct CellAccounting {
    std::int64_t agree_both = 0;   // candidate matches both words
    std::int64_t col_only = 0;     // matches the row word only
    std::int64_t row_only = 0;     // matches the column word only
    std::int64_t differ_both = 0;  // matches neither

    std::int64_t dist_rows() const { return row_only + differ_both; }
    std::int64_t dist_cols() const { return col_only + differ_both; }
};

inline CellAccounting tally_cells(const Grid& candidate, const Grid& rows_word,
                                  const Grid& cols_word) {
    CellAccounting acc;
    for (std::int64_t y = 0; y < candidate.height(); ++y) {
        const std::uint32_t* pq = candidate.row_ptr(y);
        const std::uint32_t* pa = rows_word.row_ptr(y);
        const std::uint32_t* pb = cols_word.row_ptr(y);
        for (std::int64_t x = 0; x < candidate.width(); ++x) {
            const bool dr = pq[x] != pa[x];
            const bool dc = pq[x] != pb[x];
            if (dr && dc)
                ++acc.differ_both;
            else if (dr)
                ++acc.row_only;
            else if (dc)
                ++acc.col_only;
            else
                ++acc.agree_both;
        }
    }
    return acc;
}

struct DecodeResult {
    DecodeMode mode = DecodeMode::Certified;
    PreconditionReport preconditions;
    DecoderConstants constants;
    Rational epsilon;  // exact disagreement fraction of the input pair
    std::int64_t disagreements = 0;
    bool completed = false;  // the pipeline produced a candidate
    bool certified = false;  // preconditions and every internal check held
    std::string failure_reason;
    std::optional<TensorExtension> candidate;
    CellAccounting accounting;
    Rational delta_rows;  // candidate-to-row-word distance, normalized
    Rational delta_cols;  // candidate-to-column-word distance, normalized
    bool bound_holds = false;  // delta_rows + delta_cols <= 2 * epsilon
};

/// Decodes a consistent tensor codeword from a row word (every row in the
/// degree member) and a column word (every column in it).  When the
/// precondition report passes, the returned candidate satisfies
/// delta_rows + delta_cols <= 2 * epsilon with epsilon the exact
/// disagreement fraction of the pair.
inline DecodeResult decode(const AGFamily& family, std::int64_t degree, const Grid& rows_word,
                           const Grid& cols_word, DecodeMode mode, std::uint64_t seed,
                           DecoderTrace* trace = nullptr) {
    const std::int64_t n = family.length();
    const PrimeField& f = family.field();
    if (rows_word.width() != n || rows_word.height() != n || cols_word.width() != n ||
        cols_word.height() != n)
        throw std::invalid_argument("decode: words must be n x n for the family length");
    if (rows_word.field() != f || cols_word.field() != f)
        throw std::invalid_argument("decode: field mismatch");
    if (degree < 0 || degree > n) throw std::invalid_argument("decode: degree out of range");
    const LinearCode& line_code = family.member(degree);
    for (std::int64_t y = 0; y < n; ++y)
        if (!line_code.contains(rows_word.row_copy(y)))
            throw std::invalid_argument("decode: row word has a row outside the member code");
    for (std::int64_t x = 0; x < n; ++x)
        if (!line_code.contains(cols_word.col_copy(x)))
            throw std::invalid_argument("decode: column word has a column outside the member code");

    DecodeResult result;
    result.mode = mode;
    DisagreementProfile profile = disagreement_profile(rows_word, cols_word);
    result.disagreements = profile.total;
    result.epsilon = Rational(profile.total, n * n);
    result.constants = DecoderConstants::derive(result.epsilon, degree, family.genus());
    result.preconditions =
        check_preconditions(n, degree, family.genus(), f.modulus(), result.epsilon);

    if (trace) {
        nlohmann::ordered_json& root = trace->root();
        root["mode"] = to_string(mode);
        root["field"] = f.modulus();
        root["length"] = n;
        root["degree"] = degree;
        root["genus"] = family.genus();
        root["seed"] = seed;
        root["disagreements"] = profile.total;
        root["epsilon"] = result.epsilon.str();
        nlohmann::ordered_json kj;
        kj["window"] = result.constants.window;
        kj["localizer_degree"] = result.constants.localizer_degree;
        kj["window_error_cap"] = result.constants.window_error_cap();
        root["constants"] = std::move(kj);
        nlohmann::ordered_json pre = nlohmann::ordered_json::array();
        for (const PreconditionCheck& c : result.preconditions.checks) {
            nlohmann::ordered_json cj;
            cj["name"] = c.name;
            cj["pass"] = c.pass;
            cj["detail"] = c.detail;
            pre.push_back(std::move(cj));
        }
        root["preconditions"] = std::move(pre);
    }

    const bool pre_ok = result.preconditions.ok();
    if (!pre_ok && mode == DecodeMode::Certified)
        throw std::runtime_error("decode: preconditions failed\n" +
                                 result.preconditions.summary());
    if (trace)
        trace->add_check("preconditions", pre_ok,
                         pre_ok ? (result.preconditions.degenerate
                                       ? "pass (disagreement-free pair)"
                                       : "pass")
                                : "failed; continuing best-effort");

    bool checks_ok = pre_ok;
    try {
        PruneOutcome pruned = prune_lines(profile, result.constants);
        if (trace) {
            nlohmann::ordered_json s;
            s["stage"] = "prune";
            s["surviving_rows"] = detail::index_summary(pruned.rows, n);
            s["surviving_cols"] = detail::index_summary(pruned.cols, n);
            s["pruned_rows"] = pruned.pruned_rows;
            s["pruned_cols"] = pruned.pruned_cols;
            // Disagreement mass left on the surviving subgrid, as a fraction
            // of its cells; pruning only ever lowers the fraction.
            std::vector<char> row_ok(std::size_t(n), 0), col_ok(std::size_t(n), 0);
            for (std::int64_t y : pruned.rows) row_ok[std::size_t(y)] = 1;
            for (std::int64_t x : pruned.cols) col_ok[std::size_t(x)] = 1;
            std::int64_t left = 0;
            for (std::int64_t y = 0; y < n; ++y) {
                if (!row_ok[std::size_t(y)]) continue;
                const std::uint32_t* pa = rows_word.row_ptr(y);
                const std::uint32_t* pb = cols_word.row_ptr(y);
                for (std::int64_t x = 0; x < n; ++x)
                    left += (col_ok[std::size_t(x)] && pa[x] != pb[x]);
            }
            const std::int64_t sub_cells =
                std::int64_t(pruned.rows.size()) * std::int64_t(pruned.cols.size());
            s["surviving_disagreements"] = left;
            s["surviving_fraction"] = sub_cells ? Rational(left, sub_cells).str() : "0";
            trace->add_stage(std::move(s));
        }

        WindowOutcome window =
            find_low_error_submatrix(rows_word, cols_word, pruned, result.constants, seed);
        if (trace) {
            nlohmann::ordered_json s;
            s["stage"] = "window";
            s["rows"] = detail::index_summary(window.rows, n);
            s["cols"] = detail::index_summary(window.cols, n);
            s["errors"] = window.errors;
            s["error_cap"] = window.error_cap;
            s["attempts"] = window.attempts;
            s["from_fallback"] = window.from_fallback;
            trace->add_stage(std::move(s));
            trace->add_check("window-error-cap", window.within_cap,
                            std::to_string(window.errors) + " <= " +
                                std::to_string(window.error_cap));
        }
        if (!window.within_cap) {
            checks_ok = false;
            if (mode == DecodeMode::Certified)
                throw std::runtime_error("decode: no window found within the error cap");
        }

        LocalizerOutcome localizer =
            find_error_localizer(family, result.constants, rows_word, cols_word, window);
        std::int64_t vanish_misses = 0;
        for (std::int64_t y : window.rows) {
            const std::uint32_t* pa = rows_word.row_ptr(y);
            const std::uint32_t* pb = cols_word.row_ptr(y);
            const std::uint32_t* pe = localizer.grid.row_ptr(y);
            for (std::int64_t x : window.cols)
                vanish_misses += (pa[x] != pb[x] && pe[x] != 0);
        }
        if (trace) {
            nlohmann::ordered_json s;
            s["stage"] = "localizer";
            s["constraint_cells"] = localizer.constraint_cells;
            s["solution_dimension"] = localizer.solution_dimension;
            trace->add_stage(std::move(s));
            trace->add_check("localizer-vanishes", vanish_misses == 0,
                            std::to_string(vanish_misses) + " uncovered window disagreements");
        }
        if (vanish_misses != 0)
            throw std::logic_error("decode: localizer fails to vanish on window disagreements");

        TensorExtension product = [&] {
            try {
                return extend_product(family, result.constants, localizer.grid, rows_word,
                                      window);
            } catch (const std::runtime_error& e) {
                throw std::logic_error(std::string("decode: product extension failed: ") +
                                       e.what());
            }
        }();
        if (trace) {
            nlohmann::ordered_json s;
            s["stage"] = "product-extension";
            s["degree"] = result.constants.localizer_degree + result.constants.degree;
            trace->add_stage(std::move(s));
        }

        ClassifyOutcome classes =
            classify_lines(rows_word, cols_word, pruned, window, result.constants);
        if (trace) {
            nlohmann::ordered_json s;
            s["stage"] = "classify";
            s["good_rows"] = detail::index_summary(classes.good_rows, n);
            s["good_cols"] = detail::index_summary(classes.good_cols, n);
            s["bad_rows"] = detail::index_summary(classes.bad_rows, n);
            s["bad_cols"] = detail::index_summary(classes.bad_cols, n);
            trace->add_stage(std::move(s));
        }

        IdentityOutcome identity =
            verify_product_identity(localizer.grid, product.grid, rows_word, cols_word, classes);
        if (trace)
            trace->add_check("product-identity", identity.ok(),
                            std::to_string(identity.row_mismatches) + " row / " +
                                std::to_string(identity.col_mismatches) +
                                " column mismatches on good lines");
        if (!identity.ok()) {
            checks_ok = false;
            if (mode == DecodeMode::Certified)
                throw std::logic_error("decode: product identity fails on good lines");
        }

        AnchorOutcome anchor = find_anchor_window(localizer.grid, classes, result.constants);
        if (trace) {
            nlohmann::ordered_json s;
            s["stage"] = "anchor";
            s["probe_row"] = anchor.probe_row;
            s["rows"] = detail::index_summary(anchor.rows, n);
            s["cols"] = detail::index_summary(anchor.cols, n);
            trace->add_stage(std::move(s));
        }

        TensorExtension candidate = [&] {
            try {
                return extract_codeword(family, result.constants, rows_word, anchor);
            } catch (const std::runtime_error& e) {
                throw std::logic_error(std::string("decode: candidate extension failed: ") +
                                       e.what());
            }
        }();

        ResidualOutcome residuals =
            find_residual_lines(rows_word, cols_word, anchor, result.constants);
        if (trace) {
            nlohmann::ordered_json s;
            s["stage"] = "residual";
            s["rows"] = detail::index_summary(residuals.rows, n);
            s["cols"] = detail::index_summary(residuals.cols, n);
            trace->add_stage(std::move(s));
        }

        result.accounting = tally_cells(candidate.grid, rows_word, cols_word);
        result.delta_rows = Rational(result.accounting.dist_rows(), n * n);
        result.delta_cols = Rational(result.accounting.dist_cols(), n * n);
        result.bound_holds =
            result.delta_rows + result.delta_cols <= Rational(2) * result.epsilon;
        result.candidate = std::move(candidate);
        result.completed = true;
        if (trace)
            trace->add_check("distance-bound", result.bound_holds,
                            "(" + std::to_string(result.accounting.dist_rows()) + " + " +
                                std::to_string(result.accounting.dist_cols()) + ") / " +
                                std::to_string(n * n) + " <= 2 * " + result.epsilon.str());
        if (!result.bound_holds) {
            checks_ok = false;
            if (mode == DecodeMode::Certified)
                throw std::logic_error("decode: certified distance bound violated");
        }
    } catch (const std::exception& e) {
        if (mode == DecodeMode::Certified) throw;
        result.failure_reason = e.what();
        checks_ok = false;
        if (trace) trace->add_check("pipeline", false, e.what());
    }

    result.certified = result.completed && checks_ok;
    if (trace) {
        nlohmann::ordered_json r;
        r["completed"] = result.completed;
        r["certified"] = result.certified;
        if (result.completed) {
            nlohmann::ordered_json acc;
            acc["agree_both"] = result.accounting.agree_both;
            acc["col_only"] = result.accounting.col_only;
            acc["row_only"] = result.accounting.row_only;
            acc["differ_both"] = result.accounting.differ_both;
            r["accounting"] = std::move(acc);
            r["delta_rows"] = result.delta_rows.str();
            r["delta_cols"] = result.delta_cols.str();
            r["bound_holds"] = result.bound_holds;
        } else {
            r["failure_reason"] = result.failure_reason;
        }
        trace->root()["result"] = std::move(r);
    }
    return result;
}

/// How a robustness report settled the tensor-distance side of the
/// comparison.
enum class RobustBranch {
    Trivial,      // pair disagreement outside the decoding regime; bound is 1
    Decode,       // decoded candidate gives the distance bound
    Enumeration,  // exact distance by enumerating the tensor code
    Unsupported,  // no branch applicable at these parameters
};

inline std::string to_string(RobustBranch branch) {
    switch (branch) {
        case RobustBranch::Trivial: return "trivial";
        case RobustBranch::Decode: return "decode";
        case RobustBranch::Enumeration: return "enumeration";
        default: return "unsupported";
    }
}

/// Outcome of one robustness check: row/column projection distances, the
/// tensor-distance bound used, and the exact comparison
/// robustness_bound * tensor_bound <= (row_delta + col_delta) / 2.
struct RobustnessReport {
    Rational row_delta;     // normalized distance to rows-in-member grids
    Rational col_delta;     // normalized distance to columns-in-member grids
    Rational pair_epsilon;  // exact disagreement fraction of the projected pair
    RobustBranch branch = RobustBranch::Unsupported;
    Rational tensor_bound;  // upper bound on the tensor-code distance (exact in enumeration)
    bool tensor_bound_exact = false;
    bool vacuous = false;  // the word is itself a tensor codeword
    Rational lhs, rhs;
    bool pass = false;
    std::string note;
    std::optional<DecodeResult> decode_result;
};

/// Checks the robust-testing bound for one word: the distance to the tensor
/// code, scaled by the robustness constant, must not exceed the average of
/// the row-wise and column-wise distances.  Projections turn the word into a
/// row/column pair; depending on that pair's disagreement fraction the tensor
/// distance is bounded trivially, via a decoded candidate, or exactly by
/// enumeration at small sizes.
inline RobustnessReport robust_test(const AGFamily& family, std::int64_t degree,
                                    const Grid& word, const ProjectionMode& row_mode,
                                    const ProjectionMode& col_mode, DecodeMode mode,
                                    std::uint64_t seed,
                                    std::uint64_t enumeration_budget = (1ull << 22),
                                    DecoderTrace* trace = nullptr) {
    const std::int64_t n = family.length();
    if (word.width() != n || word.height() != n)
        throw std::invalid_argument("robust_test: word must be n x n for the family length");
    if (word.field() != family.field())
        throw std::invalid_argument("robust_test: field mismatch");
    const LinearCode& code = family.member(degree);

    LineProjection rows_proj = project_rows(word, code, row_mode);
    LineProjection cols_proj = project_cols(word, code, col_mode);
    RobustnessReport report;
    const std::int64_t cells = word.cell_count();
    report.row_delta = Rational(rows_proj.total_distance, cells);
    report.col_delta = Rational(cols_proj.total_distance, cells);
    report.pair_epsilon = grid_delta(rows_proj.projected, cols_proj.projected);
    report.rhs = (report.row_delta + report.col_delta) / Rational(2);

    bool resolved = false;
    if (report.pair_epsilon >= kEpsilonMax) {
        report.branch = RobustBranch::Trivial;
        report.tensor_bound = Rational(1);
        report.note = "projected pair disagreement at or above the decoding regime";
        resolved = true;
    } else {
        PreconditionReport pre = check_preconditions(n, degree, family.genus(),
                                                     family.field().modulus(),
                                                     report.pair_epsilon);
        if (pre.ok()) {
            report.decode_result = decode(family, degree, rows_proj.projected,
                                          cols_proj.projected, mode, seed, trace);
            if (report.decode_result->completed && report.decode_result->candidate) {
                report.branch = RobustBranch::Decode;
                report.tensor_bound =
                    grid_delta(word, report.decode_result->candidate->grid);
                resolved = true;
            } else {
                report.note = "decode incomplete: " + report.decode_result->failure_reason;
            }
        }
        if (!resolved) {
            const std::uint64_t q = family.field().modulus();
            const std::uint64_t dim = std::uint64_t(code.dimension());
            if (pow_check(q, dim * dim, enumeration_budget) <= enumeration_budget) {
                // Exact distance to the tensor code by full enumeration.
                LinearCode flat = as_linear_code(TensorCode(code, code));
                Vector target(word.field(), std::size_t(cells));
                for (std::int64_t y = 0; y < n; ++y)
                    for (std::int64_t x = 0; x < n; ++x)
                        target.set(std::size_t(y * n + x), word.get(x, y));
                NearestCodeword nearest =
                    nearest_codeword_exhaustive(flat, target, enumeration_budget);
                report.branch = RobustBranch::Enumeration;
                report.tensor_bound = Rational(nearest.distance, cells);
                report.tensor_bound_exact = true;
                resolved = true;
            }
        }
    }
    // Reports must say when the exact nearest-line projections came from
    // caller-supplied references rather than an exhaustive search (each
    // reference line is still certified unique-nearest by the radius check).
    const bool reference_lines = std::holds_alternative<ReferenceProjection>(row_mode) ||
                                 std::holds_alternative<ReferenceProjection>(col_mode);
    auto annotate_projection = [&report, reference_lines] {
        if (!reference_lines) return;
        if (!report.note.empty()) report.note += "; ";
        report.note += "projections taken from caller-supplied reference lines, "
                       "each certified unique-nearest by the distance bound";
    };
    if (!resolved) {
        report.branch = RobustBranch::Unsupported;
        report.pass = false;
        if (report.note.empty())
            report.note = "no applicable branch at these parameters";
        annotate_projection();
        return report;
    }
    report.vacuous = report.tensor_bound.is_zero();
    report.lhs = kRobustnessBound * report.tensor_bound;
    report.pass = report.lhs <= report.rhs;
    annotate_projection();
    return report;
}

}  // namespace agtensor
