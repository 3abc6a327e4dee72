#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ag_families.hpp"
#include "decoder.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "serialize.hpp"
#include "tensor.hpp"

namespace agtensor {

/// Which evaluation-code family an experiment runs on.  `points == 0` means
/// the full natural point set (all field elements, or all affine curve
/// points); otherwise the first `points` of them in canonical order.
struct FamilySpec {
    std::string kind = "rs";  // "rs" | "elliptic"
    std::uint64_t modulus = 0;
    std::int64_t points = 0;
    std::uint32_t curve_a = 0;
    std::uint32_t curve_b = 0;

    std::int64_t genus() const { return kind == "elliptic" ? 1 : 0; }

    AGFamily build() const {
        PrimeField field(modulus);
        if (kind == "rs") {
            if (points == 0 || std::uint64_t(points) == modulus) return AGFamily::rs_full(field);
            if (points < 0 || std::uint64_t(points) > modulus)
                throw std::invalid_argument("FamilySpec: points out of range for rs");
            std::vector<std::uint32_t> pts(static_cast<std::size_t>(points));
            for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = std::uint32_t(i);
            return AGFamily::rs(field, std::move(pts));
        }
        if (kind == "elliptic") {
            EllipticCurve curve(field, curve_a, curve_b);
            if (points == 0 || points == curve.affine_count())
                return AGFamily::elliptic(curve);
            if (points < 0 || points > curve.affine_count())
                throw std::invalid_argument("FamilySpec: points out of range for elliptic");
            std::vector<std::int64_t> indices(static_cast<std::size_t>(points));
            for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = std::int64_t(i);
            return AGFamily::elliptic(curve, std::move(indices));
        }
        throw std::invalid_argument("FamilySpec: unknown kind '" + kind + "'");
    }
};

inline DecodeMode decode_mode_from_string(const std::string& s) {
    if (s == "certified") return DecodeMode::Certified;
    if (s == "best-effort") return DecodeMode::BestEffort;
    throw std::invalid_argument("mode must be 'certified' or 'best-effort', got '" + s + "'");
}

/// Experiment description with a canonical key/value text form.  Serializing
/// and re-parsing is byte-stable, and the digest identifies a configuration
/// across runs.
struct ExperimentConfig {
    FamilySpec family;
    std::int64_t degree = 0;
    Rational epsilon;                      // target corruption fraction
    std::string model = "planted-lines";   // planted-lines | uniform | row-burst | col-burst
    std::int64_t planted_rows = 0;         // planted-lines only
    std::int64_t planted_cols = 0;
    Rational sprinkle;                     // extra uniform noise for the single-word view
    std::int64_t trials = 1;
    std::uint64_t seed = 1;
    std::string mode = "certified";

    static constexpr const char* kSchema = "agtensor.config.v1";

    KvPairs to_kv() const {
        KvPairs kv;
        kv.emplace_back("schema", kSchema);
        kv.emplace_back("family.kind", family.kind);
        kv.emplace_back("family.modulus", std::to_string(family.modulus));
        kv.emplace_back("family.points", std::to_string(family.points));
        if (family.kind == "elliptic") {
            kv.emplace_back("family.curve_a", std::to_string(family.curve_a));
            kv.emplace_back("family.curve_b", std::to_string(family.curve_b));
        }
        kv.emplace_back("degree", std::to_string(degree));
        kv.emplace_back("epsilon", epsilon.str());
        kv.emplace_back("model", model);
        if (model == "planted-lines") {
            kv.emplace_back("planted.rows", std::to_string(planted_rows));
            kv.emplace_back("planted.cols", std::to_string(planted_cols));
        }
        kv.emplace_back("sprinkle", sprinkle.str());
        kv.emplace_back("trials", std::to_string(trials));
        kv.emplace_back("seed", std::to_string(seed));
        kv.emplace_back("mode", mode);
        return kv;
    }

    std::string serialize() const { return serialize_kv(to_kv()); }
    std::string digest() const { return digest_hex(serialize()); }

    static ExperimentConfig from_kv(const KvPairs& kv) {
        ExperimentConfig cfg;
        bool saw_schema = false;
        for (const auto& [key, value] : kv) {
            if (key == "schema") {
                if (value != kSchema)
                    throw std::runtime_error("ExperimentConfig: unsupported schema '" + value +
                                             "'");
                saw_schema = true;
            } else if (key == "family.kind") {
                cfg.family.kind = value;
            } else if (key == "family.modulus") {
                cfg.family.modulus = std::stoull(value);
            } else if (key == "family.points") {
                cfg.family.points = std::stoll(value);
            } else if (key == "family.curve_a") {
                cfg.family.curve_a = std::uint32_t(std::stoul(value));
            } else if (key == "family.curve_b") {
                cfg.family.curve_b = std::uint32_t(std::stoul(value));
            } else if (key == "degree") {
                cfg.degree = std::stoll(value);
            } else if (key == "epsilon") {
                cfg.epsilon = Rational::parse(value);
            } else if (key == "model") {
                cfg.model = value;
            } else if (key == "planted.rows") {
                cfg.planted_rows = std::stoll(value);
            } else if (key == "planted.cols") {
                cfg.planted_cols = std::stoll(value);
            } else if (key == "sprinkle") {
                cfg.sprinkle = Rational::parse(value);
            } else if (key == "trials") {
                cfg.trials = std::stoll(value);
            } else if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else if (key == "mode") {
                cfg.mode = value;
            } else {
                throw std::runtime_error("ExperimentConfig: unknown key '" + key + "'");
            }
        }
        if (!saw_schema) throw std::runtime_error("ExperimentConfig: missing schema line");
        cfg.validate();
        return cfg;
    }

    static ExperimentConfig parse(const std::string& text) {
        std::istringstream in(text);
        return from_kv(parse_kv(in));
    }

    void validate() const {
        if (family.kind != "rs" && family.kind != "elliptic")
            throw std::runtime_error("ExperimentConfig: family.kind must be rs or elliptic");
        if (family.modulus < 2) throw std::runtime_error("ExperimentConfig: bad modulus");
        if (model != "planted-lines" && model != "uniform" && model != "row-burst" &&
            model != "col-burst")
            throw std::runtime_error("ExperimentConfig: unknown model '" + model + "'");
        if (model == "planted-lines" && (planted_rows <= 0 || planted_cols <= 0))
            throw std::runtime_error(
                "ExperimentConfig: planted-lines needs planted.rows and planted.cols");
        if (epsilon.sign() < 0 || epsilon > Rational(1))
            throw std::runtime_error("ExperimentConfig: epsilon must be in [0, 1]");
        if (sprinkle.sign() < 0 || sprinkle > Rational(1))
            throw std::runtime_error("ExperimentConfig: sprinkle must be in [0, 1]");
        if (trials < 1) throw std::runtime_error("ExperimentConfig: trials must be >= 1");
        decode_mode_from_string(mode);  // throws on bad values
    }
};

/// A planted pair: a tensor codeword plus line corruption on each side.
/// Corrupted rows of the row word get a codeword delta vanishing on every
/// corrupted column coordinate (and symmetrically for columns), so the two
/// words agree on the corrupted intersections and the disagreement set is
/// exactly the corrupted lines minus those crossings.
struct PlantedInstance {
    Grid base;       // the underlying tensor codeword
    Grid rows_word;  // rows all in member(degree)
    Grid cols_word;  // columns all in member(degree)
    std::vector<std::int64_t> corrupted_rows, corrupted_cols;
    std::int64_t disagreements = 0;  // measured, not assumed
    Rational epsilon;                // disagreements / n^2
};

namespace detail {

/// A codeword of `code` vanishing on the given coordinates.  For the
/// monomial family this is the forced-roots product (weight exactly
/// n - |coords|); otherwise a deterministic-seeded nonzero element of the
/// vanishing subcode.
inline Vector vanishing_codeword(const AGFamily& family, std::int64_t degree,
                                 const std::vector<std::int64_t>& coords, Rng& rng) {
    const LinearCode& code = family.member(degree);
    const PrimeField& f = family.field();
    if (family.kind() == AGFamily::Kind::Rs) {
        if (std::int64_t(coords.size()) > degree)
            throw std::invalid_argument(
                "vanishing_codeword: more forced roots than the degree allows");
        const std::vector<std::uint32_t>& pts = family.rs_points();
        Vector out(f, std::size_t(family.length()));
        for (std::size_t i = 0; i < std::size_t(family.length()); ++i) {
            std::uint32_t v = 1;
            for (std::int64_t c : coords) v = f.mul(v, f.sub(pts[i], pts[std::size_t(c)]));
            out.set(i, v);
        }
        return out;
    }
    Matrix system(f, coords.size(), code.dimension());
    for (std::size_t r = 0; r < coords.size(); ++r)
        for (std::size_t j = 0; j < code.dimension(); ++j)
            system.set(r, j, code.generator().get(j, std::size_t(coords[r])));
    std::vector<Vector> basis = kernel(system);
    if (basis.empty())
        throw std::runtime_error("vanishing_codeword: vanishing subcode is trivial");
    std::vector<std::uint32_t> coeffs(code.dimension(), 0);
    while (true) {
        bool nonzero = false;
        Vector combo(f, code.dimension());
        for (const Vector& b : basis) {
            std::uint32_t c = std::uint32_t(rng.below(f.modulus()));
            if (c == 0) continue;
            combo.add_scaled(b, c);
        }
        for (std::size_t j = 0; j < combo.size(); ++j) {
            coeffs[j] = combo.get(j);
            nonzero |= (coeffs[j] != 0);
        }
        if (nonzero) break;
    }
    return code.encode(coeffs);
}

}  // namespace detail

inline PlantedInstance make_planted(const AGFamily& family, std::int64_t degree,
                                    std::int64_t row_lines, std::int64_t col_lines,
                                    std::uint64_t seed) {
    const std::int64_t n = family.length();
    const PrimeField& f = family.field();
    const LinearCode& code = family.member(degree);
    if (row_lines <= 0 || col_lines <= 0 || row_lines > n || col_lines > n)
        throw std::invalid_argument("make_planted: line counts out of range");
    Rng rng(seed);
    Matrix coeffs(f, code.dimension(), code.dimension());
    for (std::size_t j = 0; j < code.dimension(); ++j)
        for (std::size_t i = 0; i < code.dimension(); ++i)
            coeffs.set(j, i, std::uint32_t(rng.below(f.modulus())));
    Grid base = expand(TensorCode(code, code), CoefficientForm{std::move(coeffs)});

    PlantedInstance inst{base, base, base, rng.sample_distinct(n, row_lines),
                         rng.sample_distinct(n, col_lines), 0, Rational()};

    Vector row_delta = detail::vanishing_codeword(family, degree, inst.corrupted_cols, rng);
    for (std::int64_t y : inst.corrupted_rows) {
        std::uint32_t scale = std::uint32_t(rng.nonzero_below(f.modulus()));
        std::uint32_t* p = inst.rows_word.row_ptr(y);
        for (std::int64_t x = 0; x < n; ++x)
            p[x] = f.add(p[x], f.mul(scale, row_delta.get(std::size_t(x))));
    }
    Vector col_delta = detail::vanishing_codeword(family, degree, inst.corrupted_rows, rng);
    for (std::int64_t x : inst.corrupted_cols) {
        std::uint32_t scale = std::uint32_t(rng.nonzero_below(f.modulus()));
        for (std::int64_t y = 0; y < n; ++y)
            inst.cols_word.set(x, y,
                               f.add(inst.cols_word.get(x, y),
                                     f.mul(scale, col_delta.get(std::size_t(y)))));
    }
    inst.disagreements = grid_disagreements(inst.rows_word, inst.cols_word);
    inst.epsilon = Rational(inst.disagreements, n * n);
    return inst;
}

/// The single-word view of a planted pair: base + both line corruptions
/// (cellwise rows_word + cols_word - base) plus a uniform sprinkle.
struct NoisyWord {
    Grid word;
    std::vector<Cell> sprinkled;
    std::int64_t line_noise = 0;  // cells differing from the base before the sprinkle
};

inline NoisyWord make_noisy_word(const PlantedInstance& inst, const Rational& sprinkle,
                                 std::uint64_t seed) {
    const PrimeField& f = inst.base.field();
    Grid combined(f, inst.base.width(), inst.base.height());
    std::int64_t line_noise = 0;
    for (std::int64_t y = 0; y < inst.base.height(); ++y) {
        const std::uint32_t* pb = inst.base.row_ptr(y);
        const std::uint32_t* pr = inst.rows_word.row_ptr(y);
        const std::uint32_t* pc = inst.cols_word.row_ptr(y);
        std::uint32_t* po = combined.row_ptr(y);
        for (std::int64_t x = 0; x < inst.base.width(); ++x) {
            po[x] = f.add(pr[x], f.sub(pc[x], pb[x]));
            line_noise += (po[x] != pb[x]);
        }
    }
    CorruptionResult sprinkled = corrupt(combined, sprinkle, CorruptionModel::UniformCells, seed);
    return NoisyWord{std::move(sprinkled.grid), std::move(sprinkled.cells), line_noise};
}

/// One decode trial as written to the sweep CSV.
struct DecodeTrialRecord {
    std::int64_t trial = 0;
    std::uint64_t seed = 0;
    std::int64_t disagreements = 0;
    Rational epsilon;
    bool completed = false;
    bool certified = false;
    bool bound_holds = false;
    std::int64_t dist_rows = 0;
    std::int64_t dist_cols = 0;
    Rational delta_sum;
    Rational bound;
    std::int64_t millis = 0;
};

/// One robustness trial as written to the sweep CSV.  `note` carries the
/// report's caveats (projection provenance, branch remarks) and is surfaced
/// in logs, not in the CSV.
struct RobustTrialRecord {
    std::int64_t trial = 0;
    std::uint64_t seed = 0;
    std::string branch;
    Rational row_delta, col_delta, pair_epsilon, tensor_bound, lhs, rhs;
    bool pass = false;
    std::string note;
    std::int64_t millis = 0;
};

inline void write_decode_csv_header(std::ostream& out) {
    out << "trial,seed,field,length,degree,genus,model,disagreements,epsilon,"
           "epsilon_decimal,dist_rows,dist_cols,delta_sum,bound,completed,certified,"
           "bound_holds,millis\n";
}

inline void write_decode_csv_row(std::ostream& out, const ExperimentConfig& cfg,
                                 std::int64_t length, const DecodeTrialRecord& rec) {
    out << rec.trial << ',' << rec.seed << ',' << cfg.family.modulus << ',' << length << ','
        << cfg.degree << ',' << cfg.family.genus() << ',' << cfg.model << ','
        << rec.disagreements << ',' << rec.epsilon.str() << ',' << rec.epsilon.decimal_str(9)
        << ',' << rec.dist_rows << ',' << rec.dist_cols << ',' << rec.delta_sum.str() << ','
        << rec.bound.str() << ',' << int(rec.completed) << ',' << int(rec.certified) << ','
        << int(rec.bound_holds) << ',' << rec.millis << '\n';
}

inline void write_robust_csv_header(std::ostream& out) {
    out << "trial,seed,field,length,degree,genus,model,branch,row_delta,col_delta,"
           "pair_epsilon,tensor_bound,tensor_bound_decimal,lhs,rhs,pass,millis\n";
}

inline void write_robust_csv_row(std::ostream& out, const ExperimentConfig& cfg,
                                 std::int64_t length, const RobustTrialRecord& rec) {
    out << rec.trial << ',' << rec.seed << ',' << cfg.family.modulus << ',' << length << ','
        << cfg.degree << ',' << cfg.family.genus() << ',' << cfg.model << ',' << rec.branch
        << ',' << rec.row_delta.str() << ',' << rec.col_delta.str() << ','
        << rec.pair_epsilon.str() << ',' << rec.tensor_bound.str() << ','
        << rec.tensor_bound.decimal_str(9) << ',' << rec.lhs.str() << ',' << rec.rhs.str()
        << ',' << int(rec.pass) << ',' << rec.millis << '\n';
}

namespace detail {

inline std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace detail

struct SweepOutcome {
    std::vector<DecodeTrialRecord> decode_records;
    std::vector<RobustTrialRecord> robust_records;
    std::int64_t failures = 0;  // trials that did not pass their check
};

/// Runs the configured trials.  planted-lines corrupts a random codeword
/// along sampled lines and decodes the resulting pair (adding a robustness
/// trial on the single-word view when sprinkle > 0); the cell-level models
/// corrupt a random codeword directly and run the robustness check with
/// exhaustive projections, which is only feasible at small parameters.
inline SweepOutcome run_sweep(const ExperimentConfig& cfg, std::ostream* decode_csv,
                              std::ostream* robust_csv) {
    cfg.validate();
    AGFamily family = cfg.family.build();
    const std::int64_t n = family.length();
    const DecodeMode mode = decode_mode_from_string(cfg.mode);
    SweepOutcome outcome;
    if (decode_csv) write_decode_csv_header(*decode_csv);
    if (robust_csv) write_robust_csv_header(*robust_csv);

    for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(cfg.seed, std::uint64_t(trial));
        if (cfg.model == "planted-lines") {
            auto start = std::chrono::steady_clock::now();
            PlantedInstance inst = make_planted(family, cfg.degree, cfg.planted_rows,
                                                cfg.planted_cols, trial_seed);
            DecodeResult res = decode(family, cfg.degree, inst.rows_word, inst.cols_word,
                                      mode, derive_seed(trial_seed, 1));
            DecodeTrialRecord rec;
            rec.trial = trial;
            rec.seed = trial_seed;
            rec.disagreements = res.disagreements;
            rec.epsilon = res.epsilon;
            rec.completed = res.completed;
            rec.certified = res.certified;
            rec.bound_holds = res.bound_holds;
            rec.dist_rows = res.accounting.dist_rows();
            rec.dist_cols = res.accounting.dist_cols();
            rec.delta_sum = res.delta_rows + res.delta_cols;
            rec.bound = Rational(2) * res.epsilon;
            rec.millis = detail::elapsed_ms(start);
            if (!rec.bound_holds) ++outcome.failures;
            if (decode_csv) write_decode_csv_row(*decode_csv, cfg, n, rec);
            outcome.decode_records.push_back(std::move(rec));

            if (cfg.sprinkle.sign() > 0) {
                auto rstart = std::chrono::steady_clock::now();
                NoisyWord noisy =
                    make_noisy_word(inst, cfg.sprinkle, derive_seed(trial_seed, 2));
                RobustnessReport rep = robust_test(
                    family, cfg.degree, noisy.word,
                    ProjectionMode{ReferenceProjection{&inst.rows_word}},
                    ProjectionMode{ReferenceProjection{&inst.cols_word}}, mode,
                    derive_seed(trial_seed, 3));
                RobustTrialRecord rrec;
                rrec.trial = trial;
                rrec.seed = trial_seed;
                rrec.branch = to_string(rep.branch);
                rrec.row_delta = rep.row_delta;
                rrec.col_delta = rep.col_delta;
                rrec.pair_epsilon = rep.pair_epsilon;
                rrec.tensor_bound = rep.tensor_bound;
                rrec.lhs = rep.lhs;
                rrec.rhs = rep.rhs;
                rrec.pass = rep.pass;
                rrec.note = rep.note;
                rrec.millis = detail::elapsed_ms(rstart);
                if (!rrec.pass) ++outcome.failures;
                if (robust_csv) write_robust_csv_row(*robust_csv, cfg, n, rrec);
                outcome.robust_records.push_back(std::move(rrec));
            }
        } else {
            auto start = std::chrono::steady_clock::now();
            const LinearCode& code = family.member(cfg.degree);
            Rng rng(trial_seed);
            Matrix coeffs(family.field(), code.dimension(), code.dimension());
            for (std::size_t j = 0; j < code.dimension(); ++j)
                for (std::size_t i = 0; i < code.dimension(); ++i)
                    coeffs.set(j, i, std::uint32_t(rng.below(family.field().modulus())));
            Grid base = expand(TensorCode(code, code), CoefficientForm{std::move(coeffs)});
            CorruptionModel model = cfg.model == "uniform" ? CorruptionModel::UniformCells
                                    : cfg.model == "row-burst" ? CorruptionModel::RowBurst
                                                               : CorruptionModel::ColBurst;
            CorruptionResult corrupted =
                corrupt(base, cfg.epsilon, model, derive_seed(trial_seed, 1));
            RobustnessReport rep =
                robust_test(family, cfg.degree, corrupted.grid,
                            ProjectionMode{ExhaustiveProjection{}},
                            ProjectionMode{ExhaustiveProjection{}}, mode,
                            derive_seed(trial_seed, 2));
            RobustTrialRecord rrec;
            rrec.trial = trial;
            rrec.seed = trial_seed;
            rrec.branch = to_string(rep.branch);
            rrec.row_delta = rep.row_delta;
            rrec.col_delta = rep.col_delta;
            rrec.pair_epsilon = rep.pair_epsilon;
            rrec.tensor_bound = rep.tensor_bound;
            rrec.lhs = rep.lhs;
            rrec.rhs = rep.rhs;
            rrec.pass = rep.pass;
            rrec.note = rep.note;
            rrec.millis = detail::elapsed_ms(start);
            if (!rrec.pass) ++outcome.failures;
            if (robust_csv) write_robust_csv_row(*robust_csv, cfg, n, rrec);
            outcome.robust_records.push_back(std::move(rrec));
        }
    }
    return outcome;
}

}  // namespace agtensor
