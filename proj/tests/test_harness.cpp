#include <catch2/catch_amalgamated.hpp>

#include <agtensor/experiment.hpp>
#include <agtensor/serialize.hpp>

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace agtensor;
using Catch::Matchers::ContainsSubstring;

namespace {

ExperimentConfig planted_config() {
    ExperimentConfig cfg;
    cfg.family.kind = "rs";
    cfg.family.modulus = 97;
    cfg.family.points = 0;
    cfg.degree = 8;
    cfg.epsilon = Rational(564, 9409);
    cfg.model = "planted-lines";
    cfg.planted_rows = 3;
    cfg.planted_cols = 3;
    cfg.sprinkle = Rational(1, 1000);
    cfg.trials = 2;
    cfg.seed = 42;
    cfg.mode = "best-effort";
    return cfg;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

/// Drops the trailing wall-clock column from every CSV line so byte
/// comparisons only see the deterministic fields.
std::string strip_timing_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::size_t cut = line.rfind(',');
        out += line.substr(0, cut);
        out += '\n';
    }
    return out;
}

}  // namespace

TEST_CASE("experiment configs serialize canonically and round-trip") {
    ExperimentConfig cfg = planted_config();
    const std::string expected =
        "schema = agtensor.config.v1\n"
        "family.kind = rs\n"
        "family.modulus = 97\n"
        "family.points = 0\n"
        "degree = 8\n"
        "epsilon = 564/9409\n"
        "model = planted-lines\n"
        "planted.rows = 3\n"
        "planted.cols = 3\n"
        "sprinkle = 1/1000\n"
        "trials = 2\n"
        "seed = 42\n"
        "mode = best-effort\n";
    REQUIRE(cfg.serialize() == expected);

    ExperimentConfig back = ExperimentConfig::parse(cfg.serialize());
    REQUIRE(back.serialize() == expected);
    REQUIRE(back.digest() == cfg.digest());
    REQUIRE(cfg.digest().size() == 16);
    REQUIRE(cfg.digest().find_first_not_of("0123456789abcdef") == std::string::npos);

    // Comments and blank lines are cosmetic.
    ExperimentConfig commented =
        ExperimentConfig::parse("# sweep description\n\n" + cfg.serialize());
    REQUIRE(commented.serialize() == expected);

    // Any field change shows up in the digest.
    ExperimentConfig other = cfg;
    other.seed = 43;
    REQUIRE(other.digest() != cfg.digest());

    // Elliptic configs carry the curve; non-planted models drop the line keys.
    ExperimentConfig ell;
    ell.family.kind = "elliptic";
    ell.family.modulus = 5;
    ell.family.curve_b = 1;
    ell.degree = 2;
    ell.model = "uniform";
    ell.epsilon = Rational(1, 25);
    ell.mode = "best-effort";
    const std::string ell_text = ell.serialize();
    REQUIRE_THAT(ell_text, ContainsSubstring("family.curve_a = 0\n"));
    REQUIRE_THAT(ell_text, ContainsSubstring("family.curve_b = 1\n"));
    REQUIRE(ell_text.find("planted.") == std::string::npos);
    REQUIRE(ExperimentConfig::parse(ell_text).serialize() == ell_text);
}

TEST_CASE("experiment config parsing rejects malformed input") {
    ExperimentConfig cfg = planted_config();
    REQUIRE_THROWS_WITH(ExperimentConfig::parse(cfg.serialize() + "extra = 1\n"),
                        ContainsSubstring("unknown key"));
    REQUIRE_THROWS_WITH(ExperimentConfig::parse("family.kind = rs\n"),
                        ContainsSubstring("missing schema"));
    REQUIRE_THROWS_WITH(ExperimentConfig::parse("schema = agtensor.config.v2\n"),
                        ContainsSubstring("unsupported schema"));

    auto broken = [&](auto&& mutate) {
        ExperimentConfig c = planted_config();
        mutate(c);
        return c;
    };
    REQUIRE_THROWS_WITH(broken([](auto& c) { c.family.kind = "hermitian"; }).validate(),
                        ContainsSubstring("family.kind"));
    REQUIRE_THROWS_WITH(broken([](auto& c) { c.family.modulus = 1; }).validate(),
                        ContainsSubstring("bad modulus"));
    REQUIRE_THROWS_WITH(broken([](auto& c) { c.model = "gaussian"; }).validate(),
                        ContainsSubstring("unknown model"));
    REQUIRE_THROWS_WITH(broken([](auto& c) { c.planted_rows = 0; }).validate(),
                        ContainsSubstring("planted.rows"));
    REQUIRE_THROWS_WITH(broken([](auto& c) { c.epsilon = Rational(2); }).validate(),
                        ContainsSubstring("epsilon"));
    REQUIRE_THROWS_WITH(broken([](auto& c) { c.sprinkle = Rational(-1, 2); }).validate(),
                        ContainsSubstring("sprinkle"));
    REQUIRE_THROWS_WITH(broken([](auto& c) { c.trials = 0; }).validate(),
                        ContainsSubstring("trials"));
    REQUIRE_THROWS_WITH(broken([](auto& c) { c.mode = "fast"; }).validate(),
                        ContainsSubstring("mode"));
}

TEST_CASE("family specs build the advertised point sets") {
    FamilySpec rs{"rs", 13, 0, 0, 0};
    REQUIRE(rs.build().length() == 13);
    FamilySpec rs_part{"rs", 13, 9, 0, 0};
    REQUIRE(rs_part.build().length() == 9);
    FamilySpec rs_bad{"rs", 13, 14, 0, 0};
    REQUIRE_THROWS_AS(rs_bad.build(), std::invalid_argument);
    FamilySpec unknown{"goppa", 13, 0, 0, 0};
    REQUIRE_THROWS_AS(unknown.build(), std::invalid_argument);

    FamilySpec ell{"elliptic", 5, 0, 0, 1};
    AGFamily fam = ell.build();
    REQUIRE(fam.genus() == 1);
    REQUIRE(fam.length() == 5);  // y^2 = x^3 + 1 has five affine points over GF(5)
}

TEST_CASE("planted instances corrupt exactly the promised lines") {
    AGFamily fam = planted_config().family.build();
    PlantedInstance inst = make_planted(fam, 8, 3, 3, 20240817);

    REQUIRE(inst.corrupted_rows.size() == 3);
    REQUIRE(inst.corrupted_cols.size() == 3);
    // Each corrupted line disagrees on all positions except the three
    // crossings, where both deltas vanish by construction: 2 * 3 * 94.
    REQUIRE(inst.disagreements == 564);
    REQUIRE(inst.epsilon == Rational(564, 9409));

    const LinearCode& member = fam.member(8);
    for (std::int64_t y = 0; y < 97; ++y) {
        REQUIRE(member.contains(inst.rows_word.row_copy(y)));
        REQUIRE(member.contains(inst.cols_word.col_copy(y)));
    }
    for (std::int64_t y : inst.corrupted_rows)
        for (std::int64_t x : inst.corrupted_cols)
            REQUIRE(inst.rows_word.get(x, y) == inst.cols_word.get(x, y));

    // The row word touches only the corrupted rows, each in exactly 94 cells.
    std::int64_t touched_rows = 0;
    for (std::int64_t y = 0; y < 97; ++y) {
        std::int64_t diff = 0;
        for (std::int64_t x = 0; x < 97; ++x)
            diff += inst.rows_word.get(x, y) != inst.base.get(x, y);
        if (diff) {
            ++touched_rows;
            REQUIRE(diff == 94);
        }
    }
    REQUIRE(touched_rows == 3);

    REQUIRE_THROWS_AS(make_planted(fam, 8, 0, 3, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_planted(fam, 8, 3, 98, 1), std::invalid_argument);
    // The monomial family cannot vanish on more coordinates than its degree.
    REQUIRE_THROWS_WITH(make_planted(fam, 2, 3, 3, 1),
                        ContainsSubstring("more forced roots"));
}

TEST_CASE("noisy words combine line corruption with a uniform sprinkle") {
    AGFamily fam = AGFamily::rs_full(PrimeField(29));
    PlantedInstance inst = make_planted(fam, 8, 2, 2, 3);
    REQUIRE(inst.disagreements == 108);

    NoisyWord plain = make_noisy_word(inst, Rational(0), 9);
    REQUIRE(plain.sprinkled.empty());
    REQUIRE(plain.line_noise == 108);  // crossings cancel in the combined view
    REQUIRE(grid_disagreements(plain.word, inst.base) == 108);

    NoisyWord noisy = make_noisy_word(inst, Rational(1, 100), 9);
    REQUIRE(noisy.line_noise == 108);
    REQUIRE(noisy.sprinkled.size() == 8);  // floor(841 / 100)
    REQUIRE(grid_disagreements(noisy.word, plain.word) == 8);
    for (const Cell& c : noisy.sprinkled)
        REQUIRE(noisy.word.get(c.x, c.y) != plain.word.get(c.x, c.y));

    NoisyWord replay = make_noisy_word(inst, Rational(1, 100), 9);
    REQUIRE(replay.word == noisy.word);
}

TEST_CASE("planted sweeps produce frozen records and deterministic CSV") {
    ExperimentConfig cfg;
    cfg.family.kind = "rs";
    cfg.family.modulus = 29;
    cfg.degree = 8;
    cfg.model = "planted-lines";
    cfg.planted_rows = 2;
    cfg.planted_cols = 2;
    cfg.sprinkle = Rational(1, 100);
    cfg.trials = 2;
    cfg.seed = 7;
    cfg.mode = "best-effort";

    std::ostringstream decode_csv, robust_csv;
    SweepOutcome out = run_sweep(cfg, &decode_csv, &robust_csv);
    REQUIRE(out.failures == 0);
    REQUIRE(out.decode_records.size() == 2);
    REQUIRE(out.robust_records.size() == 2);

    for (std::size_t t = 0; t < 2; ++t) {
        const DecodeTrialRecord& rec = out.decode_records[t];
        REQUIRE(rec.trial == std::int64_t(t));
        REQUIRE(rec.seed == derive_seed(7, t));
        // Whatever lines the trial seed picks, two planted rows and columns
        // over length 29 disagree on exactly 2 * 2 * 27 cells, and the
        // decoder recovers the base word outright.
        REQUIRE(rec.disagreements == 108);
        REQUIRE(rec.epsilon == Rational(108, 841));
        REQUIRE(rec.completed);
        REQUIRE_FALSE(rec.certified);  // toy scale never certifies
        REQUIRE(rec.bound_holds);
        REQUIRE(rec.dist_rows == 54);
        REQUIRE(rec.dist_cols == 54);
        REQUIRE(rec.delta_sum == Rational(108, 841));
        REQUIRE(rec.bound == Rational(216, 841));

        const RobustTrialRecord& rrec = out.robust_records[t];
        REQUIRE(rrec.branch == "trivial");  // pair disagreement far above the regime
        REQUIRE(rrec.pair_epsilon == Rational(108, 841));
        REQUIRE(rrec.tensor_bound == Rational(1));
        REQUIRE(rrec.lhs == Rational(1, 200));
        REQUIRE(rrec.pass);
    }

    const std::string decode_text = decode_csv.str();
    const std::string robust_text = robust_csv.str();
    REQUIRE(split(decode_text, '\n')[0] ==
            "trial,seed,field,length,degree,genus,model,disagreements,epsilon,"
            "epsilon_decimal,dist_rows,dist_cols,delta_sum,bound,completed,certified,"
            "bound_holds,millis");
    REQUIRE(split(robust_text, '\n')[0] ==
            "trial,seed,field,length,degree,genus,model,branch,row_delta,col_delta,"
            "pair_epsilon,tensor_bound,tensor_bound_decimal,lhs,rhs,pass,millis");

    std::vector<std::string> fields = split(split(decode_text, '\n')[1], ',');
    REQUIRE(fields.size() == 18);
    REQUIRE(fields[0] == "0");
    REQUIRE(fields[1] == std::to_string(derive_seed(7, 0)));
    REQUIRE(fields[2] == "29");
    REQUIRE(fields[3] == "29");
    REQUIRE(fields[4] == "8");
    REQUIRE(fields[5] == "0");
    REQUIRE(fields[6] == "planted-lines");
    REQUIRE(fields[7] == "108");
    REQUIRE(fields[8] == "108/841");
    REQUIRE(fields[10] == "54");
    REQUIRE(fields[11] == "54");
    REQUIRE(fields[12] == "108/841");
    REQUIRE(fields[13] == "216/841");
    REQUIRE(fields[14] == "1");
    REQUIRE(fields[15] == "0");
    REQUIRE(fields[16] == "1");

    // Everything except wall-clock timing reruns byte for byte.
    std::ostringstream decode_again, robust_again;
    run_sweep(cfg, &decode_again, &robust_again);
    REQUIRE(strip_timing_column(decode_again.str()) == strip_timing_column(decode_text));
    REQUIRE(strip_timing_column(robust_again.str()) == strip_timing_column(robust_text));
}

TEST_CASE("cell-model sweeps settle single-cell noise by enumeration") {
    ExperimentConfig cfg;
    cfg.family.kind = "rs";
    cfg.family.modulus = 5;
    cfg.degree = 1;
    cfg.model = "uniform";
    cfg.epsilon = Rational(1, 25);  // exactly one corrupted cell
    cfg.trials = 3;
    cfg.seed = 11;
    cfg.mode = "best-effort";

    std::ostringstream robust_csv;
    SweepOutcome out = run_sweep(cfg, nullptr, &robust_csv);
    REQUIRE(out.failures == 0);
    REQUIRE(out.decode_records.empty());
    REQUIRE(out.robust_records.size() == 3);
    for (const RobustTrialRecord& rec : out.robust_records) {
        // A single cell projects back to the codeword on both sides, so the
        // pair is clean and exhaustive enumeration gives the exact distance.
        REQUIRE(rec.branch == "enumeration");
        REQUIRE(rec.pair_epsilon.is_zero());
        REQUIRE(rec.row_delta == Rational(1, 25));
        REQUIRE(rec.col_delta == Rational(1, 25));
        REQUIRE(rec.tensor_bound == Rational(1, 25));
        REQUIRE(rec.lhs == Rational(1, 5000));
        REQUIRE(rec.rhs == Rational(1, 25));
        REQUIRE(rec.pass);
    }
    // Header plus one row per trial.
    REQUIRE(split(robust_csv.str(), '\n').size() == 5);  // includes trailing empty piece
}

TEST_CASE("burst sweeps keep the clean axis pinned at its exact distance") {
    ExperimentConfig cfg;
    cfg.family.kind = "rs";
    cfg.family.modulus = 5;
    cfg.degree = 1;
    cfg.model = "row-burst";
    cfg.epsilon = Rational(1, 5);  // one full row
    cfg.trials = 2;
    cfg.seed = 13;
    cfg.mode = "best-effort";

    SweepOutcome out = run_sweep(cfg, nullptr, nullptr);
    REQUIRE(out.failures == 0);
    REQUIRE(out.robust_records.size() == 2);
    for (const RobustTrialRecord& rec : out.robust_records) {
        // Each column sees exactly one error, below half the distance, so the
        // column projection is exact; the burst row may or may not snap to a
        // different row codeword, steering the branch.
        REQUIRE(rec.col_delta == Rational(1, 5));
        REQUIRE((rec.branch == "trivial" || rec.branch == "enumeration"));
        REQUIRE(rec.pass);
    }

    cfg.model = "col-burst";
    SweepOutcome swapped = run_sweep(cfg, nullptr, nullptr);
    REQUIRE(swapped.failures == 0);
    for (const RobustTrialRecord& rec : swapped.robust_records) {
        REQUIRE(rec.row_delta == Rational(1, 5));
        REQUIRE(rec.pass);
    }
}

TEST_CASE("grid and matrix files round-trip through the text format") {
    PrimeField f(7);
    Rng rng(23);
    Grid grid(f, 4, 3);
    for (std::int64_t y = 0; y < 3; ++y)
        for (std::int64_t x = 0; x < 4; ++x) grid.set(x, y, std::uint32_t(rng.below(7)));

    std::ostringstream out;
    write_grid(out, grid);
    const std::string text = out.str();
    REQUIRE(text.rfind("grid 7 4 3\n", 0) == 0);
    std::istringstream in("# comment line\n\n" + text);
    REQUIRE(read_grid(in) == grid);

    Matrix m(f, 2, 3);
    m.set(0, 0, 1);
    m.set(1, 2, 6);
    std::ostringstream mo;
    write_matrix(mo, m);
    REQUIRE(mo.str() == "matrix 7 2 3\n1 0 0\n0 0 6\n");
    std::istringstream mi(mo.str());
    Matrix back = read_matrix(mi);
    REQUIRE(back.rows() == 2);
    REQUIRE(back.cols() == 3);
    REQUIRE(back.get(1, 2) == 6);

    std::istringstream bad_header("grib 7 4 3\n");
    REQUIRE_THROWS_WITH(read_grid(bad_header), ContainsSubstring("malformed header"));
    std::istringstream truncated("grid 7 4 3\n1 2 3 4\n");
    REQUIRE_THROWS_WITH(read_grid(truncated), ContainsSubstring("unexpected end"));
    std::istringstream short_row("grid 7 2 2\n1\n2 3\n");
    REQUIRE_THROWS_WITH(read_grid(short_row), ContainsSubstring("expected 2 fields"));
    std::istringstream out_of_range("grid 7 2 1\n1 9\n");
    REQUIRE_THROWS_WITH(read_grid(out_of_range), ContainsSubstring("out of field range"));
}

TEST_CASE("cell lists round-trip through the text format") {
    std::vector<Cell> cells{{0, 1}, {3, 2}};
    std::ostringstream out;
    write_cells(out, cells);
    REQUIRE(out.str() == "cells 2\n0 1\n3 2\n");
    std::istringstream in(out.str());
    REQUIRE(read_cells(in) == cells);
    std::istringstream bad("cells -1\n");
    REQUIRE_THROWS_WITH(read_cells(bad), ContainsSubstring("malformed header"));
}

TEST_CASE("key-value text parses forgivingly and serializes canonically") {
    std::istringstream in("  alpha = 1 \n# note\n\nbeta = a = b\n");
    KvPairs kv = parse_kv(in);
    REQUIRE(kv.size() == 2);
    REQUIRE(kv[0] == std::pair<std::string, std::string>("alpha", "1"));
    REQUIRE(kv[1] == std::pair<std::string, std::string>("beta", "a = b"));
    REQUIRE(serialize_kv(kv) == "alpha = 1\nbeta = a = b\n");

    std::istringstream no_eq("just words\n");
    REQUIRE_THROWS_WITH(parse_kv(no_eq), ContainsSubstring("no '='"));
    std::istringstream no_key("= value\n");
    REQUIRE_THROWS_WITH(parse_kv(no_key), ContainsSubstring("empty key"));
}

TEST_CASE("content digests match the reference hash") {
    // Reference values computed independently from the FNV-1a definition.
    REQUIRE(digest_hex("") == "cbf29ce484222325");
    REQUIRE(digest_hex("a") == "af63dc4c8601ec8c");
    REQUIRE(digest_hex("abc") == "e71fa2190541574b");
}
